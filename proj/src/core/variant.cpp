#include "hvrp/core/variant.hpp"

#include <algorithm>
#include <cctype>

#include "hvrp/core/errors.hpp"

namespace hvrp {

void VariantFlags::validate() const {
    if (tsp_mode && (multi_depot || backhaul || duration_limit || open_routes || time_windows))
        throw InvalidInput("tsp_mode cannot be combined with other variant flags");
}

std::string VariantFlags::name() const {
    if (tsp_mode) return "tsp";
    std::string out;
    if (multi_depot) out += "md";
    if (open_routes) out += "o";
    out += "vrp";
    if (backhaul) out += "b";
    if (duration_limit) out += "l";
    if (time_windows) out += "tw";
    if (out == "vrp") return "cvrp";
    if (out == "mdvrp") return "mdvrp";
    return out;
}

VariantFlags VariantFlags::from_name(std::string_view raw) {
    std::string s(raw);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    VariantFlags f;
    if (s == "tsp") {
        f.tsp_mode = true;
        return f;
    }
    if (s == "cvrp") return f;
    std::string_view v = s;
    if (v.starts_with("md")) {
        f.multi_depot = true;
        v.remove_prefix(2);
    }
    if (v.starts_with("o")) {
        f.open_routes = true;
        v.remove_prefix(1);
    }
    if (!v.starts_with("vrp")) throw InvalidInput("unknown variant name '" + std::string(raw) + "'");
    v.remove_prefix(3);
    while (!v.empty()) {
        if (v.starts_with("tw")) {
            if (f.time_windows) break;
            f.time_windows = true;
            v.remove_prefix(2);
        } else if (v.front() == 'b' && !f.backhaul) {
            f.backhaul = true;
            v.remove_prefix(1);
        } else if (v.front() == 'l' && !f.duration_limit) {
            f.duration_limit = true;
            v.remove_prefix(1);
        } else {
            break;
        }
    }
    if (!v.empty()) throw InvalidInput("unknown variant name '" + std::string(raw) + "'");
    return f;
}

}  // namespace hvrp
