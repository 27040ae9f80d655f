#include "hvrp/io/instance_json.hpp"

#include <json.hpp>

#include "hvrp/core/errors.hpp"

namespace hvrp {

using nlohmann::json;

std::string instance_to_json(const Instance& inst) {
    const VariantFlags& v = inst.variant();
    json doc;
    doc["format"] = "hvrp-instance";
    doc["version"] = kInstanceJsonVersion;
    doc["name"] = inst.name();
    doc["variant"] = {{"multi_depot", v.multi_depot},   {"backhaul", v.backhaul},
                      {"duration_limit", v.duration_limit}, {"open_routes", v.open_routes},
                      {"time_windows", v.time_windows}, {"tsp_mode", v.tsp_mode}};
    doc["num_depots"] = inst.num_depots();
    doc["capacity"] = inst.capacity();
    doc["route_limit"] = inst.route_limit();
    doc["rounded_distances"] = inst.rounded_distances();
    json nodes = json::array();
    for (const Node& n : inst.nodes()) {
        nodes.push_back({{"x", n.x},
                         {"y", n.y},
                         {"demand", n.demand},
                         {"backhaul", n.is_backhaul},
                         {"tw", {n.tw_early, n.tw_late}},
                         {"service", n.service_time}});
    }
    doc["nodes"] = std::move(nodes);
    return doc.dump(1);
}

Instance instance_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid instance JSON: ") + e.what(), 0);
    }
    try {
        if (doc.at("format").get<std::string>() != "hvrp-instance")
            throw ParseError("not an hvrp-instance document", 0);
        const int version = doc.at("version").get<int>();
        if (version != kInstanceJsonVersion)
            throw UnsupportedFormat("instance JSON version " + std::to_string(version) + " is not supported");
        const json& jv = doc.at("variant");
        VariantFlags v;
        v.multi_depot = jv.at("multi_depot").get<bool>();
        v.backhaul = jv.at("backhaul").get<bool>();
        v.duration_limit = jv.at("duration_limit").get<bool>();
        v.open_routes = jv.at("open_routes").get<bool>();
        v.time_windows = jv.at("time_windows").get<bool>();
        v.tsp_mode = jv.at("tsp_mode").get<bool>();
        const int m = doc.at("num_depots").get<int>();
        std::vector<Node> nodes;
        for (const json& jn : doc.at("nodes")) {
            Node n;
            n.kind = static_cast<int>(nodes.size()) < m ? NodeKind::depot : NodeKind::customer;
            n.x = jn.at("x").get<double>();
            n.y = jn.at("y").get<double>();
            n.demand = jn.at("demand").get<double>();
            n.is_backhaul = jn.at("backhaul").get<bool>();
            n.tw_early = jn.at("tw").at(0).get<double>();
            n.tw_late = jn.at("tw").at(1).get<double>();
            n.service_time = jn.at("service").get<double>();
            nodes.push_back(n);
        }
        return Instance(doc.at("name").get<std::string>(), std::move(nodes), m, doc.at("capacity").get<double>(), v,
                        doc.at("route_limit").get<double>(), doc.at("rounded_distances").get<bool>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed instance JSON: ") + e.what(), 0);
    }
}

}  // namespace hvrp
