#include "hvrp/io/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "hvrp/core/errors.hpp"
#include "hvrp/io/instance_json.hpp"

namespace hvrp {

namespace {

struct Line {
    int number = 0;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        std::string_view raw = text.substr(pos, end - pos);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            std::size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
            if (j > i) line.tokens.emplace_back(raw.substr(i, j - i));
            i = j;
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (end == text.size()) break;
        pos = end + 1;
    }
    return lines;
}

double to_double(const std::string& token, int line) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ParseError("expected a number, got '" + token + "'", line);
    return value;
}

int to_int(const std::string& token, int line) {
    const double v = to_double(token, line);
    if (v != static_cast<double>(static_cast<long long>(v)))
        throw ParseError("expected an integer, got '" + token + "'", line);
    return static_cast<int>(v);
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

}  // namespace

Instance parse_cordeau(std::string_view text, std::string name) {
    const auto lines = tokenize(text);
    if (lines.empty()) throw ParseError("empty Cordeau file", 0);
    const Line& head = lines[0];
    if (head.tokens.size() < 4) throw ParseError("header must read 'type m n t'", head.number);
    const int type = to_int(head.tokens[0], head.number);
    const int n = to_int(head.tokens[2], head.number);
    const int t = to_int(head.tokens[3], head.number);
    if (type != 2 && type != 0)
        throw UnsupportedFormat("Cordeau problem type " + std::to_string(type) + " is not MDVRP/VRP");
    if (n < 1 || t < 1) throw ParseError("header needs n >= 1 and t >= 1", head.number);
    if (lines.size() < static_cast<std::size_t>(1 + t + n + t))
        throw ParseError("file ends before all depot and customer rows", lines.back().number);

    double duration = -1.0;
    double capacity = -1.0;
    for (int k = 0; k < t; ++k) {
        const Line& l = lines[static_cast<std::size_t>(1 + k)];
        if (l.tokens.size() < 2) throw ParseError("depot limit line must read 'D Q'", l.number);
        const double D = to_double(l.tokens[0], l.number);
        const double Q = to_double(l.tokens[1], l.number);
        if (k == 0) {
            duration = D;
            capacity = Q;
        } else if (D != duration || Q != capacity) {
            throw UnsupportedFormat("heterogeneous depot limits are not supported");
        }
    }

    std::vector<Node> nodes(static_cast<std::size_t>(t + n));
    for (int k = 0; k < n; ++k) {
        const Line& l = lines[static_cast<std::size_t>(1 + t + k)];
        if (l.tokens.size() < 5) throw ParseError("customer row needs 'i x y d q'", l.number);
        Node& node = nodes[static_cast<std::size_t>(t + k)];
        node.kind = NodeKind::customer;
        node.x = to_double(l.tokens[1], l.number);
        node.y = to_double(l.tokens[2], l.number);
        node.service_time = to_double(l.tokens[3], l.number);
        node.demand = to_double(l.tokens[4], l.number);
    }
    for (int k = 0; k < t; ++k) {
        const Line& l = lines[static_cast<std::size_t>(1 + t + n + k)];
        if (l.tokens.size() < 3) throw ParseError("depot row needs 'i x y'", l.number);
        Node& node = nodes[static_cast<std::size_t>(k)];
        node.kind = NodeKind::depot;
        node.x = to_double(l.tokens[1], l.number);
        node.y = to_double(l.tokens[2], l.number);
    }

    VariantFlags v;
    v.multi_depot = type == 2 || t > 1;
    v.duration_limit = duration > 0.0;
    return Instance(std::move(name), std::move(nodes), t, capacity, v, v.duration_limit ? duration : 0.0);
}

Instance parse_tsplib_like(std::string_view text) {
    const auto lines = tokenize(text);
    std::map<std::string, std::string> keywords;
    std::vector<std::pair<int, Point>> coords;
    std::map<int, double> demands;
    std::vector<int> depots;

    enum class Section { none, coords, demand, depot } section = Section::none;
    for (const Line& l : lines) {
        std::string first = upper(l.tokens[0]);
        if (first == "EOF") break;
        if (first == "NODE_COORD_SECTION") { section = Section::coords; continue; }
        if (first == "DEMAND_SECTION") { section = Section::demand; continue; }
        if (first == "DEPOT_SECTION") { section = Section::depot; continue; }
        if (first.ends_with("_SECTION"))
            throw UnsupportedFormat("unsupported section " + l.tokens[0]);

        // "KEY : VALUE" / "KEY: VALUE" / "KEY :VALUE"
        std::string joined;
        for (const auto& tok : l.tokens) joined += (joined.empty() ? "" : " ") + tok;
        const auto colon = joined.find(':');
        if (colon != std::string::npos && !std::isdigit(static_cast<unsigned char>(joined[0])) &&
            joined[0] != '-') {
            std::string key = joined.substr(0, colon);
            std::string value = joined.substr(colon + 1);
            auto trim = [](std::string& s) {
                while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
                while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            };
            trim(key);
            trim(value);
            keywords[upper(key)] = value;
            section = Section::none;
            continue;
        }

        switch (section) {
            case Section::coords:
                if (l.tokens.size() < 3) throw ParseError("coordinate row needs 'id x y'", l.number);
                coords.push_back({to_int(l.tokens[0], l.number),
                                  {to_double(l.tokens[1], l.number), to_double(l.tokens[2], l.number)}});
                break;
            case Section::demand:
                if (l.tokens.size() < 2) throw ParseError("demand row needs 'id demand'", l.number);
                demands[to_int(l.tokens[0], l.number)] = to_double(l.tokens[1], l.number);
                break;
            case Section::depot:
                for (const auto& tok : l.tokens) {
                    const int id = to_int(tok, l.number);
                    if (id == -1) {
                        section = Section::none;
                        break;
                    }
                    depots.push_back(id);
                }
                break;
            case Section::none:
                throw ParseError("unexpected line outside any section", l.number);
        }
    }

    const std::string type = upper(keywords.count("TYPE") ? keywords["TYPE"] : "");
    if (type != "TSP" && type != "CVRP") throw UnsupportedFormat("unsupported TYPE '" + type + "'");
    const std::string ewt = upper(keywords.count("EDGE_WEIGHT_TYPE") ? keywords["EDGE_WEIGHT_TYPE"] : "");
    if (ewt != "EUC_2D") throw UnsupportedFormat("unsupported EDGE_WEIGHT_TYPE '" + ewt + "'");
    if (!keywords.count("DIMENSION")) throw ParseError("missing DIMENSION", 0);
    const int dim = to_int(keywords["DIMENSION"], 0);
    if (static_cast<int>(coords.size()) != dim)
        throw ParseError("NODE_COORD_SECTION has " + std::to_string(coords.size()) + " rows, DIMENSION is " +
                             std::to_string(dim),
                         0);
    const std::string name = keywords.count("NAME") ? keywords["NAME"] : "";

    if (type == "TSP") {
        if (dim < 2) throw ParseError("a TSP needs at least two nodes", 0);
        std::vector<Node> nodes;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            Node node;
            node.kind = i == 0 ? NodeKind::depot : NodeKind::customer;
            node.x = coords[i].second.x;
            node.y = coords[i].second.y;
            nodes.push_back(node);
        }
        VariantFlags v;
        v.tsp_mode = true;
        return Instance(name, std::move(nodes), 1, 0.0, v, 0.0, true);
    }

    if (!keywords.count("CAPACITY")) throw ParseError("CVRP file without CAPACITY", 0);
    const double capacity = to_double(keywords["CAPACITY"], 0);
    if (depots.empty()) depots.push_back(coords.front().first);

    std::vector<Node> nodes;
    auto make = [&](int id, NodeKind kind) {
        auto it = std::find_if(coords.begin(), coords.end(), [&](const auto& c) { return c.first == id; });
        if (it == coords.end()) throw ParseError("unknown node id " + std::to_string(id), 0);
        Node node;
        node.kind = kind;
        node.x = it->second.x;
        node.y = it->second.y;
        if (kind == NodeKind::customer) {
            auto d = demands.find(id);
            if (d == demands.end()) throw ParseError("missing demand for node " + std::to_string(id), 0);
            node.demand = d->second;
        }
        nodes.push_back(node);
    };
    for (int id : depots) make(id, NodeKind::depot);
    for (const auto& c : coords)
        if (std::find(depots.begin(), depots.end(), c.first) == depots.end()) make(c.first, NodeKind::customer);

    VariantFlags v;
    v.multi_depot = depots.size() > 1;
    const bool rounded = name.starts_with("X-");
    return Instance(name, std::move(nodes), static_cast<int>(depots.size()), capacity, v, 0.0, rounded);
}

Instance parse_solomon(std::string_view text) {
    const auto lines = tokenize(text);
    if (lines.empty()) throw ParseError("empty Solomon file", 0);
    const std::string name = lines[0].tokens[0];

    std::size_t i = 1;
    auto find_keyword = [&](const char* key) {
        while (i < lines.size() && upper(lines[i].tokens[0]) != key) ++i;
        if (i == lines.size()) throw ParseError(std::string("missing ") + key + " section", 0);
        ++i;
    };
    find_keyword("VEHICLE");
    // header "NUMBER CAPACITY" then the values
    if (i < lines.size() && upper(lines[i].tokens[0]) == "NUMBER") ++i;
    if (i >= lines.size() || lines[i].tokens.size() < 2)
        throw ParseError("vehicle line must read 'number capacity'", i < lines.size() ? lines[i].number : 0);
    const double capacity = to_double(lines[i].tokens[1], lines[i].number);
    find_keyword("CUSTOMER");
    if (i < lines.size() && upper(lines[i].tokens[0]) == "CUST") ++i;

    std::vector<Node> nodes;
    for (; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tokens.size() != 7) throw ParseError("customer row needs 7 fields", l.number);
        Node node;
        node.kind = nodes.empty() ? NodeKind::depot : NodeKind::customer;
        node.x = to_double(l.tokens[1], l.number);
        node.y = to_double(l.tokens[2], l.number);
        node.demand = to_double(l.tokens[3], l.number);
        node.tw_early = to_double(l.tokens[4], l.number);
        node.tw_late = to_double(l.tokens[5], l.number);
        node.service_time = to_double(l.tokens[6], l.number);
        if (node.kind == NodeKind::depot) {
            node.demand = 0.0;
            node.service_time = 0.0;
        }
        nodes.push_back(node);
    }
    if (nodes.size() < 2) throw ParseError("Solomon file has no customers", 0);
    VariantFlags v;
    v.time_windows = true;
    return Instance(name, std::move(nodes), 1, capacity, v);
}

InstanceFormat detect_format(std::string_view text) {
    std::size_t p = text.find_first_not_of(" \t\r\n");
    if (p != std::string_view::npos && text[p] == '{') return InstanceFormat::json;
    const std::string head = upper(std::string(text.substr(0, 4096)));
    if (head.find("NODE_COORD_SECTION") != std::string::npos || head.find("DIMENSION") != std::string::npos)
        return InstanceFormat::tsplib;
    if (head.find("VEHICLE") != std::string::npos && head.find("CUSTOMER") != std::string::npos)
        return InstanceFormat::solomon;
    return InstanceFormat::cordeau;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Instance load_instance(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    switch (detect_format(text)) {
        case InstanceFormat::json: return instance_from_json(text);
        case InstanceFormat::tsplib: return parse_tsplib_like(text);
        case InstanceFormat::solomon: return parse_solomon(text);
        case InstanceFormat::cordeau: break;
    }
    return parse_cordeau(text, path.stem().string());
}

}  // namespace hvrp
