#include "hvrp/io/solution_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "hvrp/core/errors.hpp"

namespace hvrp {

void write_solution(std::ostream& out, const Solution& solution, double cost) {
    int k = 0;
    for (const Route& r : solution.routes) {
        if (r.customers.empty()) continue;
        out << "Route #" << ++k << " (depot " << r.depot << "):";
        for (int c : r.customers) out << ' ' << c;
        out << '\n';
    }
    out << "Cost " << std::fixed << std::setprecision(6) << cost << '\n';
}

void write_solution(const std::filesystem::path& path, const Solution& solution, double cost) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    write_solution(out, solution, cost);
}

SolutionFile read_solution(std::istream& in, const Instance* instance) {
    SolutionFile file;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "Cost") {
            double cost = 0.0;
            if (!(ls >> cost)) throw ParseError("malformed Cost line", number);
            file.cost = cost;
            continue;
        }
        if (word != "Route") throw ParseError("expected 'Route' or 'Cost'", number);
        const auto open = line.find("(depot ");
        const auto colon = line.find("):");
        if (open == std::string::npos || colon == std::string::npos || colon < open)
            throw ParseError("route line must read 'Route #k (depot d): ...'", number);
        Route route;
        try {
            route.depot = std::stoi(line.substr(open + 7, colon - open - 7));
        } catch (const std::exception&) {
            throw ParseError("bad depot index", number);
        }
        std::istringstream cs(line.substr(colon + 2));
        std::string tok;
        while (cs >> tok) {
            std::size_t used = 0;
            int c = 0;
            try {
                c = std::stoi(tok, &used);
            } catch (const std::exception&) {
                throw ParseError("bad customer index '" + tok + "'", number);
            }
            if (used != tok.size()) throw ParseError("bad customer index '" + tok + "'", number);
            route.customers.push_back(c);
        }
        if (instance) {
            if (!instance->is_depot(route.depot))
                throw InvalidInput("line " + std::to_string(number) + ": depot index " +
                                   std::to_string(route.depot) + " out of range");
            for (int c : route.customers)
                if (!instance->is_customer(c))
                    throw InvalidInput("line " + std::to_string(number) + ": customer index " +
                                       std::to_string(c) + " out of range");
        }
        file.solution.routes.push_back(std::move(route));
    }
    return file;
}

SolutionFile read_solution(const std::filesystem::path& path, const Instance* instance) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    return read_solution(in, instance);
}

}  // namespace hvrp
