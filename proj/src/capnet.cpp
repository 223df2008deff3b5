#include "capplan/capnet.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "capplan/errors.hpp"
#include "capplan/io.hpp"

namespace capplan {

namespace {

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fixed3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

// Money with at most six decimals, trailing zeros dropped.
std::string money_text(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    std::string s = buf;
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s == "-0" ? "0" : s;
}

std::string fleet_text(const FleetMix& f) {
    std::string s = "(";
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(f[i]);
    }
    return s + ")";
}

}  // namespace

CapabilityEvolutionNetwork build_network(const Hierarchy& hierarchy, const FleetMix& origin_fleet,
                                         std::span<const double> origin_scores, double theta2,
                                         const Model& model, std::vector<std::string> scenarios) {
    if (hierarchy.levels.empty()) throw std::invalid_argument("build_network needs a non-empty hierarchy");
    CapabilityEvolutionNetwork net;
    net.scenarios = std::move(scenarios);
    net.origin = 0;

    std::set<FleetMix> seen;
    CapabilityNode origin;
    origin.id = 0;
    origin.fleet = origin_fleet;
    origin.acquisition_cost = fleet_cost(origin_fleet, model.vehicles);
    origin.scores.assign(origin_scores.begin(), origin_scores.end());
    seen.insert(origin_fleet);
    net.nodes.push_back(std::move(origin));

    for (const auto& level : hierarchy.levels) {
        for (const auto& ceil : level.ceils) {
            if (!seen.insert(ceil.fleet).second) continue;
            CapabilityNode node;
            node.id = net.nodes.size();
            node.fleet = ceil.fleet;
            node.acquisition_cost = fleet_cost(ceil.fleet, model.vehicles);
            node.scores = ceil.scores;
            node.level = ceil.level;
            net.nodes.push_back(std::move(node));
        }
    }

    for (const auto& a : net.nodes) {
        for (const auto& b : net.nodes) {
            if (a.id == b.id || !b.fleet.covers(a.fleet)) continue;
            const double delta = b.acquisition_cost - a.acquisition_cost;
            if (delta <= kMoneyTolerance || delta > theta2 + kMoneyTolerance) continue;
            net.edges.push_back({a.id, b.id, delta, mean(b.scores) <= mean(a.scores)});
        }
    }
    return net;
}

std::vector<std::size_t> topological_order(const CapabilityEvolutionNetwork& network) {
    const std::size_t n = network.nodes.size();
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& e : network.edges) {
        succ[e.from].push_back(e.to);
        ++indegree[e.to];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        const auto u = ready.top();
        ready.pop();
        order.push_back(u);
        for (auto v : succ[u])
            if (--indegree[v] == 0) ready.push(v);
    }
    if (order.size() != n) throw InvariantError("capability network contains a cycle");
    return order;
}

CapabilityEvolutionNetwork transitive_reduction(const CapabilityEvolutionNetwork& network) {
    const std::size_t n = network.nodes.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& e : network.edges) succ[e.from].push_back(e.to);
    const auto order = topological_order(network);

    // reach[u][v]: v is reachable from u by a path of length >= 1
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto u = *it;
        for (auto v : succ[u]) {
            reach[u][v] = 1;
            for (std::size_t w = 0; w < n; ++w)
                if (reach[v][w]) reach[u][w] = 1;
        }
    }
    CapabilityEvolutionNetwork out = network;
    out.edges.clear();
    for (const auto& e : network.edges) {
        bool redundant = false;
        for (auto w : succ[e.from]) {
            if (w != e.to && reach[w][e.to]) {
                redundant = true;
                break;
            }
        }
        if (!redundant) out.edges.push_back(e);
    }
    return out;
}

std::string export_dot(const CapabilityEvolutionNetwork& network, std::string_view header_comment) {
    std::ostringstream os;
    if (!header_comment.empty()) os << "// " << header_comment << "\n";
    os << "digraph capability_network {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=box];\n";
    for (const auto& node : network.nodes) {
        os << "  n" << node.id << " [label=\"";
        os << (node.id == network.origin ? std::string("origin")
                                          : "level " + std::to_string(node.level.value_or(0)));
        os << "\\n" << fleet_text(node.fleet);
        os << "\\ncost " << money_text(node.acquisition_cost);
        for (std::size_t s = 0; s < node.scores.size(); ++s) {
            os << "\\n" << (s < network.scenarios.size() ? network.scenarios[s] : std::to_string(s)) << " "
               << fixed3(node.scores[s]);
        }
        os << "\"];\n";
    }
    for (const auto& e : network.edges) {
        os << "  n" << e.from << " -> n" << e.to << " [label=\"" << money_text(e.delta_cost) << "\"";
        if (e.risk_improving) os << ", color=darkgreen";
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

std::string export_json(const CapabilityEvolutionNetwork& network, std::string_view config_hash,
                        std::uint64_t master_seed) {
    nlohmann::ordered_json j;
    j["provenance"] = {{"config_hash", std::string(config_hash)}, {"master_seed", master_seed}};
    j["scenarios"] = network.scenarios;
    j["origin"] = network.origin;
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& node : network.nodes) {
        nlohmann::ordered_json scores = nlohmann::ordered_json::object();
        for (std::size_t s = 0; s < node.scores.size(); ++s)
            scores[s < network.scenarios.size() ? network.scenarios[s] : std::to_string(s)] = node.scores[s];
        nlohmann::ordered_json level = node.level ? nlohmann::ordered_json(*node.level)
                                                  : nlohmann::ordered_json("origin");
        nodes.push_back({{"id", node.id},
                         {"fleet", node.fleet.counts},
                         {"cost", node.acquisition_cost},
                         {"scores", std::move(scores)},
                         {"level", std::move(level)}});
    }
    auto& edges = j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : network.edges)
        edges.push_back({{"from", e.from},
                         {"to", e.to},
                         {"delta_cost", e.delta_cost},
                         {"risk_improving", e.risk_improving}});
    return j.dump(2) + "\n";
}

std::string export_network(const CapabilityEvolutionNetwork& network, std::string_view format) {
    if (format == "dot") return export_dot(network);
    if (format == "json") return export_json(network);
    throw UsageError("unknown network export format '" + std::string(format) + "' (expected dot or json)");
}

}  // namespace capplan
