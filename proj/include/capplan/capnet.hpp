#pragma once

// Capability evolution network: fleets from every hierarchy level plus the
// current fleet, joined by affordable componentwise expansions.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capplan/clustering.hpp"
#include "capplan/rptc.hpp"

namespace capplan {

struct CapabilityNode {
    std::size_t id = 0;
    FleetMix fleet;
    double acquisition_cost = 0.0;
    std::vector<double> scores;       // normalized risk per scenario
    std::optional<std::size_t> level; // hierarchy depth; empty for the origin
};

struct CapabilityEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    double delta_cost = 0.0;
    bool risk_improving = false;  // mean score does not increase
};

struct CapabilityEvolutionNetwork {
    std::vector<std::string> scenarios;
    std::vector<CapabilityNode> nodes;
    std::vector<CapabilityEdge> edges;  // sorted by (from, to)
    std::size_t origin = 0;
};

/// Node 0 is the origin; ceils follow in hierarchy order, skipping fleets
/// already present. Edge A->B iff B covers A and 0 < cost(B) - cost(A) <= theta2.
CapabilityEvolutionNetwork build_network(const Hierarchy& hierarchy, const FleetMix& origin_fleet,
                                         std::span<const double> origin_scores, double theta2,
                                         const Model& model, std::vector<std::string> scenarios);

/// Drops every edge A->C for which a longer path A->...->C exists.
CapabilityEvolutionNetwork transitive_reduction(const CapabilityEvolutionNetwork& network);

/// Kahn order of node ids; throws InvariantError on a cycle.
std::vector<std::size_t> topological_order(const CapabilityEvolutionNetwork& network);

std::string export_dot(const CapabilityEvolutionNetwork& network, std::string_view header_comment = {});
std::string export_json(const CapabilityEvolutionNetwork& network, std::string_view config_hash = {},
                        std::uint64_t master_seed = 0);

/// format: "dot" or "json"; anything else throws UsageError.
std::string export_network(const CapabilityEvolutionNetwork& network, std::string_view format);

}  // namespace capplan
