#pragma once

// Diameter-bounded k-centroid clustering of cost-weighted fleets, cluster
// ceils, and the recursive hierarchy of ceils.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "capplan/rptc.hpp"

namespace capplan {

/// Fleet in cost space: coords[i] = counts[i] * unit_cost[i] ($m).
struct WeightedPoint {
    std::size_t source = 0;
    std::vector<double> coords;
};

WeightedPoint weight_fleet(std::size_t source, const FleetMix& fleet, std::span<const VehicleType> vehicles);

double euclidean(std::span<const double> a, std::span<const double> b);

struct Cluster {
    std::vector<std::size_t> members;  // point sources, ascending
    double diameter = 0.0;             // max pairwise distance ($m)

    bool operator==(const Cluster&) const = default;
};

/// Exact max pairwise distance among the given points.
double diameter_of(std::span<const WeightedPoint> points, std::span<const std::size_t> members);

/// Smallest k (searched upward from 1) for which Lloyd's k-means with
/// farthest-point seeding yields clusters whose diameters are all <= theta.
/// Clusters are ordered by their lowest member source.
std::vector<Cluster> kcentroid_cluster(std::span<const WeightedPoint> points, double theta);

/// Componentwise maximum of the member fleets.
FleetMix cluster_ceil(std::span<const FleetMix> members);

struct Ceil {
    FleetMix fleet;
    std::size_t cluster = 0;  // index into the level's clusters
    std::size_t level = 0;
    double cost = 0.0;
    std::vector<double> scores;  // normalized risk per scenario
};

enum class StopReason { SingleCluster, AllSingletons, Fixpoint, MaxIterations };

std::string to_string(StopReason reason);

enum class Stability {
    CeilSet,       // stop when a level reproduces the previous ceil set
    ClusterCount,  // stop when the cluster count no longer changes
};

struct HierarchyLevel {
    double theta = 0.0;
    std::vector<FleetMix> inputs;
    std::vector<Cluster> clusters;  // members index `inputs`
    std::vector<Ceil> ceils;        // one per cluster
};

struct Hierarchy {
    std::vector<HierarchyLevel> levels;
    StopReason stop_reason = StopReason::AllSingletons;
};

struct HierarchyOptions {
    double theta1 = 500.0;
    double theta2 = 500.0;
    std::size_t max_depth = 50;
    Stability stability = Stability::CeilSet;
};

/// Scores a batch of fleets; returns one normalized score vector per fleet.
using CeilScorer = std::function<std::vector<std::vector<double>>(std::span<const FleetMix>)>;

Hierarchy build_hierarchy(std::span<const FleetMix> points, const HierarchyOptions& options,
                          const Model& model, const CeilScorer& scorer);

}  // namespace capplan
