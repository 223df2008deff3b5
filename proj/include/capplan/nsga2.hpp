#pragma once

// NSGA-II over integer fleet vectors and extraction of the feasible
// non-dominated set of one problem instance.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capplan/random.hpp"
#include "capplan/rptc.hpp"

namespace capplan {

struct MoeaParams {
    std::size_t population_size = 50;
    std::size_t generations = 100;
    double crossover_prob = 0.9;
    std::optional<double> mutation_prob;  // default 1 / number of vehicle types
    double eta_crossover = 20.0;
    double eta_mutation = 20.0;
    std::vector<std::int64_t> upper_bounds;  // empty: derived from the instance
    std::int64_t max_bound = 100000;         // cap on derived bounds
    double lambda = 10.0;

    void validate() const;
};

struct Individual {
    FleetMix genome;
    Objectives objectives{};
    double shortfall_cost = 0.0;
    std::size_t rank = 1;
    double crowding = 0.0;
};

/// A feasible non-dominated fleet and where it came from.
struct NdsEntry {
    FleetMix genome;
    double cost = 0.0;
    double variance = 0.0;
    std::size_t scenario_index = 0;
    std::string scenario_id;
    std::size_t instance_id = 0;
    std::vector<double> scores;  // normalized risk per scenario, filled by scoring

    bool operator==(const NdsEntry&) const = default;
};

/// Deb's fast non-dominated sort. Fronts list indices in increasing order.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Objectives> points);

/// Crowding distance of each member of one front (same order as the input).
std::vector<double> crowding_distance(std::span<const Objectives> front);

/// Per vehicle type: max over carried resources of ceil(total demand / capacity),
/// capped at max_bound and never below 1.
std::vector<std::int64_t> genome_bounds(const ProblemInstance& instance, const Model& model,
                                        std::int64_t max_bound);

/// Area dominated by `points` and bounded by `reference` (minimization).
double hypervolume_2d(std::span<const Objectives> points, const Objectives& reference);

struct SolveResult {
    std::vector<NdsEntry> nds;
    /// Hypervolume of every feasible point found so far, after each generation
    /// (index 0 is the initial population). Reference: zero-fleet objectives.
    std::vector<double> best_hypervolume;
    std::size_t evaluations = 0;
};

/// Generational NSGA-II. Returns the final population's rank-1 feasible
/// members, deduplicated by genome and sorted by (cost, variance, genome).
SolveResult nsga2_solve(const ProblemInstance& instance, const Model& model,
                        const MoeaParams& params, Rng& rng, std::size_t scenario_index = 0);

}  // namespace capplan
