#pragma once

// Per-scenario risk scores: summed shortfall-per-task over a scenario's
// instances, normalized by the per-scenario maximum over the scored fleets.

#include <span>
#include <string>
#include <vector>

#include "capplan/nsga2.hpp"
#include "capplan/rptc.hpp"
#include "capplan/scenario.hpp"

namespace capplan {

struct ScoreMatrix {
    std::vector<std::size_t> rows;        // fleet identifiers
    std::vector<std::string> scenarios;   // column ids
    std::vector<std::vector<double>> raw;         // [row][scenario]
    std::vector<std::vector<double>> normalized;  // [row][scenario]
    std::vector<double> per_scenario_max;
};

/// Sum over instances of shortfall_cost / task count. Instances without tasks
/// contribute 0. Throws std::invalid_argument on an empty instance list.
double raw_score(const FleetMix& fleet, std::span<const ProblemInstance> instances, const Model& model);

/// raw / max, clamped to [0, 1]; a zero maximum maps 0 to 0 and anything
/// positive to 1.
double normalize_score(double raw, double column_max);

/// Raw scores of one fleet on every scenario of the database.
std::vector<double> raw_scores(const FleetMix& fleet, const ScenarioDatabase& db, const Model& model);

/// Scores fleets against a fixed set of per-scenario maxima.
std::vector<std::vector<double>> score_against(std::span<const FleetMix> fleets, const ScenarioDatabase& db,
                                               const Model& model, std::span<const double> maxima,
                                               std::size_t jobs = 1);

/// Evaluates every entry on every instance, normalizes per scenario and
/// writes the normalized scores into the entries.
ScoreMatrix cross_evaluate(std::span<NdsEntry> entries, std::span<const std::size_t> row_ids,
                           const ScenarioDatabase& db, const Model& model, std::size_t jobs = 1);

/// Column maxima and normalization of an already filled raw matrix.
void normalize_matrix(ScoreMatrix& matrix);

}  // namespace capplan
