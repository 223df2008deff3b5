#include "capplan/scoring.hpp"

#include <algorithm>
#include <stdexcept>

#include "capplan/errors.hpp"
#include "capplan/parallel.hpp"

namespace capplan {

double raw_score(const FleetMix& fleet, std::span<const ProblemInstance> instances, const Model& model) {
    if (instances.empty()) throw std::invalid_argument("raw_score needs at least one instance");
    double total = 0.0;
    for (const auto& inst : instances) {
        if (inst.tasks.empty()) continue;
        // the penalty multiplier does not enter the shortfall cost
        const auto r = evaluate_fleet(fleet, inst, model, 0.0);
        total += r.shortfall_cost / static_cast<double>(inst.tasks.size());
    }
    return total;
}

double normalize_score(double raw, double column_max) {
    if (column_max <= 0.0) return raw > 0.0 ? 1.0 : 0.0;
    return std::clamp(raw / column_max, 0.0, 1.0);
}

std::vector<double> raw_scores(const FleetMix& fleet, const ScenarioDatabase& db, const Model& model) {
    std::vector<double> out(db.instances.size());
    for (std::size_t s = 0; s < db.instances.size(); ++s) out[s] = raw_score(fleet, db.instances[s], model);
    return out;
}

std::vector<std::vector<double>> score_against(std::span<const FleetMix> fleets, const ScenarioDatabase& db,
                                               const Model& model, std::span<const double> maxima,
                                               std::size_t jobs) {
    if (maxima.size() != db.instances.size())
        throw DimensionError("one normalization maximum per scenario is required");
    const std::size_t cols = db.instances.size();
    std::vector<std::vector<double>> out(fleets.size(), std::vector<double>(cols, 0.0));
    parallel_for(fleets.size() * cols, jobs, [&](std::size_t cell) {
        const std::size_t r = cell / cols;
        const std::size_t s = cell % cols;
        out[r][s] = normalize_score(raw_score(fleets[r], db.instances[s], model), maxima[s]);
    });
    return out;
}

void normalize_matrix(ScoreMatrix& m) {
    const std::size_t cols = m.scenarios.size();
    m.per_scenario_max.assign(cols, 0.0);
    for (const auto& row : m.raw)
        for (std::size_t s = 0; s < cols; ++s) m.per_scenario_max[s] = std::max(m.per_scenario_max[s], row[s]);
    m.normalized.assign(m.raw.size(), std::vector<double>(cols, 0.0));
    for (std::size_t r = 0; r < m.raw.size(); ++r)
        for (std::size_t s = 0; s < cols; ++s)
            m.normalized[r][s] = normalize_score(m.raw[r][s], m.per_scenario_max[s]);
}

ScoreMatrix cross_evaluate(std::span<NdsEntry> entries, std::span<const std::size_t> row_ids,
                           const ScenarioDatabase& db, const Model& model, std::size_t jobs) {
    if (db.instances.empty()) throw std::invalid_argument("cross_evaluate needs a non-empty database");
    if (row_ids.size() != entries.size()) throw DimensionError("one row id per entry is required");
    ScoreMatrix m;
    m.rows.assign(row_ids.begin(), row_ids.end());
    for (const auto& t : db.templates) m.scenarios.push_back(t.name);
    const std::size_t cols = m.scenarios.size();
    m.raw.assign(entries.size(), std::vector<double>(cols, 0.0));
    parallel_for(entries.size() * cols, jobs, [&](std::size_t cell) {
        const std::size_t r = cell / cols;
        const std::size_t s = cell % cols;
        m.raw[r][s] = raw_score(entries[r].genome, db.instances[s], model);
    });
    normalize_matrix(m);
    for (std::size_t r = 0; r < entries.size(); ++r) entries[r].scores = m.normalized[r];
    return m;
}

}  // namespace capplan
