#pragma once

// Pipeline stages: generate -> solve -> score -> cluster -> network. Each
// stage reads its upstream artifacts from the output directory and writes
// its own; no stage rewrites an upstream file.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "capplan/capnet.hpp"
#include "capplan/clustering.hpp"
#include "capplan/config.hpp"
#include "capplan/nsga2.hpp"
#include "capplan/scenario.hpp"
#include "capplan/scoring.hpp"

namespace capplan {

struct RunOptions {
    std::filesystem::path out = "out";
    std::size_t jobs = 1;
    bool reduce = false;      // transitive reduction of the exported network
    std::ostream* log = nullptr;
};

namespace artifact {
std::filesystem::path instances(const std::filesystem::path& out, const std::string& scenario);
std::filesystem::path nds_part(const std::filesystem::path& out, const std::string& scenario,
                               std::size_t instance);
std::filesystem::path nds_archive(const std::filesystem::path& out);
std::filesystem::path score_matrix(const std::filesystem::path& out);
std::filesystem::path hierarchy(const std::filesystem::path& out);
std::filesystem::path network_dot(const std::filesystem::path& out);
std::filesystem::path network_json(const std::filesystem::path& out);
}  // namespace artifact

void cmd_generate(const PipelineConfig& cfg, const RunOptions& opts);
void cmd_solve(const PipelineConfig& cfg, const RunOptions& opts);
void cmd_score(const PipelineConfig& cfg, const RunOptions& opts);
void cmd_cluster(const PipelineConfig& cfg, const RunOptions& opts);
void cmd_network(const PipelineConfig& cfg, const RunOptions& opts);
void cmd_run(const PipelineConfig& cfg, const RunOptions& opts);

/// Solves one instance `solve_repeats` times and merges the fronts.
std::vector<NdsEntry> solve_instance(const PipelineConfig& cfg, const ProblemInstance& instance,
                                     std::size_t scenario_index);

/// One row per entry (scenario_id, instance_id, X_1..X_n, cost, variance).
std::string write_nds_table(std::span<const NdsEntry> entries, const PipelineConfig& cfg);
std::vector<NdsEntry> read_nds_table(const std::string& text, const PipelineConfig& cfg,
                                     const std::string& what);

std::string write_score_table(const ScoreMatrix& matrix, const PipelineConfig& cfg);
ScoreMatrix read_score_table(const std::string& text, const PipelineConfig& cfg);

/// `sources` are archive row ids of the level-0 inputs.
std::string write_hierarchy(const Hierarchy& h, std::span<const std::size_t> sources,
                            const PipelineConfig& cfg);
Hierarchy read_hierarchy(const std::string& text, const PipelineConfig& cfg);

ScenarioDatabase load_database(const PipelineConfig& cfg, const std::filesystem::path& out);

/// Cheapest entry (ties: lower variance, then archive order) of every
/// (scenario, instance) front. Returns archive row ids in archive order.
std::vector<std::size_t> least_cost_rows(std::span<const NdsEntry> entries);

/// Exact pairwise diameters, ceil domination and stop reason; throws InvariantError.
void verify_hierarchy(const Hierarchy& h, const Model& model);

/// Edge rules, acyclicity, node uniqueness and score bounds; throws InvariantError.
void verify_network(const CapabilityEvolutionNetwork& net, double theta2);

}  // namespace capplan
