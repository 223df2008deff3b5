#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "capplan/clustering.hpp"
#include "capplan/nsga2.hpp"
#include "capplan/rptc.hpp"
#include "capplan/scenario.hpp"

namespace capplan {

/// Everything a pipeline run depends on besides the output directory and
/// the worker count.
struct PipelineConfig {
    std::string name;
    Model model;
    std::vector<ScenarioTemplate> scenarios;
    std::size_t instances_per_scenario = 50;
    MoeaParams moea;
    double lambda = 10.0;
    double theta1 = 500.0;
    double theta2 = 500.0;
    std::uint64_t master_seed = 0;
    bool least_cost_filter = true;
    HierarchyOptions hierarchy;
    std::size_t score_cap = 0;  // 0: score every archive entry
    std::size_t solve_repeats = 1;
    FleetMix origin_fleet;

    std::string config_hash;  // of the canonical effective configuration

    std::vector<std::string> scenario_names() const;
    Provenance provenance() const { return {config_hash, master_seed}; }
};

/// Parses "N(mean,sd)" or "U(low,high)".
DistributionSpec parse_distribution(const std::string& text);

/// Builds and validates a configuration. `seed_override` replaces
/// master_seed before the hash is computed.
PipelineConfig parse_config(nlohmann::json document, std::optional<std::uint64_t> seed_override = {});

PipelineConfig load_config(const std::filesystem::path& path,
                           std::optional<std::uint64_t> seed_override = {});

}  // namespace capplan
