#pragma once

// Scenario templates, instance sampling and the scenario database.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "capplan/random.hpp"
#include "capplan/rptc.hpp"

namespace capplan {

enum class DistributionKind { Normal, Uniform };

enum class Positivity {
    None,
    Resample,  // redraw until the (rounded) value is > 0
    Clamp,     // negative values become 0
};

/// Normal(p1 = mean, p2 = stddev) or Uniform(p1 = low, p2 = high).
struct DistributionSpec {
    DistributionKind kind = DistributionKind::Uniform;
    double p1 = 0.0;
    double p2 = 0.0;
    bool rounding = true;
    Positivity positivity = Positivity::Resample;

    static DistributionSpec normal(double mean, double stddev, bool rounding = true,
                                   Positivity positivity = Positivity::Resample) {
        return {DistributionKind::Normal, mean, stddev, rounding, positivity};
    }
    static DistributionSpec uniform(double low, double high, bool rounding = true,
                                    Positivity positivity = Positivity::Resample) {
        return {DistributionKind::Uniform, low, high, rounding, positivity};
    }

    void validate() const;
    /// Largest value a draw can take (Normal: mean + 6 sd), before scaling.
    double practical_max() const;
};

inline constexpr int kMaxResampleAttempts = 1000;

/// One draw, multiplied by `scale` before rounding and the positivity rule.
/// Throws ConfigError after kMaxResampleAttempts consecutive rejected draws.
double sample_value(const DistributionSpec& spec, Rng& rng, double scale = 1.0);

enum class DurationUnit { Hours, Minutes };

struct TaskGroupTemplate {
    std::vector<std::size_t> resources;  // resource indices sharing the specs
    DistributionSpec count;              // tasks per resource (k_j)
    DistributionSpec duration;           // D
    DistributionSpec delay;              // MD, always minutes
    DistributionSpec quantity;           // Q
    DurationUnit duration_unit = DurationUnit::Hours;
};

inline constexpr std::int64_t kDefaultHorizonMinutes = 72 * 60;

struct ScenarioTemplate {
    std::string name;
    std::vector<TaskGroupTemplate> groups;
    std::int64_t horizon = kDefaultHorizonMinutes;

    /// Throws ConfigError on invalid specs, unknown or repeated resources, or
    /// a horizon shorter than the longest plausible task.
    void validate(std::size_t resource_count) const;
};

struct ScenarioDatabase {
    std::vector<ScenarioTemplate> templates;
    std::size_t counter = 0;  // scenarios still to process
    std::vector<std::vector<ProblemInstance>> instances;  // [scenario][instance]
    std::uint64_t master_seed = 0;

    std::size_t instance_count() const;
};

/// Deterministic in (template, scenario_idx, instance_idx, master_seed).
ProblemInstance sample_instance(const ScenarioTemplate& tmpl, std::size_t scenario_idx,
                                std::size_t instance_idx, std::uint64_t master_seed);

ScenarioDatabase build_database(std::vector<ScenarioTemplate> templates,
                                std::size_t instances_per_scenario, std::uint64_t master_seed,
                                std::size_t resource_count, std::size_t jobs = 1);

struct Provenance {
    std::string config_hash;
    std::uint64_t master_seed = 0;
};

/// One line-delimited JSON record (no trailing newline).
std::string instance_to_json_line(const ProblemInstance& instance, const Provenance& provenance);
ProblemInstance instance_from_json_line(std::string_view line, std::size_t resource_count);

}  // namespace capplan
