#pragma once

// Resource planning under time constraints: problem model, the two fleet
// objectives and the greedy time-windowed scheduler used to evaluate a fleet.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace capplan {

/// Absolute tolerance for monetary and objective comparisons.
inline constexpr double kMoneyTolerance = 1e-9;

struct ResourceType {
    std::string name;
    double shortfall_cost = 0.0;  // dollars per undelivered unit
};

struct VehicleType {
    std::string name;
    double unit_cost = 0.0;               // $million
    std::vector<std::int64_t> capacity;   // units per assignment, indexed by resource
};

/// Vehicle and resource definitions plus the capability matrix.
struct Model {
    std::vector<ResourceType> resources;
    std::vector<VehicleType> vehicles;

    std::size_t resource_count() const { return resources.size(); }
    std::size_t vehicle_count() const { return vehicles.size(); }
    std::int64_t capacity(std::size_t vehicle, std::size_t resource) const {
        return vehicles[vehicle].capacity[resource];
    }

    /// Throws ModelError when costs, capacities or dimensions are inconsistent.
    void validate() const;
};

/// One timed demand. Times are integer minutes from the scenario horizon origin.
struct Task {
    std::size_t id = 0;
    std::size_t resource = 0;  // index into Model::resources
    std::int64_t duration = 0;
    std::int64_t earliest_start = 0;
    std::int64_t max_delay = 0;
    std::int64_t quantity = 0;

    bool operator==(const Task&) const = default;
};

struct ProblemInstance {
    std::string scenario_id;
    std::size_t instance_id = 0;
    std::vector<Task> tasks;

    bool operator==(const ProblemInstance&) const = default;
};

/// Vehicle counts per type; the decision variable.
struct FleetMix {
    std::vector<std::int64_t> counts;

    FleetMix() = default;
    explicit FleetMix(std::vector<std::int64_t> c) : counts(std::move(c)) {}
    static FleetMix zeros(std::size_t n) { return FleetMix(std::vector<std::int64_t>(n, 0)); }

    std::size_t size() const { return counts.size(); }
    std::int64_t operator[](std::size_t i) const { return counts[i]; }
    std::int64_t& operator[](std::size_t i) { return counts[i]; }

    /// Componentwise >=.
    bool covers(const FleetMix& other) const;

    auto operator<=>(const FleetMix&) const = default;
};

using Objectives = std::array<double, 2>;

struct EvaluationResult {
    double acquisition_cost = 0.0;  // $m
    double variance = 0.0;
    double shortfall_cost = 0.0;    // dollars
    double objective1 = 0.0;
    double objective2 = 0.0;
    bool fulfilled = true;
    std::vector<std::int64_t> per_task_shortfall;  // indexed by task position

    Objectives objectives() const { return {objective1, objective2}; }
};

/// A block of consecutive vehicle units [unit_begin, unit_end) of one type
/// serving one task over [start, end).
struct Assignment {
    std::size_t task = 0;  // task position in the instance
    std::size_t vehicle_type = 0;
    std::int64_t unit_begin = 0;
    std::int64_t unit_end = 0;
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::int64_t delivered = 0;

    bool operator==(const Assignment&) const = default;
};

struct Schedule {
    EvaluationResult result;
    std::vector<Assignment> assignments;
};

double fleet_cost(const FleetMix& fleet, std::span<const VehicleType> vehicle_types);

/// Population variance of the count vector.
double fleet_variance(const FleetMix& fleet);

/// Minimization dominance with kMoneyTolerance.
bool dominates(const Objectives& a, const Objectives& b);

/// Runs the greedy scheduler and assembles both penalized objectives.
EvaluationResult evaluate_fleet(const FleetMix& fleet, const ProblemInstance& instance,
                                const Model& model, double lambda);

/// Same as evaluate_fleet but also returns the unit-level schedule.
Schedule schedule_fleet(const FleetMix& fleet, const ProblemInstance& instance, const Model& model,
                        double lambda);

/// Shortfall cost when nothing is delivered: sum of B_j * Q over all tasks.
double max_shortfall_cost(const ProblemInstance& instance, const Model& model);

}  // namespace capplan
