#include "capplan/rptc.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "busy_profile.hpp"
#include "capplan/errors.hpp"

namespace capplan {

void Model::validate() const {
    if (resources.empty()) throw ModelError("model has no resource types");
    if (vehicles.empty()) throw ModelError("model has no vehicle types");
    for (const auto& r : resources) {
        if (!(r.shortfall_cost >= 0.0))
            throw ModelError("resource " + r.name + " has a negative shortfall cost");
    }
    for (const auto& v : vehicles) {
        if (!(v.unit_cost > 0.0)) throw ModelError("vehicle " + v.name + " must have a positive cost");
        if (v.capacity.size() != resources.size())
            throw ModelError("vehicle " + v.name + " capacity row has wrong length");
        bool any = false;
        for (auto c : v.capacity) {
            if (c < 0) throw ModelError("vehicle " + v.name + " has a negative capacity");
            any = any || c > 0;
        }
        if (!any) throw ModelError("vehicle " + v.name + " cannot carry any resource");
    }
}

bool FleetMix::covers(const FleetMix& other) const {
    if (other.size() != size()) throw DimensionError("fleet length mismatch");
    for (std::size_t i = 0; i < size(); ++i)
        if (counts[i] < other.counts[i]) return false;
    return true;
}

double fleet_cost(const FleetMix& fleet, std::span<const VehicleType> vehicle_types) {
    if (fleet.size() != vehicle_types.size())
        throw DimensionError("fleet has " + std::to_string(fleet.size()) + " entries but there are " +
                             std::to_string(vehicle_types.size()) + " vehicle types");
    double total = 0.0;
    for (std::size_t i = 0; i < fleet.size(); ++i)
        total += static_cast<double>(fleet[i]) * vehicle_types[i].unit_cost;
    return total;
}

double fleet_variance(const FleetMix& fleet) {
    if (fleet.size() == 0) throw DimensionError("variance of an empty fleet");
    const double n = static_cast<double>(fleet.size());
    double mean = 0.0;
    for (auto c : fleet.counts) mean += static_cast<double>(c);
    mean /= n;
    double ss = 0.0;
    for (auto c : fleet.counts) {
        const double d = static_cast<double>(c) - mean;
        ss += d * d;
    }
    return ss / n;
}

bool dominates(const Objectives& a, const Objectives& b) {
    bool strictly = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k] + kMoneyTolerance) return false;
        if (a[k] < b[k] - kMoneyTolerance) strictly = true;
    }
    return strictly;
}

double max_shortfall_cost(const ProblemInstance& instance, const Model& model) {
    double total = 0.0;
    for (const auto& t : instance.tasks) {
        if (t.resource >= model.resource_count())
            throw ModelError("task " + std::to_string(t.id) + " refers to unknown resource");
        total += model.resources[t.resource].shortfall_cost * static_cast<double>(t.quantity);
    }
    return total;
}

namespace {

struct Batch {
    std::size_t task;
    std::size_t vehicle_type;
    std::int64_t start;
    std::int64_t end;
    std::int64_t units;
    std::int64_t capacity;  // per unit, for this task's resource
    std::int64_t delivered;
};

struct Workspace {
    std::vector<detail::BusyProfile> profiles;
    std::vector<std::size_t> order;
    std::vector<std::int64_t> cursor;
    std::vector<char> exhausted;
};

Workspace& workspace() {
    thread_local Workspace ws;
    return ws;
}

// Earliest start in [from, latest] at which one more unit of the type is idle
// for the whole [s, s + duration), or -1.
std::int64_t earliest_start(const detail::BusyProfile& profile, std::int64_t units,
                            std::int64_t from, std::int64_t latest, std::int64_t duration) {
    std::int64_t s = from;
    while (s <= latest) {
        const std::int64_t blocked = profile.last_at_least(s, s + duration, units);
        if (blocked < 0) return s;
        s = blocked + 1;
    }
    return -1;
}

// Assigns concrete unit indices to the batches of one vehicle type. Batches
// are processed by start time; a unit is released at the end of its interval.
void color_units(std::span<const Batch> batches, std::int64_t fleet_units,
                 std::vector<Assignment>& out) {
    std::vector<std::size_t> idx(batches.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return batches[a].start < batches[b].start; });

    std::map<std::int64_t, std::int64_t> free_ranges{{0, fleet_units}};
    using Busy = std::tuple<std::int64_t, std::int64_t, std::int64_t>;  // end, begin, stop
    std::priority_queue<Busy, std::vector<Busy>, std::greater<>> busy;

    auto release = [&](std::int64_t begin, std::int64_t stop) {
        auto next = free_ranges.lower_bound(begin);
        if (next != free_ranges.end() && next->first == stop) {
            stop = next->second;
            next = free_ranges.erase(next);
        }
        if (next != free_ranges.begin()) {
            auto prev = std::prev(next);
            if (prev->second == begin) {
                prev->second = stop;
                return;
            }
        }
        free_ranges.emplace(begin, stop);
    };

    for (std::size_t i : idx) {
        const Batch& b = batches[i];
        while (!busy.empty() && std::get<0>(busy.top()) <= b.start) {
            auto [end, begin, stop] = busy.top();
            busy.pop();
            release(begin, stop);
        }
        std::int64_t needed = b.units;
        std::int64_t undelivered = b.delivered;
        while (needed > 0) {
            if (free_ranges.empty())
                throw InvariantError("unit coloring ran out of units; busy profile is inconsistent");
            auto it = free_ranges.begin();
            const std::int64_t begin = it->first;
            const std::int64_t take = std::min(needed, it->second - begin);
            const std::int64_t stop = begin + take;
            if (stop == it->second)
                free_ranges.erase(it);
            else {
                const std::int64_t rest_end = it->second;
                free_ranges.erase(it);
                free_ranges.emplace(stop, rest_end);
            }
            const std::int64_t carried = std::min(take * b.capacity, undelivered);
            undelivered -= carried;
            out.push_back({b.task, b.vehicle_type, begin, stop, b.start, b.end, carried});
            busy.emplace(b.end, begin, stop);
            needed -= take;
        }
    }
}

Schedule run_scheduler(const FleetMix& fleet, const ProblemInstance& instance, const Model& model,
                       double lambda, bool want_trace) {
    const std::size_t n_vehicles = model.vehicle_count();
    if (fleet.size() != n_vehicles)
        throw DimensionError("fleet has " + std::to_string(fleet.size()) + " entries but there are " +
                             std::to_string(n_vehicles) + " vehicle types");
    if (!(lambda >= 0.0)) throw std::invalid_argument("penalty multiplier must be non-negative");
    for (auto c : fleet.counts)
        if (c < 0) throw DimensionError("fleet counts must be non-negative");

    const auto& tasks = instance.tasks;
    std::int64_t span_end = 1;
    for (const auto& t : tasks) {
        if (t.resource >= model.resource_count())
            throw ModelError("task " + std::to_string(t.id) + " refers to unknown resource " +
                             std::to_string(t.resource + 1));
        span_end = std::max(span_end, t.earliest_start + t.max_delay + t.duration);
    }

    Workspace& ws = workspace();
    ws.profiles.resize(n_vehicles);
    for (std::size_t v = 0; v < n_vehicles; ++v)
        if (fleet[v] > 0) ws.profiles[v].reset(span_end);

    // Most costly task first: total shortfall value B_j * Q, then earliest
    // start, then id.
    ws.order.resize(tasks.size());
    std::iota(ws.order.begin(), ws.order.end(), std::size_t{0});
    std::sort(ws.order.begin(), ws.order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ta = tasks[a];
        const auto& tb = tasks[b];
        const double ka = model.resources[ta.resource].shortfall_cost * static_cast<double>(ta.quantity);
        const double kb = model.resources[tb.resource].shortfall_cost * static_cast<double>(tb.quantity);
        if (ka != kb) return ka > kb;
        if (ta.earliest_start != tb.earliest_start) return ta.earliest_start < tb.earliest_start;
        return a < b;
    });

    Schedule out;
    EvaluationResult& res = out.result;
    res.per_task_shortfall.assign(tasks.size(), 0);
    std::vector<Batch> batches;
    ws.cursor.resize(n_vehicles);
    ws.exhausted.resize(n_vehicles);

    for (std::size_t ti : ws.order) {
        const Task& task = tasks[ti];
        std::int64_t remaining = task.quantity;
        const std::int64_t latest = task.earliest_start + task.max_delay;
        for (std::size_t v = 0; v < n_vehicles; ++v) {
            ws.cursor[v] = task.earliest_start;
            ws.exhausted[v] = fleet[v] == 0 || model.capacity(v, task.resource) == 0;
        }
        while (remaining > 0) {
            std::size_t best = n_vehicles;
            std::int64_t best_cap = 0;
            std::int64_t best_start = 0;
            for (std::size_t v = 0; v < n_vehicles; ++v) {
                if (ws.exhausted[v]) continue;
                const std::int64_t cap = model.capacity(v, task.resource);
                // A smaller vehicle can only win if it is strictly larger or
                // ties and starts earlier; skip the search when it cannot.
                if (best < n_vehicles && cap < best_cap) continue;
                const std::int64_t s =
                    earliest_start(ws.profiles[v], fleet[v], ws.cursor[v], latest, task.duration);
                if (s < 0) {
                    ws.exhausted[v] = 1;
                    continue;
                }
                ws.cursor[v] = s;
                if (best == n_vehicles || cap > best_cap || (cap == best_cap && s < best_start)) {
                    best = v;
                    best_cap = cap;
                    best_start = s;
                }
            }
            if (best == n_vehicles) break;  // no vehicle can start inside the window

            auto& profile = ws.profiles[best];
            const std::int64_t end = best_start + task.duration;
            const std::int64_t idle = fleet[best] - profile.max_over(best_start, end);
            const std::int64_t wanted = (remaining + best_cap - 1) / best_cap;
            const std::int64_t units = std::min(idle, wanted);
            profile.add(best_start, end, units);
            const std::int64_t delivered = std::min(units * best_cap, remaining);
            remaining -= delivered;
            if (want_trace) batches.push_back({ti, best, best_start, end, units, best_cap, delivered});
        }
        res.per_task_shortfall[ti] = remaining;
        if (remaining > 0) {
            res.fulfilled = false;
            res.shortfall_cost +=
                model.resources[task.resource].shortfall_cost * static_cast<double>(remaining);
        }
    }

    res.acquisition_cost = fleet_cost(fleet, model.vehicles);
    res.variance = fleet_variance(fleet);
    res.objective1 = res.acquisition_cost + lambda * res.shortfall_cost;
    res.objective2 = res.variance + lambda * res.shortfall_cost;

    if (want_trace) {
        std::vector<Batch> per_type;
        for (std::size_t v = 0; v < n_vehicles; ++v) {
            per_type.clear();
            for (const auto& b : batches)
                if (b.vehicle_type == v) per_type.push_back(b);
            if (!per_type.empty()) color_units(per_type, fleet[v], out.assignments);
        }
    }
    return out;
}

}  // namespace

EvaluationResult evaluate_fleet(const FleetMix& fleet, const ProblemInstance& instance,
                                const Model& model, double lambda) {
    return run_scheduler(fleet, instance, model, lambda, false).result;
}

Schedule schedule_fleet(const FleetMix& fleet, const ProblemInstance& instance, const Model& model,
                        double lambda) {
    return run_scheduler(fleet, instance, model, lambda, true);
}

}  // namespace capplan
