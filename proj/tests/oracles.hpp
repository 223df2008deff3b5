#pragma once

// Independent reference implementations used to check the library. They are
// deliberately naive: brute force, quadratic loops, no shared helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "capplan/rptc.hpp"

namespace oracle {

using capplan::FleetMix;
using capplan::Model;
using capplan::ProblemInstance;

inline bool dominates(const std::pair<double, double>& a, const std::pair<double, double>& b) {
    const double eps = 1e-9;
    const bool le = a.first <= b.first + eps && a.second <= b.second + eps;
    const bool lt = a.first < b.first - eps || a.second < b.second - eps;
    return le && lt;
}

/// Front number (1-based) of every point by repeated peeling with an O(n^2) scan.
inline std::vector<std::size_t> front_numbers(const std::vector<std::pair<double, double>>& pts) {
    std::vector<std::size_t> front(pts.size(), 0);
    std::size_t assigned = 0;
    for (std::size_t f = 1; assigned < pts.size(); ++f) {
        std::vector<std::size_t> now;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (front[i]) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < pts.size(); ++j)
                if (j != i && front[j] == 0 && dominates(pts[j], pts[i]))
                    dominated = true;
            if (!dominated) now.push_back(i);
        }
        for (auto i : now) front[i] = f;
        assigned += now.size();
    }
    return front;
}

inline double cost_of(const FleetMix& x, const Model& m) {
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) c += static_cast<double>(x[i]) * m.vehicles[i].unit_cost;
    return c;
}

inline double variance_of(const FleetMix& x) {
    double mean = 0.0;
    for (auto v : x.counts) mean += static_cast<double>(v);
    mean /= static_cast<double>(x.size());
    double s = 0.0;
    for (auto v : x.counts) s += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
    return s / static_cast<double>(x.size());
}

/// Distinct (cost, variance) pairs of the feasible Pareto front over the box
/// 0 <= X_i <= bounds_i, by full enumeration.
template <class Feasible>
std::vector<std::pair<double, double>> pareto_front(const std::vector<std::int64_t>& bounds, Feasible feasible,
                                                    const Model& m) {
    std::vector<std::pair<double, double>> pts;
    FleetMix x = FleetMix::zeros(bounds.size());
    while (true) {
        if (feasible(x)) pts.emplace_back(cost_of(x, m), variance_of(x));
        std::size_t i = 0;
        while (i < bounds.size() && x[i] == bounds[i]) x[i++] = 0;
        if (i == bounds.size()) break;
        ++x[i];
    }
    std::vector<std::pair<double, double>> front;
    for (const auto& p : pts) {
        bool dominated = false;
        for (const auto& q : pts) dominated = dominated || dominates(q, p);
        if (dominated) continue;
        bool dup = false;
        for (const auto& f : front)
            dup = dup || (std::abs(f.first - p.first) <= 1e-9 && std::abs(f.second - p.second) <= 1e-9);
        if (!dup) front.push_back(p);
    }
    std::sort(front.begin(), front.end());
    return front;
}

inline bool contains(const std::vector<std::pair<double, double>>& set, const std::pair<double, double>& p) {
    for (const auto& q : set)
        if (std::abs(q.first - p.first) <= 1e-9 && std::abs(q.second - p.second) <= 1e-9) return true;
    return false;
}

/// Replays a schedule and returns a description of the first rule it breaks,
/// or an empty string.
inline std::string check_schedule(const capplan::Schedule& s, const FleetMix& fleet,
                                  const ProblemInstance& inst, const Model& m) {
    const auto& tasks = inst.tasks;
    std::vector<std::int64_t> delivered(tasks.size(), 0);
    // (type, unit) -> busy intervals
    std::map<std::pair<std::size_t, std::int64_t>, std::vector<std::pair<std::int64_t, std::int64_t>>> busy;
    for (const auto& a : s.assignments) {
        if (a.task >= tasks.size()) return "assignment to unknown task";
        const auto& t = tasks[a.task];
        if (a.start < t.earliest_start || a.start > t.earliest_start + t.max_delay) return "start outside window";
        if (a.end != a.start + t.duration) return "assignment length differs from task duration";
        if (a.vehicle_type >= fleet.size()) return "unknown vehicle type";
        if (a.unit_begin < 0 || a.unit_end > fleet[a.vehicle_type] || a.unit_begin >= a.unit_end)
            return "unit range outside the fleet";
        const auto cap = m.vehicles[a.vehicle_type].capacity[t.resource];
        if (cap <= 0) return "vehicle cannot carry the resource";
        if (a.delivered <= 0 || a.delivered > cap * (a.unit_end - a.unit_begin)) return "delivery exceeds capacity";
        delivered[a.task] += a.delivered;
        for (auto u = a.unit_begin; u < a.unit_end; ++u) busy[{a.vehicle_type, u}].emplace_back(a.start, a.end);
    }
    for (auto& [unit, spans] : busy) {
        std::sort(spans.begin(), spans.end());
        for (std::size_t k = 1; k < spans.size(); ++k)
            if (spans[k].first < spans[k - 1].second) return "vehicle unit used by two tasks at once";
    }
    double shortfall = 0.0;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        if (delivered[k] > tasks[k].quantity) return "task over-delivered";
        const auto remaining = s.result.per_task_shortfall.at(k);
        if (delivered[k] + remaining != tasks[k].quantity) return "delivered + remaining != quantity";
        shortfall += m.resources[tasks[k].resource].shortfall_cost * static_cast<double>(remaining);
    }
    if (std::abs(shortfall - s.result.shortfall_cost) > 1e-6 * std::max(1.0, shortfall))
        return "shortfall cost does not match remaining units";
    return {};
}

/// Exact max pairwise Euclidean distance in cost-weighted space.
inline double weighted_diameter(const std::vector<FleetMix>& fleets, const Model& m) {
    double best = 0.0;
    for (std::size_t a = 0; a < fleets.size(); ++a)
        for (std::size_t b = a + 1; b < fleets.size(); ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < m.vehicles.size(); ++i) {
                const double d = static_cast<double>(fleets[a][i] - fleets[b][i]) * m.vehicles[i].unit_cost;
                s += d * d;
            }
            best = std::max(best, std::sqrt(s));
        }
    return best;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace oracle
