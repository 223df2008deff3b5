#include "capplan/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

#include "capplan/errors.hpp"

namespace capplan {

namespace {
constexpr std::size_t kMaxLloydIterations = 300;
constexpr double kDiameterTolerance = 1e-9;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Farthest-first traversal starting at the smallest source id. gaps[k] is the
// distance of the k-th chosen point to the points chosen before it.
void farthest_first(std::span<const WeightedPoint> points, std::vector<std::size_t>& order,
                    std::vector<double>& gaps) {
    const std::size_t n = points.size();
    std::size_t first = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (points[i].source < points[first].source) first = i;
    order.assign(1, first);
    gaps.assign(1, std::numeric_limits<double>::infinity());
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::vector<char> chosen(n, 0);
    chosen[first] = 1;
    std::size_t last = first;
    for (std::size_t k = 1; k < n; ++k) {
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (chosen[i]) continue;
            nearest[i] = std::min(nearest[i], euclidean(points[i].coords, points[last].coords));
            if (pick == n || nearest[i] > nearest[pick] ||
                (nearest[i] == nearest[pick] && points[i].source < points[pick].source))
                pick = i;
        }
        chosen[pick] = 1;
        order.push_back(pick);
        gaps.push_back(nearest[pick]);
        last = pick;
    }
}

// Lloyd iterations from the given seeds until assignments stop changing.
std::vector<std::size_t> lloyd(std::span<const WeightedPoint> points, std::span<const std::size_t> seeds) {
    const std::size_t n = points.size();
    const std::size_t k = seeds.size();
    const std::size_t dim = points.front().coords.size();
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    for (auto s : seeds) centroids.push_back(points[s].coords);
    std::vector<std::size_t> label(n, k);
    for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = squared_distance(points[i].coords, centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = squared_distance(points[i].coords, centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (label[i] != best) {
                label[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[label[i]];
            for (std::size_t d = 0; d < dim; ++d) sums[label[i]][d] += points[i].coords[d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty clusters keep their centroid
            for (std::size_t d = 0; d < dim; ++d)
                centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
    }
    return label;
}

}  // namespace

WeightedPoint weight_fleet(std::size_t source, const FleetMix& fleet, std::span<const VehicleType> vehicles) {
    if (fleet.size() != vehicles.size()) throw DimensionError("fleet length does not match vehicle types");
    WeightedPoint p{source, std::vector<double>(fleet.size())};
    for (std::size_t i = 0; i < fleet.size(); ++i)
        p.coords[i] = static_cast<double>(fleet[i]) * vehicles[i].unit_cost;
    return p;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("points of different dimension");
    return std::sqrt(squared_distance(a, b));
}

double diameter_of(std::span<const WeightedPoint> points, std::span<const std::size_t> members) {
    double d = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            d = std::max(d, euclidean(points[members[a]].coords, points[members[b]].coords));
    return d;
}

std::vector<Cluster> kcentroid_cluster(std::span<const WeightedPoint> points, double theta) {
    if (points.empty()) throw std::invalid_argument("kcentroid_cluster needs at least one point");
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    const std::size_t dim = points.front().coords.size();
    for (const auto& p : points)
        if (p.coords.size() != dim) throw DimensionError("points of different dimension");

    std::vector<std::size_t> order;
    std::vector<double> gaps;
    farthest_first(points, order, gaps);

    // The first k traversal points are pairwise farther apart than gaps[k-1],
    // so every k with gaps[k-1] > theta needs more than k clusters.
    std::size_t k = 1;
    for (std::size_t j = 1; j < gaps.size(); ++j)
        if (gaps[j] > theta) k = j + 1;

    for (; k <= points.size(); ++k) {
        const auto label = lloyd(points, std::span<const std::size_t>(order).first(k));
        std::vector<std::vector<std::size_t>> groups(k);
        for (std::size_t i = 0; i < points.size(); ++i) groups[label[i]].push_back(i);
        std::vector<Cluster> clusters;
        bool ok = true;
        for (auto& g : groups) {
            if (g.empty()) continue;
            const double d = diameter_of(points, g);
            if (d > theta + kDiameterTolerance) {
                ok = false;
                break;
            }
            Cluster c;
            c.diameter = d;
            for (auto i : g) c.members.push_back(points[i].source);
            std::sort(c.members.begin(), c.members.end());
            clusters.push_back(std::move(c));
        }
        if (!ok) continue;
        std::sort(clusters.begin(), clusters.end(),
                  [](const Cluster& a, const Cluster& b) { return a.members.front() < b.members.front(); });
        return clusters;
    }
    throw InvariantError("k-centroid search exhausted k without meeting the diameter bound");
}

FleetMix cluster_ceil(std::span<const FleetMix> members) {
    if (members.empty()) throw std::invalid_argument("ceil of an empty cluster");
    FleetMix ceil = members.front();
    for (const auto& m : members.subspan(1)) {
        if (m.size() != ceil.size()) throw DimensionError("cluster members of different length");
        for (std::size_t i = 0; i < ceil.size(); ++i) ceil[i] = std::max(ceil[i], m[i]);
    }
    return ceil;
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::SingleCluster: return "single-cluster";
        case StopReason::AllSingletons: return "all-singletons";
        case StopReason::Fixpoint: return "fixpoint";
        case StopReason::MaxIterations: return "max-iterations";
    }
    return "unknown";
}

Hierarchy build_hierarchy(std::span<const FleetMix> points, const HierarchyOptions& options,
                          const Model& model, const CeilScorer& scorer) {
    if (points.empty()) throw std::invalid_argument("build_hierarchy needs at least one point");
    if (options.max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
    Hierarchy h;
    std::vector<FleetMix> inputs(points.begin(), points.end());
    for (;;) {
        HierarchyLevel level;
        level.theta = h.levels.empty() ? options.theta1 : options.theta2;
        level.inputs = std::move(inputs);
        std::vector<WeightedPoint> wp;
        wp.reserve(level.inputs.size());
        for (std::size_t i = 0; i < level.inputs.size(); ++i)
            wp.push_back(weight_fleet(i, level.inputs[i], model.vehicles));
        level.clusters = kcentroid_cluster(wp, level.theta);

        std::vector<FleetMix> ceil_fleets;
        for (std::size_t c = 0; c < level.clusters.size(); ++c) {
            std::vector<FleetMix> members;
            for (auto m : level.clusters[c].members) members.push_back(level.inputs[m]);
            Ceil ceil;
            ceil.fleet = cluster_ceil(members);
            ceil.cluster = c;
            ceil.level = h.levels.size();
            ceil.cost = fleet_cost(ceil.fleet, model.vehicles);
            ceil_fleets.push_back(ceil.fleet);
            level.ceils.push_back(std::move(ceil));
        }
        if (scorer) {
            auto scores = scorer(ceil_fleets);
            if (scores.size() != level.ceils.size()) throw DimensionError("scorer returned wrong row count");
            for (std::size_t c = 0; c < scores.size(); ++c) level.ceils[c].scores = std::move(scores[c]);
        }

        const bool singletons = std::all_of(level.clusters.begin(), level.clusters.end(),
                                            [](const Cluster& c) { return c.members.size() == 1; });
        std::optional<StopReason> stop;
        if (singletons)
            stop = StopReason::AllSingletons;
        else if (level.clusters.size() == 1)
            stop = StopReason::SingleCluster;
        else if (!h.levels.empty()) {
            const auto& prev = h.levels.back();
            if (options.stability == Stability::ClusterCount) {
                if (prev.clusters.size() == level.clusters.size()) stop = StopReason::Fixpoint;
            } else {
                std::set<FleetMix> before, after;
                for (const auto& c : prev.ceils) before.insert(c.fleet);
                for (const auto& c : level.ceils) after.insert(c.fleet);
                if (before == after) stop = StopReason::Fixpoint;
            }
        }
        if (!stop && h.levels.size() + 1 >= options.max_depth) stop = StopReason::MaxIterations;

        inputs = ceil_fleets;
        h.levels.push_back(std::move(level));
        if (stop) {
            h.stop_reason = *stop;
            return h;
        }
    }
}

}  // namespace capplan
