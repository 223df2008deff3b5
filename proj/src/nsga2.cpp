#include "capplan/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "capplan/errors.hpp"

namespace capplan {

void MoeaParams::validate() const {
    if (population_size < 4 || population_size % 2 != 0)
        throw ConfigError("population_size must be even and at least 4");
    if (crossover_prob < 0.0 || crossover_prob > 1.0) throw ConfigError("crossover_prob must be in [0, 1]");
    if (mutation_prob && (*mutation_prob < 0.0 || *mutation_prob > 1.0))
        throw ConfigError("mutation_prob must be in [0, 1]");
    if (eta_crossover < 0.0 || eta_mutation < 0.0) throw ConfigError("distribution indices must be >= 0");
    if (max_bound < 1) throw ConfigError("max_bound must be at least 1");
    for (auto b : upper_bounds)
        if (b < 1) throw ConfigError("genome upper bounds must be at least 1");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Objectives> points) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> dominators(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(points[p], points[q]))
                dominated[p].push_back(q);
            else if (dominates(points[q], points[p]))
                ++dominators[p];
        }
        if (dominators[p] == 0) current.push_back(p);
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current)
            for (auto q : dominated[p])
                if (--dominators[q] == 0) next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const Objectives> front) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t m = 0; m < 2; ++m) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
        const double lo = front[idx.front()][m];
        const double hi = front[idx.back()][m];
        dist[idx.front()] = inf;
        dist[idx.back()] = inf;
        if (hi - lo <= 0.0) continue;
        for (std::size_t k = 1; k + 1 < n; ++k)
            dist[idx[k]] += (front[idx[k + 1]][m] - front[idx[k - 1]][m]) / (hi - lo);
    }
    return dist;
}

std::vector<std::int64_t> genome_bounds(const ProblemInstance& instance, const Model& model,
                                        std::int64_t max_bound) {
    std::vector<std::int64_t> demand(model.resource_count(), 0);
    for (const auto& t : instance.tasks) {
        if (t.resource >= demand.size()) throw ModelError("task refers to unknown resource");
        demand[t.resource] += t.quantity;
    }
    std::vector<std::int64_t> bounds(model.vehicle_count(), 1);
    for (std::size_t v = 0; v < model.vehicle_count(); ++v) {
        std::int64_t b = 0;
        for (std::size_t r = 0; r < model.resource_count(); ++r) {
            const auto cap = model.capacity(v, r);
            if (cap > 0) b = std::max(b, (demand[r] + cap - 1) / cap);
        }
        bounds[v] = std::clamp<std::int64_t>(b, 1, max_bound);
    }
    return bounds;
}

double hypervolume_2d(std::span<const Objectives> points, const Objectives& reference) {
    std::vector<Objectives> inside;
    for (const auto& p : points)
        if (p[0] < reference[0] && p[1] < reference[1]) inside.push_back(p);
    std::sort(inside.begin(), inside.end());
    double area = 0.0;
    double ceiling = reference[1];
    for (const auto& p : inside) {
        if (p[1] < ceiling) {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    return area;
}

namespace {

class Solver {
public:
    Solver(const ProblemInstance& instance, const Model& model, const MoeaParams& params, Rng& rng)
        : instance_(instance), model_(model), params_(params), rng_(rng) {
        bounds_ = params.upper_bounds.empty() ? genome_bounds(instance, model, params.max_bound)
                                              : params.upper_bounds;
        if (bounds_.size() != model.vehicle_count())
            throw DimensionError("upper_bounds length does not match the vehicle types");
        mutation_prob_ = params.mutation_prob.value_or(1.0 / static_cast<double>(model.vehicle_count()));
        const double worst = params.lambda * max_shortfall_cost(instance, model);
        reference_ = {worst, worst};
    }

    SolveResult run() {
        const std::size_t n = params_.population_size;
        std::vector<Individual> pop;
        pop.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
            FleetMix g = FleetMix::zeros(bounds_.size());
            for (std::size_t i = 0; i < bounds_.size(); ++i) g[i] = uniform_int(rng_, 0, bounds_[i]);
            pop.push_back(evaluate(std::move(g)));
        }
        assign_rank_and_crowding(pop);
        result_.best_hypervolume.push_back(archive_hypervolume());

        for (std::size_t gen = 0; gen < params_.generations; ++gen) {
            std::vector<Individual> merged = pop;
            merged.reserve(2 * n);
            while (merged.size() < 2 * n) {
                const Individual& a = pop[tournament(pop)];
                const Individual& b = pop[tournament(pop)];
                FleetMix c1 = a.genome;
                FleetMix c2 = b.genome;
                if (uniform01(rng_) < params_.crossover_prob) crossover(c1, c2);
                mutate(c1);
                mutate(c2);
                merged.push_back(evaluate(std::move(c1)));
                merged.push_back(evaluate(std::move(c2)));
            }
            pop = select(std::move(merged), n);
            result_.best_hypervolume.push_back(archive_hypervolume());
        }
        extract(pop);
        return std::move(result_);
    }

private:
    Individual evaluate(FleetMix genome) {
        ++result_.evaluations;
        const auto r = evaluate_fleet(genome, instance_, model_, params_.lambda);
        Individual ind;
        ind.objectives = r.objectives();
        ind.shortfall_cost = r.shortfall_cost;
        if (r.fulfilled) archive_insert({r.acquisition_cost, r.variance});
        ind.genome = std::move(genome);
        return ind;
    }

    void archive_insert(const Objectives& p) {
        for (const auto& q : archive_)
            if (dominates(q, p) || (std::abs(q[0] - p[0]) <= kMoneyTolerance &&
                                    std::abs(q[1] - p[1]) <= kMoneyTolerance))
                return;
        std::erase_if(archive_, [&](const Objectives& q) { return dominates(p, q); });
        archive_.push_back(p);
    }

    double archive_hypervolume() const { return hypervolume_2d(archive_, reference_); }

    static void assign_rank_and_crowding(std::vector<Individual>& pop) {
        std::vector<Objectives> objs(pop.size());
        for (std::size_t k = 0; k < pop.size(); ++k) objs[k] = pop[k].objectives;
        const auto fronts = fast_nondominated_sort(objs);
        for (std::size_t f = 0; f < fronts.size(); ++f) {
            std::vector<Objectives> fo;
            for (auto k : fronts[f]) fo.push_back(objs[k]);
            const auto cd = crowding_distance(fo);
            for (std::size_t j = 0; j < fronts[f].size(); ++j) {
                pop[fronts[f][j]].rank = f + 1;
                pop[fronts[f][j]].crowding = cd[j];
            }
        }
    }

    std::size_t tournament(const std::vector<Individual>& pop) {
        const auto last = static_cast<std::int64_t>(pop.size()) - 1;
        const auto a = static_cast<std::size_t>(uniform_int(rng_, 0, last));
        const auto b = static_cast<std::size_t>(uniform_int(rng_, 0, last));
        if (pop[b].rank < pop[a].rank) return b;
        if (pop[b].rank == pop[a].rank && pop[b].crowding > pop[a].crowding) return b;
        return a;
    }

    // Simulated binary crossover on the real relaxation, then rounded.
    void crossover(FleetMix& c1, FleetMix& c2) {
        const double eta = params_.eta_crossover;
        for (std::size_t i = 0; i < bounds_.size(); ++i) {
            if (uniform01(rng_) > 0.5) continue;
            const double x1 = static_cast<double>(c1[i]);
            const double x2 = static_cast<double>(c2[i]);
            if (std::abs(x1 - x2) < 1e-14) continue;
            const double y1 = std::min(x1, x2);
            const double y2 = std::max(x1, x2);
            const double lo = 0.0;
            const double hi = static_cast<double>(bounds_[i]);
            const double u = uniform01(rng_);

            double beta = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
            double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            double betaq = u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                            : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
            double r1 = 0.5 * ((y1 + y2) - betaq * (y2 - y1));

            beta = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
            alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            betaq = u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                     : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
            double r2 = 0.5 * ((y1 + y2) + betaq * (y2 - y1));

            r1 = std::clamp(r1, lo, hi);
            r2 = std::clamp(r2, lo, hi);
            if (uniform01(rng_) <= 0.5) std::swap(r1, r2);
            c1[i] = to_gene(r1, i);
            c2[i] = to_gene(r2, i);
        }
    }

    // Polynomial mutation. A perturbation that rounds back onto the parent
    // value moves one step in its direction so mutation always changes an
    // integer gene.
    void mutate(FleetMix& g) {
        const double eta = params_.eta_mutation;
        const double pow_inv = 1.0 / (eta + 1.0);
        for (std::size_t i = 0; i < bounds_.size(); ++i) {
            if (uniform01(rng_) >= mutation_prob_) continue;
            const double y = static_cast<double>(g[i]);
            const double lo = 0.0;
            const double hi = static_cast<double>(bounds_[i]);
            const double d1 = (y - lo) / (hi - lo);
            const double d2 = (hi - y) / (hi - lo);
            const double r = uniform01(rng_);
            double deltaq;
            if (r < 0.5) {
                const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
                deltaq = std::pow(val, pow_inv) - 1.0;
            } else {
                const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
                deltaq = 1.0 - std::pow(val, pow_inv);
            }
            std::int64_t gene = to_gene(std::clamp(y + deltaq * (hi - lo), lo, hi), i);
            if (gene == g[i] && deltaq != 0.0)
                gene = std::clamp<std::int64_t>(g[i] + (deltaq > 0.0 ? 1 : -1), 0, bounds_[i]);
            g[i] = gene;
        }
    }

    std::int64_t to_gene(double x, std::size_t i) const {
        return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::llround(x)), 0, bounds_[i]);
    }

    // Elitist environmental selection: whole fronts, then the least crowded
    // members of the front that does not fit. Repeated genomes only compete
    // once; copies are used to fill up when too few distinct genomes exist.
    std::vector<Individual> select(std::vector<Individual> all, std::size_t n) {
        std::vector<Individual> merged, copies;
        std::set<FleetMix> seen;
        for (auto& ind : all) (seen.insert(ind.genome).second ? merged : copies).push_back(std::move(ind));
        std::vector<Objectives> objs(merged.size());
        for (std::size_t k = 0; k < merged.size(); ++k) objs[k] = merged[k].objectives;
        const auto fronts = fast_nondominated_sort(objs);
        std::vector<Individual> next;
        next.reserve(n);
        for (std::size_t f = 0; f < fronts.size() && next.size() < n; ++f) {
            std::vector<Objectives> fo;
            for (auto k : fronts[f]) fo.push_back(objs[k]);
            const auto cd = crowding_distance(fo);
            std::vector<std::size_t> order(fronts[f].size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            if (next.size() + order.size() > n)
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
            for (auto j : order) {
                if (next.size() == n) break;
                Individual ind = std::move(merged[fronts[f][j]]);
                ind.rank = f + 1;
                ind.crowding = cd[j];
                next.push_back(std::move(ind));
            }
        }
        for (std::size_t k = 0; next.size() < n; ++k) next.push_back(std::move(copies[k]));
        // crowding must be recomputed on the truncated last front
        assign_rank_and_crowding(next);
        return next;
    }

    void extract(const std::vector<Individual>& pop) {
        std::vector<Objectives> objs(pop.size());
        for (std::size_t k = 0; k < pop.size(); ++k) objs[k] = pop[k].objectives;
        const auto fronts = fast_nondominated_sort(objs);
        std::vector<FleetMix> seen;
        for (auto k : fronts.front()) {
            if (pop[k].shortfall_cost != 0.0) continue;
            if (std::find(seen.begin(), seen.end(), pop[k].genome) != seen.end()) continue;
            seen.push_back(pop[k].genome);
            NdsEntry e;
            e.genome = pop[k].genome;
            e.cost = fleet_cost(e.genome, model_.vehicles);
            e.variance = fleet_variance(e.genome);
            e.scenario_id = instance_.scenario_id;
            e.instance_id = instance_.instance_id;
            result_.nds.push_back(std::move(e));
        }
        std::sort(result_.nds.begin(), result_.nds.end(), [](const NdsEntry& a, const NdsEntry& b) {
            if (a.cost != b.cost) return a.cost < b.cost;
            if (a.variance != b.variance) return a.variance < b.variance;
            return a.genome < b.genome;
        });
    }

    const ProblemInstance& instance_;
    const Model& model_;
    const MoeaParams& params_;
    Rng& rng_;
    std::vector<std::int64_t> bounds_;
    double mutation_prob_ = 0.0;
    Objectives reference_{};
    std::vector<Objectives> archive_;
    SolveResult result_;
};

}  // namespace

SolveResult nsga2_solve(const ProblemInstance& instance, const Model& model,
                        const MoeaParams& params, Rng& rng, std::size_t scenario_index) {
    params.validate();
    Solver solver(instance, model, params, rng);
    SolveResult r = solver.run();
    for (auto& e : r.nds) e.scenario_index = scenario_index;
    return r;
}

}  // namespace capplan
