#include <doctest.h>

#include <cmath>
#include <limits>

#include "capplan/errors.hpp"
#include "capplan/nsga2.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace capplan;
using fixture::task;

namespace {

std::vector<std::size_t> front_of(const std::vector<std::vector<std::size_t>>& fronts, std::size_t n) {
    std::vector<std::size_t> out(n, 0);
    for (std::size_t f = 0; f < fronts.size(); ++f)
        for (auto i : fronts[f]) out[i] = f + 1;
    return out;
}

ProblemInstance toy_instance(std::uint64_t seed, std::size_t tasks) {
    Rng rng = make_stream(seed, {0x70});
    ProblemInstance inst{"toy", 0, {}};
    for (std::size_t k = 0; k < tasks; ++k)
        inst.tasks.push_back(task(k, static_cast<std::size_t>(uniform_int(rng, 0, 1)), uniform_int(rng, 30, 90),
                                  uniform_int(rng, 0, 120), uniform_int(rng, 0, 20), uniform_int(rng, 1, 10)));
    return inst;
}

}  // namespace

TEST_CASE("non-dominated sort examples") {
    const std::vector<Objectives> one{{3, 4}};
    CHECK(fast_nondominated_sort(one) == std::vector<std::vector<std::size_t>>{{0}});

    const std::vector<Objectives> four{{1, 1}, {2, 2}, {1, 2}, {2, 1}};
    const auto fronts = fast_nondominated_sort(four);
    REQUIRE(fronts.size() == 3);
    CHECK(fronts[0] == std::vector<std::size_t>{0});
    CHECK(fronts[1] == std::vector<std::size_t>{2, 3});
    CHECK(fronts[2] == std::vector<std::size_t>{1});

    const std::vector<Objectives> same(5, Objectives{1, 1});
    CHECK(fast_nondominated_sort(same).size() == 1);
    CHECK(fast_nondominated_sort(std::vector<Objectives>{}).empty());
}

TEST_CASE("non-dominated sort agrees with the pairwise oracle") {
    Rng rng = make_stream(5, {});
    for (int rep = 0; rep < 50; ++rep) {
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 120));
        std::vector<Objectives> pts;
        std::vector<std::pair<double, double>> plain;
        for (std::size_t i = 0; i < n; ++i) {
            // small integer grid so ties and duplicates are common
            const Objectives o{static_cast<double>(uniform_int(rng, 0, 12)),
                               static_cast<double>(uniform_int(rng, 0, 12))};
            pts.push_back(o);
            plain.emplace_back(o[0], o[1]);
        }
        CHECK(front_of(fast_nondominated_sort(pts), n) == oracle::front_numbers(plain));
    }
}

TEST_CASE("crowding distance") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(crowding_distance(std::vector<Objectives>{{1, 1}}) == std::vector<double>{inf});
    CHECK(crowding_distance(std::vector<Objectives>{{1, 1}, {2, 0}}) == std::vector<double>{inf, inf});
    const auto d = crowding_distance(std::vector<Objectives>{{0, 4}, {1, 2}, {2, 0}});
    CHECK(d[0] == inf);
    CHECK(d[1] == doctest::Approx(2.0));
    CHECK(d[2] == inf);
}

TEST_CASE("genome bounds cover single-wave demand") {
    const auto m = fixture::toy_model();
    ProblemInstance inst{"t", 0, {task(0, 0, 10, 0, 0, 7), task(1, 1, 10, 0, 0, 9)}};
    // T1: ceil(7/2)=4; T2: max(ceil(7/3), ceil(9/2)) = 5; T3: ceil(9/4) = 3
    CHECK(genome_bounds(inst, m, 100) == std::vector<std::int64_t>{4, 5, 3});
    CHECK(genome_bounds(inst, m, 4) == std::vector<std::int64_t>{4, 4, 3});
    ProblemInstance empty{"t", 0, {}};
    CHECK(genome_bounds(empty, m, 100) == std::vector<std::int64_t>{1, 1, 1});
}

TEST_CASE("hypervolume of a staircase") {
    const std::vector<Objectives> pts{{1, 3}, {2, 2}, {3, 1}};
    // reference (4,4): 3*1 + 2*1 + 1*1 = 6
    CHECK(hypervolume_2d(pts, {4, 4}) == doctest::Approx(6.0));
    CHECK(hypervolume_2d(std::vector<Objectives>{}, {4, 4}) == 0.0);
    CHECK(hypervolume_2d(std::vector<Objectives>{{5, 5}}, {4, 4}) == 0.0);
}

TEST_CASE("parameter validation") {
    MoeaParams p;
    CHECK_NOTHROW(p.validate());
    p.population_size = 7;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.population_size = 2;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = MoeaParams{};
    p.upper_bounds = {3, 0, 2};
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("instance without tasks yields the empty fleet") {
    const auto m = fixture::toy_model();
    MoeaParams p;
    p.population_size = 12;
    p.generations = 10;
    Rng rng = make_stream(1, {});
    const auto res = nsga2_solve(ProblemInstance{"t", 3, {}}, m, p, rng, 2);
    REQUIRE(res.nds.size() == 1);
    CHECK(res.nds[0].genome == FleetMix::zeros(3));
    CHECK(res.nds[0].cost == 0.0);
    CHECK(res.nds[0].instance_id == 3);
    CHECK(res.nds[0].scenario_index == 2);
}

TEST_CASE("toy instances against exhaustive enumeration") {
    const auto m = fixture::toy_model();
    MoeaParams p;
    p.population_size = 40;
    p.generations = 60;
    p.max_bound = 8;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto inst = toy_instance(seed, 2);
        const auto bounds = genome_bounds(inst, m, 8);
        const auto truth = oracle::pareto_front(
            bounds, [&](const FleetMix& x) { return evaluate_fleet(x, inst, m, 10.0).fulfilled; }, m);

        Rng rng = make_stream(seed, {0x51});
        const auto res = nsga2_solve(inst, m, p, rng);
        INFO("seed " << seed);
        REQUIRE_FALSE(res.nds.empty());
        std::size_t found = 0;
        for (const auto& e : res.nds) {
            CHECK(oracle::contains(truth, {e.cost, e.variance}));
            CHECK(evaluate_fleet(e.genome, inst, m, 10.0).fulfilled);
            for (std::size_t i = 0; i < 3; ++i) {
                CHECK(e.genome[i] >= 0);
                CHECK(e.genome[i] <= bounds[i]);
            }
        }
        for (const auto& t : truth) {
            bool hit = false;
            for (const auto& e : res.nds) hit = hit || (std::abs(e.cost - t.first) <= 1e-9 &&
                                                        std::abs(e.variance - t.second) <= 1e-9);
            found += hit;
        }
        CHECK(found == truth.size());
    }
}

TEST_CASE("solver properties") {
    const auto m = fixture::toy_model();
    MoeaParams p;
    p.population_size = 24;
    p.generations = 40;
    p.max_bound = 8;
    const auto inst = toy_instance(77, 4);

    Rng a = make_stream(3, {});
    Rng b = make_stream(3, {});
    const auto ra = nsga2_solve(inst, m, p, a);
    const auto rb = nsga2_solve(inst, m, p, b);
    CHECK(ra.nds == rb.nds);
    CHECK(ra.best_hypervolume == rb.best_hypervolume);

    REQUIRE(ra.best_hypervolume.size() == p.generations + 1);
    for (std::size_t g = 1; g < ra.best_hypervolume.size(); ++g)
        CHECK(ra.best_hypervolume[g] >= ra.best_hypervolume[g - 1]);

    for (const auto& x : ra.nds)
        for (const auto& y : ra.nds) CHECK_FALSE(dominates({x.cost, x.variance}, {y.cost, y.variance}));
    for (std::size_t k = 1; k < ra.nds.size(); ++k) CHECK(ra.nds[k - 1].genome != ra.nds[k].genome);
    CHECK(ra.evaluations > 0);
}
