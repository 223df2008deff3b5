#include <doctest.h>

#include <cmath>

#include "capplan/errors.hpp"
#include "capplan/random.hpp"
#include "capplan/rptc.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace capplan;
using fixture::fleet;
using fixture::task;

TEST_CASE("fleet cost of the case-study vehicles") {
    const auto m = fixture::case_study_model();
    CHECK(fleet_cost(fleet({1, 1, 1, 1, 1, 1}), m.vehicles) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(fleet_cost(FleetMix::zeros(6), m.vehicles) == 0.0);
    CHECK(fleet_cost(fleet({10, 0, 0, 0, 0, 0}), m.vehicles) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(fleet_cost(fleet({1, 1}), m.vehicles), DimensionError);
}

TEST_CASE("fleet variance is the population variance") {
    CHECK(fleet_variance(fleet({2, 2, 2, 2, 2, 2})) == 0.0);
    CHECK(fleet_variance(fleet({2, 4})) == doctest::Approx(1.0));
    CHECK(fleet_variance(fleet({0, 0, 0, 0, 0, 6})) == doctest::Approx(5.0));
    CHECK_THROWS_AS(fleet_variance(FleetMix{}), DimensionError);
}

TEST_CASE("dominance") {
    CHECK(dominates({1, 1}, {2, 2}));
    CHECK_FALSE(dominates({1, 2}, {2, 1}));
    CHECK_FALSE(dominates({2, 1}, {1, 2}));
    CHECK_FALSE(dominates({1, 1}, {1, 1}));
    CHECK(dominates({1, 1}, {1, 2}));
}

TEST_CASE("evaluation examples") {
    const auto m = fixture::case_study_model();

    SUBCASE("zero fleet delivers nothing") {
        ProblemInstance inst{"s", 0, {task(0, 0, 60, 0, 0, 10)}};
        const auto r = evaluate_fleet(FleetMix::zeros(6), inst, m, 10.0);
        CHECK(r.shortfall_cost == doctest::Approx(1000.0));
        CHECK_FALSE(r.fulfilled);
        CHECK(r.objective1 == doctest::Approx(10.0 * 1000.0));
    }
    SUBCASE("no tasks") {
        ProblemInstance inst{"s", 0, {}};
        const auto x = fleet({1, 2, 3, 0, 0, 1});
        const auto r = evaluate_fleet(x, inst, m, 10.0);
        CHECK(r.fulfilled);
        CHECK(r.shortfall_cost == 0.0);
        CHECK(r.objective1 == fleet_cost(x, m.vehicles));
        CHECK(r.objective2 == fleet_variance(x));
    }
    SUBCASE("one V2 cannot start twice inside a 10 minute window") {
        ProblemInstance inst{"s", 0, {task(0, 2, 60, 0, 10, 4)}};
        const auto s = schedule_fleet(fleet({0, 1, 0, 0, 0, 0}), inst, m, 10.0);
        CHECK(s.result.shortfall_cost == doctest::Approx(100.0));
        CHECK(s.result.per_task_shortfall[0] == 2);
        REQUIRE(s.assignments.size() == 1);
        CHECK(s.assignments[0].start == 0);
        CHECK(s.assignments[0].end == 60);
        CHECK(s.assignments[0].delivered == 2);
    }
    SUBCASE("unknown resource") {
        ProblemInstance inst{"s", 0, {task(0, 9, 60, 0, 10, 4)}};
        CHECK_THROWS_AS(evaluate_fleet(FleetMix::zeros(6), inst, m, 10.0), ModelError);
    }
}

TEST_CASE("largest vehicle is chosen first") {
    const auto m = fixture::case_study_model();
    // R1: V2 carries 3, V1 carries 2; one V2 suffices for 3 units.
    ProblemInstance inst{"s", 0, {task(0, 0, 30, 100, 0, 3)}};
    const auto s = schedule_fleet(fleet({1, 1, 0, 0, 0, 0}), inst, m, 10.0);
    REQUIRE(s.assignments.size() == 1);
    CHECK(s.assignments[0].vehicle_type == 1);
    CHECK(s.result.fulfilled);
}

TEST_CASE("a vehicle is reused once its previous task ends") {
    const auto m = fixture::case_study_model();
    ProblemInstance inst{"s", 0, {task(0, 0, 30, 0, 0, 2), task(1, 0, 30, 30, 0, 2)}};
    const auto s = schedule_fleet(fleet({1, 0, 0, 0, 0, 0}), inst, m, 10.0);
    CHECK(s.result.fulfilled);
    CHECK(oracle::check_schedule(s, fleet({1, 0, 0, 0, 0, 0}), inst, m).empty());
}

TEST_CASE("a vehicle cannot serve two tasks at once") {
    const auto m = fixture::case_study_model();
    // both tasks need the single V1 over the same minutes; R2 costs more per unit
    ProblemInstance inst{"s", 0, {task(0, 0, 30, 0, 0, 2), task(1, 1, 30, 10, 0, 4)}};
    const auto s = schedule_fleet(fleet({1, 0, 0, 0, 0, 0}), inst, m, 10.0);
    CHECK(s.result.per_task_shortfall[1] == 0);
    CHECK(s.result.per_task_shortfall[0] == 2);
    CHECK(oracle::check_schedule(s, fleet({1, 0, 0, 0, 0, 0}), inst, m).empty());
}

namespace {

ProblemInstance random_instance(Rng& rng, const Model& m, std::size_t tasks) {
    ProblemInstance inst{"r", 0, {}};
    for (std::size_t k = 0; k < tasks; ++k)
        inst.tasks.push_back(task(k, static_cast<std::size_t>(uniform_int(rng, 0, m.resource_count() - 1)),
                                  uniform_int(rng, 1, 300), uniform_int(rng, 0, 1000), uniform_int(rng, 0, 60),
                                  uniform_int(rng, 1, 60)));
    return inst;
}

}  // namespace

TEST_CASE("scheduler properties on random instances") {
    const auto m = fixture::case_study_model();
    Rng rng = make_stream(11, {1});
    for (int rep = 0; rep < 300; ++rep) {
        const auto inst = random_instance(rng, m, static_cast<std::size_t>(uniform_int(rng, 0, 40)));
        FleetMix x = FleetMix::zeros(6);
        for (std::size_t i = 0; i < 6; ++i) x[i] = uniform_int(rng, 0, 6);
        const auto s = schedule_fleet(x, inst, m, 10.0);
        INFO("rep " << rep);
        CHECK(oracle::check_schedule(s, x, inst, m) == "");

        // determinism and agreement between the two entry points
        const auto r = evaluate_fleet(x, inst, m, 10.0);
        CHECK(r.shortfall_cost == s.result.shortfall_cost);
        CHECK(r.per_task_shortfall == s.result.per_task_shortfall);
        CHECK(r.objective1 == evaluate_fleet(x, inst, m, 10.0).objective1);

        CHECK(r.fulfilled == (r.shortfall_cost == 0.0));
        if (r.fulfilled) {
            CHECK(r.objective1 == fleet_cost(x, m.vehicles));
            CHECK(r.objective2 == fleet_variance(x));
        }
        CHECK(r.objective1 == doctest::Approx(r.acquisition_cost + 10.0 * r.shortfall_cost));
        CHECK(r.objective2 == doctest::Approx(r.variance + 10.0 * r.shortfall_cost));

        // zero fleet: nothing is delivered
        double total = 0.0;
        for (const auto& t : inst.tasks) total += m.resources[t.resource].shortfall_cost * t.quantity;
        CHECK(evaluate_fleet(FleetMix::zeros(6), inst, m, 10.0).shortfall_cost == doctest::Approx(total));
        CHECK(max_shortfall_cost(inst, m) == doctest::Approx(total));
    }
}

TEST_CASE("model validation") {
    auto m = fixture::toy_model();
    CHECK_NOTHROW(m.validate());
    m.vehicles[0].unit_cost = 0.0;
    CHECK_THROWS_AS(m.validate(), ModelError);
    m = fixture::toy_model();
    m.vehicles[1].capacity = {0, 0};
    CHECK_THROWS_AS(m.validate(), ModelError);
}
