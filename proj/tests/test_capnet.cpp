#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "capplan/capnet.hpp"
#include "capplan/errors.hpp"
#include "capplan/io.hpp"
#include "fixtures.hpp"

using namespace capplan;
using fixture::fleet;

namespace {

Ceil make_ceil(FleetMix f, std::size_t level, std::size_t cluster, std::vector<double> scores, const Model& m) {
    Ceil c;
    c.cost = fleet_cost(f, m.vehicles);
    c.fleet = std::move(f);
    c.level = level;
    c.cluster = cluster;
    c.scores = std::move(scores);
    return c;
}

Hierarchy hierarchy_of(std::vector<std::vector<Ceil>> ceils_per_level) {
    Hierarchy h;
    for (auto& ceils : ceils_per_level) {
        HierarchyLevel level;
        for (std::size_t c = 0; c < ceils.size(); ++c) {
            level.inputs.push_back(ceils[c].fleet);
            level.clusters.push_back({{c}, 0.0});
        }
        level.ceils = std::move(ceils);
        h.levels.push_back(std::move(level));
    }
    return h;
}

// origin -> (0,600,0) cost 300 -> (0,600,1000) cost 600
CapabilityEvolutionNetwork three_node_network() {
    const auto m = fixture::toy_model();
    auto h = hierarchy_of({{make_ceil(fleet({0, 600, 0}), 0, 0, {0.4, 0.6}, m)},
                           {make_ceil(fleet({0, 600, 1000}), 1, 0, {0.1, 0.2}, m)}});
    const std::vector<double> origin_scores{1.0, 1.0};
    return build_network(h, FleetMix::zeros(3), origin_scores, 500, m, {"calm", "surge"});
}

std::string golden(const std::string& name) {
    return read_file(fixture::source_dir() / "tests" / "golden" / name);
}

}  // namespace

TEST_CASE("single ceil within theta2 gives one edge") {
    const auto m = fixture::toy_model();
    const auto h = hierarchy_of({{make_ceil(fleet({0, 600, 0}), 0, 0, {0.5}, m)}});
    const std::vector<double> origin{1.0};
    const auto net = build_network(h, FleetMix::zeros(3), origin, 500, m, {"s"});
    REQUIRE(net.nodes.size() == 2);
    REQUIRE(net.edges.size() == 1);
    CHECK(net.edges[0].from == 0);
    CHECK(net.edges[0].to == 1);
    CHECK(net.edges[0].delta_cost == doctest::Approx(300.0));
    CHECK(net.edges[0].risk_improving);
    CHECK_FALSE(net.nodes[0].level.has_value());
}

TEST_CASE("expansions above theta2 are not connected") {
    const auto m = fixture::toy_model();
    const auto h = hierarchy_of({{make_ceil(fleet({0, 1400, 0}), 0, 0, {0.5}, m)}});
    const std::vector<double> origin{1.0};
    const auto net = build_network(h, FleetMix::zeros(3), origin, 500, m, {"s"});
    CHECK(net.nodes.size() == 2);
    CHECK(net.edges.empty());
}

TEST_CASE("incomparable fleets are not connected") {
    Model m;
    m.resources = {{"R", 1}};
    m.vehicles = {{"A", 1.0, {1}}, {"B", 1.0, {1}}};
    const auto h = hierarchy_of({{make_ceil(fleet({3, 0}), 0, 0, {0.5}, m), make_ceil(fleet({0, 3}), 0, 1, {0.5}, m)}});
    const std::vector<double> origin{1.0};
    const auto net = build_network(h, fleet({3, 0}), origin, 500, m, {"s"});
    // origin equals the first ceil and is not duplicated
    REQUIRE(net.nodes.size() == 2);
    CHECK(net.edges.empty());
}

TEST_CASE("duplicated ceils across levels become one node") {
    const auto m = fixture::toy_model();
    const auto h = hierarchy_of({{make_ceil(fleet({1, 1, 1}), 0, 0, {0.5}, m)},
                                 {make_ceil(fleet({1, 1, 1}), 1, 0, {0.5}, m)}});
    const std::vector<double> origin{1.0};
    const auto net = build_network(h, FleetMix::zeros(3), origin, 500, m, {"s"});
    CHECK(net.nodes.size() == 2);
    CHECK(net.nodes[1].level == 0u);
}

TEST_CASE("network invariants and reduction") {
    const auto net = three_node_network();
    REQUIRE(net.nodes.size() == 3);
    REQUIRE(net.edges.size() == 2);
    CHECK(topological_order(net) == std::vector<std::size_t>{0, 1, 2});

    // a dense chain: 0 -> 1 -> 2 -> 3 with all shortcuts within theta2
    Model m;
    m.resources = {{"R", 1}};
    m.vehicles = {{"A", 1.0, {1}}};
    const auto h = hierarchy_of({{make_ceil(fleet({1}), 0, 0, {0.9}, m), make_ceil(fleet({2}), 0, 1, {0.5}, m),
                                  make_ceil(fleet({3}), 0, 2, {0.7}, m)}});
    const std::vector<double> origin{1.0};
    const auto dense = build_network(h, fleet({0}), origin, 10, m, {"s"});
    CHECK(dense.edges.size() == 6);
    const auto reduced = transitive_reduction(dense);
    REQUIRE(reduced.edges.size() == 3);
    for (const auto& e : reduced.edges) CHECK(e.to == e.from + 1);
    CHECK_FALSE(reduced.edges[2].risk_improving);  // 0.5 -> 0.7

    for (const auto& e : dense.edges) {
        CHECK(dense.nodes[e.to].fleet.covers(dense.nodes[e.from].fleet));
        CHECK(e.delta_cost > 0.0);
        CHECK(e.delta_cost <= 10.0);
    }

    auto cyclic = dense;
    cyclic.edges.push_back({3, 0, 1.0, false});
    CHECK_THROWS_AS(topological_order(cyclic), InvariantError);
}

TEST_CASE("exports match the reviewed golden files") {
    const auto net = three_node_network();
    const auto dot = export_network(net, "dot");
    const auto json = export_network(net, "json");
    CHECK(dot == golden("three_node_network.dot"));
    CHECK(json == golden("three_node_network.json"));
    CHECK(export_network(net, "dot") == dot);
    CHECK(export_network(net, "json") == json);
    CHECK_THROWS_AS(export_network(net, "svg"), UsageError);

    const auto doc = nlohmann::json::parse(json);
    CHECK(doc.at("origin") == 0);
    CHECK(doc.at("nodes").size() == 3);
    CHECK(doc.at("edges")[1].at("delta_cost").get<double>() == doctest::Approx(300.0));
}

TEST_CASE("network without edges exports nodes only") {
    const auto m = fixture::toy_model();
    const auto h = hierarchy_of({{make_ceil(fleet({0, 1400, 0}), 0, 0, {0.5}, m)}});
    const std::vector<double> origin{1.0};
    const auto net = build_network(h, FleetMix::zeros(3), origin, 500, m, {"s"});
    const auto dot = export_dot(net);
    CHECK(dot.find("->") == std::string::npos);
    CHECK(dot.find("n1 [label=") != std::string::npos);
    CHECK(nlohmann::json::parse(export_json(net)).at("edges").empty());
}
