#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "capplan/rptc.hpp"

namespace fixture {

inline std::filesystem::path source_dir() { return CAPPLAN_SOURCE_DIR; }

inline capplan::VehicleType vehicle(std::string name, double cost, std::vector<std::int64_t> cap) {
    return {std::move(name), cost, std::move(cap)};
}

/// Six vehicle types and seven resources of the land-mobility case study.
inline capplan::Model case_study_model() {
    capplan::Model m;
    const double b[] = {100, 200, 50, 200, 20, 200, 100};
    for (int j = 0; j < 7; ++j) m.resources.push_back({"R" + std::to_string(j + 1), b[j]});
    m.vehicles = {
        vehicle("V1", 0.2, {2, 4, 0, 0, 0, 0, 0}),  vehicle("V2", 0.4, {3, 6, 2, 0, 0, 0, 0}),
        vehicle("V3", 0.2, {0, 0, 0, 0, 5, 10, 8}), vehicle("V4", 0.4, {0, 0, 0, 0, 8, 12, 14}),
        vehicle("V5", 0.5, {0, 0, 4, 3, 0, 0, 0}),  vehicle("V6", 0.8, {0, 0, 0, 10, 0, 0, 0}),
    };
    return m;
}

/// Three vehicle types over two resources.
inline capplan::Model toy_model() {
    capplan::Model m;
    m.resources = {{"A", 100}, {"B", 50}};
    m.vehicles = {vehicle("T1", 0.2, {2, 0}), vehicle("T2", 0.5, {3, 2}), vehicle("T3", 0.3, {0, 4})};
    return m;
}

inline capplan::Task task(std::size_t id, std::size_t resource, std::int64_t duration, std::int64_t es,
                          std::int64_t md, std::int64_t q) {
    return {id, resource, duration, es, md, q};
}

inline capplan::FleetMix fleet(std::vector<std::int64_t> c) { return capplan::FleetMix(std::move(c)); }

}  // namespace fixture
