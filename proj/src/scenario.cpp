#include "capplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "capplan/errors.hpp"
#include "capplan/parallel.hpp"

namespace capplan {

namespace {
constexpr std::uint64_t kSamplingDomain = 0x5344'4200;  // "SDB"
}

void DistributionSpec::validate() const {
    if (!std::isfinite(p1) || !std::isfinite(p2)) throw ConfigError("distribution parameters must be finite");
    if (kind == DistributionKind::Uniform && p1 > p2)
        throw ConfigError("uniform distribution needs low <= high");
    if (kind == DistributionKind::Normal && p2 < 0.0)
        throw ConfigError("normal distribution needs a non-negative standard deviation");
}

double DistributionSpec::practical_max() const {
    return kind == DistributionKind::Uniform ? p2 : p1 + 6.0 * p2;
}

double sample_value(const DistributionSpec& spec, Rng& rng, double scale) {
    for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        const double raw = spec.kind == DistributionKind::Uniform
                               ? uniform_real(rng, spec.p1, spec.p2)
                               : spec.p1 + spec.p2 * standard_normal(rng);
        double value = raw * scale;
        if (spec.rounding) value = std::round(value);
        switch (spec.positivity) {
            case Positivity::None:
                return value;
            case Positivity::Clamp:
                return std::max(value, 0.0);
            case Positivity::Resample:
                if (value > 0.0) return value;
                break;
        }
    }
    throw ConfigError("degenerate distribution: " + std::to_string(kMaxResampleAttempts) +
                      " consecutive non-positive draws");
}

void ScenarioTemplate::validate(std::size_t resource_count) const {
    if (name.empty()) throw ConfigError("scenario template needs a name");
    if (horizon < 1) throw ConfigError("scenario " + name + ": horizon must be positive");
    std::set<std::size_t> seen;
    for (const auto& g : groups) {
        if (g.resources.empty()) throw ConfigError("scenario " + name + ": task group without resources");
        for (auto r : g.resources) {
            if (r >= resource_count)
                throw ConfigError("scenario " + name + ": unknown resource " + std::to_string(r + 1));
            if (!seen.insert(r).second)
                throw ConfigError("scenario " + name + ": resource " + std::to_string(r + 1) +
                                  " appears in more than one group");
        }
        g.count.validate();
        g.duration.validate();
        g.delay.validate();
        g.quantity.validate();
        const double scale = g.duration_unit == DurationUnit::Hours ? 60.0 : 1.0;
        if (g.duration.practical_max() * scale > static_cast<double>(horizon))
            throw ConfigError("scenario " + name + ": horizon of " + std::to_string(horizon) +
                              " minutes is shorter than the longest possible task duration");
    }
}

std::size_t ScenarioDatabase::instance_count() const {
    std::size_t n = 0;
    for (const auto& s : instances) n += s.size();
    return n;
}

ProblemInstance sample_instance(const ScenarioTemplate& tmpl, std::size_t scenario_idx,
                                std::size_t instance_idx, std::uint64_t master_seed) {
    Rng rng = make_stream(master_seed, {kSamplingDomain, scenario_idx, instance_idx});
    ProblemInstance inst;
    inst.scenario_id = tmpl.name;
    inst.instance_id = instance_idx;
    for (const auto& g : tmpl.groups) {
        const double scale = g.duration_unit == DurationUnit::Hours ? 60.0 : 1.0;
        for (auto resource : g.resources) {
            const auto k = static_cast<std::int64_t>(sample_value(g.count, rng));
            for (std::int64_t l = 0; l < k; ++l) {
                Task t;
                t.id = inst.tasks.size();
                t.resource = resource;
                int attempts = 0;
                do {
                    if (++attempts > kMaxResampleAttempts)
                        throw ConfigError("scenario " + tmpl.name + ": durations keep exceeding the horizon");
                    t.duration = static_cast<std::int64_t>(sample_value(g.duration, rng, scale));
                } while (t.duration > tmpl.horizon);
                t.max_delay = static_cast<std::int64_t>(sample_value(g.delay, rng));
                t.quantity = static_cast<std::int64_t>(sample_value(g.quantity, rng));
                t.earliest_start = uniform_int(rng, 0, tmpl.horizon - t.duration);
                inst.tasks.push_back(t);
            }
        }
    }
    return inst;
}

ScenarioDatabase build_database(std::vector<ScenarioTemplate> templates,
                                std::size_t instances_per_scenario, std::uint64_t master_seed,
                                std::size_t resource_count, std::size_t jobs) {
    if (instances_per_scenario < 1) throw ConfigError("instances_per_scenario must be at least 1");
    std::set<std::string> names;
    for (const auto& t : templates) {
        t.validate(resource_count);
        if (!names.insert(t.name).second) throw ConfigError("duplicate scenario name " + t.name);
    }
    ScenarioDatabase db;
    db.templates = std::move(templates);
    db.counter = db.templates.size();
    db.master_seed = master_seed;
    db.instances.assign(db.templates.size(), std::vector<ProblemInstance>(instances_per_scenario));
    const std::size_t total = db.templates.size() * instances_per_scenario;
    parallel_for(total, jobs, [&](std::size_t cell) {
        const std::size_t s = cell / instances_per_scenario;
        const std::size_t i = cell % instances_per_scenario;
        db.instances[s][i] = sample_instance(db.templates[s], s, i, master_seed);
    });
    return db;
}

std::string instance_to_json_line(const ProblemInstance& instance, const Provenance& provenance) {
    nlohmann::ordered_json j;
    j["scenario_id"] = instance.scenario_id;
    j["instance_id"] = instance.instance_id;
    j["config_hash"] = provenance.config_hash;
    j["master_seed"] = provenance.master_seed;
    auto& tasks = j["tasks"] = nlohmann::ordered_json::array();
    for (const auto& t : instance.tasks) {
        tasks.push_back({{"id", t.id},
                         {"resource", t.resource + 1},
                         {"duration_min", t.duration},
                         {"earliest_start_min", t.earliest_start},
                         {"max_delay_min", t.max_delay},
                         {"quantity", t.quantity}});
    }
    return j.dump();
}

ProblemInstance instance_from_json_line(std::string_view line, std::size_t resource_count) {
    try {
        const auto j = nlohmann::json::parse(line);
        ProblemInstance inst;
        inst.scenario_id = j.at("scenario_id").get<std::string>();
        inst.instance_id = j.at("instance_id").get<std::size_t>();
        for (const auto& jt : j.at("tasks")) {
            Task t;
            t.id = jt.at("id").get<std::size_t>();
            const auto r = jt.at("resource").get<std::int64_t>();
            if (r < 1 || static_cast<std::size_t>(r) > resource_count)
                throw ModelError("unknown resource id " + std::to_string(r));
            t.resource = static_cast<std::size_t>(r - 1);
            t.duration = jt.at("duration_min").get<std::int64_t>();
            t.earliest_start = jt.at("earliest_start_min").get<std::int64_t>();
            t.max_delay = jt.at("max_delay_min").get<std::int64_t>();
            t.quantity = jt.at("quantity").get<std::int64_t>();
            if (t.id != inst.tasks.size()) throw IoError("task ids are not contiguous");
            if (t.duration <= 0 || t.earliest_start < 0 || t.max_delay < 0 || t.quantity <= 0)
                throw IoError("task " + std::to_string(t.id) + " violates field constraints");
            inst.tasks.push_back(t);
        }
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed instance record: ") + e.what());
    }
}

}  // namespace capplan
