#include "capplan/config.hpp"

#include <map>
#include <regex>
#include <set>

#include "capplan/errors.hpp"
#include "capplan/io.hpp"

namespace capplan {

using nlohmann::json;

std::vector<std::string> PipelineConfig::scenario_names() const {
    std::vector<std::string> out;
    for (const auto& s : scenarios) out.push_back(s.name);
    return out;
}

DistributionSpec parse_distribution(const std::string& text) {
    static const std::regex re(R"(\s*([NU])\s*\(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\)\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw ConfigError("cannot parse distribution '" + text + "' (expected N(mean,sd) or U(low,high))");
    DistributionSpec spec;
    spec.kind = m[1] == "N" ? DistributionKind::Normal : DistributionKind::Uniform;
    try {
        spec.p1 = std::stod(m[2]);
        spec.p2 = std::stod(m[3]);
    } catch (const std::exception&) {
        throw ConfigError("bad number in distribution '" + text + "'");
    }
    spec.validate();
    return spec;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

std::size_t lookup(const std::map<std::string, std::size_t>& index, const std::string& name,
                   const char* what) {
    auto it = index.find(name);
    if (it == index.end()) throw ConfigError(std::string("unknown ") + what + " '" + name + "'");
    return it->second;
}

PipelineConfig build(const json& doc) {
    PipelineConfig cfg;
    cfg.name = get_or<std::string>(doc, "name", "unnamed");
    cfg.master_seed = get_or<std::uint64_t>(doc, "master_seed", 0);
    cfg.instances_per_scenario = get_or<std::size_t>(doc, "instances_per_scenario", 50);
    cfg.lambda = get_or<double>(doc, "lambda", 10.0);
    cfg.theta1 = get_or<double>(doc, "theta1", 500.0);
    cfg.theta2 = get_or<double>(doc, "theta2", 500.0);
    cfg.least_cost_filter = get_or<bool>(doc, "least_cost_filter", true);
    cfg.score_cap = get_or<std::size_t>(doc, "score_cap", 0);
    cfg.solve_repeats = get_or<std::size_t>(doc, "solve_repeats", 1);
    const auto horizon = get_or<std::int64_t>(doc, "horizon_min", kDefaultHorizonMinutes);

    std::map<std::string, std::size_t> resource_index;
    for (const auto& jr : doc.at("resources")) {
        ResourceType r{jr.at("name").get<std::string>(), jr.at("shortfall_cost").get<double>()};
        if (!resource_index.emplace(r.name, cfg.model.resources.size()).second)
            throw ConfigError("duplicate resource " + r.name);
        cfg.model.resources.push_back(std::move(r));
    }
    std::map<std::string, std::size_t> vehicle_index;
    for (const auto& jv : doc.at("vehicles")) {
        VehicleType v;
        v.name = jv.at("name").get<std::string>();
        v.unit_cost = jv.at("unit_cost").get<double>();
        v.capacity.assign(cfg.model.resource_count(), 0);
        for (const auto& [res, cap] : jv.at("capacity").items())
            v.capacity[lookup(resource_index, res, "resource")] = cap.get<std::int64_t>();
        if (!vehicle_index.emplace(v.name, cfg.model.vehicles.size()).second)
            throw ConfigError("duplicate vehicle " + v.name);
        cfg.model.vehicles.push_back(std::move(v));
    }
    try {
        cfg.model.validate();
    } catch (const ModelError& e) {
        throw ConfigError(e.what());
    }

    for (const auto& js : doc.at("scenarios")) {
        ScenarioTemplate t;
        t.name = js.at("name").get<std::string>();
        t.horizon = get_or<std::int64_t>(js, "horizon_min", horizon);
        for (const auto& jg : js.at("groups")) {
            TaskGroupTemplate g;
            for (const auto& name : jg.at("resources"))
                g.resources.push_back(lookup(resource_index, name.get<std::string>(), "resource"));
            g.count = parse_distribution(jg.at("count").get<std::string>());
            g.duration = parse_distribution(jg.at("duration").get<std::string>());
            g.delay = parse_distribution(jg.at("max_delay").get<std::string>());
            g.delay.positivity = Positivity::Clamp;
            g.quantity = parse_distribution(jg.at("quantity").get<std::string>());
            const auto unit = get_or<std::string>(jg, "duration_unit", "hours");
            if (unit == "hours")
                g.duration_unit = DurationUnit::Hours;
            else if (unit == "minutes")
                g.duration_unit = DurationUnit::Minutes;
            else
                throw ConfigError("duration_unit must be hours or minutes, got " + unit);
            t.groups.push_back(std::move(g));
        }
        t.validate(cfg.model.resource_count());
        cfg.scenarios.push_back(std::move(t));
    }
    if (cfg.scenarios.empty()) throw ConfigError("configuration defines no scenarios");
    std::set<std::string> names;
    for (const auto& s : cfg.scenarios)
        if (!names.insert(s.name).second) throw ConfigError("duplicate scenario name " + s.name);

    if (doc.contains("moea")) {
        const auto& jm = doc.at("moea");
        cfg.moea.population_size = get_or<std::size_t>(jm, "population_size", 50);
        cfg.moea.generations = get_or<std::size_t>(jm, "generations", 100);
        cfg.moea.crossover_prob = get_or<double>(jm, "crossover_prob", 0.9);
        if (jm.contains("mutation_prob") && !jm.at("mutation_prob").is_null())
            cfg.moea.mutation_prob = jm.at("mutation_prob").get<double>();
        cfg.moea.eta_crossover = get_or<double>(jm, "eta_crossover", 20.0);
        cfg.moea.eta_mutation = get_or<double>(jm, "eta_mutation", 20.0);
        cfg.moea.max_bound = get_or<std::int64_t>(jm, "max_bound", 100000);
    }
    cfg.moea.lambda = cfg.lambda;
    cfg.moea.validate();

    if (doc.contains("hierarchy")) {
        const auto& jh = doc.at("hierarchy");
        cfg.hierarchy.max_depth = get_or<std::size_t>(jh, "max_depth", 50);
        const auto stability = get_or<std::string>(jh, "stability", "ceil-set");
        if (stability == "ceil-set")
            cfg.hierarchy.stability = Stability::CeilSet;
        else if (stability == "cluster-count")
            cfg.hierarchy.stability = Stability::ClusterCount;
        else
            throw ConfigError("hierarchy.stability must be ceil-set or cluster-count");
    }
    cfg.hierarchy.theta1 = cfg.theta1;
    cfg.hierarchy.theta2 = cfg.theta2;

    cfg.origin_fleet = FleetMix::zeros(cfg.model.vehicle_count());
    if (doc.contains("origin_fleet")) {
        for (const auto& [name, count] : doc.at("origin_fleet").items()) {
            const auto c = count.get<std::int64_t>();
            if (c < 0) throw ConfigError("origin fleet counts must be non-negative");
            cfg.origin_fleet[lookup(vehicle_index, name, "vehicle")] = c;
        }
    }

    if (cfg.instances_per_scenario < 1) throw ConfigError("instances_per_scenario must be at least 1");
    if (cfg.solve_repeats < 1) throw ConfigError("solve_repeats must be at least 1");
    if (!(cfg.theta1 > 0.0) || !(cfg.theta2 > 0.0)) throw ConfigError("theta1 and theta2 must be positive");
    if (!(cfg.lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
    return cfg;
}

}  // namespace

PipelineConfig parse_config(json document, std::optional<std::uint64_t> seed_override) {
    if (seed_override) document["master_seed"] = *seed_override;
    try {
        PipelineConfig cfg = build(document);
        // json objects keep keys sorted, so dump() is canonical
        cfg.config_hash = fnv1a_hex(document.dump());
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
}

PipelineConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
    const std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(std::move(doc), seed_override);
}

}  // namespace capplan
