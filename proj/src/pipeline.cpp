#include "capplan/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "capplan/errors.hpp"
#include "capplan/io.hpp"
#include "capplan/parallel.hpp"

namespace capplan {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace artifact {
fs::path instances(const fs::path& out, const std::string& scenario) {
    return out / "sdb" / scenario / "instances.ndjson";
}
fs::path nds_part(const fs::path& out, const std::string& scenario, std::size_t instance) {
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.csv", instance);
    return out / "nds" / "parts" / scenario / name;
}
fs::path nds_archive(const fs::path& out) { return out / "nds" / "archive.csv"; }
fs::path score_matrix(const fs::path& out) { return out / "scores" / "score_matrix.csv"; }
fs::path hierarchy(const fs::path& out) { return out / "cluster" / "hierarchy.json"; }
fs::path network_dot(const fs::path& out) { return out / "network" / "network.dot"; }
fs::path network_json(const fs::path& out) { return out / "network" / "network.json"; }
}  // namespace artifact

namespace {

constexpr std::uint64_t kSolveDomain = 0x534f'4c56;  // "SOLV"

std::string provenance_line(const char* kind, const PipelineConfig& cfg) {
    return std::string("# capplan ") + kind + " config_hash=" + cfg.config_hash +
           " master_seed=" + std::to_string(cfg.master_seed) + "\n";
}

void check_provenance_line(const std::string& first_line, const PipelineConfig& cfg, const std::string& what) {
    if (first_line.find("config_hash=" + cfg.config_hash) == std::string::npos)
        throw UsageError(what + " was produced by a different configuration or seed; rerun that stage");
}

std::string require(const fs::path& path, const std::string& stage) {
    if (!fs::exists(path))
        throw UsageError("missing " + path.string() + "; run the '" + stage + "' stage first");
    return read_file(path);
}

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw IoError("bad number '" + s + "' in " + what);
    return v;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
    std::int64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw IoError("bad integer '" + s + "' in " + what);
    return v;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

std::size_t scenario_index(const PipelineConfig& cfg, const std::string& name) {
    for (std::size_t s = 0; s < cfg.scenarios.size(); ++s)
        if (cfg.scenarios[s].name == name) return s;
    throw IoError("unknown scenario '" + name + "' in artifact");
}

void log_line(const RunOptions& opts, const std::string& msg) {
    if (opts.log) *opts.log << msg << "\n";
}

// Keeps the mutually non-dominated entries on (cost, variance), one per genome.
std::vector<NdsEntry> merge_fronts(std::vector<NdsEntry> all) {
    std::vector<NdsEntry> out;
    std::set<FleetMix> seen;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const Objectives oi{all[i].cost, all[i].variance};
        bool dominated = false;
        for (std::size_t j = 0; j < all.size() && !dominated; ++j)
            dominated = j != i && dominates({all[j].cost, all[j].variance}, oi);
        if (!dominated && seen.insert(all[i].genome).second) out.push_back(std::move(all[i]));
    }
    std::sort(out.begin(), out.end(), [](const NdsEntry& a, const NdsEntry& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.variance != b.variance) return a.variance < b.variance;
        return a.genome < b.genome;
    });
    return out;
}

std::string nds_rows(std::span<const NdsEntry> entries) {
    std::string s;
    for (const auto& e : entries) {
        s += e.scenario_id + "," + std::to_string(e.instance_id);
        for (auto c : e.genome.counts) s += "," + std::to_string(c);
        s += "," + format_number(e.cost) + "," + format_number(e.variance) + "\n";
    }
    return s;
}

std::string nds_header(const PipelineConfig& cfg) {
    std::string s = "scenario_id,instance_id";
    for (std::size_t i = 1; i <= cfg.model.vehicle_count(); ++i) s += ",X_" + std::to_string(i);
    return s + ",cost,variance\n";
}

std::vector<double> maxima_of(const ScoreMatrix& m) { return m.per_scenario_max; }

}  // namespace

std::vector<NdsEntry> solve_instance(const PipelineConfig& cfg, const ProblemInstance& instance,
                                     std::size_t scenario_index) {
    std::vector<NdsEntry> all;
    for (std::size_t r = 0; r < cfg.solve_repeats; ++r) {
        Rng rng = make_stream(cfg.master_seed, {kSolveDomain, scenario_index, instance.instance_id, r});
        auto res = nsga2_solve(instance, cfg.model, cfg.moea, rng, scenario_index);
        if (cfg.solve_repeats == 1) return std::move(res.nds);
        all.insert(all.end(), res.nds.begin(), res.nds.end());
    }
    return merge_fronts(std::move(all));
}

std::string write_nds_table(std::span<const NdsEntry> entries, const PipelineConfig& cfg) {
    return provenance_line("nds-archive", cfg) + nds_header(cfg) + nds_rows(entries);
}

std::vector<NdsEntry> read_nds_table(const std::string& text, const PipelineConfig& cfg, const std::string& what) {
    const auto lines = lines_of(text);
    if (lines.size() < 2 || lines[0].rfind("#", 0) != 0) throw IoError(what + " has no provenance header");
    check_provenance_line(lines[0], cfg, what);
    if (lines[1] + "\n" != nds_header(cfg)) throw IoError(what + " has unexpected columns");
    const std::size_t n = cfg.model.vehicle_count();
    std::vector<NdsEntry> out;
    for (std::size_t k = 2; k < lines.size(); ++k) {
        const auto f = split(lines[k], ',');
        if (f.size() != n + 4) throw IoError(what + ": row " + std::to_string(k) + " has wrong field count");
        NdsEntry e;
        e.scenario_id = f[0];
        e.scenario_index = scenario_index(cfg, f[0]);
        e.instance_id = static_cast<std::size_t>(parse_int(f[1], what));
        e.genome = FleetMix::zeros(n);
        for (std::size_t i = 0; i < n; ++i) e.genome[i] = parse_int(f[2 + i], what);
        e.cost = parse_double(f[n + 2], what);
        e.variance = parse_double(f[n + 3], what);
        out.push_back(std::move(e));
    }
    return out;
}

std::string write_score_table(const ScoreMatrix& m, const PipelineConfig& cfg) {
    std::string s = provenance_line("score-matrix", cfg) + "fleet_id,scenario_id,raw,normalized\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r)
        for (std::size_t c = 0; c < m.scenarios.size(); ++c)
            s += std::to_string(m.rows[r]) + "," + m.scenarios[c] + "," + format_number(m.raw[r][c]) + "," +
                 format_number(m.normalized[r][c]) + "\n";
    return s;
}

ScoreMatrix read_score_table(const std::string& text, const PipelineConfig& cfg) {
    const std::string what = "score matrix";
    const auto lines = lines_of(text);
    if (lines.size() < 2) throw IoError("score matrix is truncated");
    check_provenance_line(lines[0], cfg, what);
    ScoreMatrix m;
    m.scenarios = cfg.scenario_names();
    const std::size_t cols = m.scenarios.size();
    std::map<std::size_t, std::size_t> row_of;
    for (std::size_t k = 2; k < lines.size(); ++k) {
        const auto f = split(lines[k], ',');
        if (f.size() != 4) throw IoError("score matrix row " + std::to_string(k) + " has wrong field count");
        const auto id = static_cast<std::size_t>(parse_int(f[0], what));
        auto [it, fresh] = row_of.emplace(id, m.rows.size());
        if (fresh) {
            m.rows.push_back(id);
            m.raw.emplace_back(cols, 0.0);
            m.normalized.emplace_back(cols, 0.0);
        }
        const auto s = scenario_index(cfg, f[1]);
        m.raw[it->second][s] = parse_double(f[2], what);
        m.normalized[it->second][s] = parse_double(f[3], what);
    }
    m.per_scenario_max.assign(cols, 0.0);
    for (const auto& row : m.raw)
        for (std::size_t s = 0; s < cols; ++s) m.per_scenario_max[s] = std::max(m.per_scenario_max[s], row[s]);
    return m;
}

std::string write_hierarchy(const Hierarchy& h, std::span<const std::size_t> sources, const PipelineConfig& cfg) {
    const auto names = cfg.scenario_names();
    ordered_json j;
    j["provenance"] = {{"config_hash", cfg.config_hash}, {"master_seed", cfg.master_seed}};
    j["theta1"] = cfg.theta1;
    j["theta2"] = cfg.theta2;
    j["stop_reason"] = to_string(h.stop_reason);
    j["scenarios"] = names;
    auto& levels = j["levels"] = ordered_json::array();
    for (std::size_t l = 0; l < h.levels.size(); ++l) {
        const auto& level = h.levels[l];
        ordered_json jl;
        jl["level"] = l;
        jl["theta"] = level.theta;
        auto& inputs = jl["inputs"] = ordered_json::array();
        for (std::size_t i = 0; i < level.inputs.size(); ++i) {
            ordered_json ji;
            ji["id"] = i;
            if (l == 0 && i < sources.size()) ji["archive_row"] = sources[i];
            ji["fleet"] = level.inputs[i].counts;
            inputs.push_back(std::move(ji));
        }
        auto& clusters = jl["clusters"] = ordered_json::array();
        for (std::size_t c = 0; c < level.clusters.size(); ++c)
            clusters.push_back({{"id", c},
                                {"members", level.clusters[c].members},
                                {"diameter", level.clusters[c].diameter}});
        auto& ceils = jl["ceils"] = ordered_json::array();
        for (const auto& ceil : level.ceils) {
            ordered_json scores = ordered_json::object();
            for (std::size_t s = 0; s < ceil.scores.size() && s < names.size(); ++s) scores[names[s]] = ceil.scores[s];
            ceils.push_back({{"cluster", ceil.cluster},
                             {"fleet", ceil.fleet.counts},
                             {"cost", ceil.cost},
                             {"scores", std::move(scores)}});
        }
        levels.push_back(std::move(jl));
    }
    return j.dump(2) + "\n";
}

Hierarchy read_hierarchy(const std::string& text, const PipelineConfig& cfg) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("provenance").at("config_hash").get<std::string>() != cfg.config_hash)
            throw UsageError("hierarchy was produced by a different configuration or seed; rerun cluster");
        const auto names = cfg.scenario_names();
        Hierarchy h;
        const auto reason = j.at("stop_reason").get<std::string>();
        bool known = false;
        for (auto r : {StopReason::SingleCluster, StopReason::AllSingletons, StopReason::Fixpoint,
                       StopReason::MaxIterations})
            if (to_string(r) == reason) {
                h.stop_reason = r;
                known = true;
            }
        if (!known) throw IoError("unknown stop_reason " + reason);
        for (const auto& jl : j.at("levels")) {
            HierarchyLevel level;
            level.theta = jl.at("theta").get<double>();
            for (const auto& ji : jl.at("inputs"))
                level.inputs.emplace_back(ji.at("fleet").get<std::vector<std::int64_t>>());
            for (const auto& jc : jl.at("clusters"))
                level.clusters.push_back({jc.at("members").get<std::vector<std::size_t>>(),
                                          jc.at("diameter").get<double>()});
            for (const auto& jc : jl.at("ceils")) {
                Ceil ceil;
                ceil.cluster = jc.at("cluster").get<std::size_t>();
                ceil.fleet = FleetMix(jc.at("fleet").get<std::vector<std::int64_t>>());
                ceil.cost = jc.at("cost").get<double>();
                ceil.level = h.levels.size();
                for (const auto& name : names) ceil.scores.push_back(jc.at("scores").at(name).get<double>());
                level.ceils.push_back(std::move(ceil));
            }
            h.levels.push_back(std::move(level));
        }
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed hierarchy: ") + e.what());
    }
}

ScenarioDatabase load_database(const PipelineConfig& cfg, const fs::path& out) {
    ScenarioDatabase db;
    db.templates = cfg.scenarios;
    db.counter = db.templates.size();
    db.master_seed = cfg.master_seed;
    for (const auto& t : cfg.scenarios) {
        const auto path = artifact::instances(out, t.name);
        const auto lines = lines_of(require(path, "generate"));
        std::vector<ProblemInstance> list;
        for (const auto& line : lines) {
            const auto hash = nlohmann::json::parse(line).at("config_hash").get<std::string>();
            if (hash != cfg.config_hash)
                throw UsageError(path.string() + " was produced by a different configuration or seed; rerun generate");
            auto inst = instance_from_json_line(line, cfg.model.resource_count());
            if (inst.scenario_id != t.name || inst.instance_id != list.size())
                throw IoError(path.string() + ": instance records out of order");
            list.push_back(std::move(inst));
        }
        if (list.size() != cfg.instances_per_scenario)
            throw IoError(path.string() + ": expected " + std::to_string(cfg.instances_per_scenario) +
                          " instances, found " + std::to_string(list.size()));
        db.instances.push_back(std::move(list));
    }
    return db;
}

std::vector<std::size_t> least_cost_rows(std::span<const NdsEntry> entries) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> best;
    for (std::size_t r = 0; r < entries.size(); ++r) {
        const auto key = std::make_pair(entries[r].scenario_index, entries[r].instance_id);
        auto [it, fresh] = best.emplace(key, r);
        if (fresh) continue;
        const auto& cur = entries[it->second];
        const auto& cand = entries[r];
        if (cand.cost < cur.cost - kMoneyTolerance ||
            (std::abs(cand.cost - cur.cost) <= kMoneyTolerance && cand.variance < cur.variance - kMoneyTolerance))
            it->second = r;
    }
    std::vector<std::size_t> rows;
    for (const auto& [key, r] : best) rows.push_back(r);
    std::sort(rows.begin(), rows.end());
    return rows;
}

void verify_hierarchy(const Hierarchy& h, const Model& model) {
    if (h.levels.empty()) throw InvariantError("hierarchy has no levels");
    for (std::size_t l = 0; l < h.levels.size(); ++l) {
        const auto& level = h.levels[l];
        std::vector<WeightedPoint> wp;
        for (std::size_t i = 0; i < level.inputs.size(); ++i) wp.push_back(weight_fleet(i, level.inputs[i], model.vehicles));
        std::vector<std::size_t> seen(level.inputs.size(), 0);
        if (level.ceils.size() != level.clusters.size())
            throw InvariantError("level " + std::to_string(l) + ": one ceil per cluster expected");
        for (std::size_t c = 0; c < level.clusters.size(); ++c) {
            const auto& members = level.clusters[c].members;
            if (members.empty()) throw InvariantError("empty cluster");
            for (auto m : members) {
                if (m >= level.inputs.size()) throw InvariantError("cluster member out of range");
                ++seen[m];
                if (!level.ceils[c].fleet.covers(level.inputs[m]))
                    throw InvariantError("level " + std::to_string(l) + ": ceil does not cover a member");
            }
            const double d = diameter_of(wp, members);
            if (d > level.theta + 1e-9)
                throw InvariantError("level " + std::to_string(l) + ": cluster diameter " + format_number(d) +
                                     " exceeds theta " + format_number(level.theta));
        }
        for (auto count : seen)
            if (count != 1) throw InvariantError("clusters do not partition the level inputs");
        if (l > 0 && level.inputs.size() != h.levels[l - 1].ceils.size())
            throw InvariantError("level inputs are not the previous level's ceils");
    }
}

void verify_network(const CapabilityEvolutionNetwork& net, double theta2) {
    std::set<FleetMix> fleets;
    for (const auto& node : net.nodes) {
        if (!fleets.insert(node.fleet).second) throw InvariantError("two network nodes share a fleet");
        for (auto s : node.scores)
            if (!(s >= 0.0 && s <= 1.0)) throw InvariantError("node score outside [0, 1]");
    }
    for (const auto& e : net.edges) {
        const auto& a = net.nodes.at(e.from);
        const auto& b = net.nodes.at(e.to);
        if (!b.fleet.covers(a.fleet)) throw InvariantError("edge target does not cover its source");
        if (!(e.delta_cost > 0.0) || e.delta_cost > theta2 + kMoneyTolerance)
            throw InvariantError("edge cost delta outside (0, theta2]");
    }
    (void)topological_order(net);
}

void cmd_generate(const PipelineConfig& cfg, const RunOptions& opts) {
    const auto db = build_database(cfg.scenarios, cfg.instances_per_scenario, cfg.master_seed,
                                   cfg.model.resource_count(), opts.jobs);
    const auto prov = cfg.provenance();
    for (std::size_t s = 0; s < db.templates.size(); ++s) {
        std::string text;
        for (const auto& inst : db.instances[s]) text += instance_to_json_line(inst, prov) + "\n";
        write_file_atomic(artifact::instances(opts.out, db.templates[s].name), text);
        log_line(opts, "generate: " + db.templates[s].name + " " + std::to_string(db.instances[s].size()) +
                           " instances");
    }
}

void cmd_solve(const PipelineConfig& cfg, const RunOptions& opts) {
    const auto db = load_database(cfg, opts.out);
    const std::size_t per = cfg.instances_per_scenario;
    const std::size_t cells = db.templates.size() * per;
    parallel_for(cells, opts.jobs, [&](std::size_t cell) {
        const std::size_t s = cell / per;
        const std::size_t i = cell % per;
        const auto part = artifact::nds_part(opts.out, cfg.scenarios[s].name, i);
        if (fs::exists(part)) {
            const auto text = read_file(part);
            if (text.find("config_hash=" + cfg.config_hash + " ") != std::string::npos) return;  // checkpoint
        }
        const auto entries = solve_instance(cfg, db.instances[s][i], s);
        write_file_atomic(part, write_nds_table(entries, cfg));
    });

    std::vector<NdsEntry> archive;
    for (std::size_t s = 0; s < db.templates.size(); ++s) {
        std::size_t count = 0;
        std::size_t empty = 0;
        for (std::size_t i = 0; i < per; ++i) {
            const auto part = artifact::nds_part(opts.out, cfg.scenarios[s].name, i);
            auto entries = read_nds_table(read_file(part), cfg, part.string());
            if (entries.empty()) {
                ++empty;
                log_line(opts, "solve: warning: no feasible fleet for " + cfg.scenarios[s].name + "/" +
                                   std::to_string(i));
            }
            count += entries.size();
            archive.insert(archive.end(), std::make_move_iterator(entries.begin()),
                           std::make_move_iterator(entries.end()));
        }
        log_line(opts, "solve: " + cfg.scenarios[s].name + " " + std::to_string(count) + " non-dominated fleets" +
                           (empty ? " (" + std::to_string(empty) + " instances without a feasible fleet)" : ""));
    }
    write_file_atomic(artifact::nds_archive(opts.out), write_nds_table(archive, cfg));
}

void cmd_score(const PipelineConfig& cfg, const RunOptions& opts) {
    const auto db = load_database(cfg, opts.out);
    auto entries = read_nds_table(require(artifact::nds_archive(opts.out), "solve"), cfg, "NDS archive");

    std::vector<std::size_t> rows;
    if (cfg.score_cap == 0 || cfg.score_cap >= entries.size()) {
        rows.resize(entries.size());
        for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
    } else {
        // least-cost fleets first so the cluster inputs are always scored
        std::set<std::size_t> chosen;
        for (auto r : least_cost_rows(entries)) {
            if (chosen.size() == cfg.score_cap) break;
            chosen.insert(r);
        }
        for (std::size_t r = 0; r < entries.size() && chosen.size() < cfg.score_cap; ++r) chosen.insert(r);
        rows.assign(chosen.begin(), chosen.end());
    }
    std::vector<NdsEntry> scored;
    for (auto r : rows) scored.push_back(entries[r]);
    const auto matrix = cross_evaluate(scored, rows, db, cfg.model, opts.jobs);
    write_file_atomic(artifact::score_matrix(opts.out), write_score_table(matrix, cfg));
    log_line(opts, "score: " + std::to_string(rows.size()) + " fleets x " + std::to_string(db.templates.size()) +
                       " scenarios");
}

void cmd_cluster(const PipelineConfig& cfg, const RunOptions& opts) {
    const auto db = load_database(cfg, opts.out);
    const auto entries = read_nds_table(require(artifact::nds_archive(opts.out), "solve"), cfg, "NDS archive");
    const auto matrix = read_score_table(require(artifact::score_matrix(opts.out), "score"), cfg);
    const auto maxima = maxima_of(matrix);

    std::vector<std::size_t> rows;
    if (cfg.least_cost_filter) {
        rows = least_cost_rows(entries);
    } else {
        std::set<FleetMix> seen;
        for (std::size_t r = 0; r < entries.size(); ++r)
            if (seen.insert(entries[r].genome).second) rows.push_back(r);
    }
    if (rows.empty()) throw UsageError("the NDS archive holds no feasible fleets to cluster");
    std::vector<FleetMix> points;
    for (auto r : rows) points.push_back(entries[r].genome);

    const CeilScorer scorer = [&](std::span<const FleetMix> fleets) {
        return score_against(fleets, db, cfg.model, maxima, opts.jobs);
    };
    const auto h = build_hierarchy(points, cfg.hierarchy, cfg.model, scorer);
    verify_hierarchy(h, cfg.model);
    write_file_atomic(artifact::hierarchy(opts.out), write_hierarchy(h, rows, cfg));
    std::string trail;
    for (const auto& level : h.levels) trail += (trail.empty() ? "" : " -> ") + std::to_string(level.clusters.size());
    log_line(opts, "cluster: " + std::to_string(points.size()) + " points -> " + trail + " clusters (" +
                       to_string(h.stop_reason) + ")");
}

void cmd_network(const PipelineConfig& cfg, const RunOptions& opts) {
    const auto db = load_database(cfg, opts.out);
    const auto matrix = read_score_table(require(artifact::score_matrix(opts.out), "score"), cfg);
    const auto h = read_hierarchy(require(artifact::hierarchy(opts.out), "cluster"), cfg);
    const auto maxima = maxima_of(matrix);
    const std::vector<FleetMix> origin{cfg.origin_fleet};
    const auto origin_scores = score_against(origin, db, cfg.model, maxima, opts.jobs).front();
    auto net = build_network(h, cfg.origin_fleet, origin_scores, cfg.theta2, cfg.model, cfg.scenario_names());
    if (opts.reduce) net = transitive_reduction(net);
    verify_network(net, cfg.theta2);
    const std::string comment = "capplan network config_hash=" + cfg.config_hash +
                                " master_seed=" + std::to_string(cfg.master_seed);
    write_file_atomic(artifact::network_dot(opts.out), export_dot(net, comment));
    write_file_atomic(artifact::network_json(opts.out), export_json(net, cfg.config_hash, cfg.master_seed));
    log_line(opts, "network: " + std::to_string(net.nodes.size()) + " nodes, " + std::to_string(net.edges.size()) +
                       " edges");
}

void cmd_run(const PipelineConfig& cfg, const RunOptions& opts) {
    cmd_generate(cfg, opts);
    cmd_solve(cfg, opts);
    cmd_score(cfg, opts);
    cmd_cluster(cfg, opts);
    cmd_network(cfg, opts);
}

}  // namespace capplan
