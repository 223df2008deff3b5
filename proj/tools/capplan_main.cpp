// capplan: command-line driver for the planning pipeline.
//
//   capplan run --config config/case_study.json --out out --jobs 4
//
// Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
// 3 internal invariant violated.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "capplan/config.hpp"
#include "capplan/errors.hpp"
#include "capplan/pipeline.hpp"

namespace {

struct Args {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 0;
    bool reduce = false;
    bool quiet = false;
};

void add_common(CLI::App* sub, Args& args) {
    sub->add_option("--config", args.config, "pipeline configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "override the configured master seed");
    sub->add_option("--jobs", args.jobs, "worker threads (0: hardware concurrency)")->capture_default_str();
    sub->add_flag("--quiet", args.quiet, "no progress output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capplan - fleet capability planning under scenario uncertainty"};
    app.require_subcommand(1);
    Args args;

    using Stage = void (*)(const capplan::PipelineConfig&, const capplan::RunOptions&);
    const std::pair<const char*, Stage> stages[] = {
        {"generate", capplan::cmd_generate}, {"solve", capplan::cmd_solve},
        {"score", capplan::cmd_score},       {"cluster", capplan::cmd_cluster},
        {"network", capplan::cmd_network},   {"run", capplan::cmd_run},
    };
    const char* help[] = {
        "sample the scenario database",
        "find non-dominated fleets for every instance",
        "cross-evaluate archived fleets on every scenario",
        "build the fleet-mix hierarchy",
        "build and export the capability evolution network",
        "all stages in order",
    };
    std::vector<std::pair<CLI::App*, Stage>> subs;
    for (std::size_t k = 0; k < std::size(stages); ++k) {
        auto* sub = app.add_subcommand(stages[k].first, help[k]);
        add_common(sub, args);
        const std::string name = stages[k].first;
        if (name == "network" || name == "run")
            sub->add_flag("--reduce", args.reduce, "drop transitively implied edges");
        subs.emplace_back(sub, stages[k].second);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const auto cfg = capplan::load_config(args.config, args.seed);
        capplan::RunOptions opts;
        opts.out = args.out;
        opts.jobs = args.jobs ? args.jobs : std::max(1u, std::thread::hardware_concurrency());
        opts.reduce = args.reduce;
        opts.log = args.quiet ? nullptr : &std::cerr;
        for (auto& [sub, stage] : subs)
            if (sub->parsed()) stage(cfg, opts);
        return 0;
    } catch (const capplan::UsageError& e) {
        std::cerr << "capplan: " << e.what() << "\n";
        return 1;
    } catch (const capplan::ConfigError& e) {
        std::cerr << "capplan: configuration error: " << e.what() << "\n";
        return 1;
    } catch (const capplan::IoError& e) {
        std::cerr << "capplan: I/O error: " << e.what() << "\n";
        return 2;
    } catch (const capplan::InvariantError& e) {
        std::cerr << "capplan: invariant violated: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "capplan: " << e.what() << "\n";
        return 3;
    }
}
