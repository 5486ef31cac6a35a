#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lossbal/cli/config.hpp"
#include "lossbal/cli/runner.hpp"
#include "lossbal/error.hpp"

namespace {

enum Exit { kOk = 0, kRunFailure = 1, kConfigError = 2, kOrderingFailure = 3 };

struct RunOptions {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> repetitions;
    std::string out;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
};

lossbal::cli::RunConfig resolve(const RunOptions& o) {
    using namespace lossbal;
    if (o.config.empty() == o.preset.empty()) throw ConfigError("", "give exactly one of --config or --preset");
    auto cfg = o.config.empty() ? cli::load_preset(o.preset) : cli::parse_config(o.config);
    if (o.repetitions)
        cli::set_repetitions(cfg, o.seed.value_or(cfg.seeds.front()), *o.repetitions);
    else if (o.seed)
        cfg.seeds = {*o.seed};
    if (!o.out.empty()) cfg.output.dir = o.out;
    cfg.validate();
    return cfg;
}

void add_run_options(CLI::App* app, RunOptions& o) {
    app->add_option("--config", o.config, "YAML run configuration")->check(CLI::ExistingFile);
    app->add_option("--preset", o.preset, "Built-in preset name");
    app->add_option("--seed", o.seed, "Seed (first seed with --repetitions)");
    app->add_option("--repetitions", o.repetitions, "Number of consecutive seeds")->check(CLI::PositiveNumber);
    app->add_option("--out", o.out, "Output directory");
    app->add_option("--jobs", o.jobs, "Parallel workers for repetitions")->check(CLI::PositiveNumber);
}

int finish(const lossbal::cli::RunReport& report) {
    std::cout << "wrote " << report.files.size() << " files and manifest.json to " << report.dir.string() << '\n';
    if (!report.complete()) {
        std::cerr << report.failures.size() << " seed(s) failed; manifest marked partial\n";
        return kRunFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace lossbal;
    CLI::App app{"Loss-balancing experiments for multi-objective network training"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Train every seed of a configuration and write its artifacts");
    add_run_options(run, run_opts);

    RunOptions probe_opts;
    auto* probe = app.add_subcommand("probe", "Measure gradient stiffness at initialization");
    add_run_options(probe, probe_opts);

    std::vector<std::string> dirs;
    std::vector<std::string> expects;
    std::string compare_out;
    auto* compare = app.add_subcommand("compare", "Summarize finished runs and check orderings");
    compare->add_option("dirs", dirs, "Run directories")->required();
    compare->add_option("--expect", expects, "Ordering such as 'inverse-dirichlet<uniform' or 'l1:a<=b'");
    compare->add_option("--out", compare_out, "Summary CSV path");

    auto* presets = app.add_subcommand("presets", "List or print built-in presets");
    std::string show;
    presets->add_option("name", show, "Preset to print");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) {
            const auto cfg = resolve(run_opts);
            if (cfg.problem == cli::ProblemKind::StiffnessProbe) return finish(cli::probe(cfg, std::cout));
            return finish(cli::run(cfg, run_opts.jobs, std::cout));
        }
        if (*probe) {
            if (probe_opts.config.empty() && probe_opts.preset.empty()) probe_opts.preset = "stiffness-probe";
            auto cfg = resolve(probe_opts);
            if (cfg.problem != cli::ProblemKind::StiffnessProbe)
                throw ConfigError("problem", "probe needs problem: stiffness-probe");
            return finish(cli::probe(cfg, std::cout));
        }
        if (*compare) {
            std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
            const auto rows = cli::compare(paths);
            cli::print_compare_table(std::cout, rows);
            if (!compare_out.empty()) cli::write_compare_csv(compare_out, rows);
            int code = kOk;
            for (const auto& e : expects) {
                std::string detail;
                const bool ok = cli::check_ordering(rows, e, detail);
                std::cout << (ok ? "ordering ok: " : "ordering FAILED: ") << detail << '\n';
                if (!ok) code = kOrderingFailure;
            }
            return code;
        }
        if (*presets) {
            if (show.empty())
                for (const auto& n : cli::preset_names()) std::cout << n << '\n';
            else
                std::cout << cli::preset_source(show);
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRunFailure;
    }
    return kOk;
}
