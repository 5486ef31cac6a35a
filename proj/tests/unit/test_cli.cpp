#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lossbal/cli/config.hpp"
#include "lossbal/cli/runner.hpp"
#include "lossbal/error.hpp"

using namespace lossbal;
using namespace lossbal::cli;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config(const fs::path& dir) {
    auto cfg = parse_config_string(R"(
problem: sobolev
strategy: inverse-dirichlet
seeds: [0, 1]
network: {hidden_layers: 2, neurons: 8}
sobolev: {modes: 2, grid: 16, max_order: 2}
training: {epochs: 20, batch_size: 64, learning_rate: 1.0e-2, eval_every: 5}
output: {snapshot_epochs: [0, 10]}
)");
    cfg.output.dir = dir;
    return cfg;
}

int error_line(const std::string& text) {
    try {
        parse_config_string(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("sobolev-paper preset carries the reference settings") {
    const auto cfg = load_preset("sobolev-paper");
    CHECK(cfg.network.hidden_layers == 5);
    CHECK(cfg.network.neurons == 64);
    CHECK(cfg.network.activation == nn::Activation::Sin);
    CHECK(cfg.sobolev.modes == 20);
    CHECK(cfg.sobolev.max_order == 4);
    CHECK(cfg.training.epochs == 20000);
    CHECK(cfg.training.learning_rate == doctest::Approx(1e-3));
    CHECK(cfg.training.alpha == doctest::Approx(0.5));
    CHECK(cfg.training.update_every == 5);
}

TEST_CASE("poisson-paper preset carries the reference settings") {
    const auto cfg = load_preset("poisson-paper");
    CHECK(cfg.problem == ProblemKind::Poisson);
    CHECK(cfg.network.hidden_layers == 5);
    CHECK(cfg.network.neurons == 50);
    CHECK(cfg.network.activation == nn::Activation::Tanh);
    CHECK(cfg.poisson.omega == doctest::Approx(6.0));
    CHECK(cfg.poisson.interior_points == 2500);
    CHECK(cfg.poisson.boundary_per_edge == 100);
    CHECK(cfg.training.epochs == 30000);
}

TEST_CASE("every preset loads and validates") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        CHECK_NOTHROW(load_preset(name).validate());
    }
}

TEST_CASE("extends applies the parent first") {
    const auto cfg = load_preset("sobolev-desk");
    CHECK(cfg.sobolev.max_order == 4);  // inherited
    CHECK(cfg.network.neurons == 32);   // overridden
    CHECK(cfg.presets.back() == "sobolev-desk");
}

TEST_CASE("unknown keys are rejected with their line") {
    CHECK(error_line("problem: sobolev\ntraining:\n  epocs: 10\n") == 3);
    CHECK(error_line("problem: sobolev\nnetwrk: {neurons: 4}\n") == 2);
}

TEST_CASE("invalid combinations are rejected") {
    CHECK_THROWS_AS(parse_config_string("problem: poisson\nstrategy: epsilon-optimal\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config_string("strategy: nope\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("extends: no-such-preset\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("sobolev: {grid: 16}\ntraining: {batch_size: 4096}\n"), ConfigError);
}

TEST_CASE("to_yaml round-trips") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        auto cfg = load_preset(name);
        const auto text = to_yaml(cfg);
        cfg.presets.clear();
        CHECK(to_yaml(parse_config_string(text)) == to_yaml(cfg));
    }
}

TEST_CASE("repetitions expand to consecutive seeds") {
    auto cfg = load_preset("sobolev-desk");
    set_repetitions(cfg, 7, 3);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{7, 8, 9});
}

TEST_CASE("ordering expressions") {
    std::vector<CompareRow> rows(3);
    rows[0].strategy = "inverse-dirichlet", rows[0].l2_mean = 0.01, rows[0].l1_mean = 0.02;
    rows[1].strategy = "max-avg", rows[1].l2_mean = 0.05, rows[1].l1_mean = 0.01;
    rows[2].strategy = "uniform", rows[2].l2_mean = 0.05, rows[2].l1_mean = 0.2;
    std::string detail;
    CHECK(check_ordering(rows, "inverse-dirichlet<max-avg<=uniform", detail));
    CHECK_FALSE(check_ordering(rows, "inverse-dirichlet<max-avg<uniform", detail));
    CHECK_FALSE(check_ordering(rows, "l1:inverse-dirichlet<max-avg", detail));
    CHECK(check_ordering(rows, "l1:max-avg<inverse-dirichlet<uniform", detail));
}

TEST_CASE("runs are reproducible and comparable") {
    const fs::path root = fs::temp_directory_path() / "lossbal_test_cli";
    fs::remove_all(root);
    std::ostringstream log;

    auto cfg = tiny_config(root / "a");
    const auto a = run(cfg, 2, log);
    REQUIRE(a.complete());
    std::ifstream first(a.dir / "manifest.json");
    const std::string manifest_a{std::istreambuf_iterator<char>(first), {}};

    fs::remove_all(a.dir);
    const auto again = run(cfg, 1, log);
    std::ifstream second(again.dir / "manifest.json");
    CHECK(std::string{std::istreambuf_iterator<char>(second), {}} == manifest_a);

    for (const char* f : {"metrics_seed0.csv", "lambda_seed1.csv", "spectrum_seed0.csv", "config.yaml"})
        CHECK(fs::exists(again.dir / f));

    cfg.strategy = balance::Strategy::Uniform;
    cfg.output.dir = root / "b";
    REQUIRE(run(cfg, 1, log).complete());
    const auto rows = compare({root / "a", root / "b"});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].seeds == 2);
    CHECK(rows[0].l2_std >= 0.0);

    cfg.seeds = {0};
    cfg.output.dir = root / "c";
    REQUIRE(run(cfg, 1, log).complete());
    CHECK_THROWS(compare({root / "a", root / "c"}));
    fs::remove_all(root);
}
