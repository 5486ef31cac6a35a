#include "lossbal/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "lossbal/error.hpp"

namespace lossbal::cli {

std::string_view to_string(ProblemKind p) {
    switch (p) {
        case ProblemKind::Sobolev: return "sobolev";
        case ProblemKind::Poisson: return "poisson";
        case ProblemKind::StiffnessProbe: return "stiffness-probe";
        case ProblemKind::Forgetting: return "forgetting";
    }
    return "?";
}

ProblemKind parse_problem(std::string_view name) {
    for (ProblemKind p : {ProblemKind::Sobolev, ProblemKind::Poisson, ProblemKind::StiffnessProbe, ProblemKind::Forgetting})
        if (name == to_string(p)) return p;
    throw std::invalid_argument("unknown problem '" + std::string(name) +
                                "' (expected sobolev, poisson, stiffness-probe or forgetting)");
}

namespace {

const std::map<std::string, std::string, std::less<>>& presets() {
    static const std::map<std::string, std::string, std::less<>> table{
        {"sobolev-paper", R"(problem: sobolev
strategy: inverse-dirichlet
seeds: [0]
network: {hidden_layers: 5, neurons: 64, activation: sin}
sobolev: {modes: 20, grid: 128, max_order: 4, xi_init: 0.5, train_fraction: 0.5}
training:
  epochs: 20000
  batch_size: 4096
  learning_rate: 1.0e-3
  milestones: [10000, 15000]
  decay: 0.1
  update_every: 5
  alpha: 0.5
  statistic: mean-square
  eval_every: 10
output: {dir: runs/sobolev-paper, snapshot_epochs: [0]}
)"},
        {"sobolev-desk", R"(extends: sobolev-paper
seeds: [0, 1, 2]
network: {hidden_layers: 4, neurons: 32}
sobolev: {modes: 5, grid: 64}
training:
  epochs: 3000
  batch_size: 1024
  learning_rate: 1.0e-2
  milestones: [1500, 2250]
output: {dir: runs/sobolev-desk}
)"},
        {"poisson-paper", R"(problem: poisson
strategy: inverse-dirichlet
seeds: [0]
network: {hidden_layers: 5, neurons: 50, activation: tanh}
poisson: {omega: 6, interior_points: 2500, boundary_per_edge: 100, test_grid: 100}
training:
  epochs: 30000
  batch_size: 2500
  learning_rate: 1.0e-3
  milestones: [10000, 20000, 30000]
  decay: 0.1
  update_every: 5
  alpha: 0.5
  statistic: mean-square
  eval_every: 10
output: {dir: runs/poisson-paper, snapshot_epochs: [0]}
)"},
        {"poisson-desk", R"(extends: poisson-paper
seeds: [0, 1, 2]
network: {hidden_layers: 4, neurons: 32}
training:
  epochs: 8000
  milestones: [4000, 6000]
  eval_every: 50
output: {dir: runs/poisson-desk}
)"},
        {"forgetting-desk", R"(extends: sobolev-desk
problem: forgetting
sobolev: {max_order: 2}
forgetting: {stage_length: 600, reset_lambda: true}
training:
  epochs: 1800
  milestones: [900, 1350]
output: {dir: runs/forgetting-desk, snapshot_epochs: [0, 600, 1200]}
)"},
        {"stiffness-probe", R"(problem: stiffness-probe
strategy: uniform
seeds: [0, 1, 2, 3, 4]
network: {hidden_layers: 4, neurons: 32, activation: sin}
probe: {orders: [1, 2], wavenumbers: [2, 4, 8], grid: 64, target_driven: true, max_retries: 5, sensitivity_grid: 32}
output: {dir: runs/stiffness-probe}
)"},
    };
    return table;
}

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

[[noreturn]] void fail(const std::string& field, const std::string& what, const YAML::Node& n) {
    throw ConfigError(field, what, line_of(n));
}

template <class T>
T as(const YAML::Node& n, const std::string& field, const char* expected) {
    if (!n.IsScalar()) fail(field, std::string("expected ") + expected, n);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(field, std::string("expected ") + expected + ", got '" + n.Scalar() + "'", n);
    }
}

std::size_t as_count(const YAML::Node& n, const std::string& field) {
    const auto v = as<long long>(n, field, "a non-negative integer");
    if (v < 0) fail(field, "expected a non-negative integer", n);
    return static_cast<std::size_t>(v);
}

std::uint64_t as_seed(const YAML::Node& n, const std::string& field) {
    return as<std::uint64_t>(n, field, "a non-negative integer");
}

double as_real(const YAML::Node& n, const std::string& field) { return as<double>(n, field, "a number"); }
bool as_bool(const YAML::Node& n, const std::string& field) { return as<bool>(n, field, "true or false"); }
std::string as_string(const YAML::Node& n, const std::string& field) { return as<std::string>(n, field, "a string"); }

template <class F>
auto as_list(const YAML::Node& n, const std::string& field, F item) {
    using T = decltype(item(n, field));
    if (!n.IsSequence()) fail(field, "expected a list", n);
    std::vector<T> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(item(n[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

/// Runs a named enum parser, re-raising its message as a located config error.
template <class F>
auto parsed(const YAML::Node& n, const std::string& field, F parse) {
    const auto text = as_string(n, field);
    try {
        return parse(text);
    } catch (const std::invalid_argument& e) {
        fail(field, e.what(), n);
    }
}

using Handler = std::function<void(const YAML::Node&, const std::string&)>;

void apply_map(const YAML::Node& map, const std::string& prefix, const std::map<std::string, Handler>& handlers) {
    if (!map.IsMap()) fail(prefix, "expected a mapping", map);
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        const auto field = prefix.empty() ? key : prefix + "." + key;
        const auto it = handlers.find(key);
        if (it == handlers.end()) {
            std::string known;
            for (const auto& [k, _] : handlers) known += (known.empty() ? "" : ", ") + k;
            fail(field, "unknown key (expected one of: " + known + ")", kv.first);
        }
        it->second(kv.second, field);
    }
}

void apply_document(const YAML::Node& doc, RunConfig& cfg, std::set<std::string>& chain);

void apply_preset(std::string_view name, RunConfig& cfg, std::set<std::string>& chain, const YAML::Node& where) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        std::string known;
        for (const auto& [k, _] : presets()) known += (known.empty() ? "" : ", ") + k;
        fail("extends", "unknown preset '" + std::string(name) + "' (expected one of: " + known + ")", where);
    }
    if (!chain.insert(it->first).second) fail("extends", "preset cycle through '" + it->first + "'", where);
    YAML::Node doc;
    try {
        doc = YAML::Load(it->second);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("", "preset '" + it->first + "': " + e.msg, e.mark.line + 1);
    }
    try {
        apply_document(doc, cfg, chain);
    } catch (const ConfigError& e) {
        throw ConfigError("", std::string("in preset '") + it->first + "': " + e.what());
    }
    cfg.presets.push_back(it->first);
}

void apply_document(const YAML::Node& doc, RunConfig& cfg, std::set<std::string>& chain) {
    if (!doc.IsMap()) fail("", "top level must be a mapping", doc);
    if (const auto ext = doc["extends"]) apply_preset(as_string(ext, "extends"), cfg, chain, ext);

    auto& net = cfg.network;
    auto& tr = cfg.training;
    auto& sob = cfg.sobolev;
    auto& poi = cfg.poisson;
    auto& out = cfg.output;

    const std::map<std::string, Handler> network{
        {"hidden_layers", [&](auto& n, auto& f) { net.hidden_layers = as_count(n, f); }},
        {"neurons", [&](auto& n, auto& f) { net.neurons = as_count(n, f); }},
        {"activation", [&](auto& n, auto& f) { net.activation = parsed(n, f, nn::parse_activation); }},
        {"gain", [&](auto& n, auto& f) { net.gain = as_real(n, f); }},
    };
    const std::map<std::string, Handler> training{
        {"epochs", [&](auto& n, auto& f) { tr.epochs = as_count(n, f); }},
        {"batch_size", [&](auto& n, auto& f) { tr.batch_size = as_count(n, f); }},
        {"learning_rate", [&](auto& n, auto& f) { tr.learning_rate = as_real(n, f); }},
        {"milestones", [&](auto& n, auto& f) { tr.milestones = as_list(n, f, as_count); }},
        {"decay", [&](auto& n, auto& f) { tr.decay = as_real(n, f); }},
        {"update_every", [&](auto& n, auto& f) { tr.update_every = as_count(n, f); }},
        {"alpha", [&](auto& n, auto& f) { tr.alpha = as_real(n, f); }},
        {"statistic", [&](auto& n, auto& f) { tr.stat_mode = parsed(n, f, balance::parse_stat_mode); }},
        {"mgda_tol", [&](auto& n, auto& f) { tr.mgda_tol = as_real(n, f); }},
        {"mgda_max_iters", [&](auto& n, auto& f) { tr.mgda_max_iters = static_cast<int>(as_count(n, f)); }},
        {"eval_every", [&](auto& n, auto& f) { tr.eval_every = as_count(n, f); }},
        {"reset_adam_at_stage", [&](auto& n, auto& f) { tr.reset_adam_at_stage = as_bool(n, f); }},
        {"reset_all_lambda_at_stage", [&](auto& n, auto& f) { tr.reset_all_lambda_at_stage = as_bool(n, f); }},
        {"adam_beta1", [&](auto& n, auto& f) { tr.adam.beta1 = as_real(n, f); }},
        {"adam_beta2", [&](auto& n, auto& f) { tr.adam.beta2 = as_real(n, f); }},
        {"adam_epsilon", [&](auto& n, auto& f) { tr.adam.epsilon = as_real(n, f); }},
    };
    const std::map<std::string, Handler> sobolev{
        {"modes", [&](auto& n, auto& f) { sob.modes = as_count(n, f); }},
        {"domain", [&](auto& n, auto& f) { sob.domain = as_real(n, f); }},
        {"grid", [&](auto& n, auto& f) { sob.grid = as_count(n, f); }},
        {"max_order", [&](auto& n, auto& f) { sob.max_order = static_cast<int>(as_count(n, f)); }},
        {"pure_x_only", [&](auto& n, auto& f) { sob.pure_x_only = as_bool(n, f); }},
        {"xi_init", [&](auto& n, auto& f) { sob.xi_init = as_real(n, f); }},
        {"train_fraction", [&](auto& n, auto& f) { sob.train_fraction = as_real(n, f); }},
    };
    const std::map<std::string, Handler> poisson{
        {"omega", [&](auto& n, auto& f) { poi.omega = as_real(n, f); }},
        {"interior_points", [&](auto& n, auto& f) { poi.interior_points = as_count(n, f); }},
        {"boundary_per_edge", [&](auto& n, auto& f) { poi.boundary_per_edge = as_count(n, f); }},
        {"test_grid", [&](auto& n, auto& f) { poi.test_grid = as_count(n, f); }},
    };
    const std::map<std::string, Handler> forgetting{
        {"stage_length", [&](auto& n, auto& f) { cfg.forgetting.stage_length = as_count(n, f); }},
        {"reset_lambda", [&](auto& n, auto& f) { cfg.forgetting.reset_lambda = as_bool(n, f); }},
    };
    const auto as_int = [](const YAML::Node& n, const std::string& f) { return as<int>(n, f, "an integer"); };
    const std::map<std::string, Handler> probe{
        {"orders", [&](auto& n, auto& f) { cfg.probe.orders = as_list(n, f, as_int); }},
        {"wavenumbers", [&](auto& n, auto& f) { cfg.probe.wavenumbers = as_list(n, f, as_int); }},
        {"grid", [&](auto& n, auto& f) { cfg.probe.grid = as_count(n, f); }},
        {"target_driven", [&](auto& n, auto& f) { cfg.probe.target_driven = as_bool(n, f); }},
        {"max_retries", [&](auto& n, auto& f) { cfg.probe.max_retries = as_int(n, f); }},
        {"sensitivity_grid", [&](auto& n, auto& f) { cfg.probe.sensitivity_grid = as_count(n, f); }},
    };
    const std::map<std::string, Handler> output{
        {"dir", [&](auto& n, auto& f) { out.dir = as_string(n, f); }},
        {"snapshot_epochs", [&](auto& n, auto& f) { out.snapshot_epochs = as_list(n, f, as_count); }},
        {"checkpoint_epochs", [&](auto& n, auto& f) { out.checkpoint_epochs = as_list(n, f, as_count); }},
        {"histogram_bins", [&](auto& n, auto& f) { out.histogram_bins = as_count(n, f); }},
        {"spectra", [&](auto& n, auto& f) { out.spectra = as_bool(n, f); }},
    };
    const auto section = [](const std::map<std::string, Handler>& h) {
        return [&h](const YAML::Node& n, const std::string& f) { apply_map(n, f, h); };
    };

    const std::map<std::string, Handler> top{
        {"extends", [](auto&, auto&) {}},
        {"problem", [&](auto& n, auto& f) { cfg.problem = parsed(n, f, parse_problem); }},
        {"strategy", [&](auto& n, auto& f) { cfg.strategy = parsed(n, f, balance::parse_strategy); }},
        {"seeds", [&](auto& n, auto& f) { cfg.seeds = as_list(n, f, as_seed); }},
        {"network", section(network)},
        {"training", section(training)},
        {"sobolev", section(sobolev)},
        {"poisson", section(poisson)},
        {"forgetting", section(forgetting)},
        {"probe", section(probe)},
        {"output", section(output)},
    };
    apply_map(doc, "", top);
}

RunConfig parse_text(const std::string& text, const std::string& origin) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("", origin + ": syntax error: " + e.msg, e.mark.line + 1);
    }
    if (doc.IsNull()) throw ConfigError("", origin + ": empty configuration");
    RunConfig cfg;
    cfg.presets.clear();
    std::set<std::string> chain;
    apply_document(doc, cfg, chain);
    cfg.validate();
    return cfg;
}

}  // namespace

void RunConfig::validate() const {
    try {
        network.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("network", e.what());
    }
    if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (seeds[i] == seeds[j]) throw ConfigError("seeds", "duplicate seed " + std::to_string(seeds[i]));

    if (problem == ProblemKind::StiffnessProbe) {
        if (probe.orders.empty()) throw ConfigError("probe.orders", "at least one order is required");
        for (int m : probe.orders)
            if (m < 0 || m > 4) throw ConfigError("probe.orders", "orders must be in 0..4");
        if (probe.max_retries < 0) throw ConfigError("probe.max_retries", "must be non-negative");
        if (probe.sensitivity_grid != 0 && (probe.sensitivity_grid & (probe.sensitivity_grid - 1)) != 0)
            throw ConfigError("probe.sensitivity_grid", "must be 0 or a power of two");
        return;
    }

    if (strategy == balance::Strategy::EpsilonOptimal && problem == ProblemKind::Poisson)
        throw ConfigError("strategy",
                          "epsilon-optimal needs analytic energy integrals, which only the sobolev and forgetting "
                          "problems provide");
    if (problem == ProblemKind::Sobolev || problem == ProblemKind::Forgetting) {
        if (sobolev.max_order < 0 || sobolev.max_order > 4) throw ConfigError("sobolev.max_order", "must be in 0..4");
        if (sobolev.grid < 2) throw ConfigError("sobolev.grid", "must be at least 2");
        if (output.spectra && (sobolev.grid & (sobolev.grid - 1)) != 0)
            throw ConfigError("sobolev.grid", "spectra need a power-of-two grid (or set output.spectra: false)");
        if (!(sobolev.train_fraction > 0.0 && sobolev.train_fraction < 1.0))
            throw ConfigError("sobolev.train_fraction", "must be in (0, 1)");
        const auto train_n = static_cast<std::size_t>(
            std::llround(sobolev.train_fraction * static_cast<double>(sobolev.grid * sobolev.grid)));
        if (training.batch_size > train_n)
            throw ConfigError("training.batch_size", "exceeds the " + std::to_string(train_n) + " training points");
    }
    if (problem == ProblemKind::Poisson && training.batch_size > poisson.interior_points)
        throw ConfigError("training.batch_size",
                          "exceeds the " + std::to_string(poisson.interior_points) + " interior points");
    if (problem == ProblemKind::Forgetting) {
        if (sobolev.max_order < 1) throw ConfigError("sobolev.max_order", "forgetting needs at least two stages");
        if (forgetting.stage_length == 0) throw ConfigError("forgetting.stage_length", "must be positive");
        const auto last = forgetting.stage_length * static_cast<std::size_t>(sobolev.max_order);
        if (training.epochs <= last)
            throw ConfigError("training.epochs", "must exceed the last stage start " + std::to_string(last));
    }
    if (output.histogram_bins == 0) throw ConfigError("output.histogram_bins", "must be positive");
    for (auto e : output.snapshot_epochs)
        if (e >= training.epochs) throw ConfigError("output.snapshot_epochs", "epoch " + std::to_string(e) + " is past the end");
    for (auto e : output.checkpoint_epochs)
        if (e >= training.epochs)
            throw ConfigError("output.checkpoint_epochs", "epoch " + std::to_string(e) + " is past the end");

    const std::size_t objectives = problem == ProblemKind::Poisson ? 2 : static_cast<std::size_t>(sobolev.max_order) + 1;
    try {
        training.validate(objectives);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("training", e.what());
    }
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [k, _] : presets()) out.push_back(k);
    return out;
}

std::string preset_source(std::string_view name) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
    return it->second;
}

RunConfig load_preset(std::string_view name) {
    return parse_text("extends: " + std::string(name) + "\n", "preset " + std::string(name));
}

RunConfig parse_config_string(const std::string& text, const std::string& origin) { return parse_text(text, origin); }

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path.string());
}

void set_repetitions(RunConfig& cfg, std::uint64_t first_seed, std::size_t count) {
    if (count == 0) throw ConfigError("repetitions", "must be positive");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < count; ++i) cfg.seeds.push_back(first_seed + i);
}

std::string to_yaml(const RunConfig& cfg) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    const auto list = [&](const auto& v) {
        e << YAML::Flow << YAML::BeginSeq;
        for (const auto& x : v) e << x;
        e << YAML::EndSeq;
    };
    if (!cfg.presets.empty()) {
        std::string chain;
        for (const auto& p : cfg.presets) chain += (chain.empty() ? "" : ", ") + p;
        e << YAML::Comment("resolved from presets: " + chain) << YAML::Newline;
    }
    e << YAML::BeginMap;
    e << YAML::Key << "problem" << YAML::Value << std::string(to_string(cfg.problem));
    e << YAML::Key << "strategy" << YAML::Value << std::string(balance::to_string(cfg.strategy));
    e << YAML::Key << "seeds" << YAML::Value;
    list(cfg.seeds);

    const auto& n = cfg.network;
    e << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "hidden_layers" << YAML::Value << n.hidden_layers;
    e << YAML::Key << "neurons" << YAML::Value << n.neurons;
    e << YAML::Key << "activation" << YAML::Value << std::string(nn::to_string(n.activation));
    e << YAML::Key << "gain" << YAML::Value << n.effective_gain();
    e << YAML::EndMap;

    if (cfg.problem == ProblemKind::StiffnessProbe) {
        const auto& p = cfg.probe;
        e << YAML::Key << "probe" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "orders" << YAML::Value;
        list(p.orders);
        e << YAML::Key << "wavenumbers" << YAML::Value;
        list(p.wavenumbers);
        e << YAML::Key << "grid" << YAML::Value << p.grid;
        e << YAML::Key << "target_driven" << YAML::Value << p.target_driven;
        e << YAML::Key << "max_retries" << YAML::Value << p.max_retries;
        e << YAML::Key << "sensitivity_grid" << YAML::Value << p.sensitivity_grid;
        e << YAML::EndMap;
    } else {
        const auto& t = cfg.training;
        e << YAML::Key << "training" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "epochs" << YAML::Value << t.epochs;
        e << YAML::Key << "batch_size" << YAML::Value << t.batch_size;
        e << YAML::Key << "learning_rate" << YAML::Value << t.learning_rate;
        e << YAML::Key << "milestones" << YAML::Value;
        list(t.milestones);
        e << YAML::Key << "decay" << YAML::Value << t.decay;
        e << YAML::Key << "update_every" << YAML::Value << t.update_every;
        e << YAML::Key << "alpha" << YAML::Value << t.alpha;
        e << YAML::Key << "statistic" << YAML::Value << std::string(balance::to_string(t.stat_mode));
        e << YAML::Key << "mgda_tol" << YAML::Value << t.mgda_tol;
        e << YAML::Key << "mgda_max_iters" << YAML::Value << t.mgda_max_iters;
        e << YAML::Key << "eval_every" << YAML::Value << t.eval_every;
        e << YAML::Key << "reset_adam_at_stage" << YAML::Value << t.reset_adam_at_stage;
        e << YAML::Key << "reset_all_lambda_at_stage" << YAML::Value << t.reset_all_lambda_at_stage;
        e << YAML::Key << "adam_beta1" << YAML::Value << t.adam.beta1;
        e << YAML::Key << "adam_beta2" << YAML::Value << t.adam.beta2;
        e << YAML::Key << "adam_epsilon" << YAML::Value << t.adam.epsilon;
        e << YAML::EndMap;

        if (cfg.problem == ProblemKind::Poisson) {
            const auto& p = cfg.poisson;
            e << YAML::Key << "poisson" << YAML::Value << YAML::BeginMap;
            e << YAML::Key << "omega" << YAML::Value << p.omega;
            e << YAML::Key << "interior_points" << YAML::Value << p.interior_points;
            e << YAML::Key << "boundary_per_edge" << YAML::Value << p.boundary_per_edge;
            e << YAML::Key << "test_grid" << YAML::Value << p.test_grid;
            e << YAML::EndMap;
        } else {
            const auto& s = cfg.sobolev;
            e << YAML::Key << "sobolev" << YAML::Value << YAML::BeginMap;
            e << YAML::Key << "modes" << YAML::Value << s.modes;
            e << YAML::Key << "domain" << YAML::Value << s.domain;
            e << YAML::Key << "grid" << YAML::Value << s.grid;
            e << YAML::Key << "max_order" << YAML::Value << s.max_order;
            e << YAML::Key << "pure_x_only" << YAML::Value << s.pure_x_only;
            e << YAML::Key << "xi_init" << YAML::Value << s.xi_init;
            e << YAML::Key << "train_fraction" << YAML::Value << s.train_fraction;
            e << YAML::EndMap;
        }
        if (cfg.problem == ProblemKind::Forgetting) {
            e << YAML::Key << "forgetting" << YAML::Value << YAML::BeginMap;
            e << YAML::Key << "stage_length" << YAML::Value << cfg.forgetting.stage_length;
            e << YAML::Key << "reset_lambda" << YAML::Value << cfg.forgetting.reset_lambda;
            e << YAML::EndMap;
        }
    }

    const auto& o = cfg.output;
    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "dir" << YAML::Value << o.dir.generic_string();
    e << YAML::Key << "snapshot_epochs" << YAML::Value;
    list(o.snapshot_epochs);
    e << YAML::Key << "checkpoint_epochs" << YAML::Value;
    list(o.checkpoint_epochs);
    e << YAML::Key << "histogram_bins" << YAML::Value << o.histogram_bins;
    e << YAML::Key << "spectra" << YAML::Value << o.spectra;
    e << YAML::EndMap;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace lossbal::cli
