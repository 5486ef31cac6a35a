#include "lossbal/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "lossbal/csv.hpp"
#include "lossbal/diagnostics/gradients.hpp"
#include "lossbal/error.hpp"
#include "lossbal/network/checkpoint.hpp"
#include "lossbal/network/jet.hpp"
#include "lossbal/problems/poisson.hpp"
#include "lossbal/problems/sobolev.hpp"

namespace lossbal::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kManifestVersion = 1;

std::string seed_file(const std::string& stem, std::uint64_t seed, const std::string& ext = ".csv") {
    return stem + "_seed" + std::to_string(seed) + ext;
}

bool contains(const std::vector<std::size_t>& v, std::size_t x) { return std::find(v.begin(), v.end(), x) != v.end(); }

std::vector<std::size_t> merged_epochs(const OutputConfig& out) {
    std::set<std::size_t> s(out.snapshot_epochs.begin(), out.snapshot_epochs.end());
    s.insert(out.checkpoint_epochs.begin(), out.checkpoint_epochs.end());
    return {s.begin(), s.end()};
}

Eigen::VectorXd predict(const problems::ProblemData& pd, const nn::MlpParams& params, const Eigen::MatrixXd& points) {
    return nn::evaluate_mlp(params, pd.norm, points).row(0).transpose();
}

void write_metrics(const fs::path& path, const problems::ProblemData& pd, const train::TrainingTrace& trace) {
    const std::size_t K = pd.objective_count();
    CsvWriter csv(path);
    std::vector<std::string> cols{"epoch", "stage"};
    for (std::size_t k = 0; k < K; ++k) cols.push_back("L_" + std::to_string(k));
    for (std::size_t k = 0; k < K; ++k) cols.push_back("lambda_" + std::to_string(k));
    cols.insert(cols.end(), {"rel_l2", "rel_l1", "learning_rate"});
    csv.header(cols);
    for (const auto& r : trace.records) {
        csv.cell(static_cast<long long>(r.epoch)).cell(static_cast<long long>(r.stage));
        for (const auto& l : r.losses) csv.cell(l);
        for (double l : r.lambda) csv.cell(l);
        csv.cell(r.rel_l2).cell(r.rel_l1).cell(r.learning_rate);
        csv.end_row();
    }
    csv.close();
}

void write_lambda(const fs::path& path, std::size_t K, const train::TrainingTrace& trace) {
    CsvWriter csv(path);
    std::vector<std::string> cols{"epoch"};
    for (std::size_t k = 0; k < K; ++k) cols.push_back("lambda_hat_" + std::to_string(k));
    for (std::size_t k = 0; k < K; ++k) cols.push_back("lambda_" + std::to_string(k));
    cols.insert(cols.end(), {"clipped", "converged"});
    csv.header(cols);
    for (const auto& u : trace.updates) {
        csv.cell(static_cast<long long>(u.epoch));
        for (const auto& h : u.hat) csv.cell(h);
        for (double l : u.lambda) csv.cell(l);
        csv.cell(static_cast<long long>(u.clipped)).cell(static_cast<long long>(u.converged ? 1 : 0));
        csv.end_row();
    }
    csv.close();
}

void write_task(const fs::path& path, const train::TrainingTrace& trace) {
    CsvWriter csv(path);
    std::vector<std::string> cols{"epoch"};
    for (std::size_t t = 0; t < trace.task.size(); ++t) cols.push_back("xi_hat_" + std::to_string(t + 1));
    csv.header(cols);
    for (const auto& r : trace.records) {
        csv.cell(static_cast<long long>(r.epoch));
        for (double v : r.task) csv.cell(v);
        csv.end_row();
    }
    csv.close();
}

std::string hex(const unsigned char* p, unsigned n) {
    std::ostringstream os;
    for (unsigned i = 0; i < n; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(p[i]);
    return os.str();
}

std::vector<ManifestEntry> hash_files(const fs::path& dir, std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    std::vector<ManifestEntry> out;
    for (const auto& n : names) out.push_back({n, sha256_file(dir / n), fs::file_size(dir / n)});
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_manifest(const RunConfig& cfg, const RunReport& report, const json& extra = json::object()) {
    json m;
    m["format"] = kManifestVersion;
    m["problem"] = std::string(to_string(cfg.problem));
    m["strategy"] = std::string(balance::to_string(cfg.strategy));
    m["presets"] = cfg.presets;
    m["seeds"] = cfg.seeds;
    m["status"] = report.complete() ? "complete" : "partial";
    json failures = json::array();
    for (const auto& [seed, what] : report.failures) failures.push_back({{"seed", seed}, {"error", what}});
    m["failures"] = failures;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    json files = json::array();
    for (const auto& f : report.files) files.push_back({{"file", f.file}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    m["files"] = files;
    write_text(report.dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

problems::ProblemData build_problem(const RunConfig& cfg, std::uint64_t seed) {
    switch (cfg.problem) {
        case ProblemKind::Sobolev:
        case ProblemKind::Forgetting: {
            auto s = cfg.sobolev;
            s.seed = seed;
            return problems::make_sobolev_problem(s);
        }
        case ProblemKind::Poisson: {
            auto p = cfg.poisson;
            p.seed = seed;
            return problems::make_poisson_problem(p);
        }
        case ProblemKind::StiffnessProbe: break;
    }
    throw ConfigError("problem", "the stiffness probe has no training problem; use the probe command");
}

nn::MlpConfig network_config(const RunConfig& cfg, std::uint64_t seed) {
    auto n = cfg.network;
    n.input_dim = 2;
    n.output_dim = 1;
    n.seed = seed;
    return n;
}

train::TrainingConfig training_config(const RunConfig& cfg, std::uint64_t seed) {
    auto t = cfg.training;
    t.seed = seed;
    t.strategy = cfg.strategy;
    t.snapshot_epochs = merged_epochs(cfg.output);
    if (cfg.problem == ProblemKind::Forgetting) {
        const auto K = static_cast<std::size_t>(cfg.sobolev.max_order) + 1;
        t.stages.clear();
        for (std::size_t s = 0; s < K; ++s) {
            train::StageSpec st;
            st.start_epoch = s * cfg.forgetting.stage_length;
            st.active.assign(K, false);
            for (std::size_t k = 0; k <= s; ++k) st.active[k] = true;
            st.reset_lambda = cfg.forgetting.reset_lambda;
            t.stages.push_back(st);
        }
    }
    return t;
}

SeedResult run_seed(const RunConfig& cfg, std::uint64_t seed, const train::EpochCallback& on_epoch) {
    SeedResult r;
    r.seed = seed;
    r.problem = build_problem(cfg, seed);
    r.trace = train::train(r.problem, network_config(cfg, seed), training_config(cfg, seed), on_epoch);
    return r;
}

std::optional<SpectrumPair> final_spectra(const SeedResult& result) {
    const auto& grid = result.problem.grid;
    if (!grid) return std::nullopt;
    const Eigen::VectorXd pred = predict(result.problem, result.trace.params, grid->points);
    SpectrumPair out;
    out.target = diag::power_spectrum(diag::to_field({grid->truth.data(), static_cast<std::size_t>(grid->truth.size())}, grid->side));
    out.model = diag::power_spectrum(diag::to_field({pred.data(), static_cast<std::size_t>(pred.size())}, grid->side));
    return out;
}

std::vector<std::string> write_seed_outputs(const RunConfig& cfg, const SeedResult& result, const fs::path& dir) {
    const auto& pd = result.problem;
    const auto& trace = result.trace;
    const auto seed = result.seed;
    const std::size_t K = pd.objective_count();
    std::vector<std::string> files;

    files.push_back(seed_file("metrics", seed));
    write_metrics(dir / files.back(), pd, trace);
    files.push_back(seed_file("lambda", seed));
    write_lambda(dir / files.back(), K, trace);
    if (!trace.task.empty()) {
        files.push_back(seed_file("task", seed));
        write_task(dir / files.back(), trace);
    }

    std::vector<std::string> names;
    for (const auto& o : pd.objectives) names.push_back(o.name);

    if (!trace.snapshots.empty()) {
        const std::string stats_name = seed_file("gradient_stats", seed);
        CsvWriter stats(dir / stats_name);
        stats.header({"epoch", "objective", "mean", "std", "max_abs"});
        for (const auto& snap : trace.snapshots) {
            if (!contains(cfg.output.snapshot_epochs, snap.epoch)) continue;
            diag::HistogramSpec spec;
            spec.bins = cfg.output.histogram_bins;
            const auto hist = diag::gradient_histogram(snap.grads, spec);
            std::vector<std::string> active;
            for (std::size_t i = 0; i < snap.objectives.size(); ++i) {
                active.push_back(names[snap.objectives[i]]);
                const auto& s = hist.stats[i];
                stats.cell(static_cast<long long>(snap.epoch)).cell(names[snap.objectives[i]]);
                stats.cell(s.mean).cell(s.std).cell(s.max_abs);
                stats.end_row();
            }
            files.push_back("histogram_seed" + std::to_string(seed) + "_epoch" + std::to_string(snap.epoch) + ".csv");
            diag::write_histogram_csv(dir / files.back(), hist, active);
        }
        stats.close();
        files.push_back(stats_name);
    }

    nn::MlpParams params = trace.params;
    for (const auto& snap : trace.snapshots) {
        if (!contains(cfg.output.checkpoint_epochs, snap.epoch)) continue;
        params.assign(snap.params);
        files.push_back("checkpoint_seed" + std::to_string(seed) + "_epoch" + std::to_string(snap.epoch) + ".json");
        nn::save_checkpoint(dir / files.back(), {params, pd.norm});
    }
    files.push_back(seed_file("checkpoint", seed, "_final.json"));
    nn::save_checkpoint(dir / files.back(), {trace.params, pd.norm});

    if (cfg.output.spectra && pd.grid) {
        const auto& grid = *pd.grid;
        const auto spectra = final_spectra(result);
        files.push_back(seed_file("spectrum", seed));
        diag::write_spectrum_csv(dir / files.back(), {{"target", spectra->target}, {"model", spectra->model}});

        const auto truth = diag::to_field({grid.truth.data(), static_cast<std::size_t>(grid.truth.size())}, grid.side);
        std::vector<diag::ResidualSpectrum> residuals;
        for (const auto& snap : trace.snapshots) {
            if (!contains(cfg.output.snapshot_epochs, snap.epoch)) continue;
            params.assign(snap.params);
            const Eigen::VectorXd p = predict(pd, params, grid.points);
            residuals.push_back(diag::residual_spectrum(
                diag::to_field({p.data(), static_cast<std::size_t>(p.size())}, grid.side), truth, snap.epoch));
        }
        const Eigen::VectorXd p = predict(pd, trace.params, grid.points);
        residuals.push_back(diag::residual_spectrum(
            diag::to_field({p.data(), static_cast<std::size_t>(p.size())}, grid.side), truth, cfg.training.epochs));
        files.push_back(seed_file("residual_spectra", seed));
        diag::write_residual_spectra_csv(dir / files.back(), residuals);
    }
    return files;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-256 unavailable");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    return hex(md, len);
}

fs::path resolve_output_dir(const fs::path& dir) {
    if (dir.is_absolute()) return dir;
    if (const char* root = std::getenv("LOSSBAL_OUTPUT_ROOT"); root && *root) return fs::path(root) / dir;
    return dir;
}

RunReport run(const RunConfig& cfg, std::size_t jobs, std::ostream& log) {
    if (cfg.problem == ProblemKind::StiffnessProbe) return probe(cfg, log);
    RunReport report;
    report.dir = resolve_output_dir(cfg.output.dir);
    fs::create_directories(report.dir);
    write_text(report.dir / "config.yaml", to_yaml(cfg));

    std::mutex mu;
    std::vector<std::string> files{"config.yaml"};
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cfg.seeds.size();) {
            const auto seed = cfg.seeds[i];
            try {
                const auto result = run_seed(cfg, seed);
                auto written = write_seed_outputs(cfg, result, report.dir);
                const auto& last = result.trace.records.back();
                std::lock_guard lock(mu);
                log << "seed " << seed << ": rel_l2 " << format_double(last.rel_l2.value_or(NAN));
                if (last.rel_l1) log << ", rel_l1 " << format_double(*last.rel_l1);
                log << '\n' << std::flush;
                files.insert(files.end(), written.begin(), written.end());
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                log << "seed " << seed << " failed: " << e.what() << '\n' << std::flush;
                report.failures.emplace_back(seed, e.what());
            }
        }
    };
    const std::size_t n = std::clamp<std::size_t>(jobs, 1, cfg.seeds.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }
    std::sort(report.failures.begin(), report.failures.end());
    report.files = hash_files(report.dir, files);
    write_manifest(cfg, report);
    return report;
}

RunReport probe(const RunConfig& cfg, std::ostream& log) {
    RunReport report;
    report.dir = resolve_output_dir(cfg.output.dir);
    fs::create_directories(report.dir);
    write_text(report.dir / "config.yaml", to_yaml(cfg));
    std::vector<std::string> files{"config.yaml", "stiffness_probe.csv", "stiffness_per_seed.csv"};

    CsvWriter summary(report.dir / "stiffness_probe.csv");
    summary.header({"m", "k0", "R", "slope"});
    CsvWriter per_seed(report.dir / "stiffness_per_seed.csv");
    per_seed.header({"m", "k0", "seed", "R"});
    json slopes = json::object();
    for (int m : cfg.probe.orders) {
        diag::StiffnessConfig sc;
        sc.order = m;
        sc.wavenumbers = cfg.probe.wavenumbers;
        sc.net = network_config(cfg, cfg.seeds.front());
        sc.seeds = cfg.seeds;
        sc.grid = cfg.probe.grid;
        sc.max_retries = cfg.probe.max_retries;
        sc.target_driven = cfg.probe.target_driven;
        const auto p = diag::stiffness_probe(sc);
        for (std::size_t i = 0; i < p.wavenumbers.size(); ++i) {
            summary.cell(static_cast<long long>(m)).cell(static_cast<long long>(p.wavenumbers[i]));
            summary.cell(p.ratio[i]).cell(p.slope);
            summary.end_row();
            for (std::size_t s = 0; s < p.per_seed[i].size(); ++s) {
                per_seed.cell(static_cast<long long>(m)).cell(static_cast<long long>(p.wavenumbers[i]));
                per_seed.cell(static_cast<long long>(cfg.seeds[s])).cell(p.per_seed[i][s]);
                per_seed.end_row();
            }
        }
        slopes[std::to_string(m)] = p.slope;
        log << "m=" << m << ": slope " << format_double(p.slope) << '\n' << std::flush;
    }
    summary.close();
    per_seed.close();

    json extra;
    extra["slopes"] = slopes;
    if (cfg.probe.sensitivity_grid > 0) {
        const auto side = cfg.probe.sensitivity_grid;
        const double domain = 2 * std::numbers::pi;
        Eigen::MatrixXd pts(2, static_cast<Eigen::Index>(side * side));
        for (std::size_t iy = 0; iy < side; ++iy)
            for (std::size_t ix = 0; ix < side; ++ix) {
                const auto p = static_cast<Eigen::Index>(iy * side + ix);
                pts(0, p) = domain * static_cast<double>(ix) / static_cast<double>(side);
                pts(1, p) = domain * static_cast<double>(iy) / static_cast<double>(side);
            }
        const auto params = nn::init_mlp(network_config(cfg, cfg.seeds.front()));
        const auto sens = diag::spectral_sensitivity(params, nn::fit_norm_stats(pts), side, domain);
        CsvWriter csv(report.dir / "sensitivity.csv");
        csv.header({"k", "sensitivity"});
        std::vector<double> ks;
        for (std::size_t k = 0; k < sens.size(); ++k) {
            csv.cell(static_cast<long long>(k)).cell(sens[k]);
            csv.end_row();
            ks.push_back(static_cast<double>(k));
        }
        csv.close();
        files.push_back("sensitivity.csv");
        extra["sensitivity_spearman"] = diag::spearman(ks, sens);
    }
    report.files = hash_files(report.dir, files);
    write_manifest(cfg, report, extra);
    return report;
}

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    Table t;
    std::string line;
    const auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    if (!std::getline(in, line)) throw Error("'" + path.string() + "' is empty");
    t.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

std::optional<double> last_value(const Table& t, const std::string& column) {
    const auto it = std::find(t.header.begin(), t.header.end(), column);
    if (it == t.header.end()) return std::nullopt;
    const auto c = static_cast<std::size_t>(it - t.header.begin());
    for (auto r = t.rows.rbegin(); r != t.rows.rend(); ++r)
        if (c < r->size() && !(*r)[c].empty()) return std::stod((*r)[c]);
    return std::nullopt;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0};
}

}  // namespace

std::vector<CompareRow> compare(const std::vector<fs::path>& dirs) {
    if (dirs.size() < 2) throw Error("compare needs at least two run directories");
    std::vector<CompareRow> rows;
    std::optional<std::vector<std::uint64_t>> seed_set;
    for (const auto& dir : dirs) {
        const auto mpath = dir / "manifest.json";
        if (!fs::exists(mpath)) throw Error("'" + dir.string() + "' has no manifest.json (not a finished run)");
        std::ifstream in(mpath);
        const auto m = json::parse(in);
        if (m.value("status", "") != "complete") throw Error("'" + dir.string() + "' is a partial run");
        CompareRow row;
        row.run = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
        row.problem = m.at("problem").get<std::string>();
        row.strategy = m.at("strategy").get<std::string>();
        if (row.problem == "stiffness-probe") throw Error("'" + dir.string() + "' is a probe, not a training run");
        auto seeds = m.at("seeds").get<std::vector<std::uint64_t>>();
        std::sort(seeds.begin(), seeds.end());
        if (!rows.empty() && row.problem != rows.front().problem)
            throw Error("mismatched problems: '" + rows.front().problem + "' and '" + row.problem + "'");
        if (seed_set && *seed_set != seeds) throw Error("'" + dir.string() + "' uses a different seed set");
        seed_set = seeds;

        std::vector<double> l2, l1;
        for (auto s : seeds) {
            const auto t = read_csv(dir / seed_file("metrics", s));
            const auto a = last_value(t, "rel_l2");
            if (!a) throw Error("'" + dir.string() + "': seed " + std::to_string(s) + " has no test error");
            l2.push_back(*a);
            if (const auto b = last_value(t, "rel_l1")) l1.push_back(*b);
        }
        row.seeds = seeds.size();
        std::tie(row.l2_mean, row.l2_std) = mean_std(l2);
        if (l1.size() == seeds.size()) {
            const auto [m1, s1] = mean_std(l1);
            row.l1_mean = m1;
            row.l1_std = s1;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_compare_csv(const fs::path& path, const std::vector<CompareRow>& rows) {
    CsvWriter csv(path);
    csv.header({"run", "problem", "strategy", "seeds", "rel_l2_mean", "rel_l2_std", "rel_l1_mean", "rel_l1_std"});
    for (const auto& r : rows) {
        csv.cell(r.run).cell(r.problem).cell(r.strategy).cell(static_cast<long long>(r.seeds));
        csv.cell(r.l2_mean).cell(r.l2_std).cell(r.l1_mean).cell(r.l1_std);
        csv.end_row();
    }
    csv.close();
}

void print_compare_table(std::ostream& out, const std::vector<CompareRow>& rows) {
    const auto pm = [](double m, double s) {
        std::ostringstream os;
        os << std::scientific << std::setprecision(3) << m << " +- " << s;
        return os.str();
    };
    out << std::left << std::setw(24) << "run" << std::setw(20) << "strategy" << std::setw(7) << "seeds"
        << std::setw(26) << "rel_l2" << "rel_l1" << '\n';
    for (const auto& r : rows) {
        out << std::setw(24) << r.run << std::setw(20) << r.strategy << std::setw(7) << r.seeds << std::setw(26)
            << pm(r.l2_mean, r.l2_std) << (r.l1_mean ? pm(*r.l1_mean, *r.l1_std) : "-") << '\n';
    }
}

bool check_ordering(const std::vector<CompareRow>& rows, const std::string& expectation, std::string& detail) {
    std::string spec = expectation;
    bool l1 = false;
    if (spec.rfind("l1:", 0) == 0) {
        l1 = true;
        spec = spec.substr(3);
    } else if (spec.rfind("l2:", 0) == 0) {
        spec = spec.substr(3);
    }
    std::vector<std::string> names;
    std::vector<bool> strict;
    std::size_t pos = 0;
    while (true) {
        const auto lt = spec.find('<', pos);
        names.push_back(spec.substr(pos, lt == std::string::npos ? std::string::npos : lt - pos));
        if (lt == std::string::npos) break;
        const bool eq = lt + 1 < spec.size() && spec[lt + 1] == '=';
        strict.push_back(!eq);
        pos = lt + (eq ? 2 : 1);
    }
    if (names.size() < 2) throw ConfigError("expect", "ordering '" + expectation + "' needs at least one '<'");
    std::vector<double> values;
    for (const auto& n : names) {
        const auto it = std::find_if(rows.begin(), rows.end(), [&](const CompareRow& r) { return r.strategy == n; });
        if (it == rows.end()) throw ConfigError("expect", "no run with strategy '" + n + "'");
        if (l1 && !it->l1_mean) throw ConfigError("expect", "strategy '" + n + "' has no coefficient error");
        values.push_back(l1 ? *it->l1_mean : it->l2_mean);
    }
    std::ostringstream os;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const bool holds = strict[i] ? values[i] < values[i + 1] : values[i] <= values[i + 1];
        ok = ok && holds;
        os << names[i] << " " << format_double(values[i]) << (strict[i] ? " < " : " <= ") << names[i + 1] << " "
           << format_double(values[i + 1]) << (holds ? " holds" : " FAILS") << "; ";
    }
    detail = os.str();
    return ok;
}

}  // namespace lossbal::cli
