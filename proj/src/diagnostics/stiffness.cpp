#include "lossbal/diagnostics/stiffness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lossbal/diagnostics/spectrum.hpp"
#include "lossbal/network/jet.hpp"
#include "lossbal/training/evaluator.hpp"

namespace lossbal::diag {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
        i = j + 1;
    }
    return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

void StiffnessConfig::validate() const {
    if (order < 0 || order > 4) throw std::invalid_argument("stiffness probe: derivative order must be in 0..4");
    if (wavenumbers.size() < 2) throw std::invalid_argument("stiffness probe: need at least two wavenumbers");
    for (std::size_t i = 0; i < wavenumbers.size(); ++i) {
        if (wavenumbers[i] <= 0) throw std::invalid_argument("stiffness probe: wavenumbers must be positive");
        if (i > 0 && wavenumbers[i] <= wavenumbers[i - 1])
            throw std::invalid_argument("stiffness probe: wavenumbers must be strictly increasing");
        if (static_cast<std::size_t>(2 * wavenumbers[i]) >= grid)
            throw std::invalid_argument("stiffness probe: wavenumber " + std::to_string(wavenumbers[i]) +
                                        " is not resolved by a grid of side " + std::to_string(grid));
    }
    if (seeds.empty()) throw std::invalid_argument("stiffness probe: need at least one seed");
    if (max_retries < 0) throw std::invalid_argument("stiffness probe: retries must be >= 0");
    net.validate();
}

problems::ProblemData tone_problem(int k0, int order, std::size_t grid) {
    if (grid < 2) throw std::invalid_argument("tone_problem: grid too small");
    const double h = kTwoPi / static_cast<double>(grid);
    const double k = k0;
    problems::PointSet set{"grid", Eigen::MatrixXd(2, static_cast<Eigen::Index>(grid * grid)), true};
    for (std::size_t iy = 0; iy < grid; ++iy)
        for (std::size_t ix = 0; ix < grid; ++ix) {
            const auto p = static_cast<Eigen::Index>(iy * grid + ix);
            set.points(0, p) = h * static_cast<double>(ix);
            set.points(1, p) = h * static_cast<double>(iy);
        }
    const auto n = set.points.cols();
    // d^m/dt^m sin(k t) = k^m sin(k t + m pi / 2)
    auto field = [&](int mx, int my) {
        Eigen::VectorXd v(n);
        for (Eigen::Index p = 0; p < n; ++p)
            v(p) = std::pow(k, mx + my) * std::sin(k * set.points(0, p) + mx * std::numbers::pi / 2) *
                   std::sin(k * set.points(1, p) + my * std::numbers::pi / 2);
        return v;
    };

    problems::ProblemData pd;
    pd.kind = "tone";
    pd.objectives.push_back({"fit", 0, {{{{0, 0, 1.0, std::nullopt}}, field(0, 0)}}});
    problems::Objective d{"D" + std::to_string(order), 0, {}};
    if (order == 0) {
        d.residuals.push_back({{{0, 0, 1.0, std::nullopt}}, field(0, 0)});
    } else {
        d.residuals.push_back({{{0, order, 1.0, std::nullopt}}, field(order, 0)});
        d.residuals.push_back({{{1, order, 1.0, std::nullopt}}, field(0, order)});
    }
    pd.objectives.push_back(std::move(d));
    pd.norm = nn::fit_norm_stats(set.points);
    pd.test_points = set.points;
    pd.test_truth = field(0, 0);
    pd.point_sets.push_back(std::move(set));
    pd.validate();
    return pd;
}

StiffnessProbe stiffness_probe(const StiffnessConfig& cfg) {
    cfg.validate();
    StiffnessProbe out;
    out.order = cfg.order;
    out.wavenumbers = cfg.wavenumbers;
    for (int k0 : cfg.wavenumbers) {
        const auto pd = tone_problem(k0, cfg.order, cfg.grid);
        // Same objectives against a zero target: the network's own contribution.
        auto silent = pd;
        for (auto& obj : silent.objectives)
            for (auto& res : obj.residuals) res.target.setZero();
        const std::vector<double> lambda{1.0, 1.0};
        const std::vector<bool> active{true, true};
        std::vector<double> ratios;
        for (std::uint64_t seed : cfg.seeds) {
            double r = 0.0;
            bool ok = false;
            for (int attempt = 0; attempt <= cfg.max_retries && !ok; ++attempt) {
                nn::MlpConfig net = cfg.net;
                net.seed = seed + static_cast<std::uint64_t>(attempt) * 1000003ULL;
                const auto params = nn::init_mlp(net);
                train::Evaluator ev(pd, params);
                const auto res = ev.evaluate(train::full_batch(pd), {}, lambda, active, true);
                std::vector<double> d1 = res.objective_grads[0], d2 = res.objective_grads[1];
                if (cfg.target_driven) {
                    train::Evaluator ev0(silent, params);
                    const auto self = ev0.evaluate(train::full_batch(silent), {}, lambda, active, true);
                    for (std::size_t i = 0; i < d1.size(); ++i) {
                        d1[i] -= self.objective_grads[0][i];
                        d2[i] -= self.objective_grads[1][i];
                    }
                }
                const double g1 = norm2(d1), g2 = norm2(d2);
                if (g1 > 0.0 && std::isfinite(g1) && std::isfinite(g2)) {
                    r = g2 / g1;
                    ok = true;
                }
            }
            if (!ok)
                throw std::runtime_error("stiffness probe: zero gradient at initialization for seed " + std::to_string(seed) +
                                         " after " + std::to_string(cfg.max_retries) + " retries");
            ratios.push_back(r);
        }
        out.ratio.push_back(std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size()));
        out.per_seed.push_back(std::move(ratios));
    }
    std::vector<double> ks(cfg.wavenumbers.begin(), cfg.wavenumbers.end());
    out.slope = loglog_slope(ks, out.ratio);
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more pairs");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two or more pairs");
    return pearson(ranks(x), ranks(y));
}

std::vector<double> spectral_sensitivity(const nn::MlpParams& params, const nn::NormStats& stats, std::size_t side,
                                         double domain) {
    if (side < 2 || !std::has_single_bit(side)) throw std::invalid_argument("spectral_sensitivity: side must be a power of two");
    const std::size_t n = side * side;
    Eigen::MatrixXd pts(2, static_cast<Eigen::Index>(n));
    const double h = domain / static_cast<double>(side);
    for (std::size_t iy = 0; iy < side; ++iy)
        for (std::size_t ix = 0; ix < side; ++ix) {
            pts(0, static_cast<Eigen::Index>(iy * side + ix)) = h * static_cast<double>(ix);
            pts(1, static_cast<Eigen::Index>(iy * side + ix)) = h * static_cast<double>(iy);
        }
    nn::MlpJet jet(params, stats, nn::JetSpec::uniform(2, 0));
    jet.forward(pts);

    const std::size_t np = params.parameter_count();
    std::vector<double> sum(side / 2 + 1, 0.0);
    std::vector<std::size_t> count(side / 2 + 1, 0);
    Eigen::MatrixXd re(1, static_cast<Eigen::Index>(n)), im(1, static_cast<Eigen::Index>(n));
    std::vector<double> gre(np), gim(np);
    const double scale = 1.0 / static_cast<double>(n);
    // Half plane kx >= 0; conjugate modes have the same sensitivity.
    for (std::size_t cx = 0; cx <= side / 2; ++cx)
        for (std::size_t ry = 0; ry < side; ++ry) {
            const int kx = static_cast<int>(cx), ky = wavenumber(ry, side);
            const auto bin = static_cast<std::size_t>(std::lround(std::hypot(kx, ky)));
            if (bin >= sum.size()) continue;
            for (std::size_t iy = 0; iy < side; ++iy)
                for (std::size_t ix = 0; ix < side; ++ix) {
                    const double phase = kTwoPi * static_cast<double>(kx * static_cast<long>(ix) + ky * static_cast<long>(iy)) /
                                         static_cast<double>(side);
                    re(0, static_cast<Eigen::Index>(iy * side + ix)) = std::cos(phase) * scale;
                    im(0, static_cast<Eigen::Index>(iy * side + ix)) = -std::sin(phase) * scale;
                }
            std::fill(gre.begin(), gre.end(), 0.0);
            std::fill(gim.begin(), gim.end(), 0.0);
            jet.backward(re, gre);
            jet.backward(im, gim);
            double s = 0.0;
            for (std::size_t i = 0; i < np; ++i) s += gre[i] * gre[i] + gim[i] * gim[i];
            sum[bin] += s;
            ++count[bin];
        }
    std::vector<double> out(sum.size(), 0.0);
    for (std::size_t k = 0; k < sum.size(); ++k)
        if (count[k] > 0) out[k] = std::sqrt(sum[k] / static_cast<double>(count[k]));
    return out;
}

}  // namespace lossbal::diag
