#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "lossbal/diagnostics/gradients.hpp"
#include "lossbal/diagnostics/spectrum.hpp"
#include "lossbal/diagnostics/stiffness.hpp"
#include "lossbal/network/mlp.hpp"
#include "lossbal/random.hpp"

using namespace lossbal;
using namespace lossbal::diag;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd random_field(RandomStream& rng, Eigen::Index n) {
    Eigen::MatrixXd f(n, n);
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = rng.normal();
    return f;
}

// Direct O(N^4) DFT, row index = y.
Eigen::MatrixXcd naive_dft2(const Eigen::MatrixXd& f) {
    const auto n = f.rows();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index ky = 0; ky < n; ++ky)
        for (Eigen::Index kx = 0; kx < n; ++kx)
            for (Eigen::Index y = 0; y < n; ++y)
                for (Eigen::Index x = 0; x < n; ++x) {
                    const double ph = -2.0 * kPi * static_cast<double>(kx * x + ky * y) / static_cast<double>(n);
                    out(ky, kx) += f(y, x) * Complex(std::cos(ph), std::sin(ph));
                }
    return out;
}

Eigen::MatrixXd tone_field(Eigen::Index n, auto fn) {
    Eigen::MatrixXd f(n, n);
    for (Eigen::Index y = 0; y < n; ++y)
        for (Eigen::Index x = 0; x < n; ++x)
            f(y, x) = fn(2 * kPi * static_cast<double>(x) / static_cast<double>(n),
                         2 * kPi * static_cast<double>(y) / static_cast<double>(n));
    return f;
}

double sum(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("fft2 agrees with a direct transform") {
    RandomStream rng(3, "dft");
    const auto f = random_field(rng, 8);
    const Eigen::MatrixXcd a = fft2(f);
    const Eigen::MatrixXcd b = naive_dft2(f);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-11 * b.cwiseAbs().maxCoeff());
}

TEST_CASE("property: fft round trip and Parseval") {
    RandomStream rng(4, "fft-property");
    for (Eigen::Index n : {4, 16, 64}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto f = random_field(rng, n);
            const Eigen::MatrixXcd modes = fft2(f);
            const Eigen::MatrixXd back = ifft2(modes).real();
            CHECK((back - f).norm() <= 1e-12 * f.norm());

            const double mean_sq = f.squaredNorm() / static_cast<double>(n * n);
            const double spec = modes.cwiseAbs2().sum() / std::pow(static_cast<double>(n), 4);
            CHECK(std::abs(spec - mean_sq) <= 1e-10 * mean_sq);
        }
    }
}

TEST_CASE("1d fft of a unit impulse is flat") {
    std::vector<Complex> v(16, 0.0);
    v[0] = 1.0;
    fft(v);
    for (const auto& c : v) CHECK(std::abs(c - Complex(1.0, 0.0)) < 1e-15);
    fft(v, true);
    CHECK(std::abs(v[0] - Complex(1.0, 0.0)) < 1e-15);
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(std::abs(v[i]) < 1e-15);
}

TEST_CASE("wavenumber layout") {
    CHECK(wavenumber(0, 8) == 0);
    CHECK(wavenumber(3, 8) == 3);
    CHECK(wavenumber(4, 8) == 4);
    CHECK(wavenumber(5, 8) == -3);
    CHECK(wavenumber(7, 8) == -1);
}

TEST_CASE("power spectrum examples") {
    SUBCASE("constant field") {
        const Eigen::MatrixXd f = Eigen::MatrixXd::Constant(32, 32, 2.5);
        const auto s = power_spectrum(f);
        CHECK(s.resolution == 32);
        REQUIRE(s.energy.size() == 17);
        CHECK(s.energy[0] == doctest::Approx(6.25).epsilon(1e-14));
        for (std::size_t k = 1; k < s.energy.size(); ++k) CHECK(s.energy[k] < 1e-28);
    }
    SUBCASE("pure tone") {
        const auto f = tone_field(64, [](double x, double) { return std::sin(4 * x); });
        const auto s = power_spectrum(f);
        CHECK(s.energy[4] / sum(s.energy) > 0.999);
        CHECK(s.energy[4] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("diagonal mode rounds |k|") {
        // |(3, 4)| = 5
        const auto f = tone_field(32, [](double x, double y) { return std::cos(3 * x + 4 * y); });
        const auto s = power_spectrum(f);
        CHECK(s.energy[5] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("non-negative energies summing to the mean square") {
        RandomStream rng(5, "spectrum");
        const auto f = random_field(rng, 32);
        const auto s = power_spectrum(f);
        for (double e : s.energy) CHECK(e >= 0.0);
        // Corner modes beyond the Nyquist ring are dropped, so the binned sum is a lower bound.
        CHECK(sum(s.energy) <= f.squaredNorm() / 1024.0 * (1 + 1e-12));
    }
}

TEST_CASE("spectral transforms reject unsupported grids") {
    CHECK_THROWS(power_spectrum(Eigen::MatrixXd::Zero(12, 12)));
    CHECK_THROWS(power_spectrum(Eigen::MatrixXd::Zero(16, 8)));
    std::vector<Complex> v(6);
    CHECK_THROWS(fft(v));
}

TEST_CASE("residual spectrum examples") {
    RandomStream rng(6, "residual");
    const auto truth = random_field(rng, 16);

    const auto zero = residual_spectrum(truth, truth, 7);
    CHECK(zero.epoch == 7);
    CHECK(zero.magnitude.maxCoeff() == 0.0);

    const Eigen::MatrixXd pred = truth + tone_field(16, [](double x, double) { return std::sin(3 * x); });
    const auto r = residual_spectrum(pred, truth);
    CHECK(r.magnitude.rows() == 16);
    CHECK(r.magnitude.cols() == 16);
    for (Eigen::Index y = 0; y < 16; ++y)
        for (Eigen::Index x = 0; x < 16; ++x) {
            const bool peak = y == 0 && (x == 3 || x == 13);
            if (peak)
                CHECK(r.magnitude(y, x) == doctest::Approx(128.0).epsilon(1e-10));
            else
                CHECK(r.magnitude(y, x) < 1e-10);
        }

    const auto noise = random_field(rng, 16);
    const auto rn = residual_spectrum(truth + noise, truth);
    CHECK((rn.magnitude.array() >= 0.0).all());
    const double ms = noise.squaredNorm() / 256.0;
    CHECK(rn.magnitude.squaredNorm() / std::pow(16.0, 4) == doctest::Approx(ms).epsilon(1e-10));

    CHECK_THROWS(residual_spectrum(truth, Eigen::MatrixXd::Zero(8, 8)));
}

TEST_CASE("to_field maps point-major values to rows of y") {
    const std::vector<double> v{0, 1, 2, 3};
    const auto f = to_field(v, 2);
    CHECK(f(0, 1) == 1.0);
    CHECK(f(1, 0) == 2.0);
    CHECK_THROWS(to_field(v, 3));
}

TEST_CASE("spectrum csv schema") {
    const auto dir = std::filesystem::temp_directory_path() / "lossbal_diag_test";
    std::filesystem::create_directories(dir);
    const auto s = power_spectrum(Eigen::MatrixXd::Constant(4, 4, 1.0));
    write_spectrum_csv(dir / "s.csv", {{"target", s}, {"model", s}});
    std::ifstream in(dir / "s.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,target,model");

    const auto hist = gradient_histogram({{1.0, -1.0}, {0.5, 0.25}}, {4, {}, {}});
    write_histogram_csv(dir / "h.csv", hist, {"L0", "L1"});
    std::ifstream hin(dir / "h.csv");
    std::getline(hin, header);
    CHECK(header == "bin_left,bin_right,L0,L1");
    std::filesystem::remove_all(dir);
}

TEST_CASE("gradient statistics examples") {
    const auto s = gradient_stats({-1.0, 1.0});
    CHECK(s.mean == 0.0);
    CHECK(s.std == 1.0);
    CHECK(s.max_abs == 1.0);
    CHECK_THROWS(gradient_stats({1.0, std::nan("")}));
}

TEST_CASE("gradient histogram examples") {
    SUBCASE("constant vector occupies one bin") {
        const auto h = gradient_histogram({std::vector<double>(50, 0.3)}, {10, -1.0, 1.0});
        const auto& c = h.counts[0];
        CHECK(std::count_if(c.begin(), c.end(), [](std::size_t n) { return n > 0; }) == 1);
        CHECK(h.stats[0].std < 1e-15);
    }
    SUBCASE("default range is shared and symmetric") {
        const auto h = gradient_histogram({{0.1, -0.2}, {4.0, 1.0}}, {8, {}, {}});
        CHECK(h.edges.front() == -4.0);
        CHECK(h.edges.back() == 4.0);
        CHECK(h.edges.size() == 9);
        CHECK(h.counts.size() == 2);
    }
    SUBCASE("scaling by lambda scales the std") {
        RandomStream rng(8, "hist");
        std::vector<double> g(500), g7(500);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = rng.normal();
            g7[i] = 7.0 * g[i];
        }
        CHECK(gradient_stats(g7).std == doctest::Approx(7.0 * gradient_stats(g).std).epsilon(1e-12));
    }
}

TEST_CASE("property: histogram mass equals gradient length") {
    RandomStream rng(9, "hist-mass");
    for (int trial = 0; trial < 20; ++trial) {
        balance::ObjectiveGradients g(3);
        for (std::size_t k = 0; k < g.size(); ++k) {
            g[k].resize(10 + 17 * k + static_cast<std::size_t>(trial));
            for (auto& v : g[k]) v = std::exp(2.0 * rng.normal()) * rng.normal();
        }
        // A narrow explicit range forces clamping at both ends.
        for (const HistogramSpec& spec : {HistogramSpec{}, HistogramSpec{7, -0.1, 0.1}}) {
            const auto h = gradient_histogram(g, spec);
            for (std::size_t k = 0; k < g.size(); ++k) {
                std::size_t total = 0;
                for (auto n : h.counts[k]) total += n;
                CHECK(total == g[k].size());
            }
        }
    }
}

TEST_CASE("spearman and slope helpers") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 25, 100}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // Ties take average ranks: x ranks (1.5, 1.5, 3), y ranks (1, 2, 3).
    CHECK(spearman({1, 1, 2}, {1, 2, 3}) == doctest::Approx(std::sqrt(3.0) / 2.0));
    CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0));
}

TEST_CASE("stiffness probe config validation") {
    StiffnessConfig c;
    c.wavenumbers = {4, 2};
    CHECK_THROWS(c.validate());
    c.wavenumbers = {0, 2};
    CHECK_THROWS(c.validate());
    c.wavenumbers = {2, 4};
    c.seeds.clear();
    CHECK_THROWS(c.validate());
}

TEST_CASE("stiffness probe identity case") {
    StiffnessConfig c;
    c.order = 0;
    c.net.hidden_layers = 2;
    c.net.neurons = 8;
    c.grid = 32;
    c.seeds = {0, 1};
    const auto p = stiffness_probe(c);
    for (double r : p.ratio) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(p.slope) < 1e-10);
}

TEST_CASE("property: stiffness ratio grows with the wavenumber") {
    StiffnessConfig c;
    c.net.hidden_layers = 2;
    c.net.neurons = 16;
    c.grid = 32;
    for (int m : {1, 2}) {
        c.order = m;
        const auto p = stiffness_probe(c);
        REQUIRE(p.ratio.size() == 3);
        CHECK(p.ratio[0] < p.ratio[1]);
        CHECK(p.ratio[1] < p.ratio[2]);
        CHECK(p.slope > 0.0);
        for (const auto& row : p.per_seed) CHECK(row.size() == 5);
    }
}

TEST_CASE("fresh sin networks are less sensitive at high wavenumbers") {
    nn::MlpConfig net;
    net.hidden_layers = 2;
    net.neurons = 16;
    net.seed = 11;
    const auto params = nn::init_mlp(net);
    nn::NormStats stats{{kPi, kPi}, {1.8, 1.8}};
    const auto s = spectral_sensitivity(params, stats, 16, 2 * kPi);
    REQUIRE(s.size() == 9);
    std::vector<double> k(s.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i);
    CHECK(spearman(k, s) < 0.0);
}
