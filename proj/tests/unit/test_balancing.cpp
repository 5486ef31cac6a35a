#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "lossbal/balancing/weights.hpp"
#include "lossbal/error.hpp"
#include "lossbal/random.hpp"

using namespace lossbal;
using namespace lossbal::balance;

namespace {

ObjectiveGradients random_grads(RandomStream& rng, std::size_t k, std::size_t n) {
    ObjectiveGradients g(k, std::vector<double>(n));
    for (std::size_t i = 0; i < k; ++i) {
        const double scale = std::exp(rng.uniform(-4.0, 4.0));
        for (auto& v : g[i]) v = scale * rng.normal() + 0.1 * scale * rng.uniform();
    }
    return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("inverse-dirichlet examples") {
    // Variances 4 and 1.
    const ObjectiveGradients a{{2, -2, 2, -2}, {1, -1, 1, -1}};
    CHECK(inverse_dirichlet_hat(a, StatMode::Variance) == std::vector<double>{1.0, 4.0});
    const ObjectiveGradients b{{1, -1}, {3, -3}};
    CHECK(inverse_dirichlet_hat(b, StatMode::Variance) == std::vector<double>{9.0, 1.0});
    const ObjectiveGradients c{{1, 2}, {3, 4}, {-5, -6}};
    CHECK(inverse_dirichlet_hat(c, StatMode::Variance) == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(inverse_dirichlet_hat(b, StatMode::MeanSquare) == std::vector<double>{9.0, 1.0});
}

TEST_CASE("inverse-dirichlet rejects dead objectives") {
    const ObjectiveGradients dead{{1, -1}, {2, 2}};
    try {
        inverse_dirichlet_hat(dead, StatMode::Variance);
        FAIL("expected StrategyError");
    } catch (const StrategyError& e) {
        CHECK(e.objective() == 1);
    }
    const ObjectiveGradients zeros{{1, -1}, {0, 0}};
    CHECK_THROWS_AS(inverse_dirichlet_hat(zeros, StatMode::MeanSquare), StrategyError);
    const ObjectiveGradients nan{{1, -1}, {std::nan(""), 0}};
    CHECK_THROWS_AS(inverse_dirichlet_hat(nan, StatMode::MeanSquare), StrategyError);
}

TEST_CASE("property: inverse-dirichlet equalization and scale covariance") {
    RandomStream rng(1, "id-property");
    for (StatMode mode : {StatMode::Variance, StatMode::MeanSquare}) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto g = random_grads(rng, 2 + trial % 5, 50);
            const auto hat = inverse_dirichlet_hat(g, mode);
            double top = 0.0;
            for (const auto& gk : g) top = std::max(top, statistic(gk, mode));
            int ones = 0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                CHECK(rel(hat[k] * statistic(g[k], mode), top) <= 1e-12);
                if (statistic(g[k], mode) == top) {
                    CHECK(hat[k] == 1.0);
                    ++ones;
                }
            }
            CHECK(ones >= 1);
        }
    }
    auto g = random_grads(rng, 3, 40);
    for (auto& v : g[0]) v *= 1e4;  // objective 0 holds the maximum throughout
    for (double c : {0.5, 3.0, 7.0}) {
        auto scaled = g;
        for (auto& v : scaled[1]) v *= c;
        const auto h0 = inverse_dirichlet_hat(g, StatMode::Variance);
        const auto h1 = inverse_dirichlet_hat(scaled, StatMode::Variance);
        CHECK(rel(h1[1], h0[1] / (c * c)) <= 1e-12);
        CHECK(h1[2] == h0[2]);
    }
}

TEST_CASE("max/avg examples") {
    const std::vector<double> ones{1.0, 1.0};
    CHECK(max_avg_hat({{3, -1}, {1, 1}}, ones)[1] == 3.0);
    CHECK(max_avg_hat({{2.5, 2.5}, {2.5, 2.5}}, ones)[1] == 1.0);
    const std::vector<double> lam{1.0, 4.0};
    const auto hat = max_avg_hat({{2, 0}, {1, 1}}, lam);
    CHECK(hat[1] == 0.5);
    CHECK(hat[0] == 1.0);
    CHECK_THROWS_AS(max_avg_hat({{2, 0}, {0, 0}}, ones), StrategyError);
}

TEST_CASE("moving average examples") {
    CHECK(moving_average_update(std::vector<double>{1.0}, std::vector<double>{3.0}, 0.5) == std::vector<double>{2.0});
    const std::vector<double> l{0.3, 7.0};
    CHECK(moving_average_update(l, l, 0.5) == l);
    CHECK(moving_average_update(l, std::vector<double>{2.0, 5.0}, 0.0) == std::vector<double>{2.0, 5.0});
    CHECK_THROWS(moving_average_update(l, l, 1.0));
}

TEST_CASE("clipping bounds weights") {
    std::vector<double> l{1e-12, 1.0, 1e10};
    CHECK(clip_weights(l) == 2);
    CHECK(l == std::vector<double>{kLambdaMin, 1.0, kLambdaMax});
}

TEST_CASE("epsilon-optimal examples") {
    const auto a = epsilon_optimal_weights(std::vector<double>{1.0, 1.0});
    CHECK(a[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a[1] == doctest::Approx(0.5).epsilon(1e-15));
    const auto b = epsilon_optimal_weights(std::vector<double>{2.0, 1.0, 1.0});
    CHECK(b[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(b[1] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(b[2] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK_THROWS_AS(epsilon_optimal_weights(std::vector<double>{1.0, 0.0}), StrategyError);
    // Extreme magnitudes do not overflow.
    const auto c = epsilon_optimal_weights(std::vector<double>{1e300, 1e-300, 1e200, 1.0, 1e250});
    double sum = 0.0;
    for (double v : c) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("property: epsilon-optimal equalizes and maximizes the worst bound") {
    RandomStream rng(2, "eps");
    for (std::size_t k = 2; k <= 6; ++k) {
        std::vector<double> I(k);
        for (auto& v : I) v = std::exp(rng.uniform(-5.0, 5.0));
        const auto lam = epsilon_optimal_weights(I);
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            sum += lam[i];
            CHECK(rel(lam[i] * I[i], lam[0] * I[0]) <= 1e-12);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-15);
        const double best = lam[0] * I[0];
        for (int t = 0; t < 2000; ++t) {
            std::vector<double> p(k);
            double s = 0.0;
            for (auto& v : p) s += (v = -std::log(rng.uniform()));
            double worst = 1e300;
            for (std::size_t i = 0; i < k; ++i) worst = std::min(worst, p[i] / s * I[i]);
            CHECK(worst <= best * (1 + 1e-12));
        }
    }
}

TEST_CASE("energy integrals examples") {
    const int n = 100;
    std::vector<double> ones(n * n, 1.0);
    CHECK(compute_energy_integrals({ones}, 1.0 / (n * n)).values[0] == doctest::Approx(1.0).epsilon(1e-13));

    const int m = 4096;
    const double h = 2 * std::numbers::pi / m;
    std::vector<double> s(m), s2(m);
    for (int i = 0; i < m; ++i) {
        s[i] = std::sin((i + 0.5) * h);
        s2[i] = 2.0 * s[i];
    }
    const auto e = compute_energy_integrals({s, s2}, h);
    CHECK(std::abs(e.values[0] - std::numbers::pi) <= 1e-3);
    CHECK(e.values[1] == doctest::Approx(4.0 * e.values[0]).epsilon(1e-14));
    CHECK_THROWS_AS(compute_energy_integrals({{1.0, std::nan("")}}, 1.0), StrategyError);
}

TEST_CASE("mgda examples") {
    const auto a = mgda_min_norm({{1, 0}, {0, 1}});
    CHECK(a.lambda[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.converged);
    const auto b = mgda_min_norm({{3, 4}, {3, 4}, {3, 4}});
    for (double v : b.lambda) CHECK(v == doctest::Approx(1.0 / 3.0));
    // 1-D oracle: minimize 4 g^2 + (1-g)^2 over a fine grid.
    double best_g = 0.0, best_f = 1e300;
    for (int i = 0; i <= 100000; ++i) {
        const double g = i / 100000.0;
        const double f = 4 * g * g + (1 - g) * (1 - g);
        if (f < best_f) best_f = f, best_g = g;
    }
    const auto c = mgda_min_norm({{2, 0}, {0, 1}});
    CHECK(c.lambda[0] == doctest::Approx(best_g).epsilon(1e-4));
    CHECK(c.lambda[0] == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(c.lambda[1] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK_THROWS(mgda_min_norm({{1, 0}}));
}

TEST_CASE("property: frank-wolfe descent, monotonicity and simplex feasibility") {
    RandomStream rng(3, "fw");
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + trial % 5;
        const auto g = random_grads(rng, k, 30);
        const auto res = mgda_min_norm(g);
        double sum = 0.0;
        for (double v : res.lambda) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        for (std::size_t i = 1; i < res.history.size(); ++i)
            CHECK(res.history[i] <= res.history[i - 1] * (1 + 1e-12) + 1e-300);
        std::vector<double> d(g[0].size(), 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t p = 0; p < d.size(); ++p) d[p] += res.lambda[i] * g[i][p];
        double dd = 0.0;
        for (double v : d) dd += v * v;
        if (res.converged) {
            for (std::size_t i = 0; i < k; ++i) {
                double dg = 0.0;
                for (std::size_t p = 0; p < d.size(); ++p) dg += d[p] * g[i][p];
                CHECK(dg >= dd - 1e-6);
            }
        }
    }
}

TEST_CASE("uniform weights") {
    CHECK(uniform_weights(2) == std::vector<double>{1, 1});
    CHECK(uniform_weights(5) == std::vector<double>(5, 1.0));
    CHECK_THROWS(uniform_weights(0));
}

TEST_CASE("strategy names round trip") {
    for (Strategy s : {Strategy::Uniform, Strategy::MaxAvg, Strategy::InverseDirichlet, Strategy::Mgda,
                       Strategy::EpsilonOptimal})
        CHECK(parse_strategy(to_string(s)) == s);
    CHECK_THROWS(parse_strategy("gradnorm"));
    CHECK(parse_stat_mode("variance") == StatMode::Variance);
}
