#include "lossbal/problems/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lossbal/random.hpp"

namespace lossbal::problems {

namespace {

// n-th derivative of cos(t) and sin(t), exact quarter-period cycling.
double dcos(double t, int n) {
    switch (n % 4) {
        case 0: return std::cos(t);
        case 1: return -std::sin(t);
        case 2: return -std::cos(t);
        default: return std::sin(t);
    }
}

double dsin(double t, int n) { return dcos(t, n + 3); }

}  // namespace

SobolevTarget::SobolevTarget(std::vector<SobolevMode> modes, double domain) : modes_(std::move(modes)), domain_(domain) {
    if (modes_.empty()) throw std::invalid_argument("Sobolev target needs at least one mode");
    if (!(domain_ > 0.0)) throw std::invalid_argument("Sobolev domain size must be positive");
}

SobolevTarget SobolevTarget::random(std::size_t modes, std::uint64_t seed, double domain) {
    RandomStream rng(seed, "target");
    std::vector<SobolevMode> out(modes);
    for (auto& m : out) {
        m.ax = rng.uniform(-5.0, 5.0);
        m.ay = rng.uniform(-5.0, 5.0);
        m.phx = rng.uniform(0.0, 2 * std::numbers::pi);
        m.phy = rng.uniform(0.0, 2 * std::numbers::pi);
        m.lx = 1 + static_cast<int>(rng.below(5));
        m.ly = 1 + static_cast<int>(rng.below(5));
    }
    return SobolevTarget(std::move(out), domain);
}

double SobolevTarget::eval(double x, double y, int bx, int by) const {
    if (bx < 0 || by < 0) throw std::invalid_argument("negative derivative order");
    const double base = 2 * std::numbers::pi / domain_;
    double acc = 0.0;
    for (const auto& m : modes_) {
        const double kx = base * m.lx, ky = base * m.ly;
        acc += m.ax * std::pow(kx, bx) * dcos(kx * x + m.phx, bx) * m.ay * std::pow(ky, by) * dsin(ky * y + m.phy, by);
    }
    return acc;
}

ProblemData make_sobolev_problem(const SobolevConfig& cfg, const SobolevTarget& target) {
    if (cfg.grid < 2) throw std::invalid_argument("Sobolev grid must have at least 2 points per side");
    if (cfg.max_order < 0 || cfg.max_order > 4) throw std::invalid_argument("Sobolev derivative order must be in 0..4");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) throw std::invalid_argument("train fraction must be in (0, 1)");

    const std::size_t n = cfg.grid;
    const std::size_t total = n * n;
    const double h = cfg.domain / static_cast<double>(n);

    SpectralGrid grid;
    grid.side = n;
    grid.points.resize(2, static_cast<Eigen::Index>(total));
    grid.truth.resize(static_cast<Eigen::Index>(total));
    for (std::size_t iy = 0; iy < n; ++iy)
        for (std::size_t ix = 0; ix < n; ++ix) {
            const auto p = static_cast<Eigen::Index>(iy * n + ix);
            grid.points(0, p) = h * static_cast<double>(ix);
            grid.points(1, p) = h * static_cast<double>(iy);
            grid.truth(p) = target.eval(grid.points(0, p), grid.points(1, p));
        }

    std::vector<std::size_t> perm(total);
    std::iota(perm.begin(), perm.end(), 0);
    RandomStream split(cfg.seed, "split");
    split.shuffle(std::span<std::size_t>(perm));
    const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(total)));
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());

    ProblemData pd;
    pd.kind = "sobolev";
    PointSet set{"train", Eigen::MatrixXd(2, static_cast<Eigen::Index>(train.size())), true};
    for (std::size_t i = 0; i < train.size(); ++i) set.points.col(static_cast<Eigen::Index>(i)) = grid.points.col(static_cast<Eigen::Index>(train[i]));
    pd.test_points.resize(2, static_cast<Eigen::Index>(test.size()));
    pd.test_truth.resize(static_cast<Eigen::Index>(test.size()));
    for (std::size_t i = 0; i < test.size(); ++i) {
        pd.test_points.col(static_cast<Eigen::Index>(i)) = grid.points.col(static_cast<Eigen::Index>(test[i]));
        pd.test_truth(static_cast<Eigen::Index>(i)) = grid.truth(static_cast<Eigen::Index>(test[i]));
    }

    const auto np = set.points.cols();
    auto target_field = [&](int bx, int by) {
        Eigen::VectorXd v(np);
        for (Eigen::Index p = 0; p < np; ++p) v(p) = target.eval(set.points(0, p), set.points(1, p), bx, by);
        return v;
    };

    Objective fit{"fit", 0, {}};
    fit.residuals.push_back({{{0, 0, 1.0, std::nullopt}}, target_field(0, 0)});
    pd.objectives.push_back(std::move(fit));
    for (int k = 1; k <= cfg.max_order; ++k) {
        const auto task = static_cast<std::size_t>(k - 1);
        Objective obj{"D" + std::to_string(k), 0, {}};
        obj.residuals.push_back({{{0, k, 1.0, task}}, target_field(k, 0)});
        if (!cfg.pure_x_only) obj.residuals.push_back({{{1, k, 1.0, task}}, target_field(0, k)});
        pd.objectives.push_back(std::move(obj));
        pd.task_init.push_back(cfg.xi_init);
        pd.task_truth.push_back(1.0);
    }

    std::vector<double> energies(static_cast<std::size_t>(cfg.max_order) + 1, 0.0);
    for (Eigen::Index p = 0; p < grid.points.cols(); ++p) {
        const double x = grid.points(0, p), y = grid.points(1, p);
        energies[0] += grid.truth(p) * grid.truth(p);
        for (int k = 1; k <= cfg.max_order; ++k) {
            const double dx = target.eval(x, y, k, 0);
            energies[static_cast<std::size_t>(k)] += dx * dx;
            if (!cfg.pure_x_only) {
                const double dy = target.eval(x, y, 0, k);
                energies[static_cast<std::size_t>(k)] += dy * dy;
            }
        }
    }
    for (double& e : energies) e *= h * h;
    pd.energies = std::move(energies);

    pd.norm = nn::fit_norm_stats(set.points);
    pd.point_sets.push_back(std::move(set));
    pd.grid = std::move(grid);
    pd.validate();
    return pd;
}

ProblemData make_sobolev_problem(const SobolevConfig& cfg) {
    return make_sobolev_problem(cfg, SobolevTarget::random(cfg.modes, cfg.seed, cfg.domain));
}

}  // namespace lossbal::problems
