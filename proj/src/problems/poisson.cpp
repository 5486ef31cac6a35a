#include "lossbal/problems/poisson.hpp"

#include <cmath>
#include <stdexcept>

#include "lossbal/random.hpp"

namespace lossbal::problems {

double poisson_solution(double omega, double x, double y) { return std::cos(omega * x) * std::sin(omega * y); }

double poisson_forcing(double omega, double x, double y) {
    return -2.0 * omega * omega * std::cos(omega * x) * std::sin(omega * y);
}

Eigen::MatrixXd poisson_boundary(std::size_t per_edge) {
    if (per_edge == 0) throw std::invalid_argument("boundary needs at least one point per edge");
    Eigen::MatrixXd b(2, static_cast<Eigen::Index>(4 * per_edge));
    const double step = 1.0 / static_cast<double>(per_edge);
    for (std::size_t i = 0; i < per_edge; ++i) {
        const double t = step * static_cast<double>(i);
        const auto c = static_cast<Eigen::Index>(i);
        const auto n = static_cast<Eigen::Index>(per_edge);
        b.col(c) << t, 0.0;
        b.col(n + c) << 1.0, t;
        b.col(2 * n + c) << 1.0 - t, 1.0;
        b.col(3 * n + c) << 0.0, 1.0 - t;
    }
    return b;
}

ProblemData make_poisson_problem(const PoissonConfig& cfg) {
    if (cfg.interior_points < 2) throw std::invalid_argument("Poisson problem needs at least two interior points");
    if (cfg.test_grid < 2) throw std::invalid_argument("Poisson test grid needs at least 2 points per side");
    const double w = cfg.omega;

    PointSet interior{"interior", Eigen::MatrixXd(2, static_cast<Eigen::Index>(cfg.interior_points)), true};
    RandomStream rng(cfg.seed, "sampling");
    for (Eigen::Index p = 0; p < interior.points.cols(); ++p) {
        interior.points(0, p) = rng.uniform();
        interior.points(1, p) = rng.uniform();
    }
    PointSet boundary{"boundary", poisson_boundary(cfg.boundary_per_edge), false};

    ProblemData pd;
    pd.kind = "poisson";
    Eigen::VectorXd f(interior.points.cols());
    for (Eigen::Index p = 0; p < f.size(); ++p) f(p) = poisson_forcing(w, interior.points(0, p), interior.points(1, p));
    Eigen::VectorXd g(boundary.points.cols());
    for (Eigen::Index p = 0; p < g.size(); ++p) g(p) = poisson_solution(w, boundary.points(0, p), boundary.points(1, p));

    Objective residual{"residual", 0, {}};
    residual.residuals.push_back({{{0, 2, 1.0, std::nullopt}, {1, 2, 1.0, std::nullopt}}, f});
    Objective bc{"boundary", 1, {}};
    bc.residuals.push_back({{{0, 0, 1.0, std::nullopt}}, g});
    pd.objectives = {std::move(residual), std::move(bc)};

    Eigen::MatrixXd all(2, interior.points.cols() + boundary.points.cols());
    all << interior.points, boundary.points;
    pd.norm = nn::fit_norm_stats(all);
    pd.point_sets = {std::move(interior), std::move(boundary)};

    const std::size_t n = cfg.test_grid;
    pd.test_points.resize(2, static_cast<Eigen::Index>(n * n));
    pd.test_truth.resize(static_cast<Eigen::Index>(n * n));
    for (std::size_t iy = 0; iy < n; ++iy)
        for (std::size_t ix = 0; ix < n; ++ix) {
            const auto p = static_cast<Eigen::Index>(iy * n + ix);
            const double x = static_cast<double>(ix) / static_cast<double>(n - 1);
            const double y = static_cast<double>(iy) / static_cast<double>(n - 1);
            pd.test_points.col(p) << x, y;
            pd.test_truth(p) = poisson_solution(w, x, y);
        }
    pd.validate();
    return pd;
}

}  // namespace lossbal::problems
