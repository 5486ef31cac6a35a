#pragma once

#include <cstddef>
#include <cstdint>

#include "lossbal/problems/problem.hpp"

namespace lossbal::problems {

struct PoissonConfig {
    double omega = 1.0;
    std::size_t interior_points = 2500;
    std::size_t boundary_per_edge = 100;
    std::size_t test_grid = 100;
    std::uint64_t seed = 0;
};

/// u = cos(omega x) sin(omega y) on [0,1]^2.
double poisson_solution(double omega, double x, double y);
/// Laplacian of the solution: -2 omega^2 cos(omega x) sin(omega y).
double poisson_forcing(double omega, double x, double y);

/// Equidistant points per edge, counter-clockwise from the origin; each edge
/// starts at its first corner.
Eigen::MatrixXd poisson_boundary(std::size_t per_edge);

/// Objective 0: interior residual of the Laplacian. Objective 1: boundary values.
ProblemData make_poisson_problem(const PoissonConfig& cfg);

}  // namespace lossbal::problems
