#pragma once

// A training problem is a set of objectives, each a mean of squared linear
// residuals of the network's pure input partials:
//
//   L_k = 1/n * sum_points sum_residuals r^2,
//   r   = sum_terms c * [xi_t] * d^order u / dx_axis^order  -  target,
//
// where the optional factor xi_t is a trainable task parameter.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lossbal/network/mlp.hpp"

namespace lossbal::problems {

struct ResidualTerm {
    std::size_t axis = 0;
    int order = 0;
    double coefficient = 1.0;
    std::optional<std::size_t> task_parameter;
};

struct Residual {
    std::vector<ResidualTerm> terms;
    Eigen::VectorXd target;  // one entry per point of the objective's point set
};

struct Objective {
    std::string name;
    std::size_t point_set = 0;
    std::vector<Residual> residuals;
};

struct PointSet {
    std::string name;
    Eigen::MatrixXd points;  // input_dim x n
    /// Batched sets are split into mini-batches; the others are used in full every batch.
    bool batched = true;
};

/// Uniform square grid used for spectra (row index = y, column index = x).
struct SpectralGrid {
    std::size_t side = 0;
    Eigen::MatrixXd points;  // 2 x side^2, point p = iy * side + ix
    Eigen::VectorXd truth;
};

struct ProblemData {
    std::string kind;
    std::vector<PointSet> point_sets;
    std::vector<Objective> objectives;
    std::vector<double> task_init;
    std::vector<double> task_truth;
    nn::NormStats norm;
    Eigen::MatrixXd test_points;
    Eigen::VectorXd test_truth;
    /// Per-objective energy integrals of the target, when the problem has them.
    std::optional<std::vector<double>> energies;
    std::optional<SpectralGrid> grid;

    std::size_t objective_count() const { return objectives.size(); }
    /// Highest pure order per axis needed on point set `s`.
    std::vector<int> required_orders(std::size_t s, std::size_t input_dim) const;
    void validate() const;
};

/// ||pred - truth||_2 / ||truth||_2. Rejects a zero truth.
double relative_l2(std::span<const double> pred, std::span<const double> truth);
/// ||pred - truth||_1 / ||truth||_1. Rejects a zero truth.
double relative_l1(std::span<const double> pred, std::span<const double> truth);

/// CSV with columns x,y,value.
void export_grid_csv(const std::filesystem::path& path, const Eigen::MatrixXd& points, const Eigen::VectorXd& values);

}  // namespace lossbal::problems
