#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace lossbal::balance {

enum class Strategy { Uniform, MaxAvg, InverseDirichlet, Mgda, EpsilonOptimal };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// Statistic of a gradient vector used by inverse-Dirichlet weighting.
enum class StatMode { Variance, MeanSquare };

std::string_view to_string(StatMode m);
StatMode parse_stat_mode(std::string_view name);

/// One gradient per objective, all over the same shared-parameter ordering.
using ObjectiveGradients = std::vector<std::vector<double>>;

inline constexpr double kLambdaMin = 1e-8;
inline constexpr double kLambdaMax = 1e8;

/// Throws StrategyError on length mismatch or non-finite entries.
void validate(const ObjectiveGradients& grads);

double population_variance(std::span<const double> g);
double mean_square(std::span<const double> g);
double statistic(std::span<const double> g, StatMode mode);

/// lambda_hat_k = max_t stat_t / stat_k.
std::vector<double> inverse_dirichlet_hat(const ObjectiveGradients& grads, StatMode mode);

/// lambda_hat_k = max|grad_0| / (lambda_k * mean|grad_k|) for k >= 1.
/// Objective 0 is the anchor and always gets exactly 1.
std::vector<double> max_avg_hat(const ObjectiveGradients& grads, std::span<const double> lambda);

/// alpha * lambda + (1 - alpha) * lambda_hat, componentwise.
std::vector<double> moving_average_update(std::span<const double> lambda, std::span<const double> lambda_hat,
                                          double alpha);

/// Clamps into [lo, hi] in place; returns how many entries were changed.
std::size_t clip_weights(std::vector<double>& lambda, double lo = kLambdaMin, double hi = kLambdaMax);

/// lambda*_k = prod_{j != k} I_j / sum_i prod_{j != i} I_j, evaluated in log space.
std::vector<double> epsilon_optimal_weights(std::span<const double> energies);

struct EnergyIntegrals {
    std::vector<double> values;
    double cell_area = 0.0;
};

/// Midpoint rule: I_k = cell_area * sum of fields[k]^2.
EnergyIntegrals compute_energy_integrals(const std::vector<std::vector<double>>& fields, double cell_area);

/// Gram matrix Q_ij = g_i . g_j (row-major K x K).
std::vector<double> gram_matrix(const ObjectiveGradients& grads);

struct MinNormResult {
    std::vector<double> lambda;
    double norm_sq = 0.0;  // lambda^T Q lambda
    double gap = 0.0;      // final duality gap
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;  // lambda^T Q lambda per iterate, starting point included
};

/// Frank-Wolfe on min 1/2 lambda^T Q lambda over the simplex, from the uniform point.
MinNormResult mgda_min_norm_gram(std::span<const double> gram, std::size_t k, double tol = 1e-6,
                                 int max_iters = 250);
MinNormResult mgda_min_norm(const ObjectiveGradients& grads, double tol = 1e-6, int max_iters = 250);

std::vector<double> uniform_weights(std::size_t k);

}  // namespace lossbal::balance
