#include "lossbal/balancing/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lossbal/error.hpp"

namespace lossbal::balance {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::Uniform: return "uniform";
        case Strategy::MaxAvg: return "max-avg";
        case Strategy::InverseDirichlet: return "inverse-dirichlet";
        case Strategy::Mgda: return "mgda";
        case Strategy::EpsilonOptimal: return "epsilon-optimal";
    }
    return "?";
}

Strategy parse_strategy(std::string_view name) {
    for (Strategy s : {Strategy::Uniform, Strategy::MaxAvg, Strategy::InverseDirichlet, Strategy::Mgda,
                       Strategy::EpsilonOptimal})
        if (name == to_string(s)) return s;
    throw std::invalid_argument("unknown strategy '" + std::string(name) +
                                "' (expected uniform, max-avg, inverse-dirichlet, mgda or epsilon-optimal)");
}

std::string_view to_string(StatMode m) { return m == StatMode::Variance ? "variance" : "mean-square"; }

StatMode parse_stat_mode(std::string_view name) {
    if (name == "variance") return StatMode::Variance;
    if (name == "mean-square") return StatMode::MeanSquare;
    throw std::invalid_argument("unknown statistic '" + std::string(name) + "' (expected variance or mean-square)");
}

void validate(const ObjectiveGradients& grads) {
    if (grads.empty()) throw std::invalid_argument("no objective gradients");
    for (std::size_t k = 0; k < grads.size(); ++k) {
        if (grads[k].size() != grads[0].size()) throw StrategyError(k, "gradient length mismatch");
        for (double v : grads[k])
            if (!std::isfinite(v)) throw StrategyError(k, "non-finite gradient entry");
    }
}

double population_variance(std::span<const double> g) {
    if (g.empty()) return 0.0;
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    double acc = 0.0;
    for (double v : g) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(g.size());
}

double mean_square(std::span<const double> g) {
    if (g.empty()) return 0.0;
    double acc = 0.0;
    for (double v : g) acc += v * v;
    return acc / static_cast<double>(g.size());
}

double statistic(std::span<const double> g, StatMode mode) {
    return mode == StatMode::Variance ? population_variance(g) : mean_square(g);
}

std::vector<double> inverse_dirichlet_hat(const ObjectiveGradients& grads, StatMode mode) {
    validate(grads);
    std::vector<double> stat(grads.size());
    for (std::size_t k = 0; k < grads.size(); ++k) {
        if (grads[k].size() < 2) throw StrategyError(k, "gradient needs at least two components");
        stat[k] = statistic(grads[k], mode);
        if (!(stat[k] > 0.0)) throw StrategyError(k, std::string("zero gradient ") + std::string(to_string(mode)));
    }
    const double top = *std::max_element(stat.begin(), stat.end());
    std::vector<double> hat(stat.size());
    for (std::size_t k = 0; k < stat.size(); ++k) hat[k] = top / stat[k];
    return hat;
}

std::vector<double> max_avg_hat(const ObjectiveGradients& grads, std::span<const double> lambda) {
    validate(grads);
    if (lambda.size() != grads.size()) throw std::invalid_argument("max_avg_hat: lambda size mismatch");
    double top = 0.0;
    for (double v : grads[0]) top = std::max(top, std::abs(v));
    std::vector<double> hat(grads.size(), 1.0);
    for (std::size_t k = 1; k < grads.size(); ++k) {
        if (!(lambda[k] > 0.0)) throw StrategyError(k, "non-positive weight");
        double mean_abs = 0.0;
        for (double v : grads[k]) mean_abs += std::abs(v);
        mean_abs /= static_cast<double>(grads[k].size());
        if (!(mean_abs > 0.0)) throw StrategyError(k, "zero mean absolute gradient");
        hat[k] = top / (lambda[k] * mean_abs);
    }
    return hat;
}

std::vector<double> moving_average_update(std::span<const double> lambda, std::span<const double> lambda_hat,
                                          double alpha) {
    if (lambda.size() != lambda_hat.size()) throw std::invalid_argument("moving_average_update: size mismatch");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("moving average rate must be in [0, 1)");
    std::vector<double> out(lambda.size());
    for (std::size_t k = 0; k < lambda.size(); ++k) out[k] = alpha * lambda[k] + (1.0 - alpha) * lambda_hat[k];
    return out;
}

std::size_t clip_weights(std::vector<double>& lambda, double lo, double hi) {
    std::size_t changed = 0;
    for (double& v : lambda) {
        const double c = std::clamp(v, lo, hi);
        if (c != v) {
            v = c;
            ++changed;
        }
    }
    return changed;
}

std::vector<double> epsilon_optimal_weights(std::span<const double> energies) {
    if (energies.empty()) throw std::invalid_argument("epsilon_optimal_weights: no objectives");
    double log_total = 0.0;
    for (std::size_t k = 0; k < energies.size(); ++k) {
        if (!(energies[k] > 0.0) || !std::isfinite(energies[k]))
            throw StrategyError(k, "energy integral must be positive and finite");
        log_total += std::log(energies[k]);
    }
    std::vector<double> logp(energies.size());
    for (std::size_t k = 0; k < energies.size(); ++k) logp[k] = log_total - std::log(energies[k]);
    const double top = *std::max_element(logp.begin(), logp.end());
    double sum = 0.0;
    std::vector<double> lambda(energies.size());
    for (std::size_t k = 0; k < energies.size(); ++k) {
        lambda[k] = std::exp(logp[k] - top);
        sum += lambda[k];
    }
    for (double& v : lambda) v /= sum;
    return lambda;
}

EnergyIntegrals compute_energy_integrals(const std::vector<std::vector<double>>& fields, double cell_area) {
    if (!(cell_area > 0.0)) throw std::invalid_argument("cell area must be positive");
    EnergyIntegrals out;
    out.cell_area = cell_area;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        double acc = 0.0;
        for (double v : fields[k]) {
            if (!std::isfinite(v)) throw StrategyError(k, "non-finite field value in energy integral");
            acc += v * v;
        }
        out.values.push_back(cell_area * acc);
    }
    return out;
}

std::vector<double> gram_matrix(const ObjectiveGradients& grads) {
    validate(grads);
    const std::size_t k = grads.size();
    std::vector<double> q(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < grads[i].size(); ++p) acc += grads[i][p] * grads[j][p];
            q[i * k + j] = q[j * k + i] = acc;
        }
    return q;
}

MinNormResult mgda_min_norm_gram(std::span<const double> gram, std::size_t k, double tol, int max_iters) {
    if (k < 2) throw std::invalid_argument("mgda_min_norm: need at least two objectives");
    if (gram.size() != k * k) throw std::invalid_argument("mgda_min_norm: Gram matrix size mismatch");
    for (std::size_t i = 0; i < gram.size(); ++i)
        if (!std::isfinite(gram[i])) throw StrategyError(i / k, "non-finite Gram matrix entry");

    auto at = [&](std::size_t i, std::size_t j) { return gram[i * k + j]; };
    MinNormResult res;
    res.lambda.assign(k, 1.0 / static_cast<double>(k));
    std::vector<double> ql(k);

    auto refresh = [&] {
        for (std::size_t i = 0; i < k; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) acc += at(i, j) * res.lambda[j];
            ql[i] = acc;
        }
        double f = 0.0;
        for (std::size_t i = 0; i < k; ++i) f += res.lambda[i] * ql[i];
        res.norm_sq = f;
    };

    refresh();
    res.history.push_back(res.norm_sq);
    for (;;) {
        const auto vertex = static_cast<std::size_t>(std::min_element(ql.begin(), ql.end()) - ql.begin());
        res.gap = res.norm_sq - ql[vertex];
        if (res.gap <= tol) {
            res.converged = true;
            break;
        }
        if (res.iterations >= max_iters) break;

        // (lambda - e)^T Q lambda and (lambda - e)^T Q (lambda - e)
        const double num = res.norm_sq - ql[vertex];
        const double den = res.norm_sq - 2.0 * ql[vertex] + at(vertex, vertex);
        double gamma = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 1.0;
        for (std::size_t i = 0; i < k; ++i) res.lambda[i] *= (1.0 - gamma);
        res.lambda[vertex] += gamma;
        ++res.iterations;
        refresh();
        res.history.push_back(res.norm_sq);
    }
    return res;
}

MinNormResult mgda_min_norm(const ObjectiveGradients& grads, double tol, int max_iters) {
    const auto q = gram_matrix(grads);
    return mgda_min_norm_gram(q, grads.size(), tol, max_iters);
}

std::vector<double> uniform_weights(std::size_t k) {
    if (k == 0) throw std::invalid_argument("uniform_weights: empty objective set");
    return std::vector<double>(k, 1.0);
}

}  // namespace lossbal::balance
