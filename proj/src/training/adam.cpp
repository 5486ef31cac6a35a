#include "lossbal/training/adam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lossbal/error.hpp"

namespace lossbal::train {

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, double lr,
               const AdamConfig& cfg) {
    if (params.size() != grad.size() || state.m.size() != grad.size())
        throw std::invalid_argument("adam_step: size mismatch");
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (!std::isfinite(grad[i]))
            throw NonFiniteError("gradient", "non-finite gradient component " + std::to_string(i));
    ++state.t;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
}

double lr_schedule(std::size_t epoch, double lr0, std::span<const std::size_t> milestones, double factor) {
    double lr = lr0;
    for (std::size_t m : milestones)
        if (epoch >= m) lr *= factor;
    return lr;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch, RandomStream& rng) {
    if (batch == 0 || batch > n) throw std::invalid_argument("batch size must be in 1..N");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < n; start += batch) {
        const std::size_t end = std::min(n, start + batch);
        std::vector<std::size_t> b(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                   perm.begin() + static_cast<std::ptrdiff_t>(end));
        std::sort(b.begin(), b.end());
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace lossbal::train
