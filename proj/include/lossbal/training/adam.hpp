#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lossbal/random.hpp"

namespace lossbal::train {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
    void reset() { *this = AdamState(m.size()); }
};

/// One bias-corrected Adam step, in place. Throws NonFiniteError on a
/// non-finite gradient without touching params or state.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, double lr,
               const AdamConfig& cfg = {});

/// lr0 * factor^(number of milestones <= epoch).
double lr_schedule(std::size_t epoch, double lr0, std::span<const std::size_t> milestones, double factor);

/// Random partition of 0..n-1 into batches of `batch` indices (the last one
/// may be short). Indices inside each batch are sorted ascending.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch, RandomStream& rng);

}  // namespace lossbal::train
