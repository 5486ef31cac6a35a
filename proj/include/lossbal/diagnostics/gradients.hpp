#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lossbal/balancing/weights.hpp"

namespace lossbal::diag {

struct HistogramSpec {
    std::size_t bins = 60;
    /// Defaults to the symmetric range [-m, m], m = max |g| over all objectives.
    std::optional<double> lo, hi;
};

struct GradientStats {
    double mean = 0.0;
    double std = 0.0;  // population
    double max_abs = 0.0;
};

/// Per-objective counts over one shared set of bins. Values outside the range
/// are clamped into the first or last bin, so every objective's counts sum to
/// its gradient length.
struct GradientHistogram {
    std::vector<double> edges;  // bins + 1
    std::vector<std::vector<std::size_t>> counts;
    std::vector<GradientStats> stats;
};

GradientStats gradient_stats(const std::vector<double>& g);
GradientHistogram gradient_histogram(const balance::ObjectiveGradients& grads, const HistogramSpec& spec = {});

/// Columns bin_left, bin_right, then one count column per objective.
void write_histogram_csv(const std::filesystem::path& path, const GradientHistogram& hist,
                         const std::vector<std::string>& names);

}  // namespace lossbal::diag
