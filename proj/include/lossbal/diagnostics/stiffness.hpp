#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lossbal/network/mlp.hpp"
#include "lossbal/problems/problem.hpp"

namespace lossbal::diag {

struct StiffnessConfig {
    /// Derivative order m of the second objective.
    int order = 1;
    /// Strictly increasing positive wavenumbers k0.
    std::vector<int> wavenumbers{2, 4, 8};
    nn::MlpConfig net;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::size_t grid = 64;
    int max_retries = 5;
    /// Measure only the target-driven gradient part, i.e. the gradient minus
    /// its value for a zero target, so the residual is exactly the tone.
    bool target_driven = true;

    void validate() const;
};

struct StiffnessProbe {
    int order = 0;
    std::vector<int> wavenumbers;
    /// R(k0) = ||grad L2|| / ||grad L1|| at initialization, mean over seeds.
    std::vector<double> ratio;
    std::vector<std::vector<double>> per_seed;  // [k0][seed]
    /// Least-squares slope of log R against log k0.
    double slope = 0.0;
};

/// Fit and D^m objectives for the tone sin(k0 x) sin(k0 y) on a periodic grid
/// over [0, 2 pi)^2. For m = 0 both objectives are the plain fit.
problems::ProblemData tone_problem(int k0, int order, std::size_t grid);

StiffnessProbe stiffness_probe(const StiffnessConfig& cfg);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
/// Spearman rank correlation, average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Per radial bin k = 0..side/2: RMS over the bin's modes of ||d u~(k) / d theta||,
/// for the network evaluated on a side x side periodic grid over [0, domain)^2.
std::vector<double> spectral_sensitivity(const nn::MlpParams& params, const nn::NormStats& stats, std::size_t side,
                                         double domain);

}  // namespace lossbal::diag
