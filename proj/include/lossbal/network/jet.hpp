#pragma once

// Batched forward evaluation of an MLP together with pure input partials
// (d^k u / dx_a^k for each axis a up to a per-axis order), plus reverse-mode
// parameter gradients through those partials.
//
// Every quantity is stored as a (rows x C*P) matrix: C channels of P points,
// channel-major. Channel 0 is the value; the remaining channels are
// (axis, order) pairs in axis-major order. Derivatives are propagated through
// activations with Faa di Bruno's formula, so each layer costs one GEMM over
// all channels.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lossbal/network/mlp.hpp"

namespace lossbal::nn {

struct JetSpec {
    /// Highest pure derivative order per input axis, each in 0..4.
    std::vector<int> max_order;

    static JetSpec uniform(std::size_t dims, int order);

    std::size_t channel_count() const;
    /// Channel of d^order / dx_axis^order; order 0 maps to channel 0.
    std::size_t channel(std::size_t axis, int order) const;
    int highest() const;
};

class MlpJet {
  public:
    /// `params` is referenced, not copied, and may change between forward calls.
    MlpJet(const MlpParams& params, NormStats stats, JetSpec spec);

    const JetSpec& spec() const { return spec_; }
    std::size_t points() const { return points_; }

    /// `points` holds one point per column (input_dim x P).
    void forward(const Eigen::Ref<const Eigen::MatrixXd>& points);

    /// Network output jets, output_dim x (C*P).
    const Eigen::MatrixXd& output() const { return out_; }
    /// Row vector of P values of output `o`, channel `c`.
    auto channel(std::size_t o, std::size_t c) const {
        return out_.row(static_cast<Eigen::Index>(o)).segment(static_cast<Eigen::Index>(c * points_),
                                                             static_cast<Eigen::Index>(points_));
    }

    /// Adds d(sum adjoint .* output)/d(theta) to `grad` (flat parameter
    /// ordering). Uses the state of the last forward call; may be called
    /// repeatedly with different adjoints.
    void backward(const Eigen::Ref<const Eigen::MatrixXd>& adjoint, std::span<double> grad) const;

  private:
    const MlpParams* params_;
    NormStats stats_;
    JetSpec spec_;
    std::size_t points_ = 0;
    std::vector<Eigen::MatrixXd> h_;  // layer inputs; h_[0] is the input jet
    std::vector<Eigen::MatrixXd> z_;  // hidden pre-activations
    std::vector<std::vector<Eigen::MatrixXd>> s_;  // activation derivatives at z_ channel 0
    Eigen::MatrixXd out_;
};

/// Network values only (output_dim x P).
Eigen::MatrixXd evaluate_mlp(const MlpParams& params, const NormStats& stats,
                             const Eigen::Ref<const Eigen::MatrixXd>& points);

}  // namespace lossbal::nn
