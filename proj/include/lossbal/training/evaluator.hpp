#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lossbal/network/jet.hpp"
#include "lossbal/problems/problem.hpp"

namespace lossbal::train {

/// Column indices per point set. Sets that are not batched ignore their entry
/// and always use every point.
using Batch = std::vector<std::vector<std::size_t>>;

/// The full-data batch of a problem.
Batch full_batch(const problems::ProblemData& problem);

struct BatchResult {
    std::vector<double> loss;        // per objective; 0 for inactive ones
    std::vector<double> shared_grad;  // sum over active k of lambda_k dL_k/dtheta
    std::vector<double> task_grad;    // sum over active k of lambda_k dL_k/dxi
    /// Filled only when requested: unweighted per-objective gradients.
    std::vector<std::vector<double>> objective_grads;
    std::vector<std::vector<double>> objective_task_grads;
};

/// Losses and gradients of a problem's objectives for one batch. Keeps one
/// jet workspace per point set; `params` is referenced and may change
/// between calls.
class Evaluator {
  public:
    Evaluator(const problems::ProblemData& problem, const nn::MlpParams& params);

    /// `per_objective` additionally returns each objective's own gradient; the
    /// weighted totals are then formed from those in objective order.
    BatchResult evaluate(const Batch& batch, std::span<const double> task, std::span<const double> lambda,
                         const std::vector<bool>& active, bool per_objective, bool with_gradient = true);

  private:
    const problems::ProblemData* problem_;
    const nn::MlpParams* params_;
    std::vector<std::unique_ptr<nn::MlpJet>> jets_;
};

}  // namespace lossbal::train
