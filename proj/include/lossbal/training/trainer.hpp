#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lossbal/balancing/weights.hpp"
#include "lossbal/network/mlp.hpp"
#include "lossbal/problems/problem.hpp"
#include "lossbal/training/adam.hpp"

namespace lossbal::train {

struct StageSpec {
    std::size_t start_epoch = 0;
    std::vector<bool> active;
    bool reset_lambda = true;
};

struct TrainingConfig {
    std::size_t epochs = 1000;
    std::size_t batch_size = 1024;
    double learning_rate = 1e-3;
    std::vector<std::size_t> milestones;
    double decay = 0.1;
    std::size_t update_every = 5;
    double alpha = 0.5;
    balance::Strategy strategy = balance::Strategy::Uniform;
    balance::StatMode stat_mode = balance::StatMode::MeanSquare;
    double mgda_tol = 1e-6;
    int mgda_max_iters = 250;
    std::uint64_t seed = 0;
    /// Empty means a single stage with every objective active.
    std::vector<StageSpec> stages;
    bool reset_adam_at_stage = false;
    /// Reset lambda at flagged stage boundaries for every strategy, not just max/avg.
    bool reset_all_lambda_at_stage = false;
    /// Starting weights; defaults to the strategy's own initial point.
    std::optional<std::vector<double>> initial_lambda;
    /// Test metrics are computed every `eval_every` epochs and at the last epoch.
    std::size_t eval_every = 1;
    /// Epochs at which parameters and per-objective gradients are recorded.
    std::vector<std::size_t> snapshot_epochs;
    AdamConfig adam;

    void validate(std::size_t objectives) const;
};

/// Stage active at `epoch` (index into the schedule).
std::size_t stage_index(const std::vector<StageSpec>& stages, std::size_t epoch);
std::vector<bool> active_mask(const std::vector<StageSpec>& stages, std::size_t epoch, std::size_t objectives);

/// Initial weights of a strategy over the active objectives.
std::vector<double> initial_weights(balance::Strategy strategy, const problems::ProblemData& problem,
                                    const std::vector<bool>& active);

/// Applies the stage-boundary rule at `epoch`; returns true if lambda was reset.
bool stage_boundary_reset(const TrainingConfig& cfg, const problems::ProblemData& problem, std::size_t epoch,
                          std::vector<double>& lambda);

struct EpochRecord {
    std::size_t epoch = 0;
    std::size_t stage = 0;
    std::vector<std::optional<double>> losses;
    std::vector<double> lambda;
    std::optional<double> rel_l2;
    std::optional<double> rel_l1;
    std::vector<double> task;
    double learning_rate = 0.0;
    double seconds = 0.0;
};

struct LambdaUpdate {
    std::size_t epoch = 0;
    std::vector<std::optional<double>> hat;
    std::vector<double> lambda;
    std::size_t clipped = 0;
    bool converged = true;
};

struct Snapshot {
    std::size_t epoch = 0;
    std::vector<double> params;
    std::vector<double> task;
    std::vector<std::size_t> objectives;  // active objectives, matching `grads`
    balance::ObjectiveGradients grads;
};

struct TrainingTrace {
    std::vector<EpochRecord> records;
    std::vector<LambdaUpdate> updates;
    std::vector<Snapshot> snapshots;
    nn::MlpParams params;
    std::vector<double> task;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on sum_k lambda_k L_k with the configured weighting strategy.
TrainingTrace train(const problems::ProblemData& problem, const nn::MlpConfig& net, const TrainingConfig& cfg,
                    const EpochCallback& on_epoch = {});

/// Relative L2 error of the network on the problem's test set.
double test_error(const problems::ProblemData& problem, const nn::MlpParams& params);

}  // namespace lossbal::train
