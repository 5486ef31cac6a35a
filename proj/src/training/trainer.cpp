#include "lossbal/training/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lossbal/csv.hpp"
#include "lossbal/error.hpp"
#include "lossbal/network/jet.hpp"
#include "lossbal/training/evaluator.hpp"

namespace lossbal::train {

using balance::Strategy;

void TrainingConfig::validate(std::size_t objectives) const {
    if (epochs == 0) throw std::invalid_argument("epochs must be positive");
    if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    for (std::size_t i = 1; i < milestones.size(); ++i)
        if (milestones[i] <= milestones[i - 1]) throw std::invalid_argument("milestones must be strictly increasing");
    if (!(decay > 0.0)) throw std::invalid_argument("decay factor must be positive");
    if (update_every == 0) throw std::invalid_argument("weight update cadence must be positive");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in [0, 1)");
    if (eval_every == 0) throw std::invalid_argument("eval_every must be positive");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (stages[i].active.size() != objectives)
            throw std::invalid_argument("stage " + std::to_string(i) + ": mask size does not match the objective count");
        if (std::none_of(stages[i].active.begin(), stages[i].active.end(), [](bool b) { return b; }))
            throw std::invalid_argument("stage " + std::to_string(i) + ": no active objective");
        if (i == 0 && stages[i].start_epoch != 0) throw std::invalid_argument("first stage must start at epoch 0");
        if (i > 0 && stages[i].start_epoch <= stages[i - 1].start_epoch)
            throw std::invalid_argument("stage start epochs must be strictly increasing");
    }
    if (initial_lambda) {
        if (initial_lambda->size() != objectives) throw std::invalid_argument("initial lambda size mismatch");
        for (double v : *initial_lambda)
            if (!(v > 0.0)) throw std::invalid_argument("initial lambda must be positive");
    }
}

std::size_t stage_index(const std::vector<StageSpec>& stages, std::size_t epoch) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < stages.size(); ++i)
        if (stages[i].start_epoch <= epoch) s = i;
    return s;
}

std::vector<bool> active_mask(const std::vector<StageSpec>& stages, std::size_t epoch, std::size_t objectives) {
    if (stages.empty()) return std::vector<bool>(objectives, true);
    return stages[stage_index(stages, epoch)].active;
}

std::vector<double> initial_weights(Strategy strategy, const problems::ProblemData& problem,
                                    const std::vector<bool>& active) {
    const std::size_t K = problem.objectives.size();
    std::vector<double> lambda(K, 1.0);
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < K; ++k)
        if (active[k]) idx.push_back(k);
    if (strategy == Strategy::Mgda) {
        for (std::size_t k : idx) lambda[k] = 1.0 / static_cast<double>(idx.size());
    } else if (strategy == Strategy::EpsilonOptimal) {
        if (!problem.energies) throw std::invalid_argument("epsilon-optimal weights need a problem with energy integrals");
        std::vector<double> e;
        for (std::size_t k : idx) e.push_back((*problem.energies)[k]);
        const auto w = balance::epsilon_optimal_weights(e);
        for (std::size_t i = 0; i < idx.size(); ++i) lambda[idx[i]] = w[i];
    }
    return lambda;
}

bool stage_boundary_reset(const TrainingConfig& cfg, const problems::ProblemData& problem, std::size_t epoch,
                          std::vector<double>& lambda) {
    if (cfg.stages.size() < 2 || epoch == 0) return false;
    const std::size_t s = stage_index(cfg.stages, epoch);
    const auto& stage = cfg.stages[s];
    if (stage.start_epoch != epoch) return false;
    const bool reset = (stage.reset_lambda && (cfg.strategy == Strategy::MaxAvg || cfg.reset_all_lambda_at_stage)) ||
                       cfg.strategy == Strategy::EpsilonOptimal || cfg.strategy == Strategy::Mgda;
    if (!reset) return false;
    // Static and simplex weights are re-derived over the new active set.
    lambda = initial_weights(cfg.strategy, problem, stage.active);
    if (cfg.initial_lambda && cfg.strategy != Strategy::EpsilonOptimal && cfg.strategy != Strategy::Mgda)
        lambda = *cfg.initial_lambda;
    return true;
}

double test_error(const problems::ProblemData& problem, const nn::MlpParams& params) {
    const Eigen::MatrixXd pred = nn::evaluate_mlp(params, problem.norm, problem.test_points);
    return problems::relative_l2(std::span<const double>(pred.data(), static_cast<std::size_t>(pred.cols())),
                                 std::span<const double>(problem.test_truth.data(), static_cast<std::size_t>(problem.test_truth.size())));
}

namespace {

std::string loss_summary(const BatchResult& r, const std::vector<bool>& active) {
    std::string s;
    for (std::size_t k = 0; k < r.loss.size(); ++k) {
        if (!active[k]) continue;
        if (!s.empty()) s += ", ";
        s += "L" + std::to_string(k) + "=" + format_double(r.loss[k]);
    }
    return s;
}

}  // namespace

TrainingTrace train(const problems::ProblemData& problem, const nn::MlpConfig& net, const TrainingConfig& cfg,
                    const EpochCallback& on_epoch) {
    problem.validate();
    const std::size_t K = problem.objectives.size();
    cfg.validate(K);
    if (cfg.strategy == Strategy::Mgda && K < 2) throw std::invalid_argument("mgda needs at least two objectives");

    TrainingTrace trace;
    trace.params = nn::init_mlp(net);
    trace.task = problem.task_init;
    nn::MlpParams& params = trace.params;
    std::vector<double>& task = trace.task;
    const std::size_t np = params.parameter_count();
    const std::size_t nt = task.size();

    Evaluator eval(problem, params);
    AdamState adam(np + nt);
    std::vector<double> theta = params.flatten();
    theta.insert(theta.end(), task.begin(), task.end());
    std::vector<double> grad(np + nt);

    std::vector<bool> active = active_mask(cfg.stages, 0, K);
    std::vector<double> lambda = initial_weights(cfg.strategy, problem, active);
    if (cfg.initial_lambda && cfg.strategy != Strategy::EpsilonOptimal && cfg.strategy != Strategy::Mgda)
        lambda = *cfg.initial_lambda;

    std::size_t batched_n = 0;
    std::size_t batched_set = problem.point_sets.size();
    for (std::size_t s = 0; s < problem.point_sets.size(); ++s)
        if (problem.point_sets[s].batched) {
            if (batched_set != problem.point_sets.size()) throw std::invalid_argument("at most one batched point set is supported");
            batched_set = s;
            batched_n = static_cast<std::size_t>(problem.point_sets[s].points.cols());
        }
    if (batched_set != problem.point_sets.size() && cfg.batch_size > batched_n)
        throw std::invalid_argument("batch size " + std::to_string(cfg.batch_size) + " exceeds the " +
                                    std::to_string(batched_n) + " training points");

    const RandomStream batching(cfg.seed, "batching");
    const bool dynamic = cfg.strategy == Strategy::MaxAvg || cfg.strategy == Strategy::InverseDirichlet ||
                         cfg.strategy == Strategy::Mgda;
    const auto t0 = std::chrono::steady_clock::now();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        active = active_mask(cfg.stages, epoch, K);
        if (cfg.stages.size() > 1 && epoch > 0 && cfg.stages[stage_index(cfg.stages, epoch)].start_epoch == epoch) {
            stage_boundary_reset(cfg, problem, epoch, lambda);
            if (cfg.reset_adam_at_stage) adam.reset();
        }
        const double lr = lr_schedule(epoch, cfg.learning_rate, cfg.milestones, cfg.decay);

        std::vector<std::vector<std::size_t>> batches;
        if (batched_set != problem.point_sets.size()) {
            RandomStream rng = batching.substream(epoch);
            batches = make_batches(batched_n, cfg.batch_size, rng);
        } else {
            batches.emplace_back();
        }

        const bool snapshot =
            std::find(cfg.snapshot_epochs.begin(), cfg.snapshot_epochs.end(), epoch) != cfg.snapshot_epochs.end();
        std::vector<double> epoch_loss(K, 0.0);
        for (std::size_t b = 0; b < batches.size(); ++b) {
            Batch batch(problem.point_sets.size());
            if (batched_set != problem.point_sets.size()) batch[batched_set] = std::move(batches[b]);

            const bool update = dynamic && b == 0 && epoch % cfg.update_every == 0;
            const bool per_objective = update || (snapshot && b == 0);
            BatchResult res;
            try {
                res = eval.evaluate(batch, task, lambda, active, per_objective);
                for (std::size_t k = 0; k < K; ++k)
                    if (!std::isfinite(res.loss[k]))
                        throw NonFiniteError("loss", "objective " + problem.objectives[k].name + " has a non-finite loss");
                if (update) {
                    std::vector<std::size_t> idx;
                    balance::ObjectiveGradients g;
                    for (std::size_t k = 0; k < K; ++k)
                        if (active[k]) {
                            idx.push_back(k);
                            g.push_back(res.objective_grads[k]);
                        }
                    LambdaUpdate rec;
                    rec.epoch = epoch;
                    rec.hat.assign(K, std::nullopt);
                    if (cfg.strategy == Strategy::Mgda) {
                        if (idx.size() >= 2) {
                            const auto mn = balance::mgda_min_norm(g, cfg.mgda_tol, cfg.mgda_max_iters);
                            std::vector<double> w = mn.lambda;
                            rec.clipped = balance::clip_weights(w);
                            double sum = 0.0;
                            for (double v : w) sum += v;
                            for (std::size_t i = 0; i < idx.size(); ++i) {
                                lambda[idx[i]] = w[i] / sum;
                                rec.hat[idx[i]] = mn.lambda[i];
                            }
                            rec.converged = mn.converged;
                        } else {
                            lambda[idx[0]] = 1.0;
                            rec.hat[idx[0]] = 1.0;
                        }
                    } else {
                        std::vector<double> cur;
                        for (std::size_t k : idx) cur.push_back(lambda[k]);
                        std::vector<double> hat = cfg.strategy == Strategy::MaxAvg
                                                      ? balance::max_avg_hat(g, cur)
                                                      : balance::inverse_dirichlet_hat(g, cfg.stat_mode);
                        rec.clipped = balance::clip_weights(hat);
                        const auto next = balance::moving_average_update(cur, hat, cfg.alpha);
                        for (std::size_t i = 0; i < idx.size(); ++i) {
                            lambda[idx[i]] = next[i];
                            rec.hat[idx[i]] = hat[i];
                        }
                        if (cfg.strategy == Strategy::MaxAvg) lambda[idx[0]] = 1.0;
                    }
                    rec.lambda = lambda;
                    trace.updates.push_back(std::move(rec));
                    // Recombine with the new weights, objective order.
                    std::fill(res.shared_grad.begin(), res.shared_grad.end(), 0.0);
                    std::fill(res.task_grad.begin(), res.task_grad.end(), 0.0);
                    for (std::size_t k = 0; k < K; ++k) {
                        if (!active[k]) continue;
                        for (std::size_t i = 0; i < np; ++i) res.shared_grad[i] += lambda[k] * res.objective_grads[k][i];
                        for (std::size_t t = 0; t < nt; ++t) res.task_grad[t] += lambda[k] * res.objective_task_grads[k][t];
                    }
                }
                if (snapshot && b == 0) {
                    Snapshot snap;
                    snap.epoch = epoch;
                    snap.params = params.flatten();
                    snap.task = task;
                    for (std::size_t k = 0; k < K; ++k)
                        if (active[k]) {
                            snap.objectives.push_back(k);
                            snap.grads.push_back(res.objective_grads[k]);
                        }
                    trace.snapshots.push_back(std::move(snap));
                }
                std::copy(res.shared_grad.begin(), res.shared_grad.end(), grad.begin());
                std::copy(res.task_grad.begin(), res.task_grad.end(), grad.begin() + static_cast<std::ptrdiff_t>(np));
                adam_step(theta, grad, adam, lr, cfg.adam);
            } catch (const NonFiniteError& e) {
                throw NonFiniteError(e.tag(), std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", batch " +
                                                  std::to_string(b) + " (" + loss_summary(res, active) + ")");
            }
            params.assign(std::span<const double>(theta.data(), np));
            std::copy(theta.begin() + static_cast<std::ptrdiff_t>(np), theta.end(), task.begin());
            for (std::size_t k = 0; k < K; ++k) epoch_loss[k] += res.loss[k];
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.stage = cfg.stages.empty() ? 0 : stage_index(cfg.stages, epoch);
        rec.losses.assign(K, std::nullopt);
        for (std::size_t k = 0; k < K; ++k)
            if (active[k]) rec.losses[k] = epoch_loss[k] / static_cast<double>(batches.size());
        rec.lambda = lambda;
        rec.task = task;
        rec.learning_rate = lr;
        if (epoch % cfg.eval_every == 0 || epoch + 1 == cfg.epochs) {
            rec.rel_l2 = test_error(problem, params);
            if (nt > 0) rec.rel_l1 = problems::relative_l1(task, problem.task_truth);
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_epoch) on_epoch(rec);
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

}  // namespace lossbal::train
