#include "lossbal/training/evaluator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lossbal::train {

namespace {
constexpr std::size_t kTile = 128;
}

Batch full_batch(const problems::ProblemData& problem) {
    Batch b;
    for (const auto& set : problem.point_sets) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(set.points.cols()));
        std::iota(idx.begin(), idx.end(), 0);
        b.push_back(std::move(idx));
    }
    return b;
}

Evaluator::Evaluator(const problems::ProblemData& problem, const nn::MlpParams& params)
    : problem_(&problem), params_(&params) {
    const std::size_t d = params.config.input_dim;
    for (std::size_t s = 0; s < problem.point_sets.size(); ++s) {
        if (static_cast<std::size_t>(problem.point_sets[s].points.rows()) != d)
            throw std::invalid_argument("point set dimension does not match the network input");
        jets_.push_back(std::make_unique<nn::MlpJet>(params, problem.norm, nn::JetSpec{problem.required_orders(s, d)}));
    }
}

BatchResult Evaluator::evaluate(const Batch& batch, std::span<const double> task, std::span<const double> lambda,
                                const std::vector<bool>& active, bool per_objective, bool with_gradient) {
    const auto& pd = *problem_;
    const std::size_t K = pd.objectives.size();
    const std::size_t np = params_->parameter_count();
    const std::size_t nt = pd.task_init.size();
    if (lambda.size() != K || active.size() != K || task.size() != nt)
        throw std::invalid_argument("Evaluator::evaluate: size mismatch");

    BatchResult out;
    out.loss.assign(K, 0.0);
    if (with_gradient) {
        out.shared_grad.assign(np, 0.0);
        out.task_grad.assign(nt, 0.0);
        if (per_objective) {
            out.objective_grads.assign(K, std::vector<double>(np, 0.0));
            out.objective_task_grads.assign(K, std::vector<double>(nt, 0.0));
        }
    }

    for (std::size_t s = 0; s < pd.point_sets.size(); ++s) {
        bool used = false;
        for (std::size_t k = 0; k < K; ++k) used = used || (active[k] && pd.objectives[k].point_set == s);
        if (!used) continue;

        const auto& set = pd.point_sets[s];
        std::vector<std::size_t> all;
        const std::vector<std::size_t>* idx = &batch.at(s);
        if (!set.batched) {
            all.resize(static_cast<std::size_t>(set.points.cols()));
            std::iota(all.begin(), all.end(), 0);
            idx = &all;
        }
        const std::size_t n = idx->size();
        if (n == 0) throw std::invalid_argument("empty batch for point set " + set.name);
        const double inv_n = 1.0 / static_cast<double>(n);
        nn::MlpJet& jet = *jets_[s];
        const auto& spec = jet.spec();

        // Points are processed in fixed tiles so the jets stay cache resident;
        // tiles are reduced in index order.
        for (std::size_t start = 0; start < n; start += kTile) {
            const auto P = static_cast<Eigen::Index>(std::min(kTile, n - start));
            Eigen::MatrixXd pts(set.points.rows(), P);
            for (Eigen::Index i = 0; i < P; ++i)
                pts.col(i) = set.points.col(static_cast<Eigen::Index>((*idx)[start + static_cast<std::size_t>(i)]));
            jet.forward(pts);
            Eigen::MatrixXd combined;
            if (with_gradient && !per_objective) combined = Eigen::MatrixXd::Zero(1, jet.output().cols());

            for (std::size_t k = 0; k < K; ++k) {
                const auto& obj = pd.objectives[k];
                if (!active[k] || obj.point_set != s) continue;
                Eigen::MatrixXd adj;
                if (with_gradient) adj = Eigen::MatrixXd::Zero(1, jet.output().cols());
                for (const auto& res : obj.residuals) {
                    Eigen::VectorXd r(P);
                    for (Eigen::Index i = 0; i < P; ++i)
                        r(i) = -res.target(static_cast<Eigen::Index>((*idx)[start + static_cast<std::size_t>(i)]));
                    for (const auto& t : res.terms) {
                        const double c = t.coefficient * (t.task_parameter ? task[*t.task_parameter] : 1.0);
                        r += c * jet.channel(0, spec.channel(t.axis, t.order)).transpose();
                    }
                    out.loss[k] += r.squaredNorm() * inv_n;
                    if (!with_gradient) continue;
                    for (const auto& t : res.terms) {
                        const double c = t.coefficient * (t.task_parameter ? task[*t.task_parameter] : 1.0);
                        const auto ch = spec.channel(t.axis, t.order);
                        adj.row(0).segment(static_cast<Eigen::Index>(ch) * P, P) += (2.0 * inv_n * c) * r.transpose();
                        if (t.task_parameter) {
                            const double g = 2.0 * inv_n * t.coefficient * jet.channel(0, ch).dot(r.transpose());
                            if (per_objective)
                                out.objective_task_grads[k][*t.task_parameter] += g;
                            else
                                out.task_grad[*t.task_parameter] += lambda[k] * g;
                        }
                    }
                }
                if (!with_gradient) continue;
                if (per_objective)
                    jet.backward(adj, out.objective_grads[k]);
                else
                    combined += lambda[k] * adj;
            }
            if (with_gradient && !per_objective) jet.backward(combined, out.shared_grad);
        }
    }

    if (with_gradient && per_objective) {
        for (std::size_t k = 0; k < K; ++k) {
            if (!active[k]) continue;
            for (std::size_t i = 0; i < np; ++i) out.shared_grad[i] += lambda[k] * out.objective_grads[k][i];
            for (std::size_t t = 0; t < nt; ++t) out.task_grad[t] += lambda[k] * out.objective_task_grads[k][t];
        }
    }
    return out;
}

}  // namespace lossbal::train
