#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "lossbal/autodiff/graph.hpp"
#include "lossbal/error.hpp"
#include "lossbal/problems/sobolev.hpp"
#include "lossbal/random.hpp"
#include "lossbal/training/adam.hpp"
#include "lossbal/training/evaluator.hpp"
#include "lossbal/training/trainer.hpp"

using namespace lossbal;
using namespace lossbal::train;

namespace {

problems::ProblemData small_sobolev(std::uint64_t seed = 4) {
    problems::SobolevConfig cfg;
    cfg.modes = 2;
    cfg.grid = 8;
    cfg.seed = seed;
    return problems::make_sobolev_problem(cfg);
}

nn::MlpConfig small_net(nn::Activation act = nn::Activation::Sin) {
    nn::MlpConfig net;
    net.hidden_layers = 2;
    net.neurons = 6;
    net.activation = act;
    net.seed = 8;
    return net;
}

// One fit objective with constant target `value` on a handful of points.
problems::ProblemData constant_fit(double value) {
    problems::ProblemData pd;
    pd.kind = "toy";
    problems::PointSet set{"train", Eigen::MatrixXd(2, 4), true};
    set.points << 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0;
    pd.norm = nn::fit_norm_stats(set.points);
    pd.point_sets.push_back(set);
    pd.objectives.push_back({"fit", 0, {{{{0, 0, 1.0, std::nullopt}}, Eigen::VectorXd::Constant(4, value)}}});
    pd.test_points = set.points;
    pd.test_truth = Eigen::VectorXd::Constant(4, value);
    return pd;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max({std::abs(a[i]), std::abs(b[i]), 1e-300}));
    return worst;
}

}  // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged and counts the step") {
    std::vector<double> p{1.0, -2.0};
    const std::vector<double> g{0.0, 0.0};
    AdamState s(2);
    adam_step(p, g, s, 1e-3);
    CHECK(p == std::vector<double>{1.0, -2.0});
    CHECK(s.t == 1);
}

TEST_CASE("adam: first step moves by the learning rate against the gradient sign") {
    std::vector<double> p{0.0, 0.0, 0.0};
    const std::vector<double> g{3.0, -0.01, 250.0};
    AdamState s(3);
    adam_step(p, g, s, 1e-3, {0.9, 0.999, 1e-12});
    CHECK(p[0] == doctest::Approx(-1e-3).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(p[2] == doctest::Approx(-1e-3).epsilon(1e-9));
}

TEST_CASE("adam: first step is invariant to gradient scale") {
    const std::vector<double> g{0.3, -1.2, 4.0, 1e-2};
    std::vector<double> a(4, 0.0), b(4, 0.0);
    AdamState sa(4), sb(4);
    std::vector<double> g10 = g;
    for (double& v : g10) v *= 10;
    adam_step(a, g, sa, 1e-3);
    adam_step(b, g10, sb, 1e-3);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-6 * std::abs(a[i]));
}

TEST_CASE("adam: non-finite gradient aborts without side effects") {
    std::vector<double> p{1.0, 2.0};
    AdamState s(2);
    const std::vector<double> g{1.0, std::nan("")};
    CHECK_THROWS_AS(adam_step(p, g, s, 1e-3), NonFiniteError);
    CHECK(p == std::vector<double>{1.0, 2.0});
    CHECK(s.t == 0);
    CHECK(s.m == std::vector<double>{0.0, 0.0});
}

TEST_CASE("adam: converges on a scalar quadratic") {
    std::vector<double> theta{0.0};
    AdamState s(1);
    const std::vector<std::size_t> milestones{1000, 1500};
    for (std::size_t step = 0; step < 2000; ++step) {
        const std::vector<double> g{2 * (theta[0] - 3.0)};
        adam_step(theta, g, s, lr_schedule(step, 0.05, milestones, 0.1));
    }
    CHECK(std::abs(theta[0] - 3.0) <= 1e-3);
}

TEST_CASE("lr_schedule: piecewise constant decay") {
    const std::vector<std::size_t> m{10000, 15000};
    CHECK(lr_schedule(0, 1e-3, m, 0.1) == doctest::Approx(1e-3));
    CHECK(lr_schedule(9999, 1e-3, m, 0.1) == doctest::Approx(1e-3));
    CHECK(lr_schedule(10000, 1e-3, m, 0.1) == doctest::Approx(1e-4));
    CHECK(lr_schedule(12000, 1e-3, m, 0.1) == doctest::Approx(1e-4));
    CHECK(lr_schedule(16000, 1e-3, m, 0.1) == doctest::Approx(1e-5));
    CHECK(lr_schedule(5, 1e-3, {}, 0.1) == 1e-3);
}

TEST_CASE("make_batches: examples") {
    RandomStream rng(1, "batching");
    const auto b = make_batches(8, 4, rng);
    CHECK(b.size() == 2);
    std::set<std::size_t> all;
    for (const auto& batch : b) {
        CHECK(batch.size() == 4);
        CHECK(std::is_sorted(batch.begin(), batch.end()));
        all.insert(batch.begin(), batch.end());
    }
    CHECK(all.size() == 8);

    RandomStream rng2(1, "batching");
    const auto c = make_batches(5, 2, rng2);
    REQUIRE(c.size() == 3);
    CHECK(c[0].size() == 2);
    CHECK(c[1].size() == 2);
    CHECK(c[2].size() == 1);

    RandomStream r1(7, "batching"), r2(7, "batching");
    for (int e = 0; e < 3; ++e) CHECK(make_batches(100, 32, r1) == make_batches(100, 32, r2));
}

TEST_CASE("property: every epoch's batches are a permutation of the points") {
    const RandomStream root(3, "batching");
    for (std::uint64_t epoch = 0; epoch < 50; ++epoch) {
        RandomStream rng = root.substream(epoch);
        const std::size_t n = 1 + epoch * 7, bs = 1 + epoch % 9;
        const auto batches = make_batches(n, std::min(bs, n), rng);
        std::vector<std::size_t> seen;
        for (const auto& b : batches) seen.insert(seen.end(), b.begin(), b.end());
        std::sort(seen.begin(), seen.end());
        std::vector<std::size_t> expect(n);
        std::iota(expect.begin(), expect.end(), 0);
        CHECK(seen == expect);
    }
}

TEST_CASE("stages: masks follow the schedule") {
    const std::vector<StageSpec> stages{{0, {true, false, false}}, {1000, {true, true, false}}, {2000, {true, true, true}}};
    CHECK(active_mask(stages, 999, 3) == std::vector<bool>{true, false, false});
    CHECK(active_mask(stages, 1000, 3) == std::vector<bool>{true, true, false});
    CHECK(active_mask(stages, 2500, 3) == std::vector<bool>{true, true, true});
    CHECK(active_mask({}, 12345, 3) == std::vector<bool>{true, true, true});
}

TEST_CASE("stages: max/avg resets lambda at a boundary, others keep it unless asked") {
    const auto pd = small_sobolev();
    TrainingConfig cfg;
    cfg.stages = {{0, {true, true, false, false, false}}, {10, {true, true, true, false, false}}};
    std::vector<double> lambda{1.0, 7.0, 1.0, 1.0, 1.0};

    cfg.strategy = balance::Strategy::MaxAvg;
    auto l = lambda;
    CHECK(stage_boundary_reset(cfg, pd, 10, l));
    CHECK(l == std::vector<double>(5, 1.0));

    cfg.strategy = balance::Strategy::InverseDirichlet;
    l = lambda;
    CHECK_FALSE(stage_boundary_reset(cfg, pd, 10, l));
    CHECK(l == lambda);

    cfg.reset_all_lambda_at_stage = true;
    CHECK(stage_boundary_reset(cfg, pd, 10, l));
    CHECK(l == std::vector<double>(5, 1.0));

    cfg.stages[1].reset_lambda = false;
    l = lambda;
    CHECK_FALSE(stage_boundary_reset(cfg, pd, 10, l));
    CHECK_FALSE(stage_boundary_reset(cfg, pd, 9, l));
}

TEST_CASE("train: uniform toy fit converges") {
    const auto pd = constant_fit(3.0);
    nn::MlpConfig net;
    net.hidden_layers = 1;
    net.neurons = 2;
    net.activation = nn::Activation::Tanh;
    TrainingConfig cfg;
    cfg.epochs = 200;
    cfg.batch_size = 4;
    cfg.learning_rate = 0.1;
    const auto trace = train::train(pd, net, cfg);
    const Eigen::MatrixXd u = nn::evaluate_mlp(trace.params, pd.norm, pd.test_points);
    for (Eigen::Index p = 0; p < u.cols(); ++p) CHECK(std::abs(u(0, p) - 3.0) <= 1e-3);
}

TEST_CASE("train: identical seeds give bitwise-identical traces") {
    const auto pd = small_sobolev();
    TrainingConfig cfg;
    cfg.epochs = 12;
    cfg.batch_size = 10;
    cfg.strategy = balance::Strategy::InverseDirichlet;
    cfg.seed = 5;
    const auto a = train::train(pd, small_net(), cfg);
    const auto b = train::train(pd, small_net(), cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].losses == b.records[i].losses);
        CHECK(a.records[i].lambda == b.records[i].lambda);
        CHECK(a.records[i].task == b.records[i].task);
        CHECK(a.records[i].rel_l2 == b.records[i].rel_l2);
    }
    CHECK(a.params.flatten() == b.params.flatten());
    CHECK(a.updates.size() == 3);
}

TEST_CASE("train: epsilon-optimal weights never change") {
    const auto pd = small_sobolev();
    TrainingConfig cfg;
    cfg.epochs = 11;
    cfg.batch_size = 16;
    cfg.strategy = balance::Strategy::EpsilonOptimal;
    const auto trace = train::train(pd, small_net(), cfg);
    const auto expect = balance::epsilon_optimal_weights(*pd.energies);
    for (const auto& r : trace.records) CHECK(r.lambda == expect);
    CHECK(trace.updates.empty());
}

TEST_CASE("train: static weights equal folding them into the residuals") {
    const auto pd = small_sobolev();
    // Powers of four have exact square roots, so both forms round identically.
    const std::vector<double> lambda{4.0, 0.25, 16.0, 1.0, 0.0625};
    auto folded = pd;
    for (std::size_t k = 0; k < folded.objectives.size(); ++k)
        for (auto& res : folded.objectives[k].residuals) {
            const double s = std::sqrt(lambda[k]);
            res.target *= s;
            for (auto& t : res.terms) t.coefficient *= s;
        }
    TrainingConfig cfg;
    cfg.epochs = 6;
    cfg.batch_size = 8;
    cfg.seed = 2;
    cfg.snapshot_epochs = {1, 2, 3, 4, 5};
    auto weighted = cfg;
    weighted.initial_lambda = lambda;
    const auto a = train::train(pd, small_net(), weighted);
    const auto b = train::train(folded, small_net(), cfg);
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        CHECK(max_rel_diff(a.snapshots[i].params, b.snapshots[i].params) <= 1e-12);
        CHECK(max_rel_diff(a.snapshots[i].task, b.snapshots[i].task) <= 1e-12);
    }
}

TEST_CASE("train: a common weight factor barely changes the first update") {
    const auto pd = small_sobolev();
    TrainingConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 32;
    const auto base = train::train(pd, small_net(), cfg);
    const auto init = nn::init_mlp(small_net()).flatten();
    for (double c : {10.0, 100.0}) {
        auto scaled = cfg;
        scaled.initial_lambda = std::vector<double>(5, c);
        const auto t = train::train(pd, small_net(), scaled);
        const auto pa = base.params.flatten(), pb = t.params.flatten();
        double worst = 0.0, step = 0.0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            worst = std::max(worst, std::abs(pa[i] - pb[i]));
            step = std::max(step, std::abs(pa[i] - init[i]));
        }
        CHECK(worst <= 1e-6 * step);
    }
}

TEST_CASE("train: non-finite loss aborts with epoch context") {
    auto pd = constant_fit(1e300);
    TrainingConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 4;
    try {
        train::train(pd, small_net(), cfg);
        FAIL("expected NonFiniteError");
    } catch (const NonFiniteError& e) {
        CHECK(std::string(e.what()).find("epoch 0") != std::string::npos);
    }
}

TEST_CASE("train: configuration validation") {
    const auto pd = small_sobolev();
    TrainingConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 1000;
    CHECK_THROWS(train::train(pd, small_net(), cfg));
    cfg.batch_size = 8;
    cfg.milestones = {5, 5};
    CHECK_THROWS(train::train(pd, small_net(), cfg));
}

TEST_CASE("evaluator: losses and gradients match a graph-built loss") {
    const auto pd = small_sobolev();
    const auto params = nn::init_mlp(small_net(nn::Activation::Tanh));
    const std::vector<double> lambda{1.0, 0.5, 2.0, 0.1, 0.01};
    const std::vector<bool> active(5, true);
    const std::vector<double> task{0.7, 1.3, 0.9, 1.1};
    Evaluator ev(pd, params);
    const auto r = ev.evaluate(full_batch(pd), task, lambda, active, true);

    ad::Graph g;
    const std::vector<ad::VarId> in{g.declare_input("x"), g.declare_input("y")};
    const auto net = nn::build_output_expr(g, params, pd.norm, in);
    std::vector<ad::VarId> xi;
    for (std::size_t t = 0; t < task.size(); ++t) xi.push_back(g.declare_parameter("xi" + std::to_string(t)));
    std::vector<ad::VarId> all = net.parameters;
    all.insert(all.end(), xi.begin(), xi.end());

    const auto& pts = pd.point_sets[0].points;
    const double n = static_cast<double>(pts.cols());
    std::vector<double> loss(5, 0.0);
    std::vector<double> grad(all.size(), 0.0);
    ad::Binding b;
    nn::bind_parameters(b, net, params);
    for (std::size_t t = 0; t < task.size(); ++t) b.set(xi[t], task[t]);
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& obj = pd.objectives[k];
        std::vector<ad::VarId> targets;
        ad::Expr expr = g.zero();
        for (std::size_t ri = 0; ri < obj.residuals.size(); ++ri) {
            targets.push_back(g.declare_input("t" + std::to_string(k) + "_" + std::to_string(ri)));
            ad::Expr res = -g.variable(targets.back());
            for (const auto& term : obj.residuals[ri].terms) {
                std::vector<int> beta(2, 0);
                beta[term.axis] = term.order;
                ad::Expr d = nn::input_derivative_expr(net.outputs[0], in, beta) * term.coefficient;
                if (term.task_parameter) d = d * g.variable(xi[*term.task_parameter]);
                res = res + d;
            }
            expr = expr + ad::square(res);
        }
        for (Eigen::Index p = 0; p < pts.cols(); ++p) {
            b.set(in[0], pts(0, p));
            b.set(in[1], pts(1, p));
            for (std::size_t ri = 0; ri < targets.size(); ++ri) b.set(targets[ri], obj.residuals[ri].target(p));
            loss[k] += ad::evaluate(expr, b) / n;
            const auto gk = ad::gradient(expr, all, b);
            for (std::size_t i = 0; i < all.size(); ++i) grad[i] += lambda[k] * gk.values[i] / n;
        }
    }
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(r.loss[k] - loss[k]) <= 1e-10 * loss[k]);
    std::vector<double> ours = r.shared_grad;
    ours.insert(ours.end(), r.task_grad.begin(), r.task_grad.end());
    double scale = 0.0;
    for (double v : grad) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < grad.size(); ++i) CHECK(std::abs(ours[i] - grad[i]) <= 1e-10 * scale);
}

TEST_CASE("evaluator: inactive objectives contribute nothing") {
    const auto pd = small_sobolev();
    const auto params = nn::init_mlp(small_net());
    Evaluator ev(pd, params);
    const std::vector<double> lambda(5, 1.0);
    const std::vector<bool> active{true, false, true, false, false};
    const auto r = ev.evaluate(full_batch(pd), pd.task_init, lambda, active, true);
    CHECK(r.loss[1] == 0.0);
    CHECK(r.loss[3] == 0.0);
    CHECK(r.loss[0] > 0.0);
    // Task parameters 0, 2, 3 belong to D1, D3 and D4, all inactive.
    CHECK(r.task_grad[0] == 0.0);
    CHECK(r.task_grad[1] != 0.0);
    CHECK(r.task_grad[2] == 0.0);
}
