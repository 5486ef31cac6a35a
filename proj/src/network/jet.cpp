#include "lossbal/network/jet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lossbal/error.hpp"
#include "vecmath.hpp"

namespace lossbal::nn {

JetSpec JetSpec::uniform(std::size_t dims, int order) { return {std::vector<int>(dims, order)}; }

std::size_t JetSpec::channel_count() const {
    std::size_t c = 1;
    for (int m : max_order) c += static_cast<std::size_t>(m);
    return c;
}

std::size_t JetSpec::channel(std::size_t axis, int order) const {
    if (axis >= max_order.size() || order < 0 || order > max_order[axis])
        throw std::out_of_range("JetSpec::channel: (axis " + std::to_string(axis) + ", order " +
                                std::to_string(order) + ") not in spec");
    if (order == 0) return 0;
    std::size_t c = 1;
    for (std::size_t a = 0; a < axis; ++a) c += static_cast<std::size_t>(max_order[a]);
    return c + static_cast<std::size_t>(order) - 1;
}

int JetSpec::highest() const {
    int m = 0;
    for (int o : max_order) m = std::max(m, o);
    return m;
}

namespace {

using Mat = Eigen::MatrixXd;

// s[j] = sigma^(j)(z) for j = 0..n. Buffers in `s` are reused across calls.
void activation_derivatives(Activation act, const Eigen::Ref<const Mat>& z, int n, std::vector<Mat>& s) {
    s.resize(static_cast<std::size_t>(n) + 1);
    for (auto& m : s) m.resize(z.rows(), z.cols());
    const auto size = static_cast<std::size_t>(z.size());
    switch (act) {
        case Activation::Sin: {
            vecmath::sin(z.data(), s[0].data(), size);
            if (n >= 1) vecmath::cos(z.data(), s[1].data(), size);
            for (int j = 2; j <= n; ++j) s[j] = -s[j - 2];
            break;
        }
        case Activation::Tanh: {
            if (n > 5) throw std::invalid_argument("tanh jets support at most 5 activation derivatives");
            vecmath::tanh(z.data(), s[0].data(), size);
            const auto t = s[0].array();
            const Eigen::ArrayXXd t2 = t.square();
            if (n >= 1) s[1].array() = 1.0 - t2;
            if (n >= 2) s[2].array() = -2.0 * t * (1.0 - t2);
            if (n >= 3) s[3].array() = -6.0 * t2.square() + 8.0 * t2 - 2.0;
            if (n >= 4) s[4].array() = t * (24.0 * t2.square() - 40.0 * t2 + 16.0);
            if (n >= 5) s[5].array() = -120.0 * t2.cube() + 240.0 * t2.square() - 136.0 * t2 + 16.0;
            break;
        }
        case Activation::Elu: {
            Mat e(z.rows(), z.cols());
            vecmath::exp(z.data(), e.data(), size);
            const auto pos = z.array() >= 0.0;
            s[0].array() = pos.select(z.array(), z.array().unaryExpr([](double v) { return std::expm1(v); }));
            if (n >= 1) s[1].array() = pos.select(Eigen::ArrayXXd::Ones(z.rows(), z.cols()), e.array());
            for (int j = 2; j <= n; ++j) s[j].array() = pos.select(Eigen::ArrayXXd::Zero(z.rows(), z.cols()), e.array());
            break;
        }
    }
}

template <class M>
auto blk(M& m, std::size_t c, std::size_t p) {
    return m.middleCols(static_cast<Eigen::Index>(c * p), static_cast<Eigen::Index>(p)).array();
}

void check_finite(const Mat& m, const char* what) {
    if (!m.allFinite()) throw NonFiniteError("jet", std::string("non-finite value in network ") + what);
}

}  // namespace

MlpJet::MlpJet(const MlpParams& params, NormStats stats, JetSpec spec)
    : params_(&params), stats_(std::move(stats)), spec_(std::move(spec)) {
    if (spec_.max_order.size() != params.config.input_dim || stats_.mean.size() != params.config.input_dim)
        throw std::invalid_argument("MlpJet: input dimension mismatch");
    for (int m : spec_.max_order)
        if (m < 0 || m > 4) throw std::invalid_argument("MlpJet: per-axis derivative order must be in 0..4");
}

void MlpJet::forward(const Eigen::Ref<const Eigen::MatrixXd>& points) {
    const auto& layers = params_->layers;
    const auto d = static_cast<Eigen::Index>(params_->config.input_dim);
    if (points.rows() != d) throw std::invalid_argument("MlpJet::forward: points must be input_dim x P");
    const std::size_t P = static_cast<std::size_t>(points.cols());
    const std::size_t C = spec_.channel_count();
    const int M = spec_.highest();
    const auto CP = static_cast<Eigen::Index>(C * P);
    points_ = P;

    const std::size_t hidden = layers.size() - 1;
    h_.resize(hidden + 1);
    z_.resize(hidden);
    s_.resize(hidden);

    Mat& h0 = h_[0];
    h0.setZero(d, CP);
    for (Eigen::Index a = 0; a < d; ++a) {
        const double mu = stats_.mean[static_cast<std::size_t>(a)];
        const double psi = stats_.stddev[static_cast<std::size_t>(a)];
        h0.row(a).head(static_cast<Eigen::Index>(P)) = (points.row(a).array() - mu) / psi;
        if (spec_.max_order[static_cast<std::size_t>(a)] >= 1) {
            const auto c = spec_.channel(static_cast<std::size_t>(a), 1);
            h0.row(a).segment(static_cast<Eigen::Index>(c * P), static_cast<Eigen::Index>(P)).setConstant(1.0 / psi);
        }
    }

    for (std::size_t l = 0; l < hidden; ++l) {
        const Layer& layer = layers[l];
        Mat& z = z_[l];
        z.noalias() = layer.weights * h_[l];
        z.leftCols(static_cast<Eigen::Index>(P)).colwise() += layer.bias;
        auto& s = s_[l];
        activation_derivatives(params_->config.activation, z.leftCols(static_cast<Eigen::Index>(P)), M + 1, s);

        Mat& h = h_[l + 1];
        h.resize(z.rows(), CP);
        blk(h, 0, P) = s[0].array();
        for (std::size_t a = 0; a < spec_.max_order.size(); ++a) {
            const int m = spec_.max_order[a];
            if (m == 0) continue;
            const std::size_t c1 = spec_.channel(a, 1);
            const auto s1 = s[1].array();
            const auto z1 = blk(z, c1, P);
            blk(h, c1, P) = s1 * z1;
            if (m >= 2) {
                const auto s2 = s[2].array();
                const auto z2 = blk(z, c1 + 1, P);
                blk(h, c1 + 1, P) = s2 * z1.square() + s1 * z2;
                if (m >= 3) {
                    const auto s3 = s[3].array();
                    const auto z3 = blk(z, c1 + 2, P);
                    blk(h, c1 + 2, P) = s3 * z1.cube() + 3.0 * s2 * z1 * z2 + s1 * z3;
                    if (m >= 4) {
                        const auto s4 = s[4].array();
                        const auto z4 = blk(z, c1 + 3, P);
                        blk(h, c1 + 3, P) = s4 * z1.square().square() + 6.0 * s3 * z1.square() * z2 +
                                            s2 * (3.0 * z2.square() + 4.0 * z1 * z3) + s1 * z4;
                    }
                }
            }
        }
    }

    const Layer& last = layers.back();
    out_.noalias() = last.weights * h_[hidden];
    out_.leftCols(static_cast<Eigen::Index>(P)).colwise() += last.bias;
    check_finite(out_, "output");
}

void MlpJet::backward(const Eigen::Ref<const Eigen::MatrixXd>& adjoint, std::span<double> grad) const {
    const auto& layers = params_->layers;
    if (grad.size() != params_->parameter_count()) throw std::invalid_argument("MlpJet::backward: gradient size mismatch");
    if (adjoint.rows() != out_.rows() || adjoint.cols() != out_.cols())
        throw std::invalid_argument("MlpJet::backward: adjoint shape mismatch");
    const std::size_t P = points_;
    const int M = spec_.highest();
    const std::size_t hidden = layers.size() - 1;

    std::vector<std::size_t> offset(layers.size(), 0);
    for (std::size_t l = 1; l < layers.size(); ++l)
        offset[l] = offset[l - 1] + static_cast<std::size_t>(layers[l - 1].weights.size() + layers[l - 1].bias.size());

    auto accumulate = [&](std::size_t l, const Mat& zbar) {
        const Mat dw = zbar * h_[l].transpose();
        const Eigen::VectorXd db = zbar.leftCols(static_cast<Eigen::Index>(P)).rowwise().sum();
        std::size_t k = offset[l];
        for (Eigen::Index r = 0; r < dw.rows(); ++r)
            for (Eigen::Index c = 0; c < dw.cols(); ++c) grad[k++] += dw(r, c);
        for (Eigen::Index r = 0; r < db.size(); ++r) grad[k++] += db(r);
    };

    Mat zbar = adjoint;
    accumulate(hidden, zbar);
    Mat hbar;
    for (std::size_t l = hidden; l-- > 0;) {
        hbar.noalias() = layers[l + 1].weights.transpose() * zbar;
        const Mat& z = z_[l];
        const auto& s = s_[l];
        zbar.resize(z.rows(), z.cols());

        std::vector<Eigen::ArrayXXd> sbar(static_cast<std::size_t>(M) + 1);
        sbar[0] = blk(hbar, 0, P);
        for (int j = 1; j <= M; ++j) sbar[j] = Eigen::ArrayXXd::Zero(z.rows(), static_cast<Eigen::Index>(P));

        for (std::size_t a = 0; a < spec_.max_order.size(); ++a) {
            const int m = spec_.max_order[a];
            if (m == 0) continue;
            const std::size_t c1 = spec_.channel(a, 1);
            const auto s1 = s[1].array();
            const auto z1 = blk(z, c1, P);
            const auto hb1 = blk(hbar, c1, P);
            if (m == 1) {
                blk(zbar, c1, P) = hb1 * s1;
                sbar[1] += hb1 * z1;
                continue;
            }
            const auto s2 = s[2].array();
            const auto z2 = blk(z, c1 + 1, P);
            const auto hb2 = blk(hbar, c1 + 1, P);
            if (m == 2) {
                blk(zbar, c1, P) = hb1 * s1 + 2.0 * hb2 * s2 * z1;
                blk(zbar, c1 + 1, P) = hb2 * s1;
                sbar[1] += hb1 * z1 + hb2 * z2;
                sbar[2] += hb2 * z1.square();
                continue;
            }
            const auto s3 = s[3].array();
            const auto z3 = blk(z, c1 + 2, P);
            const auto hb3 = blk(hbar, c1 + 2, P);
            if (m == 3) {
                blk(zbar, c1, P) = hb1 * s1 + 2.0 * hb2 * s2 * z1 + hb3 * (3.0 * s3 * z1.square() + 3.0 * s2 * z2);
                blk(zbar, c1 + 1, P) = hb2 * s1 + 3.0 * hb3 * s2 * z1;
                blk(zbar, c1 + 2, P) = hb3 * s1;
                sbar[1] += hb1 * z1 + hb2 * z2 + hb3 * z3;
                sbar[2] += hb2 * z1.square() + 3.0 * hb3 * z1 * z2;
                sbar[3] += hb3 * z1.cube();
                continue;
            }
            const auto s4 = s[4].array();
            const auto z4 = blk(z, c1 + 3, P);
            const auto hb4 = blk(hbar, c1 + 3, P);
            blk(zbar, c1, P) = hb1 * s1 + 2.0 * hb2 * s2 * z1 + hb3 * (3.0 * s3 * z1.square() + 3.0 * s2 * z2) +
                               hb4 * (4.0 * s4 * z1.cube() + 12.0 * s3 * z1 * z2 + 4.0 * s2 * z3);
            blk(zbar, c1 + 1, P) = hb2 * s1 + 3.0 * hb3 * s2 * z1 + hb4 * (6.0 * s3 * z1.square() + 6.0 * s2 * z2);
            blk(zbar, c1 + 2, P) = hb3 * s1 + 4.0 * hb4 * s2 * z1;
            blk(zbar, c1 + 3, P) = hb4 * s1;
            sbar[1] += hb1 * z1 + hb2 * z2 + hb3 * z3 + hb4 * z4;
            sbar[2] += hb2 * z1.square() + 3.0 * hb3 * z1 * z2 + hb4 * (3.0 * z2.square() + 4.0 * z1 * z3);
            sbar[3] += hb3 * z1.cube() + 6.0 * hb4 * z1.square() * z2;
            sbar[4] += hb4 * z1.square().square();
        }

        auto zb0 = blk(zbar, 0, P);
        zb0 = sbar[0] * s[1].array();
        for (int j = 1; j <= M; ++j) zb0 += sbar[j] * s[j + 1].array();
        accumulate(l, zbar);
    }
}

Eigen::MatrixXd evaluate_mlp(const MlpParams& params, const NormStats& stats,
                             const Eigen::Ref<const Eigen::MatrixXd>& points) {
    MlpJet jet(params, stats, JetSpec::uniform(params.config.input_dim, 0));
    jet.forward(points);
    return jet.output();
}

}  // namespace lossbal::nn
