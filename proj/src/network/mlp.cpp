#include "lossbal/network/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "lossbal/error.hpp"
#include "lossbal/random.hpp"

namespace lossbal::nn {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::Sin: return "sin";
        case Activation::Tanh: return "tanh";
        case Activation::Elu: return "elu";
    }
    return "?";
}

Activation parse_activation(std::string_view name) {
    if (name == "sin") return Activation::Sin;
    if (name == "tanh") return Activation::Tanh;
    if (name == "elu") return Activation::Elu;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "' (expected sin, tanh or elu)");
}

double MlpConfig::effective_gain() const {
    if (gain) return *gain;
    return activation == Activation::Tanh ? 5.0 / 3.0 : 1.0;
}

void MlpConfig::validate() const {
    if (input_dim == 0 || output_dim == 0) throw std::invalid_argument("network input and output dimension must be >= 1");
    if (hidden_layers == 0) throw std::invalid_argument("network needs at least one hidden layer");
    if (neurons == 0) throw std::invalid_argument("network needs at least one neuron per layer");
    if (!(effective_gain() > 0.0)) throw std::invalid_argument("Xavier gain must be positive");
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    return n;
}

std::vector<double> MlpParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& layer : layers) {
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) flat.push_back(layer.weights(r, c));
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) flat.push_back(layer.bias(r));
    }
    return flat;
}

void MlpParams::assign(std::span<const double> flat) {
    if (flat.size() != parameter_count()) throw std::invalid_argument("MlpParams::assign: size mismatch");
    std::size_t k = 0;
    for (auto& layer : layers) {
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = flat[k++];
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = flat[k++];
    }
}

std::string MlpParams::parameter_name(std::size_t index) const {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        const auto nw = static_cast<std::size_t>(layer.weights.size());
        const auto cols = static_cast<std::size_t>(layer.weights.cols());
        if (index < offset + nw) {
            const std::size_t i = index - offset;
            return "W" + std::to_string(l + 1) + "[" + std::to_string(i / cols) + "," + std::to_string(i % cols) + "]";
        }
        offset += nw;
        if (index < offset + static_cast<std::size_t>(layer.bias.size()))
            return "b" + std::to_string(l + 1) + "[" + std::to_string(index - offset) + "]";
        offset += static_cast<std::size_t>(layer.bias.size());
    }
    throw std::out_of_range("parameter index out of range");
}

double xavier_std(std::size_t fan_out, std::size_t fan_in, double gain) {
    return gain * std::sqrt(2.0 / static_cast<double>(fan_out + fan_in));
}

MlpParams init_mlp(const MlpConfig& config) {
    config.validate();
    MlpParams params;
    params.config = config;
    const double gain = config.effective_gain();
    const RandomStream root(config.seed, "init");

    std::size_t fan_in = config.input_dim;
    for (std::size_t l = 0; l <= config.hidden_layers; ++l) {
        const std::size_t fan_out = l == config.hidden_layers ? config.output_dim : config.neurons;
        const double sd = xavier_std(fan_out, fan_in, gain);
        RandomStream rng = root.substream(l);
        Layer layer;
        layer.weights.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = sd * rng.normal();
        layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fan_out));
        params.layers.push_back(std::move(layer));
        fan_in = fan_out;
    }
    return params;
}

NormStats NormStats::identity(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

NormStats fit_norm_stats(const Eigen::MatrixXd& points) {
    if (points.cols() < 2) throw std::invalid_argument("fit_norm_stats: need at least two points");
    NormStats stats;
    const double n = static_cast<double>(points.cols());
    for (Eigen::Index d = 0; d < points.rows(); ++d) {
        const double mean = points.row(d).sum() / n;
        const double var = (points.row(d).array() - mean).square().sum() / n;
        if (!(var > 0.0))
            throw std::invalid_argument("fit_norm_stats: input dimension " + std::to_string(d) +
                                        " is constant over the training set");
        stats.mean.push_back(mean);
        stats.stddev.push_back(std::sqrt(var));
    }
    return stats;
}

std::vector<double> normalize(std::span<const double> point, const NormStats& stats) {
    if (point.size() != stats.mean.size()) throw std::invalid_argument("normalize: dimension mismatch");
    std::vector<double> out(point.size());
    for (std::size_t d = 0; d < point.size(); ++d) out[d] = (point[d] - stats.mean[d]) / stats.stddev[d];
    return out;
}

namespace {

ad::Expr activate(Activation a, ad::Expr z) {
    switch (a) {
        case Activation::Sin: return ad::sin(z);
        case Activation::Tanh: return ad::tanh(z);
        case Activation::Elu: return ad::elu(z);
    }
    throw std::logic_error("activate");
}

}  // namespace

NetworkExpr build_output_expr(ad::Graph& graph, const MlpParams& params, const NormStats& stats,
                              std::span<const ad::VarId> inputs) {
    const auto& cfg = params.config;
    if (inputs.size() != cfg.input_dim || stats.mean.size() != cfg.input_dim)
        throw std::invalid_argument("build_output_expr: input dimension mismatch");

    NetworkExpr net;
    std::vector<ad::Expr> z;
    for (std::size_t d = 0; d < inputs.size(); ++d)
        z.push_back((graph.variable(inputs[d]) - stats.mean[d]) / stats.stddev[d]);

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        const auto rows = static_cast<std::size_t>(layer.weights.rows());
        const auto cols = static_cast<std::size_t>(layer.weights.cols());
        std::vector<ad::VarId> w(rows * cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                const std::string name = "W" + std::to_string(l + 1) + "[" + std::to_string(r) + "," + std::to_string(c) + "]";
                w[r * cols + c] = graph.declare_parameter(name);
            }
        std::vector<ad::VarId> b(rows);
        for (std::size_t r = 0; r < rows; ++r)
            b[r] = graph.declare_parameter("b" + std::to_string(l + 1) + "[" + std::to_string(r) + "]");
        net.parameters.insert(net.parameters.end(), w.begin(), w.end());
        net.parameters.insert(net.parameters.end(), b.begin(), b.end());

        const bool output_layer = l + 1 == params.layers.size();
        std::vector<ad::Expr> next(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            ad::Expr acc = graph.variable(b[r]);
            for (std::size_t c = 0; c < cols; ++c) acc = acc + graph.variable(w[r * cols + c]) * z[c];
            next[r] = output_layer ? acc : activate(cfg.activation, acc);
        }
        z = std::move(next);
    }
    net.outputs = std::move(z);
    return net;
}

void bind_parameters(ad::Binding& binding, const NetworkExpr& net, const MlpParams& params) {
    const auto flat = params.flatten();
    if (flat.size() != net.parameters.size()) throw std::invalid_argument("bind_parameters: size mismatch");
    for (std::size_t i = 0; i < flat.size(); ++i) binding.set(net.parameters[i], flat[i]);
}

ad::Expr input_derivative_expr(ad::Expr output, std::span<const ad::VarId> inputs, std::span<const int> multi_index) {
    if (inputs.size() != multi_index.size()) throw std::invalid_argument("input_derivative_expr: multi-index size mismatch");
    for (std::size_t d = 0; d < inputs.size(); ++d) {
        if (multi_index[d] < 0) throw std::invalid_argument("input_derivative_expr: negative order");
        output = ad::differentiate(output, inputs[d], multi_index[d]);
    }
    return output;
}

}  // namespace lossbal::nn
