#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lossbal/autodiff/graph.hpp"

namespace lossbal::nn {

enum class Activation { Sin, Tanh, Elu };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Fully connected network: `hidden_layers` activated layers of `neurons`
/// units each, followed by an affine output layer.
struct MlpConfig {
    std::size_t input_dim = 2;
    std::size_t output_dim = 1;
    std::size_t hidden_layers = 1;
    std::size_t neurons = 1;
    Activation activation = Activation::Sin;
    /// Xavier gain. Defaults to 5/3 for tanh and 1 otherwise.
    std::optional<double> gain;
    std::uint64_t seed = 0;

    double effective_gain() const;
    void validate() const;
};

struct Layer {
    Eigen::MatrixXd weights;  // fan_out x fan_in
    Eigen::VectorXd bias;
};

/// Network parameters. The flattened ordering is layer-major; within a layer
/// the weight matrix comes first in row-major order, then the bias.
struct MlpParams {
    MlpConfig config;
    std::vector<Layer> layers;

    std::size_t parameter_count() const;
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
    /// Human-readable name of flat parameter `index`, e.g. "W2[3,0]".
    std::string parameter_name(std::size_t index) const;
};

/// Standard deviation of normal Xavier initialization for one layer.
double xavier_std(std::size_t fan_out, std::size_t fan_in, double gain);

/// Weights i.i.d. N(0, xavier_std^2), biases exactly zero. Bitwise
/// reproducible from `config.seed`.
MlpParams init_mlp(const MlpConfig& config);

/// Per-dimension mean and (population) standard deviation of the training inputs.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> stddev;

    static NormStats identity(std::size_t dim);
};

/// `points` holds one point per column. Rejects a dimension with zero spread.
NormStats fit_norm_stats(const Eigen::MatrixXd& points);
std::vector<double> normalize(std::span<const double> point, const NormStats& stats);

/// Network outputs as expressions of the input variables. The parameter
/// variables follow the flat ordering of MlpParams.
struct NetworkExpr {
    std::vector<ad::Expr> outputs;
    std::vector<ad::VarId> parameters;
};

/// Builds u_theta over `inputs`. Input normalization is part of the graph, so
/// input derivatives include the 1/stddev chain-rule factor.
NetworkExpr build_output_expr(ad::Graph& graph, const MlpParams& params, const NormStats& stats,
                              std::span<const ad::VarId> inputs);

/// Binds the parameter variables of `net` to the values in `params`.
void bind_parameters(ad::Binding& binding, const NetworkExpr& net, const MlpParams& params);

/// D^beta of `output`: beta[i] derivatives with respect to inputs[i].
ad::Expr input_derivative_expr(ad::Expr output, std::span<const ad::VarId> inputs, std::span<const int> multi_index);

}  // namespace lossbal::nn
