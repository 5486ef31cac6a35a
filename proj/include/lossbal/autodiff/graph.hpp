#pragma once

// Scalar expression graphs with symbolic re-differentiation.
//
// A Graph is an append-only arena of nodes; node ids are a valid topological
// order, because every node is created after its operands. Nodes are
// hash-consed and trivially simplified on construction (constant folding,
// x*0, x*1, x+0, ...), so repeated symbolic differentiation shares
// subgraphs instead of duplicating them.
//
// The derivative of a graph is again a graph in the same arena, so
// derivatives can be nested to any order and the final scalar can be
// differentiated once more in reverse mode with respect to parameters.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lossbal::ad {

enum class Op : std::uint8_t {
    Constant,
    Input,
    Parameter,
    Add,
    Sub,
    Mul,
    Div,
    PowInt,
    Sin,
    Cos,
    Exp,
    Tanh,
    Elu,
    // elu'(z): 1 for z >= 0, exp(z) otherwise.
    EluSlope,
    // 1 for z >= 0, 0 otherwise. Its derivative is identically zero.
    Step,
    Negate,
    Square,
};

std::string_view op_name(Op op);

using NodeId = std::uint32_t;

struct VarId {
    std::uint32_t index = 0;
    friend bool operator==(VarId, VarId) = default;
    friend auto operator<=>(VarId, VarId) = default;
};

struct Node {
    Op op = Op::Constant;
    NodeId lhs = 0;
    NodeId rhs = 0;
    double constant = 0.0;   // Op::Constant
    std::int32_t exponent = 0;  // Op::PowInt
    VarId var{};             // Op::Input / Op::Parameter
};

class Graph;

/// Handle to a node of a Graph. Cheap to copy; the Graph must outlive it.
class Expr {
  public:
    Expr() = default;
    Expr(Graph* graph, NodeId id) : graph_(graph), id_(id) {}

    Graph* graph() const { return graph_; }
    NodeId id() const { return id_; }
    bool valid() const { return graph_ != nullptr; }
    const Node& node() const;

    bool is_constant() const;
    bool is_constant(double value) const;

  private:
    Graph* graph_ = nullptr;
    NodeId id_ = 0;
};

class Graph {
  public:
    Graph();
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    VarId declare_input(std::string name);
    VarId declare_parameter(std::string name);
    Expr variable(VarId var);
    NodeId variable_node(VarId var) const { return vars_.at(var.index).node; }
    Expr input(std::string name) { return variable(declare_input(std::move(name))); }
    Expr parameter(std::string name) { return variable(declare_parameter(std::move(name))); }

    Expr constant(double value);
    Expr zero() { return constant(0.0); }
    Expr one() { return constant(1.0); }

    /// Creates (or reuses) a node. Applies local simplifications.
    Expr make(Op op, Expr lhs, Expr rhs = {}, std::int32_t exponent = 0);

    const Node& node(NodeId id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }

    std::size_t variable_count() const { return vars_.size(); }
    const std::string& variable_name(VarId var) const { return vars_.at(var.index).name; }
    bool is_parameter(VarId var) const { return vars_.at(var.index).parameter; }

  private:
    struct VarInfo {
        std::string name;
        bool parameter = false;
        NodeId node = 0;
    };
    struct Key {
        Op op;
        NodeId lhs;
        NodeId rhs;
        std::int64_t payload;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    VarId declare(std::string name, bool parameter);
    NodeId intern(const Node& node, std::int64_t payload);

    std::vector<Node> nodes_;
    std::vector<VarInfo> vars_;
    std::unordered_map<Key, NodeId, KeyHash> index_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);
Expr operator+(Expr a, double b);
Expr operator+(double a, Expr b);
Expr operator-(Expr a, double b);
Expr operator-(double a, Expr b);
Expr operator*(Expr a, double b);
Expr operator*(double a, Expr b);
Expr operator/(Expr a, double b);
Expr operator/(double a, Expr b);
Expr sin(Expr a);
Expr cos(Expr a);
Expr exp(Expr a);
Expr tanh(Expr a);
Expr elu(Expr a);
Expr square(Expr a);
/// Integer power, exponent >= 0.
Expr pow(Expr a, int exponent);

/// Values for the free variables of a graph.
class Binding {
  public:
    Binding() = default;
    explicit Binding(const Graph& graph) { reserve(graph.variable_count()); }

    void reserve(std::size_t n);
    void set(VarId var, double value);
    bool contains(VarId var) const { return var.index < bound_.size() && bound_[var.index] != 0; }
    double at(VarId var) const { return values_[var.index]; }

  private:
    std::vector<double> values_;
    std::vector<std::uint8_t> bound_;
};

/// Caller-owned work buffers. One per thread lets several threads evaluate
/// the same (immutable) graph concurrently.
struct Scratch {
    std::vector<double> values;
    std::vector<double> adjoints;
    std::vector<std::uint8_t> live;
};

/// Gradient of one objective with respect to an ordered parameter list.
struct GradientVector {
    std::vector<double> values;
    std::size_t objective = 0;
};

/// Value of `expr`. Throws UnboundVariableError for a free variable without a
/// binding, NonFiniteError if any node evaluates to NaN or infinity.
double evaluate(Expr expr, const Binding& bindings, Scratch* scratch = nullptr);

/// Symbolic derivative of `expr` with respect to `var`, as a new node of the
/// same graph. Elu is differentiated with the right-hand rule at 0.
Expr differentiate(Expr expr, VarId var);

/// Repeated differentiation: d^order expr / d var^order.
Expr differentiate(Expr expr, VarId var, int order);

/// One reverse sweep: d expr / d p for each p in `parameters`.
GradientVector gradient(Expr expr, std::span<const VarId> parameters, const Binding& bindings,
                        Scratch* scratch = nullptr);

/// Number of nodes `expr` depends on (itself included).
std::size_t cone_size(Expr expr);

}  // namespace lossbal::ad
