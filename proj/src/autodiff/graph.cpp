#include "lossbal/autodiff/graph.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "lossbal/error.hpp"

namespace lossbal::ad {

std::string_view op_name(Op op) {
    switch (op) {
        case Op::Constant: return "constant";
        case Op::Input: return "input";
        case Op::Parameter: return "parameter";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Div: return "div";
        case Op::PowInt: return "pow";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Tanh: return "tanh";
        case Op::Elu: return "elu";
        case Op::EluSlope: return "elu_slope";
        case Op::Step: return "step";
        case Op::Negate: return "negate";
        case Op::Square: return "square";
    }
    return "?";
}

namespace {

bool is_binary(Op op) {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}

double ipow(double x, int n) {
    double result = 1.0;
    double base = x;
    for (unsigned e = static_cast<unsigned>(n); e != 0; e >>= 1) {
        if (e & 1u) result *= base;
        base *= base;
    }
    return result;
}

double apply(Op op, double a, double b, int exponent) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div: return a / b;
        case Op::PowInt: return ipow(a, exponent);
        case Op::Sin: return std::sin(a);
        case Op::Cos: return std::cos(a);
        case Op::Exp: return std::exp(a);
        case Op::Tanh: return std::tanh(a);
        case Op::Elu: return a >= 0.0 ? a : std::expm1(a);
        case Op::EluSlope: return a >= 0.0 ? 1.0 : std::exp(a);
        case Op::Step: return a >= 0.0 ? 1.0 : 0.0;
        case Op::Negate: return -a;
        case Op::Square: return a * a;
        default: break;
    }
    throw std::logic_error("apply: not an operation node");
}

// Reachability from `root`, in node-id order.
void mark_cone(const Graph& g, NodeId root, std::vector<std::uint8_t>& live) {
    live.assign(static_cast<std::size_t>(root) + 1, 0);
    live[root] = 1;
    for (NodeId i = root + 1; i-- > 0;) {
        if (!live[i]) continue;
        const Node& n = g.node(i);
        switch (n.op) {
            case Op::Constant:
            case Op::Input:
            case Op::Parameter: break;
            default:
                live[n.lhs] = 1;
                if (is_binary(n.op)) live[n.rhs] = 1;
        }
    }
}

[[noreturn]] void non_finite(Op op, NodeId id, const char* what) {
    throw NonFiniteError(std::string(op_name(op)),
                         std::string(what) + " at node " + std::to_string(id) + " (" + std::string(op_name(op)) + ")");
}

void forward(const Graph& g, NodeId root, const Binding& bindings, Scratch& s) {
    mark_cone(g, root, s.live);
    s.values.resize(static_cast<std::size_t>(root) + 1);
    for (NodeId i = 0; i <= root; ++i) {
        if (!s.live[i]) continue;
        const Node& n = g.node(i);
        double v;
        switch (n.op) {
            case Op::Constant: v = n.constant; break;
            case Op::Input:
            case Op::Parameter:
                if (!bindings.contains(n.var)) throw UnboundVariableError(g.variable_name(n.var));
                v = bindings.at(n.var);
                break;
            default: v = apply(n.op, s.values[n.lhs], is_binary(n.op) ? s.values[n.rhs] : 0.0, n.exponent);
        }
        if (!std::isfinite(v)) non_finite(n.op, i, "non-finite value");
        s.values[i] = v;
    }
}

}  // namespace

const Node& Expr::node() const { return graph_->node(id_); }

bool Expr::is_constant() const { return node().op == Op::Constant; }

bool Expr::is_constant(double value) const {
    const Node& n = node();
    return n.op == Op::Constant && n.constant == value;
}

std::size_t Graph::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.op) * 0x9E3779B97F4A7C15ull;
    h ^= (static_cast<std::uint64_t>(k.lhs) + 0x7F4A7C15ull) * 0xBF58476D1CE4E5B9ull;
    h ^= (static_cast<std::uint64_t>(k.rhs) + 0x1CE4E5B9ull) * 0x94D049BB133111EBull;
    h ^= static_cast<std::uint64_t>(k.payload) * 0xD6E8FEB86659FD93ull;
    return static_cast<std::size_t>(h ^ (h >> 29));
}

Graph::Graph() {
    nodes_.reserve(1024);
    constant(0.0);
    constant(1.0);
}

VarId Graph::declare(std::string name, bool parameter) {
    const VarId var{static_cast<std::uint32_t>(vars_.size())};
    Node n;
    n.op = parameter ? Op::Parameter : Op::Input;
    n.var = var;
    vars_.push_back({std::move(name), parameter, 0});
    vars_.back().node = intern(n, var.index);
    return var;
}

VarId Graph::declare_input(std::string name) { return declare(std::move(name), false); }
VarId Graph::declare_parameter(std::string name) { return declare(std::move(name), true); }

Expr Graph::variable(VarId var) { return {this, variable_node(var)}; }

Expr Graph::constant(double value) {
    if (value == 0.0) value = 0.0;  // fold -0.0
    Node n;
    n.op = Op::Constant;
    n.constant = value;
    return {this, intern(n, std::bit_cast<std::int64_t>(value))};
}

NodeId Graph::intern(const Node& node, std::int64_t payload) {
    const Key key{node.op, node.lhs, node.rhs, payload};
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(node);
    index_.emplace(key, id);
    return id;
}

Expr Graph::make(Op op, Expr lhs, Expr rhs, std::int32_t exponent) {
    if (lhs.graph() != this || (is_binary(op) && rhs.graph() != this))
        throw std::invalid_argument("expression operands belong to a different graph");
    if (op == Op::Constant || op == Op::Input || op == Op::Parameter)
        throw std::invalid_argument("make: leaf nodes are created through constant()/variable()");
    if (op == Op::PowInt && exponent < 0) throw std::invalid_argument("pow: exponent must be >= 0");

    const bool binary = is_binary(op);
    const bool lc = lhs.is_constant();
    const bool rc = binary && rhs.is_constant();
    if (lc && (!binary || rc)) {
        const double v = apply(op, lhs.node().constant, binary ? rhs.node().constant : 0.0, exponent);
        // Keep non-finite results as nodes so evaluation reports them.
        if (std::isfinite(v)) return constant(v);
    }

    switch (op) {
        case Op::Add:
            if (lhs.is_constant(0.0)) return rhs;
            if (rhs.is_constant(0.0)) return lhs;
            break;
        case Op::Sub:
            if (rhs.is_constant(0.0)) return lhs;
            if (lhs.is_constant(0.0)) return make(Op::Negate, rhs);
            if (lhs.id() == rhs.id()) return zero();
            break;
        case Op::Mul:
            if (lhs.is_constant(0.0) || rhs.is_constant(0.0)) return zero();
            if (lhs.is_constant(1.0)) return rhs;
            if (rhs.is_constant(1.0)) return lhs;
            if (lhs.is_constant(-1.0)) return make(Op::Negate, rhs);
            if (rhs.is_constant(-1.0)) return make(Op::Negate, lhs);
            break;
        case Op::Div:
            if (rhs.is_constant(1.0)) return lhs;
            if (lhs.is_constant(0.0) && !rc) return zero();
            break;
        case Op::Negate:
            if (lhs.node().op == Op::Negate) return {this, lhs.node().lhs};
            break;
        case Op::PowInt:
            if (exponent == 0) return one();
            if (exponent == 1) return lhs;
            if (exponent == 2) return make(Op::Square, lhs);
            break;
        case Op::Step:
        default: break;
    }

    Node n;
    n.op = op;
    n.lhs = lhs.id();
    n.rhs = binary ? rhs.id() : 0;
    n.exponent = op == Op::PowInt ? exponent : 0;
    if ((op == Op::Add || op == Op::Mul) && n.lhs > n.rhs) std::swap(n.lhs, n.rhs);
    return {this, intern(n, n.exponent)};
}

namespace {
Graph& owner(Expr a) {
    if (!a.valid()) throw std::invalid_argument("empty expression");
    return *a.graph();
}
}  // namespace

Expr operator+(Expr a, Expr b) { return owner(a).make(Op::Add, a, b); }
Expr operator-(Expr a, Expr b) { return owner(a).make(Op::Sub, a, b); }
Expr operator*(Expr a, Expr b) { return owner(a).make(Op::Mul, a, b); }
Expr operator/(Expr a, Expr b) { return owner(a).make(Op::Div, a, b); }
Expr operator-(Expr a) { return owner(a).make(Op::Negate, a); }
Expr operator+(Expr a, double b) { return a + owner(a).constant(b); }
Expr operator+(double a, Expr b) { return owner(b).constant(a) + b; }
Expr operator-(Expr a, double b) { return a - owner(a).constant(b); }
Expr operator-(double a, Expr b) { return owner(b).constant(a) - b; }
Expr operator*(Expr a, double b) { return a * owner(a).constant(b); }
Expr operator*(double a, Expr b) { return owner(b).constant(a) * b; }
Expr operator/(Expr a, double b) { return a / owner(a).constant(b); }
Expr operator/(double a, Expr b) { return owner(b).constant(a) / b; }
Expr sin(Expr a) { return owner(a).make(Op::Sin, a); }
Expr cos(Expr a) { return owner(a).make(Op::Cos, a); }
Expr exp(Expr a) { return owner(a).make(Op::Exp, a); }
Expr tanh(Expr a) { return owner(a).make(Op::Tanh, a); }
Expr elu(Expr a) { return owner(a).make(Op::Elu, a); }
Expr square(Expr a) { return owner(a).make(Op::Square, a); }
Expr pow(Expr a, int exponent) { return owner(a).make(Op::PowInt, a, {}, exponent); }

void Binding::reserve(std::size_t n) {
    if (values_.size() < n) {
        values_.resize(n, 0.0);
        bound_.resize(n, 0);
    }
}

void Binding::set(VarId var, double value) {
    reserve(static_cast<std::size_t>(var.index) + 1);
    values_[var.index] = value;
    bound_[var.index] = 1;
}

double evaluate(Expr expr, const Binding& bindings, Scratch* scratch) {
    Scratch local;
    Scratch& s = scratch ? *scratch : local;
    forward(owner(expr), expr.id(), bindings, s);
    return s.values[expr.id()];
}

Expr differentiate(Expr expr, VarId var) {
    Graph& g = owner(expr);
    const NodeId root = expr.id();
    std::vector<std::uint8_t> live;
    mark_cone(g, root, live);

    const Expr zero = g.zero();
    std::vector<Expr> d(static_cast<std::size_t>(root) + 1, zero);
    for (NodeId i = 0; i <= root; ++i) {
        if (!live[i]) continue;
        const Node n = g.node(i);  // copy: make() may grow the node array
        const Expr self{&g, i};
        const Expr a{&g, n.lhs};
        const Expr b{&g, n.rhs};
        const Expr da = d[n.lhs];
        const bool da_zero = da.is_constant(0.0);
        switch (n.op) {
            case Op::Constant: break;
            case Op::Input:
            case Op::Parameter:
                if (n.var == var) d[i] = g.one();
                break;
            case Op::Add: d[i] = da + d[n.rhs]; break;
            case Op::Sub: d[i] = da - d[n.rhs]; break;
            case Op::Mul: d[i] = da * b + a * d[n.rhs]; break;
            case Op::Div: {
                const Expr db = d[n.rhs];
                d[i] = db.is_constant(0.0) ? da / b : (da - self * db) / b;
                break;
            }
            default:
                if (da_zero) break;
                switch (n.op) {
                    case Op::PowInt:
                        d[i] = g.constant(n.exponent) * pow(a, n.exponent - 1) * da;
                        break;
                    case Op::Sin: d[i] = cos(a) * da; break;
                    case Op::Cos: d[i] = -sin(a) * da; break;
                    case Op::Exp: d[i] = self * da; break;
                    case Op::Tanh: d[i] = (1.0 - square(self)) * da; break;
                    case Op::Elu: d[i] = g.make(Op::EluSlope, a) * da; break;
                    case Op::EluSlope: d[i] = (self - g.make(Op::Step, a)) * da; break;
                    case Op::Step: break;
                    case Op::Negate: d[i] = -da; break;
                    case Op::Square: d[i] = (2.0 * a) * da; break;
                    default: throw std::logic_error("differentiate: unhandled op");
                }
        }
    }
    return d[root];
}

Expr differentiate(Expr expr, VarId var, int order) {
    if (order < 0) throw std::invalid_argument("differentiate: negative order");
    for (int k = 0; k < order; ++k) expr = differentiate(expr, var);
    return expr;
}

GradientVector gradient(Expr expr, std::span<const VarId> parameters, const Binding& bindings, Scratch* scratch) {
    Scratch local;
    Scratch& s = scratch ? *scratch : local;
    const Graph& g = owner(expr);
    const NodeId root = expr.id();
    forward(g, root, bindings, s);

    auto& adj = s.adjoints;
    adj.assign(static_cast<std::size_t>(root) + 1, 0.0);
    adj[root] = 1.0;
    const auto& v = s.values;
    for (NodeId i = root + 1; i-- > 0;) {
        if (!s.live[i]) continue;
        const double gi = adj[i];
        if (gi == 0.0) continue;
        if (!std::isfinite(gi)) non_finite(g.node(i).op, i, "non-finite adjoint");
        const Node& n = g.node(i);
        const double a = v[n.lhs];
        switch (n.op) {
            case Op::Constant:
            case Op::Input:
            case Op::Parameter: break;
            case Op::Add:
                adj[n.lhs] += gi;
                adj[n.rhs] += gi;
                break;
            case Op::Sub:
                adj[n.lhs] += gi;
                adj[n.rhs] -= gi;
                break;
            case Op::Mul:
                adj[n.lhs] += gi * v[n.rhs];
                adj[n.rhs] += gi * a;
                break;
            case Op::Div:
                adj[n.lhs] += gi / v[n.rhs];
                adj[n.rhs] -= gi * v[i] / v[n.rhs];
                break;
            case Op::PowInt: adj[n.lhs] += gi * n.exponent * ipow(a, n.exponent - 1); break;
            case Op::Sin: adj[n.lhs] += gi * std::cos(a); break;
            case Op::Cos: adj[n.lhs] -= gi * std::sin(a); break;
            case Op::Exp: adj[n.lhs] += gi * v[i]; break;
            case Op::Tanh: adj[n.lhs] += gi * (1.0 - v[i] * v[i]); break;
            case Op::Elu: adj[n.lhs] += gi * (a >= 0.0 ? 1.0 : std::exp(a)); break;
            case Op::EluSlope: adj[n.lhs] += gi * (a >= 0.0 ? 0.0 : std::exp(a)); break;
            case Op::Step: break;
            case Op::Negate: adj[n.lhs] -= gi; break;
            case Op::Square: adj[n.lhs] += 2.0 * gi * a; break;
        }
    }

    GradientVector out;
    out.values.assign(parameters.size(), 0.0);
    for (std::size_t k = 0; k < parameters.size(); ++k) {
        const NodeId node = g.variable_node(parameters[k]);
        if (node <= root && s.live[node]) out.values[k] = adj[node];
    }
    return out;
}

std::size_t cone_size(Expr expr) {
    std::vector<std::uint8_t> live;
    mark_cone(owner(expr), expr.id(), live);
    std::size_t n = 0;
    for (auto x : live) n += x;
    return n;
}

}  // namespace lossbal::ad
