#include "pinnverse/autodiff.hpp"

#include <array>
#include <cmath>
#include <string>

#include "pinnverse/network.hpp"

namespace pinnverse {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw contract_violation(what);
}

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace

int Tape::push(Node n) {
    if (n.op != Op::Leaf && n.op != Op::Input) compute(n);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::leaf(const Matrix& v, LeafSlot slot) {
    Node n;
    n.op = Op::Leaf;
    n.value = v;
    n.slot = slot;
    return push(std::move(n));
}

int Tape::input(const Matrix& v) {
    Node n;
    n.op = Op::Input;
    n.value = v;
    return push(std::move(n));
}

int Tape::affine(int w, int b, int z, int bias_cols) {
    Node n;
    n.op = Op::Affine;
    n.a = w;
    n.b = b;
    n.c = z;
    n.bias_cols = bias_cols;
    const Matrix& W = value(w);
    const Matrix& B = value(b);
    const Matrix& Z = value(z);
    require(W.cols() == Z.rows(), "affine: W is " + dims(W) + " but Z is " + dims(Z));
    require(B.rows() == W.rows() && B.cols() == 1,
            "affine: bias must be " + std::to_string(W.rows()) + "x1, got " + dims(B));
    require(bias_cols >= 0 && bias_cols <= Z.cols(), "affine: bias_cols out of range");
    return push(std::move(n));
}

int Tape::tanh_jet(int a, int value_cols) {
    Node n;
    n.op = Op::TanhJet;
    n.a = a;
    n.value_cols = value_cols;
    const auto cols = value(a).cols();
    require(cols == value_cols || cols == 4 * value_cols,
            "tanh_jet: expected " + std::to_string(value_cols) + " or " +
                std::to_string(4 * value_cols) + " columns, got " + std::to_string(cols));
    return push(std::move(n));
}

int Tape::slice(int x, int r0, int nr, int c0, int nc) {
    Node n;
    n.op = Op::Slice;
    n.a = x;
    n.r0 = r0;
    n.nr = nr;
    n.c0 = c0;
    n.nc = nc;
    const Matrix& X = value(x);
    require(r0 >= 0 && nr >= 0 && c0 >= 0 && nc >= 0 && r0 + nr <= X.rows() &&
                c0 + nc <= X.cols(),
            "slice: block exceeds " + dims(X));
    return push(std::move(n));
}

int Tape::add(int x, int y) {
    require(value(x).rows() == value(y).rows() && value(x).cols() == value(y).cols(),
            "add: " + dims(value(x)) + " vs " + dims(value(y)));
    Node n;
    n.op = Op::Add;
    n.a = x;
    n.b = y;
    return push(std::move(n));
}

int Tape::sub(int x, int y) {
    require(value(x).rows() == value(y).rows() && value(x).cols() == value(y).cols(),
            "sub: " + dims(value(x)) + " vs " + dims(value(y)));
    Node n;
    n.op = Op::Sub;
    n.a = x;
    n.b = y;
    return push(std::move(n));
}

int Tape::mul(int x, int y) {
    require(value(x).rows() == value(y).rows() && value(x).cols() == value(y).cols(),
            "mul: " + dims(value(x)) + " vs " + dims(value(y)));
    Node n;
    n.op = Op::Mul;
    n.a = x;
    n.b = y;
    return push(std::move(n));
}

int Tape::scale(int x, double c) {
    Node n;
    n.op = Op::Scale;
    n.a = x;
    n.scale = c;
    return push(std::move(n));
}

int Tape::scalar_mul(int s, int x) {
    require(value(s).rows() == 1 && value(s).cols() == 1,
            "scalar_mul: scalar operand is " + dims(value(s)));
    Node n;
    n.op = Op::ScalarMul;
    n.a = s;
    n.b = x;
    return push(std::move(n));
}

int Tape::expn(int x) {
    Node n;
    n.op = Op::Exp;
    n.a = x;
    return push(std::move(n));
}

int Tape::sq_sum(int x) {
    Node n;
    n.op = Op::SqSum;
    n.a = x;
    return push(std::move(n));
}

void Tape::compute(Node& n) {
    switch (n.op) {
    case Op::Leaf:
    case Op::Input:
        break;
    case Op::Affine: {
        const Matrix& W = nodes_[static_cast<size_t>(n.a)].value;
        const Matrix& B = nodes_[static_cast<size_t>(n.b)].value;
        const Matrix& Z = nodes_[static_cast<size_t>(n.c)].value;
        n.value.noalias() = W * Z;
        if (n.bias_cols > 0) n.value.leftCols(n.bias_cols).colwise() += B.col(0);
        break;
    }
    case Op::TanhJet: {
        const Matrix& Z = nodes_[static_cast<size_t>(n.a)].value;
        const auto N = n.value_cols;
        n.value.resize(Z.rows(), Z.cols());
        auto T = n.value.leftCols(N).array();
        T = Z.leftCols(N).array().tanh();
        if (Z.cols() == N) break;
        const auto G = (1.0 - T.square()).eval(); // tanh'
        const auto P = Z.middleCols(N, N).array();
        const auto Q = Z.middleCols(2 * N, N).array();
        const auto S = Z.rightCols(N).array();
        n.value.middleCols(N, N).array() = G * P;
        n.value.middleCols(2 * N, N).array() = G * Q;
        // chain rule for the second x-derivative: tanh'' = -2 tanh tanh'
        n.value.rightCols(N).array() = G * S - 2.0 * T * G * P.square();
        break;
    }
    case Op::Slice:
        n.value = nodes_[static_cast<size_t>(n.a)].value.block(n.r0, n.c0, n.nr, n.nc);
        break;
    case Op::Add:
        n.value = nodes_[static_cast<size_t>(n.a)].value + nodes_[static_cast<size_t>(n.b)].value;
        break;
    case Op::Sub:
        n.value = nodes_[static_cast<size_t>(n.a)].value - nodes_[static_cast<size_t>(n.b)].value;
        break;
    case Op::Mul:
        n.value = nodes_[static_cast<size_t>(n.a)].value.cwiseProduct(
            nodes_[static_cast<size_t>(n.b)].value);
        break;
    case Op::Scale:
        n.value = n.scale * nodes_[static_cast<size_t>(n.a)].value;
        break;
    case Op::ScalarMul:
        n.value = nodes_[static_cast<size_t>(n.a)].value(0, 0) *
                  nodes_[static_cast<size_t>(n.b)].value;
        break;
    case Op::Exp:
        n.value = nodes_[static_cast<size_t>(n.a)].value.array().exp();
        break;
    case Op::SqSum:
        n.value.resize(1, 1);
        n.value(0, 0) = nodes_[static_cast<size_t>(n.a)].value.squaredNorm();
        break;
    }
}

void Tape::set_input(int node, const Matrix& v) {
    Node& n = nodes_[static_cast<size_t>(node)];
    require(n.op == Op::Input, "set_input: node is not an input");
    require(n.value.rows() == v.rows() && n.value.cols() == v.cols(),
            "set_input: shape changed from " + dims(n.value) + " to " + dims(v));
    n.value = v;
}

void Tape::set_input_scalar(int node, double v) {
    Node& n = nodes_[static_cast<size_t>(node)];
    require(n.op == Op::Input && n.value.size() == 1, "set_input_scalar: node is not a 1x1 input");
    n.value(0, 0) = v;
}

void Tape::set_leaf(int node, const Matrix& v) {
    Node& n = nodes_[static_cast<size_t>(node)];
    require(n.op == Op::Leaf, "set_leaf: node is not a leaf");
    require(n.value.rows() == v.rows() && n.value.cols() == v.cols(),
            "set_leaf: shape changed from " + dims(n.value) + " to " + dims(v));
    n.value = v;
}

Matrix& Tape::leaf_value(int node) {
    Node& n = nodes_[static_cast<size_t>(node)];
    require(n.op == Op::Leaf, "leaf_value: node is not a leaf");
    return n.value;
}

void Tape::replay() {
    for (Node& n : nodes_)
        if (n.op != Op::Leaf && n.op != Op::Input) compute(n);
}

Matrix& Tape::adj(int i) {
    auto& a = adjoints_[static_cast<size_t>(i)];
    if (stamp_[static_cast<size_t>(i)] != pass_) {
        const Matrix& v = nodes_[static_cast<size_t>(i)].value;
        a.setZero(v.rows(), v.cols());
        stamp_[static_cast<size_t>(i)] = pass_;
    }
    return a;
}

void Tape::reverse(int node, const Matrix& seed, GradientVector& grads) {
    require(node >= 0 && node < size(), "reverse: node index out of range");
    const Matrix& out = nodes_[static_cast<size_t>(node)].value;
    require(seed.rows() == out.rows() && seed.cols() == out.cols(),
            "reverse: seed is " + dims(seed) + " but node is " + dims(out));

    adjoints_.resize(nodes_.size());
    stamp_.resize(nodes_.size(), 0);
    ++pass_;
    if (pass_ == 0) { // wrapped: invalidate everything the slow way
        std::fill(stamp_.begin(), stamp_.end(), 0u);
        pass_ = 1;
    }
    adj(node) = seed;

    for (int i = node; i >= 0; --i) {
        if (stamp_[static_cast<size_t>(i)] != pass_) continue; // off the active subgraph
        const Node& n = nodes_[static_cast<size_t>(i)];
        const Matrix& o = adjoints_[static_cast<size_t>(i)];
        switch (n.op) {
        case Op::Input:
            break;
        case Op::Leaf: {
            if (n.slot.target == LeafTarget::Network) {
                grads.wrt_network.segment(n.slot.offset, o.size()) +=
                    Eigen::Map<const Vector>(o.data(), o.size());
            } else {
                grads.wrt_physical.segment(n.slot.offset, o.size()) +=
                    Eigen::Map<const Vector>(o.data(), o.size());
            }
            break;
        }
        case Op::Affine: {
            const Matrix& W = nodes_[static_cast<size_t>(n.a)].value;
            const Matrix& Z = nodes_[static_cast<size_t>(n.c)].value;
            adj(n.a).noalias() += o * Z.transpose();
            if (n.bias_cols > 0)
                adj(n.b).col(0) += o.leftCols(n.bias_cols).rowwise().sum();
            adj(n.c).noalias() += W.transpose() * o;
            break;
        }
        case Op::TanhJet: {
            const auto N = n.value_cols;
            Matrix& za = adj(n.a);
            const auto T = n.value.leftCols(N).array();
            const auto G = (1.0 - T.square()).eval();
            if (n.value.cols() == N) {
                za.array() += G * o.array();
                break;
            }
            const Matrix& Z = nodes_[static_cast<size_t>(n.a)].value;
            const auto P = Z.middleCols(N, N).array();
            const auto Q = Z.middleCols(2 * N, N).array();
            const auto S = Z.rightCols(N).array();
            const auto tv = o.leftCols(N).array();
            const auto tp = o.middleCols(N, N).array();
            const auto tq = o.middleCols(2 * N, N).array();
            const auto ts = o.rightCols(N).array();
            const auto T2 = (-2.0 * T * G).eval();         // tanh''
            const auto T3 = (-2.0 * G * (1.0 - 3.0 * T.square())).eval(); // tanh'''
            za.leftCols(N).array() +=
                G * tv + T2 * P * tp + T2 * Q * tq + (T2 * S + T3 * P.square()) * ts;
            za.middleCols(N, N).array() += G * tp + 2.0 * T2 * P * ts;
            za.middleCols(2 * N, N).array() += G * tq;
            za.rightCols(N).array() += G * ts;
            break;
        }
        case Op::Slice:
            adj(n.a).block(n.r0, n.c0, n.nr, n.nc) += o;
            break;
        case Op::Add:
            adj(n.a) += o;
            adj(n.b) += o;
            break;
        case Op::Sub:
            adj(n.a) += o;
            adj(n.b) -= o;
            break;
        case Op::Mul:
            adj(n.a).array() += o.array() * nodes_[static_cast<size_t>(n.b)].value.array();
            adj(n.b).array() += o.array() * nodes_[static_cast<size_t>(n.a)].value.array();
            break;
        case Op::Scale:
            adj(n.a) += n.scale * o;
            break;
        case Op::ScalarMul: {
            const double s = nodes_[static_cast<size_t>(n.a)].value(0, 0);
            adj(n.a)(0, 0) += o.cwiseProduct(nodes_[static_cast<size_t>(n.b)].value).sum();
            adj(n.b) += s * o;
            break;
        }
        case Op::Exp:
            adj(n.a).array() += o.array() * n.value.array();
            break;
        case Op::SqSum:
            adj(n.a) += 2.0 * o(0, 0) * nodes_[static_cast<size_t>(n.a)].value;
            break;
        }
    }
}

void Tape::reverse(int node, GradientVector& grads) {
    Matrix one(1, 1);
    one(0, 0) = 1.0;
    reverse(node, one, grads);
}

// ---------------------------------------------------------------------------

ForwardRecord record_forward(const NetworkShape& shape, const NetworkParams& net,
                             double x, double t) {
    shape.validate();
    if (!net.matches(shape))
        throw contract_violation("record_forward: parameters do not match the shape");

    ForwardRecord rec;
    Matrix z0(2, 1);
    z0 << x, t;
    rec.input = rec.tape.input(z0);

    int z = rec.input;
    Eigen::Index offset = 0;
    for (int l = 1; l <= shape.depth; ++l) {
        const Matrix& W = net.weights[static_cast<size_t>(l - 1)];
        const Vector& b = net.biases[static_cast<size_t>(l - 1)];
        const int w_node = rec.tape.leaf(W, {LeafTarget::Network, offset});
        offset += W.size();
        const int b_node = rec.tape.leaf(b, {LeafTarget::Network, offset});
        offset += b.size();
        rec.weight_leaf.push_back(w_node);
        rec.bias_leaf.push_back(b_node);
        z = rec.tape.affine(w_node, b_node, z, 1);
        if (l < shape.depth) z = rec.tape.tanh_jet(z, 1);
    }
    rec.output = z;
    return rec;
}

GradientVector reverse_gradients(Tape& tape, int output_node, const Vector& output_seed,
                                 Eigen::Index n_network, Eigen::Index n_physical) {
    GradientVector grads;
    grads.setZero(n_network, n_physical);
    Matrix seed = output_seed;
    tape.reverse(output_node, seed, grads);
    return grads;
}

// ---------------------------------------------------------------------------
// input_jet: hand-rolled forward + reverse over the layer stack in scalar
// arithmetic, then the same pass again in Dual arithmetic seeded in x so the
// x-derivative of (du/dx) -- the second derivative -- falls out. Network
// widths are tiny here (one point), so plain loops beat matrix dispatch.
// ---------------------------------------------------------------------------

namespace {

template <class S>
struct LayerEval {
    std::vector<std::vector<S>> z; // activations per layer, z[0] = input
};

template <class S>
LayerEval<S> forward_layers(const NetworkShape& shape, const NetworkParams& net, S x, S t) {
    LayerEval<S> ev;
    ev.z.resize(static_cast<size_t>(shape.depth) + 1);
    ev.z[0] = {x, t};
    for (int l = 1; l <= shape.depth; ++l) {
        const Matrix& W = net.weights[static_cast<size_t>(l - 1)];
        const Vector& b = net.biases[static_cast<size_t>(l - 1)];
        const auto& zin = ev.z[static_cast<size_t>(l - 1)];
        std::vector<S> zout(static_cast<size_t>(W.rows()));
        for (Eigen::Index i = 0; i < W.rows(); ++i) {
            S acc = b[i];
            for (Eigen::Index j = 0; j < W.cols(); ++j)
                acc += S(W(i, j)) * zin[static_cast<size_t>(j)];
            zout[static_cast<size_t>(i)] = l < shape.depth ? tanh(acc) : acc;
        }
        ev.z[static_cast<size_t>(l)] = std::move(zout);
    }
    return ev;
}

// d(output channel j)/d(input) for one recorded forward pass.
template <class S>
std::array<S, 2> backward_layers(const NetworkShape& shape, const NetworkParams& net,
                                 const LayerEval<S>& ev, int channel) {
    std::vector<S> bar(static_cast<size_t>(shape.out_dim), S(0.0));
    bar[static_cast<size_t>(channel)] = S(1.0);
    for (int l = shape.depth; l >= 1; --l) {
        const Matrix& W = net.weights[static_cast<size_t>(l - 1)];
        if (l < shape.depth) { // activation was tanh; tanh' = 1 - tanh^2
            const auto& zl = ev.z[static_cast<size_t>(l)];
            for (size_t i = 0; i < bar.size(); ++i)
                bar[i] = bar[i] * (S(1.0) - zl[i] * zl[i]);
        }
        std::vector<S> prev(static_cast<size_t>(W.cols()), S(0.0));
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j)
                prev[static_cast<size_t>(j)] += S(W(i, j)) * bar[static_cast<size_t>(i)];
        bar = std::move(prev);
    }
    return {bar[0], bar[1]};
}

} // namespace

Jet input_jet(const NetworkShape& shape, const NetworkParams& net, double x, double t) {
    shape.validate();
    if (!net.matches(shape))
        throw contract_violation("input_jet: parameters do not match the shape");

    const auto ev = forward_layers<double>(shape, net, x, t);
    const auto ev_x = forward_layers<Dual>(shape, net, Dual{x, 1.0}, Dual{t, 0.0});

    Jet jet;
    jet.u.resize(shape.out_dim);
    jet.u_x.resize(shape.out_dim);
    jet.u_t.resize(shape.out_dim);
    jet.u_xx.resize(shape.out_dim);
    for (int c = 0; c < shape.out_dim; ++c) {
        jet.u[c] = ev.z.back()[static_cast<size_t>(c)];
        const auto first = backward_layers<double>(shape, net, ev, c);
        jet.u_x[c] = first[0];
        jet.u_t[c] = first[1];
        const auto dual = backward_layers<Dual>(shape, net, ev_x, c);
        jet.u_xx[c] = dual[0].tangent; // d/dx of du/dx
        if (!std::isfinite(jet.u[c]) || !std::isfinite(jet.u_x[c]) ||
            !std::isfinite(jet.u_t[c]) || !std::isfinite(jet.u_xx[c]))
            throw numeric_fault("input_jet: non-finite derivative at x=" + std::to_string(x) +
                                ", t=" + std::to_string(t));
    }
    return jet;
}

} // namespace pinnverse
