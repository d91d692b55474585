#ifndef PINNVERSE_AUTODIFF_HPP
#define PINNVERSE_AUTODIFF_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "pinnverse/common.hpp"

namespace pinnverse {

struct NetworkShape;
struct NetworkParams;

// ---------------------------------------------------------------------------
// Dual numbers: forward-mode scalars carrying one directional derivative.
// Running a reverse pass in Dual arithmetic ("forward over reverse") turns
// first-derivative code into second-derivative code.
// ---------------------------------------------------------------------------
struct Dual {
    double primal = 0.0;
    double tangent = 0.0;

    Dual() = default;
    Dual(double p) : primal(p) {}
    Dual(double p, double t) : primal(p), tangent(t) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.primal + b.primal, a.tangent + b.tangent}; }
inline Dual operator-(Dual a, Dual b) { return {a.primal - b.primal, a.tangent - b.tangent}; }
inline Dual operator-(Dual a) { return {-a.primal, -a.tangent}; }
inline Dual operator*(Dual a, Dual b) {
    return {a.primal * b.primal, a.tangent * b.primal + a.primal * b.tangent};
}
inline Dual operator/(Dual a, Dual b) {
    const double inv = 1.0 / b.primal;
    const double q = a.primal * inv;
    return {q, (a.tangent - q * b.tangent) * inv};
}
inline Dual& operator+=(Dual& a, Dual b) { a = a + b; return a; }
inline Dual& operator-=(Dual& a, Dual b) { a = a - b; return a; }
inline Dual& operator*=(Dual& a, Dual b) { a = a * b; return a; }

inline Dual tanh(Dual a) {
    const double t = std::tanh(a.primal);
    return {t, (1.0 - t * t) * a.tangent};
}
inline Dual exp(Dual a) {
    const double e = std::exp(a.primal);
    return {e, e * a.tangent};
}
using std::exp;
using std::tanh;

// ---------------------------------------------------------------------------
// Gradient container mirroring the flat layouts of NetworkParams (layer-major,
// W before b, column-major within each matrix) and PhysicalParams (raw
// log-space entries in declaration order).
// ---------------------------------------------------------------------------
struct GradientVector {
    Vector wrt_network;
    Vector wrt_physical;

    void setZero(Eigen::Index n_network, Eigen::Index n_physical) {
        wrt_network = Vector::Zero(n_network);
        wrt_physical = Vector::Zero(n_physical);
    }
};

// Where a leaf's adjoint lands inside a GradientVector.
enum class LeafTarget : std::uint8_t { Network, Physical };

struct LeafSlot {
    LeafTarget target = LeafTarget::Network;
    Eigen::Index offset = 0; // start index in the flat vector
};

// ---------------------------------------------------------------------------
// Tape: a record-by-run computation graph whose node values are dense
// matrices. A "batch" node holds the states of many collocation points as
// columns, so one reverse sweep yields every parameter gradient of an
// epoch's loss. Scalars are 1x1 matrices.
//
// Jet layout convention: a node of width 4N carries, in column blocks of N,
//   [ value | d/dx tangent | d/dt tangent | d2/dx2 tangent ]
// propagated exactly (truncated Taylor arithmetic), so the recorded forward
// pass computes u, u_x, u_t, u_xx for every point at once and the reverse
// pass differentiates all of them with respect to the leaves.
// ---------------------------------------------------------------------------
class Tape {
public:
    enum class Op : std::uint8_t {
        Leaf,      // trainable parameter
        Input,     // non-trainable data (point coordinates, references, weights)
        Affine,    // W*Z, plus bias broadcast onto the leading bias_cols columns
        TanhJet,   // tanh activation propagated through the jet blocks
        Slice,     // block view (rows r0:r0+nr, cols c0:c0+nc)
        Add,       // X + Y
        Sub,       // X - Y
        Mul,       // X .* Y
        Scale,     // c * X
        ScalarMul, // s * X with s a 1x1 node
        Exp,       // elementwise exp
        SqSum      // sum of squares -> 1x1
    };

    struct Node {
        Op op;
        int a = -1, b = -1, c = -1; // parent indices
        Matrix value;
        // op payloads
        double scale = 0.0;
        int bias_cols = 0;              // Affine
        int value_cols = 0;             // TanhJet: width of one jet block
        int r0 = 0, nr = 0, c0 = 0, nc = 0; // Slice
        LeafSlot slot;                  // Leaf
    };

    int leaf(const Matrix& v, LeafSlot slot);
    int input(const Matrix& v);
    int affine(int w, int b, int z, int bias_cols);
    int tanh_jet(int a, int value_cols);
    int slice(int x, int r0, int nr, int c0, int nc);
    int add(int x, int y);
    int sub(int x, int y);
    int mul(int x, int y);
    int scale(int x, double c);
    int scalar_mul(int s, int x);
    int expn(int x);
    int sq_sum(int x);

    const Matrix& value(int node) const { return nodes_[static_cast<size_t>(node)].value; }
    double scalar(int node) const { return nodes_[static_cast<size_t>(node)].value(0, 0); }
    int size() const { return static_cast<int>(nodes_.size()); }

    // Inputs and leaves may be updated in place between replays.
    void set_input(int node, const Matrix& v);
    void set_input_scalar(int node, double v);
    void set_leaf(int node, const Matrix& v);
    Matrix& leaf_value(int node);

    // Re-executes every computed node in recording order. With unchanged
    // inputs this reproduces the recorded values bit for bit.
    void replay();

    // Accumulates d(seeded node)/d(leaf) into `grads`. `seed` must match the
    // seeded node's dimensions. Leaves that do not influence the seeded node
    // receive exactly zero.
    void reverse(int node, const Matrix& seed, GradientVector& grads);

    // Convenience overload: seed a 1x1 node with 1.
    void reverse(int node, GradientVector& grads);

private:
    int push(Node n);
    void compute(Node& n);
    // adjoint access with lazy zeroing (stamp trick)
    Matrix& adj(int i);

    std::vector<Node> nodes_;
    std::vector<Matrix> adjoints_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t pass_ = 0;
};

// ---------------------------------------------------------------------------
// Derivative jet of a network output with respect to its inputs at a point.
// One entry per output channel.
// ---------------------------------------------------------------------------
struct Jet {
    Vector u;    // value
    Vector u_x;  // du/dx
    Vector u_t;  // du/dt
    Vector u_xx; // d2u/dx2
};

// Records the full forward pass of `net` at (x,t) on a fresh tape and
// returns the tape together with the indices needed to seed a reverse pass.
struct ForwardRecord {
    Tape tape;
    int output = -1;              // out_dim x 1 node
    std::vector<int> weight_leaf; // per layer
    std::vector<int> bias_leaf;   // per layer
    int input = -1;
};

ForwardRecord record_forward(const NetworkShape& shape, const NetworkParams& net,
                             double x, double t);

// Reverse sweep over a recorded forward: d(seed . output)/d(every leaf).
GradientVector reverse_gradients(Tape& tape, int output_node, const Vector& output_seed,
                                 Eigen::Index n_network, Eigen::Index n_physical);

// Exact input-derivative jet at one point. First derivatives come from a
// reverse pass over the layer stack; the second x-derivative from running
// that reverse pass in Dual arithmetic seeded in x.
Jet input_jet(const NetworkShape& shape, const NetworkParams& net, double x, double t);

// Dual numbers over Dual numbers, for second directional derivatives of
// closed-form callables.
struct DualOfDual {
    Dual primal, tangent;
    DualOfDual() = default;
    DualOfDual(double p) : primal(p), tangent(0.0) {}
    DualOfDual(Dual p, Dual t) : primal(p), tangent(t) {}
};
inline DualOfDual operator+(DualOfDual a, DualOfDual b) { return {a.primal + b.primal, a.tangent + b.tangent}; }
inline DualOfDual operator-(DualOfDual a, DualOfDual b) { return {a.primal - b.primal, a.tangent - b.tangent}; }
inline DualOfDual operator*(DualOfDual a, DualOfDual b) {
    return {a.primal * b.primal, a.tangent * b.primal + a.primal * b.tangent};
}
inline DualOfDual tanh(DualOfDual a) {
    Dual t = tanh(a.primal);
    Dual one{1.0, 0.0};
    return {t, (one - t * t) * a.tangent};
}

// Generic jet of a twice-differentiable scalar callable f(x,t), same
// mechanism as input_jet. Used to validate the machinery on closed forms.
template <class F>
void scalar_jet(F&& f, double x, double t, double& u, double& u_x, double& u_t, double& u_xx) {
    Dual fx = f(Dual{x, 1.0}, Dual{t, 0.0});
    u = fx.primal;
    u_x = fx.tangent;
    Dual ft = f(Dual{x, 0.0}, Dual{t, 1.0});
    u_t = ft.tangent;
    // d/dx of (df/dx): outer tangent seeded in x on both levels
    DualOfDual fdd = f(DualOfDual{{x, 1.0}, {1.0, 0.0}}, DualOfDual{{t, 0.0}, {0.0, 0.0}});
    u_xx = fdd.tangent.tangent;
}

} // namespace pinnverse

#endif
