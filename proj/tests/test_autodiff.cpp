#include "doctest.h"

#include <cmath>

#include "pinnverse/autodiff.hpp"
#include "pinnverse/network.hpp"

using namespace pinnverse;

namespace {

// 1-hidden-layer reference net used throughout: fixed weights, so every
// derivative below can be frozen against an independent numpy evaluation.
//   W1 = [0.3 -0.2; 0.1 0.4], b1 = [0.05, -0.1], W2 = [0.2 -0.5], b2 = 0.07
NetworkShape tiny_shape() {
    NetworkShape s;
    s.depth = 2;
    s.hidden_width = 2;
    return s;
}

NetworkParams tiny_params() {
    NetworkParams p;
    p.weights.resize(2);
    p.biases.resize(2);
    p.weights[0] = (Matrix(2, 2) << 0.3, -0.2, 0.1, 0.4).finished();
    p.biases[0] = (Vector(2) << 0.05, -0.1).finished();
    p.weights[1] = (Matrix(1, 2) << 0.2, -0.5).finished();
    p.biases[1] = (Vector(1) << 0.07).finished();
    return p;
}

constexpr double kX = 0.4, kT = 0.7;
// frozen oracle (numpy, double precision)
constexpr double kU = -0.032260830098750345;
constexpr double kUx = 0.012290035931118701;
constexpr double kUt = -0.2305880073984494;
constexpr double kUxx = 0.00098497180325646011;
constexpr double kFlatGrad[9] = {
    0.079928043177978345, -0.19062398580946022, 0.13987407556146209,
    -0.33359197516655537, 0.19982010794494584,  -0.47655996452365051,
    0.029991003238820164, 0.21651806149302877,  1.0,
};

} // namespace

TEST_CASE("dual arithmetic propagates first derivatives") {
    const Dual x{0.3, 1.0};
    const Dual y = x * x + Dual{2.0} * x; // y' = 2x + 2
    CHECK(y.primal == doctest::Approx(0.69).epsilon(1e-15));
    CHECK(y.tangent == doctest::Approx(2.6).epsilon(1e-15));

    const Dual t = tanh(x);
    CHECK(t.tangent == doctest::Approx(1.0 - std::tanh(0.3) * std::tanh(0.3)).epsilon(1e-15));

    const Dual e = exp(x);
    CHECK(e.tangent == doctest::Approx(std::exp(0.3)).epsilon(1e-15));

    const Dual q = Dual{1.0, 0.0} / x; // (1/x)' = -1/x^2
    CHECK(q.tangent == doctest::Approx(-1.0 / 0.09).epsilon(1e-12));
}

TEST_CASE("scalar_jet matches closed forms") {
    double u, ux, ut, uxx;

    // f = x^2 t + tanh(x)
    scalar_jet([](auto x, auto t) { return x * x * t + tanh(x); }, 0.5, 2.0, u, ux, ut, uxx);
    const double th = std::tanh(0.5), g = 1.0 - th * th;
    CHECK(u == doctest::Approx(0.5 + th).epsilon(1e-15));
    CHECK(ux == doctest::Approx(2.0 + g).epsilon(1e-15));
    CHECK(ut == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(uxx == doctest::Approx(4.0 - 2.0 * th * g).epsilon(1e-13));

    // f = x^3: u_xx = 6x even though a two-layer tanh net cannot represent it
    scalar_jet([](auto x, auto) { return x * x * x; }, 0.7, 0.0, u, ux, ut, uxx);
    CHECK(uxx == doctest::Approx(4.2).epsilon(1e-13));
}

TEST_CASE("tape scalar graph: hand-checked gradients") {
    // f(a, b) = (exp(a) * b - 2 b)^2 summed over a 1x1 "batch"
    Tape tape;
    const int a = tape.leaf(Matrix::Constant(1, 1, 0.5), {LeafTarget::Physical, 0});
    const int b = tape.leaf(Matrix::Constant(1, 1, 1.5), {LeafTarget::Physical, 1});
    const int f = tape.sq_sum(tape.sub(tape.mul(tape.expn(a), b), tape.scale(b, 2.0)));

    const double ea = std::exp(0.5);
    const double inner = ea * 1.5 - 3.0;
    CHECK(tape.scalar(f) == doctest::Approx(inner * inner).epsilon(1e-15));

    GradientVector grads;
    grads.setZero(0, 2);
    tape.reverse(f, grads);
    CHECK(grads.wrt_physical[0] == doctest::Approx(2.0 * inner * ea * 1.5).epsilon(1e-13));
    CHECK(grads.wrt_physical[1] == doctest::Approx(2.0 * inner * (ea - 2.0)).epsilon(1e-13));
}

TEST_CASE("tape jet blocks through one tanh layer") {
    // Batch of one point with jet layout [value | d/dx | d/dt | d2/dx2]:
    // input [x; t] has x-tangent [1; 0], t-tangent [0; 1], zero curvature.
    const NetworkParams p = tiny_params();
    Tape tape;
    const int w1 = tape.leaf(p.weights[0], {LeafTarget::Network, 0});
    const int b1 = tape.leaf(p.biases[0], {LeafTarget::Network, 4});
    const int w2 = tape.leaf(p.weights[1], {LeafTarget::Network, 6});
    const int b2 = tape.leaf(p.biases[1], {LeafTarget::Network, 8});

    Matrix x0 = Matrix::Zero(2, 4);
    x0(0, 0) = kX;
    x0(1, 0) = kT;
    x0(0, 1) = 1.0; // dx/dx
    x0(1, 2) = 1.0; // dt/dt
    const int in = tape.input(x0);

    const int h = tape.tanh_jet(tape.affine(w1, b1, in, 1), 1);
    const int out = tape.affine(w2, b2, h, 1);

    const Matrix& jet = tape.value(out);
    CHECK(jet(0, 0) == doctest::Approx(kU).epsilon(1e-14));
    CHECK(jet(0, 1) == doctest::Approx(kUx).epsilon(1e-14));
    CHECK(jet(0, 2) == doctest::Approx(kUt).epsilon(1e-14));
    CHECK(jet(0, 3) == doctest::Approx(kUxx).epsilon(1e-12));

    // reverse through the value block reproduces the frozen parameter grads
    Matrix seed = Matrix::Zero(1, 4);
    seed(0, 0) = 1.0;
    GradientVector grads;
    grads.setZero(9, 0);
    tape.reverse(out, seed, grads);
    for (int i = 0; i < 9; ++i)
        CHECK(grads.wrt_network[i] == doctest::Approx(kFlatGrad[i]).epsilon(1e-13));
}

TEST_CASE("record_forward agrees with evaluate") {
    const NetworkShape shape{.depth = 3, .hidden_width = 5};
    const NetworkParams net = init_network(shape, 42);
    ForwardRecord rec = record_forward(shape, net, 0.3, 0.8);
    const Vector direct = evaluate(shape, net, 0.3, 0.8);
    CHECK(rec.tape.value(rec.output)(0, 0) == doctest::Approx(direct[0]).epsilon(1e-15));
}

TEST_CASE("reverse_gradients matches central differences") {
    const NetworkShape shape{.depth = 3, .hidden_width = 4};
    NetworkParams net = init_network(shape, 7);
    const double x = 0.25, t = 0.6;

    ForwardRecord rec = record_forward(shape, net, x, t);
    const GradientVector grads = reverse_gradients(rec.tape, rec.output, Vector::Ones(1),
                                                   shape.parameter_count(), 0);

    Vector flat = net.flatten();
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        Vector bump = flat;
        bump[i] = flat[i] + h;
        net.unflatten(bump);
        const double up = evaluate(shape, net, x, t)[0];
        bump[i] = flat[i] - h;
        net.unflatten(bump);
        const double dn = evaluate(shape, net, x, t)[0];
        const double fd = (up - dn) / (2.0 * h);
        CHECK(grads.wrt_network[i] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
    net.unflatten(flat);
}

TEST_CASE("input_jet equals the frozen tiny-net oracle") {
    const Jet jet = input_jet(tiny_shape(), tiny_params(), kX, kT);
    CHECK(jet.u[0] == doctest::Approx(kU).epsilon(1e-14));
    CHECK(jet.u_x[0] == doctest::Approx(kUx).epsilon(1e-14));
    CHECK(jet.u_t[0] == doctest::Approx(kUt).epsilon(1e-14));
    CHECK(jet.u_xx[0] == doctest::Approx(kUxx).epsilon(1e-12));
}

TEST_CASE("input_jet matches finite differences on random nets") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const NetworkShape shape{.depth = 1 + static_cast<int>(seed % 3) + 1,
                                 .hidden_width = 3 + static_cast<int>(seed)};
        const NetworkParams net = init_network(shape, seed);
        SplitRng rng(seed * 31 + 1);
        const double x = rng.uniform(0.1, 0.9), t = rng.uniform(0.1, 0.9);

        const Jet jet = input_jet(shape, net, x, t);
        auto u = [&](double xx, double tt) { return evaluate(shape, net, xx, tt)[0]; };
        const double h = 1e-5;
        CHECK(jet.u[0] == doctest::Approx(u(x, t)).epsilon(1e-14));
        CHECK(jet.u_x[0] ==
              doctest::Approx((u(x + h, t) - u(x - h, t)) / (2 * h)).epsilon(1e-7).scale(1.0));
        CHECK(jet.u_t[0] ==
              doctest::Approx((u(x, t + h) - u(x, t - h)) / (2 * h)).epsilon(1e-7).scale(1.0));
        const double h2 = 1e-4;
        const double fd_xx = (u(x + h2, t) - 2 * u(x, t) + u(x - h2, t)) / (h2 * h2);
        CHECK(jet.u_xx[0] == doctest::Approx(fd_xx).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("tape jet blocks agree with input_jet on a deeper net") {
    // Two independent derivations of the same jet: the batched Taylor
    // propagation and the dual-over-reverse layer sweep.
    const NetworkShape shape{.depth = 4, .hidden_width = 6};
    const NetworkParams net = init_network(shape, 99);
    const double x = 0.35, t = 0.65;

    Tape tape;
    std::vector<int> wl, bl;
    Eigen::Index off = 0;
    for (int l = 0; l < shape.depth; ++l) {
        wl.push_back(tape.leaf(net.weights[l], {LeafTarget::Network, off}));
        off += net.weights[l].size();
        bl.push_back(tape.leaf(Matrix(net.biases[l]), {LeafTarget::Network, off}));
        off += net.biases[l].size();
    }
    Matrix x0 = Matrix::Zero(2, 4);
    x0(0, 0) = x;
    x0(1, 0) = t;
    x0(0, 1) = 1.0;
    x0(1, 2) = 1.0;
    int z = tape.input(x0);
    for (int l = 0; l < shape.depth; ++l) {
        z = tape.affine(wl[l], bl[l], z, 1);
        if (l + 1 < shape.depth) z = tape.tanh_jet(z, 1);
    }

    const Jet jet = input_jet(shape, net, x, t);
    const Matrix& v = tape.value(z);
    CHECK(v(0, 0) == doctest::Approx(jet.u[0]).epsilon(1e-13));
    CHECK(v(0, 1) == doctest::Approx(jet.u_x[0]).epsilon(1e-13));
    CHECK(v(0, 2) == doctest::Approx(jet.u_t[0]).epsilon(1e-13));
    CHECK(v(0, 3) == doctest::Approx(jet.u_xx[0]).epsilon(1e-11));
}

TEST_CASE("jet-block parameter gradients match finite differences") {
    // d(u_x)/d(params) and d(u_xx)/d(params) through the tanh jet reverse
    const NetworkShape shape{.depth = 3, .hidden_width = 3};
    NetworkParams net = init_network(shape, 11);
    const double x = 0.45, t = 0.3;

    Tape tape;
    std::vector<int> wl, bl;
    Eigen::Index off = 0;
    for (int l = 0; l < shape.depth; ++l) {
        wl.push_back(tape.leaf(net.weights[l], {LeafTarget::Network, off}));
        off += net.weights[l].size();
        bl.push_back(tape.leaf(Matrix(net.biases[l]), {LeafTarget::Network, off}));
        off += net.biases[l].size();
    }
    Matrix x0 = Matrix::Zero(2, 4);
    x0(0, 0) = x;
    x0(1, 0) = t;
    x0(0, 1) = 1.0;
    x0(1, 2) = 1.0;
    int z = tape.input(x0);
    for (int l = 0; l < shape.depth; ++l) {
        z = tape.affine(wl[l], bl[l], z, 1);
        if (l + 1 < shape.depth) z = tape.tanh_jet(z, 1);
    }

    for (const int block : {1, 3}) { // u_x, u_xx columns
        Matrix seed = Matrix::Zero(1, 4);
        seed(0, block) = 1.0;
        GradientVector grads;
        grads.setZero(shape.parameter_count(), 0);
        tape.reverse(z, seed, grads);

        const Vector flat = net.flatten();
        const double h = 1e-6;
        for (Eigen::Index i = 0; i < flat.size(); i += 3) { // stride keeps it quick
            Vector bump = flat;
            NetworkParams probe = net;
            bump[i] = flat[i] + h;
            probe.unflatten(bump);
            const Jet up = input_jet(shape, probe, x, t);
            bump[i] = flat[i] - h;
            probe.unflatten(bump);
            const Jet dn = input_jet(shape, probe, x, t);
            const double fd = block == 1 ? (up.u_x[0] - dn.u_x[0]) / (2 * h)
                                         : (up.u_xx[0] - dn.u_xx[0]) / (2 * h);
            CHECK(grads.wrt_network[i] == doctest::Approx(fd).epsilon(2e-5).scale(1.0));
        }
    }
}

TEST_CASE("replay reproduces values and reverse is repeatable") {
    const NetworkShape shape{.depth = 3, .hidden_width = 4};
    const NetworkParams net = init_network(shape, 3);
    ForwardRecord rec = record_forward(shape, net, 0.2, 0.9);
    const double before = rec.tape.value(rec.output)(0, 0);
    rec.tape.replay();
    CHECK(rec.tape.value(rec.output)(0, 0) == before);

    GradientVector g1, g2;
    g1.setZero(shape.parameter_count(), 0);
    g2.setZero(shape.parameter_count(), 0);
    rec.tape.reverse(rec.output, Matrix::Ones(1, 1), g1);
    rec.tape.reverse(rec.output, Matrix::Ones(1, 1), g2);
    CHECK((g1.wrt_network - g2.wrt_network).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("physical leaves flow through exp nodes with the chain rule") {
    // theta = exp(raw); d(theta^2)/d(raw) = 2 exp(raw)^2
    Tape tape;
    const double raw = std::log(2.5);
    const int leaf = tape.leaf(Matrix::Constant(1, 1, raw), {LeafTarget::Physical, 0});
    const int theta = tape.expn(leaf);
    const int loss = tape.sq_sum(theta);
    CHECK(tape.scalar(loss) == doctest::Approx(6.25).epsilon(1e-14));

    GradientVector grads;
    grads.setZero(0, 1);
    tape.reverse(loss, grads);
    CHECK(grads.wrt_physical[0] == doctest::Approx(2.0 * 6.25).epsilon(1e-14));
}

TEST_CASE("leaves not reachable from the seeded node get zero gradient") {
    Tape tape;
    const int a = tape.leaf(Matrix::Constant(1, 1, 1.0), {LeafTarget::Physical, 0});
    const int b = tape.leaf(Matrix::Constant(1, 1, 2.0), {LeafTarget::Physical, 1});
    const int fa = tape.sq_sum(a);
    (void)b;
    GradientVector grads;
    grads.setZero(0, 2);
    tape.reverse(fa, grads);
    CHECK(grads.wrt_physical[0] == 2.0);
    CHECK(grads.wrt_physical[1] == 0.0);
}
