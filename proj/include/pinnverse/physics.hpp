#ifndef PINNVERSE_PHYSICS_HPP
#define PINNVERSE_PHYSICS_HPP

#include <string>
#include <vector>

#include "pinnverse/autodiff.hpp"
#include "pinnverse/common.hpp"

namespace pinnverse {

enum class ModelKind { Heat, Adr, MobileImmobile };

struct Reaction {
    enum class Kind { None, Linear } kind = Kind::None;
    double sigma0 = 0.0; // sigma(u) = sigma0 * u when Linear

    double operator()(double u) const {
        return kind == Kind::Linear ? sigma0 * u : 0.0;
    }
};

// Left boundary condition. The pulse H(duration - t) is smoothed to
// (1 - tanh((t - duration)/eps))/2 for both the reference solver and the
// training loss, so data and physics see the same profile. Ramp is a
// smooth 0 -> 1 source compatible with the zero initial condition, used by
// convergence studies.
struct LeftBc {
    enum class Kind { Dirichlet, Pulse, Ramp } kind = Kind::Dirichlet;
    double value = 1.0;     // Dirichlet level
    double duration = 0.01; // Pulse
    double eps = 0.002;     // Pulse smoothing width
    double t0 = 0.2;        // Ramp center
    double width = 0.05;    // Ramp width

    double g(double t) const {
        switch (kind) {
        case Kind::Dirichlet: return value;
        case Kind::Pulse: return 0.5 * (1.0 - std::tanh((t - duration) / eps));
        case Kind::Ramp: return 0.5 * (1.0 + std::tanh((t - t0) / width));
        }
        return 0.0;
    }
};

// Transport model on [0,1] x [0,T] with right Neumann(0) and zero initial
// data. beta multiplies u_t for ADR; beta0/beta1 are the mobile/immobile
// porosities.
struct ModelSpec {
    ModelKind kind = ModelKind::Heat;
    double beta = 1.0;
    double beta0 = 0.3;
    double beta1 = 0.1;
    Reaction reaction;
    LeftBc left;
    double horizon = 1.0;

    int channels() const { return kind == ModelKind::MobileImmobile ? 2 : 1; }
    std::vector<std::string> parameter_names() const;
    void validate() const;
};

// Stable names used by config files, CSV headers, and cache keys.
const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
const char* to_string(LeftBc::Kind kind);
LeftBc::Kind left_bc_kind_from_string(const std::string& name);

// One output channel's derivative jet at a point.
struct JetChannel {
    double u = 0.0, u_x = 0.0, u_t = 0.0, u_xx = 0.0;
};

// u_t - D u_xx
double residual_heat(const JetChannel& jet, double D);

// beta u_t + V u_x - D u_xx - sigma(u). Constant V and D, so the divergence
// form of the flux is expanded.
double residual_adr(const JetChannel& jet, double V, double D, double beta,
                    const Reaction& reaction);

// Mobile-immobile pair. jet_v only needs v and v_t.
//   r_u = beta0 u_t + V u_x - D u_xx - lambda (v - u)
//   r_v = beta1 v_t + lambda (v - u)
std::pair<double, double> residual_mi(const JetChannel& jet_u, const JetChannel& jet_v,
                                      double V, double D, double lambda,
                                      double beta0, double beta1);

enum class BoundarySide { Left, Right };

// Boundary mismatch at a tagged point: Dirichlet left -> u - g(t); Neumann
// right -> u_x. Only the mobile channel carries boundary conditions, so the
// result always has one entry for these models.
// Throws contract_violation if the point is not on the boundary.
Vector boundary_mismatch(double x, double t, const std::vector<JetChannel>& jets,
                         const ModelSpec& spec);

} // namespace pinnverse

#endif
