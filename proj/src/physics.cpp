#include "pinnverse/physics.hpp"

#include <cmath>

namespace pinnverse {

std::vector<std::string> ModelSpec::parameter_names() const {
    switch (kind) {
    case ModelKind::Heat: return {"D"};
    case ModelKind::Adr: return {"V", "D"};
    case ModelKind::MobileImmobile: return {"V", "D", "lambda"};
    }
    return {};
}

void ModelSpec::validate() const {
    if (!(horizon > 0.0)) throw config_error("time horizon must be positive");
    if (kind == ModelKind::Adr && !(beta > 0.0))
        throw config_error("capacity factor beta must be positive");
    if (kind == ModelKind::MobileImmobile) {
        if (!(beta0 > 0.0)) throw config_error("mobile porosity beta0 must be positive");
        if (!(beta1 > 0.0)) throw config_error("immobile porosity beta1 must be positive");
    }
    if (left.kind == LeftBc::Kind::Pulse) {
        if (!(left.eps > 0.0)) throw config_error("pulse smoothing width must be positive");
        if (!(left.duration > 0.0)) throw config_error("pulse duration must be positive");
    }
    if (left.kind == LeftBc::Kind::Ramp && !(left.width > 0.0))
        throw config_error("ramp width must be positive");
}

double residual_heat(const JetChannel& jet, double D) {
    return jet.u_t - D * jet.u_xx;
}

double residual_adr(const JetChannel& jet, double V, double D, double beta,
                    const Reaction& reaction) {
    return beta * jet.u_t + V * jet.u_x - D * jet.u_xx - reaction(jet.u);
}

std::pair<double, double> residual_mi(const JetChannel& jet_u, const JetChannel& jet_v,
                                      double V, double D, double lambda,
                                      double beta0, double beta1) {
    const double exchange = lambda * (jet_v.u - jet_u.u);
    const double r_u = beta0 * jet_u.u_t + V * jet_u.u_x - D * jet_u.u_xx - exchange;
    const double r_v = beta1 * jet_v.u_t + exchange;
    return {r_u, r_v};
}

Vector boundary_mismatch(double x, double t, const std::vector<JetChannel>& jets,
                         const ModelSpec& spec) {
    if (jets.size() != static_cast<size_t>(spec.channels()))
        throw contract_violation("boundary_mismatch: expected " +
                                 std::to_string(spec.channels()) + " channel jets, got " +
                                 std::to_string(jets.size()));
    Vector mismatch(1);
    if (x == 0.0) {
        mismatch[0] = jets[0].u - spec.left.g(t);
    } else if (x == 1.0) {
        mismatch[0] = jets[0].u_x; // homogeneous Neumann outflow
    } else {
        throw contract_violation("boundary_mismatch: x=" + std::to_string(x) +
                                 " is not a boundary point");
    }
    return mismatch;
}

const char* to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::Heat: return "heat";
    case ModelKind::Adr: return "adr";
    case ModelKind::MobileImmobile: return "mobile-immobile";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "heat") return ModelKind::Heat;
    if (name == "adr") return ModelKind::Adr;
    if (name == "mobile-immobile") return ModelKind::MobileImmobile;
    throw config_error("unknown model kind '" + name + "'");
}

const char* to_string(LeftBc::Kind kind) {
    switch (kind) {
    case LeftBc::Kind::Dirichlet: return "dirichlet";
    case LeftBc::Kind::Pulse: return "pulse";
    case LeftBc::Kind::Ramp: return "ramp";
    }
    return "?";
}

LeftBc::Kind left_bc_kind_from_string(const std::string& name) {
    if (name == "dirichlet") return LeftBc::Kind::Dirichlet;
    if (name == "pulse") return LeftBc::Kind::Pulse;
    if (name == "ramp") return LeftBc::Kind::Ramp;
    throw config_error("unknown boundary kind '" + name + "'");
}

} // namespace pinnverse
