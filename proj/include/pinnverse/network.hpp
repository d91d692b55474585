#ifndef PINNVERSE_NETWORK_HPP
#define PINNVERSE_NETWORK_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pinnverse/common.hpp"

namespace pinnverse {

// ---------------------------------------------------------------------------
// Fully connected feed-forward net: input (x,t), tanh hidden layers of equal
// width, identity output layer.
// ---------------------------------------------------------------------------
struct NetworkShape {
    int depth = 9;        // total layers including the output layer
    int hidden_width = 20;
    int in_dim = 2;
    int out_dim = 1;

    // neurons in layer l, l = 0 (input) .. depth (output)
    int layer_width(int l) const;
    Eigen::Index parameter_count() const;
    void validate() const; // throws config_error
};

struct NetworkParams {
    std::vector<Matrix> weights; // W_l: m_l x m_{l-1}
    std::vector<Vector> biases;  // b_l: m_l

    Eigen::Index parameter_count() const;
    // Flat layout: layer-major, W before b, column-major within each W.
    Vector flatten() const;
    void unflatten(const Vector& flat);
    bool matches(const NetworkShape& shape) const;
};

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
// Deterministic for a fixed seed.
NetworkParams init_network(const NetworkShape& shape, std::uint64_t seed);

// Forward evaluation; throws numeric_fault naming the first layer that
// produced a non-finite value.
Vector evaluate(const NetworkShape& shape, const NetworkParams& params, double x, double t);

// ---------------------------------------------------------------------------
// Physical parameters under estimation. Stored in log space so gradient
// descent cannot cross zero; materialized values are exp(raw) > 0.
// ---------------------------------------------------------------------------
struct PhysicalParams {
    std::vector<std::string> names; // subset of {V, D, lambda}, fixed order
    Vector raw;                     // log-space storage

    Eigen::Index size() const { return raw.size(); }
    double value(const std::string& name) const;
    double value(Eigen::Index i) const { return std::exp(raw[i]); }
    Eigen::Index index(const std::string& name) const; // throws config_error if absent
    bool has(const std::string& name) const;
    void set_value(const std::string& name, double v); // v > 0
};

enum class PhysicalInitMode {
    Absolute, // log-uniform in [0.1, 10]
    Relative  // log-uniform in [0.1, 10] x true value
};

// Draws each named parameter log-uniformly; deterministic for a fixed seed.
PhysicalParams init_physical(const std::vector<std::string>& names,
                             const std::map<std::string, double>& true_values,
                             std::uint64_t seed,
                             PhysicalInitMode mode = PhysicalInitMode::Absolute);

// Fixed parameters (no sampling), e.g. truth-frozen direct runs.
PhysicalParams physical_from_values(const std::vector<std::string>& names,
                                    const std::map<std::string, double>& values);

// ---------------------------------------------------------------------------
// Checkpoint I/O. Binary layout (documented in the README):
//   magic "PVNET1\n", int32 depth/hidden/in/out, then parameters as
//   little-endian float64 in flat order (layer-major, W before b,
//   column-major within W).
// ---------------------------------------------------------------------------
void save_checkpoint(const std::string& path, const NetworkShape& shape,
                     const NetworkParams& params);
std::pair<NetworkShape, NetworkParams> load_checkpoint(const std::string& path);

} // namespace pinnverse

#endif
