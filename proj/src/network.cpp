#include "pinnverse/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace pinnverse {

int NetworkShape::layer_width(int l) const {
    if (l == 0) return in_dim;
    if (l == depth) return out_dim;
    return hidden_width;
}

Eigen::Index NetworkShape::parameter_count() const {
    Eigen::Index n = 0;
    for (int l = 1; l <= depth; ++l)
        n += static_cast<Eigen::Index>(layer_width(l)) * layer_width(l - 1) + layer_width(l);
    return n;
}

void NetworkShape::validate() const {
    if (depth < 1) throw config_error("network depth must be at least 1");
    if (hidden_width < 1 && depth > 1) throw config_error("hidden width must be at least 1");
    if (in_dim != 2) throw config_error("network input must be (x, t)");
    if (out_dim < 1) throw config_error("network needs at least one output channel");
}

Eigen::Index NetworkParams::parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& W : weights) n += W.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

Vector NetworkParams::flatten() const {
    Vector flat(parameter_count());
    Eigen::Index off = 0;
    for (size_t l = 0; l < weights.size(); ++l) {
        const Matrix& W = weights[l];
        flat.segment(off, W.size()) = Eigen::Map<const Vector>(W.data(), W.size());
        off += W.size();
        flat.segment(off, biases[l].size()) = biases[l];
        off += biases[l].size();
    }
    return flat;
}

void NetworkParams::unflatten(const Vector& flat) {
    if (flat.size() != parameter_count())
        throw contract_violation("unflatten: got " + std::to_string(flat.size()) +
                                 " values for " + std::to_string(parameter_count()) +
                                 " parameters");
    Eigen::Index off = 0;
    for (size_t l = 0; l < weights.size(); ++l) {
        Matrix& W = weights[l];
        Eigen::Map<Vector>(W.data(), W.size()) = flat.segment(off, W.size());
        off += W.size();
        biases[l] = flat.segment(off, biases[l].size());
        off += biases[l].size();
    }
}

bool NetworkParams::matches(const NetworkShape& shape) const {
    if (static_cast<int>(weights.size()) != shape.depth || biases.size() != weights.size())
        return false;
    for (int l = 1; l <= shape.depth; ++l) {
        const Matrix& W = weights[static_cast<size_t>(l - 1)];
        if (W.rows() != shape.layer_width(l) || W.cols() != shape.layer_width(l - 1))
            return false;
        if (biases[static_cast<size_t>(l - 1)].size() != shape.layer_width(l)) return false;
    }
    return true;
}

NetworkParams init_network(const NetworkShape& shape, std::uint64_t seed) {
    shape.validate();
    SplitRng rng(seed);
    NetworkParams params;
    for (int l = 1; l <= shape.depth; ++l) {
        const int rows = shape.layer_width(l);
        const int cols = shape.layer_width(l - 1);
        const double bound = std::sqrt(6.0 / (rows + cols));
        Matrix W(rows, cols);
        // column-major fill so the draw order matches the flat layout
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) W(i, j) = rng.uniform(-bound, bound);
        params.weights.push_back(std::move(W));
        params.biases.push_back(Vector::Zero(rows));
    }
    return params;
}

Vector evaluate(const NetworkShape& shape, const NetworkParams& params, double x, double t) {
    shape.validate();
    if (!params.matches(shape))
        throw contract_violation("evaluate: parameters do not match the shape");
    Vector z(2);
    z << x, t;
    for (int l = 1; l <= shape.depth; ++l) {
        Vector pre = params.weights[static_cast<size_t>(l - 1)] * z +
                     params.biases[static_cast<size_t>(l - 1)];
        if (!pre.allFinite())
            throw numeric_fault("evaluate: non-finite activation in layer " + std::to_string(l));
        z = l < shape.depth ? pre.array().tanh().matrix() : pre;
    }
    return z;
}

double PhysicalParams::value(const std::string& name) const {
    return std::exp(raw[index(name)]);
}

Eigen::Index PhysicalParams::index(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw config_error("unknown physical parameter '" + name + "'");
    return static_cast<Eigen::Index>(it - names.begin());
}

bool PhysicalParams::has(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

void PhysicalParams::set_value(const std::string& name, double v) {
    if (!(v > 0.0))
        throw config_error("physical parameter '" + name + "' must be positive, got " +
                           std::to_string(v));
    raw[index(name)] = std::log(v);
}

PhysicalParams init_physical(const std::vector<std::string>& names,
                             const std::map<std::string, double>& true_values,
                             std::uint64_t seed, PhysicalInitMode mode) {
    SplitRng rng(seed);
    PhysicalParams params;
    params.names = names;
    params.raw.resize(static_cast<Eigen::Index>(names.size()));
    const double lo = std::log(0.1), hi = std::log(10.0);
    for (size_t i = 0; i < names.size(); ++i) {
        double raw = rng.uniform(lo, hi); // log-uniform over [0.1, 10)
        if (mode == PhysicalInitMode::Relative) {
            const auto it = true_values.find(names[i]);
            if (it == true_values.end())
                throw config_error("relative init needs a true value for '" + names[i] + "'");
            if (!(it->second > 0.0))
                throw config_error("true value for '" + names[i] + "' must be positive");
            raw += std::log(it->second);
        }
        params.raw[static_cast<Eigen::Index>(i)] = raw;
    }
    return params;
}

PhysicalParams physical_from_values(const std::vector<std::string>& names,
                                    const std::map<std::string, double>& values) {
    PhysicalParams params;
    params.names = names;
    params.raw.resize(static_cast<Eigen::Index>(names.size()));
    for (size_t i = 0; i < names.size(); ++i) {
        const auto it = values.find(names[i]);
        if (it == values.end())
            throw config_error("missing value for physical parameter '" + names[i] + "'");
        if (!(it->second > 0.0))
            throw config_error("physical parameter '" + names[i] + "' must be positive");
        params.raw[static_cast<Eigen::Index>(i)] = std::log(it->second);
    }
    return params;
}

namespace {

constexpr char kMagic[] = "PVNET1\n";

void write_i32(std::ofstream& out, std::int32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::int32_t read_i32(std::ifstream& in) {
    std::int32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace

void save_checkpoint(const std::string& path, const NetworkShape& shape,
                     const NetworkParams& params) {
    if (!params.matches(shape))
        throw contract_violation("save_checkpoint: parameters do not match the shape");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open checkpoint for writing: " + path);
    out.write(kMagic, sizeof kMagic - 1);
    write_i32(out, shape.depth);
    write_i32(out, shape.hidden_width);
    write_i32(out, shape.in_dim);
    write_i32(out, shape.out_dim);
    const Vector flat = params.flatten();
    out.write(reinterpret_cast<const char*>(flat.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(flat.size())));
    if (!out) throw config_error("short write to checkpoint: " + path);
}

std::pair<NetworkShape, NetworkParams> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open checkpoint: " + path);
    char magic[sizeof kMagic - 1] = {};
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw config_error("not a network checkpoint: " + path);
    NetworkShape shape;
    shape.depth = read_i32(in);
    shape.hidden_width = read_i32(in);
    shape.in_dim = read_i32(in);
    shape.out_dim = read_i32(in);
    shape.validate();

    NetworkParams params;
    for (int l = 1; l <= shape.depth; ++l) {
        params.weights.emplace_back(shape.layer_width(l), shape.layer_width(l - 1));
        params.biases.emplace_back(shape.layer_width(l));
    }
    Vector flat(shape.parameter_count());
    in.read(reinterpret_cast<char*>(flat.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(flat.size())));
    if (!in) throw config_error("checkpoint truncated: " + path);
    params.unflatten(flat);
    return {shape, params};
}

} // namespace pinnverse
