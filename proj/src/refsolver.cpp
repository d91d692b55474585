#include "pinnverse/refsolver.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pinnverse {

void Grid::validate() const {
    if (nx < 5) throw config_error("grid needs at least 5 spatial nodes");
    if (nt < 3) throw config_error("grid needs at least 3 time levels");
    if (sample_nx < 2 || sample_nx > nx)
        throw config_error("sample_nx must lie in [2, nx]");
    if (sample_nt < 2 || sample_nt > nt)
        throw config_error("sample_nt must lie in [2, nt]");
}

namespace {

double required_param(const std::map<std::string, double>& params, const std::string& name) {
    const auto it = params.find(name);
    if (it == params.end())
        throw config_error("reference solve needs parameter '" + name + "'");
    if (!std::isfinite(it->second))
        throw config_error("parameter '" + name + "' is not finite");
    return it->second;
}

struct SolveCoeffs {
    double beta_t = 1.0; // factor on u_t
    double V = 0.0, D = 0.0, lambda = 0.0, beta1 = 0.0, sigma0 = 0.0;
    double a_l = 0.0, a_d = 0.0, a_u = 0.0; // tridiagonal bands of the space operator
};

SolveCoeffs make_coeffs(const ModelSpec& model, const std::map<std::string, double>& params,
                        const Grid& grid) {
    SolveCoeffs c;
    switch (model.kind) {
    case ModelKind::Heat:
        c.beta_t = 1.0;
        c.D = required_param(params, "D");
        break;
    case ModelKind::Adr:
        c.beta_t = model.beta;
        c.V = required_param(params, "V");
        c.D = required_param(params, "D");
        if (model.reaction.kind == Reaction::Kind::Linear) c.sigma0 = model.reaction.sigma0;
        break;
    case ModelKind::MobileImmobile:
        c.beta_t = model.beta0;
        c.V = required_param(params, "V");
        c.D = required_param(params, "D");
        c.lambda = required_param(params, "lambda");
        c.beta1 = model.beta1;
        break;
    }
    if (!(c.D > 0.0)) throw config_error("diffusion coefficient D must be positive");

    const double dx = grid.dx();
    const double peclet = std::abs(c.V) * dx / (2.0 * c.D);
    if (peclet >= 1.0) {
        const int nx_req = static_cast<int>(std::floor(std::abs(c.V) / (2.0 * c.D))) + 2;
        throw config_error("cell Peclet number " + std::to_string(peclet) +
                           " >= 1: central advection would oscillate; increase nx to at least " +
                           std::to_string(nx_req));
    }
    c.a_l = c.D / (dx * dx) + c.V / (2.0 * dx);
    c.a_u = c.D / (dx * dx) - c.V / (2.0 * dx);
    c.a_d = -2.0 * c.D / (dx * dx) + c.sigma0;
    return c;
}

// Tridiagonal solve (Thomas). lower[i] multiplies x[i-1] in row i.
void thomas(Vector lower, Vector diag, Vector upper, Vector& rhs) {
    const Eigen::Index m = diag.size();
    for (Eigen::Index i = 1; i < m; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[m - 1] /= diag[m - 1];
    for (Eigen::Index i = m - 2; i >= 0; --i)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// One theta-weighted step from (u, v) at time t to t + dt. theta = 1/2 is
// Crank-Nicolson, theta = 1 backward Euler. The right Neumann condition
// (3 u_N - 4 u_{N-1} + u_{N-2}) / (2 dx) = 0 is substituted into the last
// interior row so the system stays tridiagonal; the immobile channel is
// eliminated pointwise and recovered after the solve.
void theta_step(Vector& u, Vector* v, double t_next, double dt, double theta,
                const SolveCoeffs& c, const ModelSpec& model) {
    const Eigen::Index N = u.size() - 1; // last node index
    const Eigen::Index m = N - 1;        // unknowns at 1..N-1

    // explicit part: (A u^n)_i over interior nodes
    Vector rhs(m);
    for (Eigen::Index i = 1; i <= N - 1; ++i) {
        const double Au = c.a_l * u[i - 1] + c.a_d * u[i] + c.a_u * u[i + 1];
        rhs[i - 1] = c.beta_t * u[i] + dt * (1.0 - theta) * Au;
    }

    Vector lower = Vector::Constant(m, -dt * theta * c.a_l);
    Vector diag = Vector::Constant(m, c.beta_t - dt * theta * c.a_d);
    Vector upper = Vector::Constant(m, -dt * theta * c.a_u);

    const double g_next = model.left.g(t_next);
    rhs[0] += dt * theta * c.a_l * g_next; // known Dirichlet value at x=0

    // Neumann closure u_N = (4 u_{N-1} - u_{N-2}) / 3 folded into the last row
    diag[m - 1] += -dt * theta * c.a_u * (4.0 / 3.0);
    if (m >= 2) lower[m - 1] += dt * theta * c.a_u / 3.0;

    // immobile exchange: v^{n+1} = c0 + c1 u^{n+1} node by node
    double c1 = 0.0;
    Vector c0;
    if (v) {
        const double denom = c.beta1 + dt * theta * c.lambda;
        c1 = dt * theta * c.lambda / denom;
        c0 = ((c.beta1 * v->array() +
               dt * (1.0 - theta) * c.lambda * (u.array() - v->array())) /
              denom)
                 .matrix();
        for (Eigen::Index i = 1; i <= N - 1; ++i)
            rhs[i - 1] += dt * theta * c.lambda * c0[i];
        diag.array() += dt * theta * c.lambda * (1.0 - c1);
    }

    thomas(lower, diag, upper, rhs);

    u[0] = g_next;
    u.segment(1, m) = rhs;
    u[N] = (4.0 * u[N - 1] - u[N - 2]) / 3.0;
    if (v) *v = c0 + c1 * u;
}

} // namespace

Field solve_full(const ModelSpec& model, const std::map<std::string, double>& params,
                 const Grid& grid, int rannacher_steps) {
    model.validate();
    grid.validate();
    const SolveCoeffs c = make_coeffs(model, params, grid);
    if (model.reaction.kind != Reaction::Kind::None && model.kind != ModelKind::Adr)
        throw config_error("reaction terms are only supported by the advection model");

    const double dt = model.horizon / (grid.nt - 1);
    const bool two_channel = model.kind == ModelKind::MobileImmobile;

    Field field;
    field.nt = grid.nt;
    field.nx = grid.nx;
    field.horizon = model.horizon;
    field.values.assign(two_channel ? 2 : 1, Matrix::Zero(grid.nt, grid.nx));

    Vector u = Vector::Zero(grid.nx);
    u[0] = model.left.g(0.0); // corner takes the boundary value
    Vector v = Vector::Zero(grid.nx);

    field.values[0].row(0) = u.transpose();

    for (int n = 0; n < grid.nt - 1; ++n) {
        const double t0 = field.t_of(n);
        const double t1 = field.t_of(n + 1);
        if (n < rannacher_steps) {
            // damped startup: two backward-Euler half steps absorb the
            // initial/boundary corner without ringing
            theta_step(u, two_channel ? &v : nullptr, 0.5 * (t0 + t1), 0.5 * dt, 1.0, c, model);
            theta_step(u, two_channel ? &v : nullptr, t1, 0.5 * dt, 1.0, c, model);
        } else {
            theta_step(u, two_channel ? &v : nullptr, t1, dt, 0.5, c, model);
        }
        if (!u.allFinite())
            throw numeric_fault("reference solve diverged at t=" + std::to_string(t1));
        field.values[0].row(n + 1) = u.transpose();
        if (two_channel) field.values[1].row(n + 1) = v.transpose();
    }
    return field;
}

namespace {

// Catmull-Rom through 4 neighbours, edge-clamped.
double cubic_at(const Vector& p, double s) {
    const auto n = p.size();
    const double sc = std::min(std::max(s, 0.0), static_cast<double>(n - 1));
    Eigen::Index i = std::min(static_cast<Eigen::Index>(sc), n - 2);
    const double f = sc - static_cast<double>(i);
    const double p0 = p[std::max<Eigen::Index>(i - 1, 0)];
    const double p1 = p[i];
    const double p2 = p[i + 1];
    const double p3 = p[std::min<Eigen::Index>(i + 2, n - 1)];
    return 0.5 * (2.0 * p1 + (-p0 + p2) * f + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f * f +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * f * f * f);
}

Matrix cubic_resample(const Matrix& src, int out_rows, int out_cols) {
    // along columns (space) first, then rows (time)
    Matrix mid(src.rows(), out_cols);
    for (Eigen::Index r = 0; r < src.rows(); ++r) {
        const Vector row = src.row(r).transpose();
        for (int j = 0; j < out_cols; ++j) {
            const double s = static_cast<double>(j) * (src.cols() - 1) / (out_cols - 1);
            mid(r, j) = cubic_at(row, s);
        }
    }
    Matrix out(out_rows, out_cols);
    for (int j = 0; j < out_cols; ++j) {
        const Vector col = mid.col(j);
        for (int i = 0; i < out_rows; ++i) {
            const double s = static_cast<double>(i) * (src.rows() - 1) / (out_rows - 1);
            out(i, j) = cubic_at(col, s);
        }
    }
    return out;
}

} // namespace

ReferenceField sample(const Field& full, const ModelSpec& model,
                      const std::map<std::string, double>& params, const Grid& grid) {
    if (full.nx != grid.nx || full.nt != grid.nt)
        throw contract_violation("sample: field resolution does not match the grid");

    ReferenceField ref;
    ref.model = model;
    ref.true_params = params;
    ref.grid = grid;
    ref.field.nt = grid.sample_nt;
    ref.field.nx = grid.sample_nx;
    ref.field.horizon = full.horizon;

    for (const Matrix& chan : full.values) {
        Matrix out(grid.sample_nt, grid.sample_nx);
        if (grid.sample_coincides()) {
            const int st = (grid.nt - 1) / (grid.sample_nt - 1);
            const int sx = (grid.nx - 1) / (grid.sample_nx - 1);
            for (int i = 0; i < grid.sample_nt; ++i)
                for (int j = 0; j < grid.sample_nx; ++j) out(i, j) = chan(i * st, j * sx);
        } else {
            out = cubic_resample(chan, grid.sample_nt, grid.sample_nx);
        }
        ref.field.values.push_back(std::move(out));
    }
    return ref;
}

ReferenceField solve(const ModelSpec& model, const std::map<std::string, double>& params,
                     const Grid& grid) {
    return sample(solve_full(model, params, grid), model, params, grid);
}

Vector mass_balance(const Field& field, const ModelSpec& model,
                    const std::map<std::string, double>& params) {
    if (field.channels() < 1) throw contract_violation("mass_balance: empty field");
    Grid g;
    g.nx = field.nx;
    g.nt = field.nt;
    g.sample_nx = 2;
    g.sample_nt = 2;
    const SolveCoeffs c = make_coeffs(model, params, g);

    const double dx = 1.0 / (field.nx - 1);
    const double dt = field.horizon / (field.nt - 1);
    const Matrix& u = field.values[0];
    const bool two_channel = field.channels() == 2;

    // storage integral, trapezoid in space
    auto storage = [&](int n) {
        double s = c.beta_t * (0.5 * u(n, 0) + 0.5 * u(n, field.nx - 1) +
                               u.row(n).segment(1, field.nx - 2).sum()) *
                   dx;
        if (two_channel) {
            const Matrix& v = field.values[1];
            s += c.beta1 * (0.5 * v(n, 0) + 0.5 * v(n, field.nx - 1) +
                            v.row(n).segment(1, field.nx - 2).sum()) *
                 dx;
        }
        return s;
    };
    // advective-diffusive flux V u - D u_x with one-sided second-order u_x
    auto net_inflow = [&](int n) {
        const double ux_left = (-3.0 * u(n, 0) + 4.0 * u(n, 1) - u(n, 2)) / (2.0 * dx);
        const double ux_right =
            (3.0 * u(n, field.nx - 1) - 4.0 * u(n, field.nx - 2) + u(n, field.nx - 3)) /
            (2.0 * dx);
        const double flux_in = c.V * u(n, 0) - c.D * ux_left;
        const double flux_out = c.V * u(n, field.nx - 1) - c.D * ux_right;
        double source = 0.0;
        if (c.sigma0 != 0.0)
            source = c.sigma0 *
                     (0.5 * u(n, 0) + 0.5 * u(n, field.nx - 1) +
                      u.row(n).segment(1, field.nx - 2).sum()) *
                     dx;
        return flux_in - flux_out + source;
    };

    Vector residual(field.nt - 1);
    for (int n = 0; n + 1 < field.nt; ++n)
        residual[n] =
            storage(n + 1) - storage(n) - 0.5 * dt * (net_inflow(n) + net_inflow(n + 1));
    return residual;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "key=value" pairs separated by spaces
std::map<std::string, std::string> parse_pairs(const std::string& line) {
    std::map<std::string, std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return out;
}

} // namespace

void save_reference_csv(const std::string& path, const ReferenceField& ref) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << "# pinnverse-reference v1\n";
    out << "# model kind=" << to_string(ref.model.kind) << " beta=" << fmt(ref.model.beta)
        << " beta0=" << fmt(ref.model.beta0) << " beta1=" << fmt(ref.model.beta1)
        << " horizon=" << fmt(ref.model.horizon)
        << " sigma0=" << fmt(ref.model.reaction.kind == Reaction::Kind::Linear
                                 ? ref.model.reaction.sigma0
                                 : 0.0)
        << "\n";
    out << "# bc kind=" << to_string(ref.model.left.kind) << " value=" << fmt(ref.model.left.value)
        << " duration=" << fmt(ref.model.left.duration) << " eps=" << fmt(ref.model.left.eps)
        << " t0=" << fmt(ref.model.left.t0) << " width=" << fmt(ref.model.left.width) << "\n";
    out << "# grid nx=" << ref.grid.nx << " nt=" << ref.grid.nt
        << " sample_nx=" << ref.grid.sample_nx << " sample_nt=" << ref.grid.sample_nt << "\n";
    out << "# params";
    for (const auto& [name, value] : ref.true_params) out << " " << name << "=" << fmt(value);
    out << "\n";
    out << "t,x,u";
    if (ref.field.channels() == 2) out << ",v";
    out << "\n";
    for (int n = 0; n < ref.field.nt; ++n) {
        for (int i = 0; i < ref.field.nx; ++i) {
            out << fmt(ref.field.t_of(n)) << "," << fmt(ref.field.x_of(i)) << ","
                << fmt(ref.field.values[0](n, i));
            if (ref.field.channels() == 2) out << "," << fmt(ref.field.values[1](n, i));
            out << "\n";
        }
    }
    if (!out) throw config_error("short write: " + path);
}

ReferenceField load_reference_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# pinnverse-reference", 0) != 0)
        throw config_error("not a reference CSV: " + path);

    ReferenceField ref;
    while (std::getline(in, line) && !line.empty() && line[0] == '#') {
        const auto kv = parse_pairs(line.substr(1));
        if (line.rfind("# model", 0) == 0) {
            ref.model.kind = model_kind_from_string(kv.at("kind"));
            ref.model.beta = std::stod(kv.at("beta"));
            ref.model.beta0 = std::stod(kv.at("beta0"));
            ref.model.beta1 = std::stod(kv.at("beta1"));
            ref.model.horizon = std::stod(kv.at("horizon"));
            const double sigma0 = std::stod(kv.at("sigma0"));
            if (sigma0 != 0.0) ref.model.reaction = {Reaction::Kind::Linear, sigma0};
        } else if (line.rfind("# bc", 0) == 0) {
            ref.model.left.kind = left_bc_kind_from_string(kv.at("kind"));
            ref.model.left.value = std::stod(kv.at("value"));
            ref.model.left.duration = std::stod(kv.at("duration"));
            ref.model.left.eps = std::stod(kv.at("eps"));
            ref.model.left.t0 = std::stod(kv.at("t0"));
            ref.model.left.width = std::stod(kv.at("width"));
        } else if (line.rfind("# grid", 0) == 0) {
            ref.grid.nx = std::stoi(kv.at("nx"));
            ref.grid.nt = std::stoi(kv.at("nt"));
            ref.grid.sample_nx = std::stoi(kv.at("sample_nx"));
            ref.grid.sample_nt = std::stoi(kv.at("sample_nt"));
        } else if (line.rfind("# params", 0) == 0) {
            for (const auto& [k, v] : kv) ref.true_params[k] = std::stod(v);
        }
    }
    // `line` now holds the column header
    const int channels = line.find(",v") != std::string::npos ? 2 : 1;
    ref.field.nt = ref.grid.sample_nt;
    ref.field.nx = ref.grid.sample_nx;
    ref.field.horizon = ref.model.horizon;
    ref.field.values.assign(channels, Matrix::Zero(ref.field.nt, ref.field.nx));

    for (int n = 0; n < ref.field.nt; ++n) {
        for (int i = 0; i < ref.field.nx; ++i) {
            if (!std::getline(in, line)) throw config_error("reference CSV truncated: " + path);
            std::istringstream ss(line);
            std::string cell;
            std::getline(ss, cell, ','); // t
            std::getline(ss, cell, ','); // x
            std::getline(ss, cell, ',');
            ref.field.values[0](n, i) = std::stod(cell);
            if (channels == 2) {
                std::getline(ss, cell, ',');
                ref.field.values[1](n, i) = std::stod(cell);
            }
        }
    }
    return ref;
}

namespace {

constexpr char kCacheMagic[] = "PVRF1\n";

template <class T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace

void save_reference_cache(const std::string& path, const ReferenceField& ref) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open cache for writing: " + path);
    out.write(kCacheMagic, sizeof kCacheMagic - 1);
    put<std::int32_t>(out, static_cast<std::int32_t>(ref.model.kind));
    put(out, ref.model.beta);
    put(out, ref.model.beta0);
    put(out, ref.model.beta1);
    put(out, ref.model.horizon);
    put<std::int32_t>(out, static_cast<std::int32_t>(ref.model.reaction.kind));
    put(out, ref.model.reaction.sigma0);
    put<std::int32_t>(out, static_cast<std::int32_t>(ref.model.left.kind));
    put(out, ref.model.left.value);
    put(out, ref.model.left.duration);
    put(out, ref.model.left.eps);
    put(out, ref.model.left.t0);
    put(out, ref.model.left.width);
    put<std::int32_t>(out, ref.grid.nx);
    put<std::int32_t>(out, ref.grid.nt);
    put<std::int32_t>(out, ref.grid.sample_nx);
    put<std::int32_t>(out, ref.grid.sample_nt);
    put<std::int32_t>(out, static_cast<std::int32_t>(ref.true_params.size()));
    for (const auto& [name, value] : ref.true_params) {
        put<std::int32_t>(out, static_cast<std::int32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put(out, value);
    }
    put<std::int32_t>(out, ref.field.channels());
    put<std::int32_t>(out, ref.field.nt);
    put<std::int32_t>(out, ref.field.nx);
    for (const Matrix& chan : ref.field.values)
        out.write(reinterpret_cast<const char*>(chan.data()),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(chan.size())));
    if (!out) throw config_error("short write to cache: " + path);
}

ReferenceField load_reference_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open cache: " + path);
    char magic[sizeof kCacheMagic - 1] = {};
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0)
        throw config_error("not a reference cache: " + path);

    ReferenceField ref;
    ref.model.kind = static_cast<ModelKind>(get<std::int32_t>(in));
    ref.model.beta = get<double>(in);
    ref.model.beta0 = get<double>(in);
    ref.model.beta1 = get<double>(in);
    ref.model.horizon = get<double>(in);
    ref.model.reaction.kind = static_cast<Reaction::Kind>(get<std::int32_t>(in));
    ref.model.reaction.sigma0 = get<double>(in);
    ref.model.left.kind = static_cast<LeftBc::Kind>(get<std::int32_t>(in));
    ref.model.left.value = get<double>(in);
    ref.model.left.duration = get<double>(in);
    ref.model.left.eps = get<double>(in);
    ref.model.left.t0 = get<double>(in);
    ref.model.left.width = get<double>(in);
    ref.grid.nx = get<std::int32_t>(in);
    ref.grid.nt = get<std::int32_t>(in);
    ref.grid.sample_nx = get<std::int32_t>(in);
    ref.grid.sample_nt = get<std::int32_t>(in);
    const auto n_params = get<std::int32_t>(in);
    for (std::int32_t i = 0; i < n_params; ++i) {
        const auto len = get<std::int32_t>(in);
        std::string name(static_cast<size_t>(len), '\0');
        in.read(name.data(), len);
        ref.true_params[name] = get<double>(in);
    }
    const auto channels = get<std::int32_t>(in);
    ref.field.nt = get<std::int32_t>(in);
    ref.field.nx = get<std::int32_t>(in);
    ref.field.horizon = ref.model.horizon;
    for (std::int32_t ch = 0; ch < channels; ++ch) {
        Matrix m(ref.field.nt, ref.field.nx);
        in.read(reinterpret_cast<char*>(m.data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m.size())));
        ref.field.values.push_back(std::move(m));
    }
    if (!in) throw config_error("reference cache truncated: " + path);
    return ref;
}

std::string reference_cache_key(const ModelSpec& model,
                                const std::map<std::string, double>& params,
                                const Grid& grid) {
    std::ostringstream ss;
    ss << "kind=" << to_string(model.kind) << "|beta=" << fmt(model.beta)
       << "|beta0=" << fmt(model.beta0) << "|beta1=" << fmt(model.beta1)
       << "|horizon=" << fmt(model.horizon) << "|sigma0="
       << fmt(model.reaction.kind == Reaction::Kind::Linear ? model.reaction.sigma0 : 0.0)
       << "|bc=" << to_string(model.left.kind) << "|value=" << fmt(model.left.value)
       << "|duration=" << fmt(model.left.duration) << "|eps=" << fmt(model.left.eps)
       << "|t0=" << fmt(model.left.t0) << "|width=" << fmt(model.left.width)
       << "|nx=" << grid.nx << "|nt=" << grid.nt << "|snx=" << grid.sample_nx
       << "|snt=" << grid.sample_nt;
    for (const auto& [name, value] : params) ss << "|" << name << "=" << fmt(value);
    const std::string text = ss.str();

    // FNV-1a, 64 bit
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace pinnverse
