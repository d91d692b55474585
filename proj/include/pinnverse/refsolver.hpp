#ifndef PINNVERSE_REFSOLVER_HPP
#define PINNVERSE_REFSOLVER_HPP

#include <map>
#include <string>
#include <vector>

#include "pinnverse/common.hpp"
#include "pinnverse/physics.hpp"

namespace pinnverse {

// Solver and sampling resolutions. Solver nodes include both endpoints;
// nx = 99q+1 and nt = 99r+1 make the uniform 100x100 sample grid an exact
// subset of solver nodes.
struct Grid {
    int nx = 496;  // spatial nodes, >= 401 for production runs
    int nt = 2080; // time levels including t=0, >= 2000 for production runs
    int sample_nx = 100;
    int sample_nt = 100;

    double dx() const { return 1.0 / (nx - 1); }
    void validate() const;
    bool sample_coincides() const {
        return (nx - 1) % (sample_nx - 1) == 0 && (nt - 1) % (sample_nt - 1) == 0;
    }
};

// A space-time field on uniform nodes of [0,1] x [0,T]; values[c] is
// nt x nx with rows indexed by time level.
struct Field {
    int nt = 0, nx = 0;
    double horizon = 1.0;
    std::vector<Matrix> values;

    double x_of(int i) const { return static_cast<double>(i) / (nx - 1); }
    double t_of(int n) const { return horizon * static_cast<double>(n) / (nt - 1); }
    int channels() const { return static_cast<int>(values.size()); }
};

// Sampled reference data plus the inputs that produced it.
struct ReferenceField {
    Field field; // sample_nt x sample_nx per channel
    ModelSpec model;
    std::map<std::string, double> true_params;
    Grid grid;
};

// Crank-Nicolson method-of-lines solve at full solver resolution. The first
// steps run as backward-Euler half-steps (Rannacher startup) so the
// boundary/initial corner mismatch does not excite undamped oscillations.
// Throws config_error when the advection cell Peclet number V dx/(2D)
// reaches 1, naming the required nx.
Field solve_full(const ModelSpec& model, const std::map<std::string, double>& params,
                 const Grid& grid, int rannacher_steps = 2);

// Restriction of a full-resolution field onto the sample grid: exact node
// extraction when resolutions coincide, separable cubic interpolation
// otherwise.
ReferenceField sample(const Field& full, const ModelSpec& model,
                      const std::map<std::string, double>& params, const Grid& grid);

// solve_full followed by sample.
ReferenceField solve(const ModelSpec& model, const std::map<std::string, double>& params,
                     const Grid& grid);

// Discrete conservation diagnostic: per-step residual of
//   d/dt int(beta0 u + beta1 v) dx = flux_in - flux_out
// in storage units (already multiplied by dt). For single-channel models
// beta0 is the time-derivative factor and beta1 = 0.
Vector mass_balance(const Field& field, const ModelSpec& model,
                    const std::map<std::string, double>& params);

// CSV with a versioned header block; one row per (t, x) node.
void save_reference_csv(const std::string& path, const ReferenceField& ref);
ReferenceField load_reference_csv(const std::string& path);

// Compact binary cache (magic PVRF1, dims, float64 little-endian).
void save_reference_cache(const std::string& path, const ReferenceField& ref);
ReferenceField load_reference_cache(const std::string& path);

// Key for the on-disk cache: stable hash of model, parameters and grid.
std::string reference_cache_key(const ModelSpec& model,
                                const std::map<std::string, double>& params,
                                const Grid& grid);

} // namespace pinnverse

#endif
