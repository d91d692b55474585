#ifndef PINNVERSE_EXPERIMENT_HPP
#define PINNVERSE_EXPERIMENT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pinnverse/adaptive_loss.hpp"
#include "pinnverse/network.hpp"
#include "pinnverse/physics.hpp"
#include "pinnverse/refsolver.hpp"
#include "pinnverse/trainer.hpp"

namespace pinnverse {

// A complete, serializable description of one inverse (or direct) run.
struct ExperimentConfig {
    std::string name = "custom";
    ModelSpec model;
    std::map<std::string, double> true_params; // used by the reference solver
    std::vector<std::string> trainable;        // subset of model parameter names
    NetworkShape shape;
    Grid grid;
    TrainingConfig training;
    WeightConfig weights;
    PhysicalInitMode init_mode = PhysicalInitMode::Absolute;
    double subsample = 1.0;  // interior fraction kept for training
    std::string output_dir;  // default artifact location; empty: in-memory only

    void validate() const;                 // throws config_error on the first violation
    std::vector<std::string> problems() const; // all violations, empty when valid
};

// JSON round trip. Unknown keys are rejected so typos can't silently fall
// back to defaults.
ExperimentConfig load_experiment_json(const std::string& path);
void save_experiment_json(const std::string& path, const ExperimentConfig& cfg);

// Built-in configurations; throws config_error for an unknown name.
ExperimentConfig builtin_experiment(const std::string& name);
std::vector<std::string> builtin_experiment_names();

// Everything a finished run produced.
struct RunArtifacts {
    ExperimentConfig config;
    RunHistory history;
    NetworkParams net;
    PhysicalParams physical;
    std::map<std::string, double> recovered;      // final materialized values
    std::map<std::string, double> rel_error;      // vs truth
    double solution_rel_err = 0.0;
    std::string output_dir;                       // empty when nothing was written
};

struct RunOptions {
    std::optional<std::string> output_dir; // overrides cfg.output_dir when set
    std::string cache_dir;                 // reference-solution cache; empty: no cache
    bool quiet = false;                    // suppress progress lines on stderr
    std::optional<std::uint64_t> net_seed; // override config seeds
    std::optional<std::uint64_t> param_seed;
};

// Solves (or loads from cache) the reference problem, builds the collocation
// set, trains, and — when an output directory is configured — writes
// config.json, history.csv, summary.json, net.ckpt, and the figure-data
// files (solution profiles in x and t, parameter error curves, loss curves).
RunArtifacts run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

// Reference solution for cfg, going through the cache when one is configured.
ReferenceField reference_for(const ExperimentConfig& cfg, const std::string& cache_dir,
                             bool quiet = true);

struct SweepResult {
    std::vector<RunArtifacts> runs;
    std::map<std::string, double> worst_rel_error; // per parameter, across runs
    int n_converged = 0;
};

// Repeats the experiment with parameter-init seeds base, base+1, ...; the
// network init and every other hyperparameter stay fixed.
SweepResult run_sweep(const ExperimentConfig& cfg, int n_seeds,
                      const RunOptions& options = {});

void save_summary_json(const std::string& path, const RunArtifacts& artifacts);

} // namespace pinnverse

#endif
