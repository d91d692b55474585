#ifndef PINNVERSE_TRAINER_HPP
#define PINNVERSE_TRAINER_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pinnverse/adaptive_loss.hpp"
#include "pinnverse/collocation.hpp"
#include "pinnverse/network.hpp"
#include "pinnverse/physics.hpp"

namespace pinnverse {

struct TrainingConfig {
    int epochs = 5000;             // K
    int threshold_epoch = 1000;    // K0: parameter updates and ramp start after this
    double alpha0 = 0.01;          // initial learning rate
    double lr_decay = 0.95;        // staircase factor, applied every lr_step epochs
    int lr_step = 100;
    double gamma = 0.2;            // physical-gradient scale
    bool train_parameters = true;  // false: direct problem, theta0 frozen
    std::vector<std::string> trainable; // subset of physical names; empty: all
    std::uint64_t net_seed = 1;
    std::uint64_t param_seed = 2;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    // eps doubles as a magnitude gate: while the ramp is nearly closed the
    // scaled physical gradients sit below it, so Adam's normalization cannot
    // blow them back up to full-size steps. 1e-8 is small enough to defeat
    // that gating and lets the parameters drift on residual-only gradients
    // before the data term engages.
    double adam_eps = 1e-7;
    double convergence_loss = 1e-8;    // stop when weighted loss drops below
    double convergence_delta = 1e-10;  // ... or relative parameter change stays below
    int convergence_patience = 200;    //     for this many consecutive epochs
    int log_every = 100;               // progress-callback cadence (history keeps every epoch)

    void validate() const;
};

// Staircase schedule: alpha0 * decay^floor(k / step) for 0-based epoch k.
double learning_rate(int k, double alpha0, double decay, int step = 100);

// Scales the physical block of the gradient by gamma * ramp(k, K, K0);
// below the threshold epoch the block is exactly zero. Network block is
// untouched.
void scale_physical_gradients(GradientVector& grads, int k, double gamma, int K, int K0);

// Adam with bias correction; state tracks one flat parameter vector.
struct AdamState {
    Vector m, v;
    long steps = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-7;

    explicit AdamState(Eigen::Index n = 0, double b1 = 0.9, double b2 = 0.999,
                       double e = 1e-7);
    void step(Vector& params, const Vector& grads, double alpha);
};

struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    double nu = 0.0;
    LossBreakdown loss;
    std::vector<double> theta;          // materialized physical values
    std::vector<double> theta_rel_err;  // vs truth when known, else NaN
    double grad_inf_network = 0.0;      // max-abs over the network block
    double grad_inf_physical = 0.0;     // max-abs over the scaled physical block
    double solution_rel_err = 0.0;
};

struct RunHistory {
    std::vector<std::string> param_names;
    std::vector<EpochRecord> records;
    int epochs_run = 0;
    bool converged = false;
    std::string stop_reason; // "epochs", "loss", "stall", or a fault message
    double wall_seconds = 0.0;

    const EpochRecord& final_record() const;
};

void save_history_csv(const std::string& path, const RunHistory& history);

// Periodic progress callback; return false to stop training early.
using ProgressFn = std::function<bool(const EpochRecord&)>;

// Full training loop: builds the loss graph over `points`, runs Adam for up
// to cfg.epochs epochs with the ramped weight schedule, updates `net` and
// `physical` in place, and reports per-epoch diagnostics. `truth` (possibly
// empty) only feeds the relative-error columns of the history.
RunHistory train(const ModelSpec& model, const NetworkShape& shape, NetworkParams& net,
                 PhysicalParams& physical, const CollocationSet& points,
                 const TrainingConfig& cfg, const WeightConfig& weights,
                 const std::map<std::string, double>& truth = {},
                 const ProgressFn& progress = nullptr);

} // namespace pinnverse

#endif
