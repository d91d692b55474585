#ifndef PINNVERSE_ADAPTIVE_LOSS_HPP
#define PINNVERSE_ADAPTIVE_LOSS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pinnverse/autodiff.hpp"
#include "pinnverse/collocation.hpp"
#include "pinnverse/network.hpp"
#include "pinnverse/physics.hpp"

namespace pinnverse {

// Category weights and regularisation for the weighted loss.
struct WeightConfig {
    double eta_bc = 10.0;
    double eta_ic = 10.0;
    double eta_u = 1.0;
    double iota = 0.0;                               // regularisation weight
    std::map<std::string, double> theta0_ref;        // reference parameters for iota > 0
    bool supervise_immobile = true;                  // include v in the data misfit

    void validate() const;
};

struct LossComponent {
    double weighted = 0.0;
    double unweighted = 0.0;
};

struct LossBreakdown {
    double weighted_total = 0.0;
    LossComponent data;        // interior misfit (ramped)
    LossComponent ic;          // initial-condition misfit
    LossComponent bc;          // boundary mismatch, both sides
    LossComponent residual;    // PDE residual over every point
    LossComponent regulariser; // iota * |theta0 - theta0*|^2

    double weighted_sum() const {
        return data.weighted + ic.weighted + bc.weighted + residual.weighted +
               regulariser.weighted;
    }
};

// Epoch ramp nu(k) = (tanh(10 (k - K/2 - K0)/K) + 1)/2, gated to exactly 0
// for k <= K0 (the weight update and the parameter gradients switch on
// together once the threshold epoch has passed).
double ramp(int k, int K, int K0);

// Un-normalized per-point weight for a category at epoch k. Points carrying
// no reference value get 0 regardless of category.
double raw_weight(PointTag tag, int k, const WeightConfig& cfg, int K, int K0,
                  bool has_reference = true);

// Raw residual weight is the constant 1.
inline double raw_residual_weight() { return 1.0; }

// Divides every raw weight (residual last or anywhere, caller's order is
// preserved) by the total so the result sums to 1. Throws config_error when
// every raw weight is zero.
std::vector<double> normalize(const std::vector<double>& raw);

// ---------------------------------------------------------------------------
// Batched loss graph. Records, once, the jet-propagated forward pass of the
// network over every training point plus the weighted loss of the model
// residuals / data / IC / BC terms; per epoch only leaf values and the four
// category weights change, the graph replays, and one reverse sweep yields
// every gradient.
// ---------------------------------------------------------------------------
class LossAssembler {
public:
    LossAssembler(const ModelSpec& model, const NetworkShape& shape,
                  const CollocationSet& points, const WeightConfig& weights,
                  int K, int K0);

    // Normalized category weights at epoch k (nu already gated). Order:
    // {bc, ic, data, residual}.
    struct CategoryWeights {
        double bc = 0.0, ic = 0.0, data = 0.0, residual = 0.0;
    };
    CategoryWeights category_weights(double nu) const;

    // Replays the graph with the given parameters and epoch ramp value and
    // returns the loss breakdown.
    const LossBreakdown& forward(const NetworkParams& net, const PhysicalParams& physical,
                                 double nu);

    // Reverse sweep for the last forward(); gradients of weighted_total with
    // respect to network parameters and raw (log-space) physical parameters.
    void gradients(GradientVector& out);

    // Relative L2 error of the current predictions against the attached
    // reference values, per channel, over every point that carries one.
    double solution_rel_error(int channel = 0) const;

    // Current predictions / residuals in the assembler's internal point
    // order; `order()[j]` maps internal column j to the CollocationSet index.
    Vector predictions(int channel = 0) const;
    Vector residual_values(int channel = 0) const;
    const std::vector<Eigen::Index>& order() const { return order_; }

    Tape& tape() { return tape_; }
    int total_node() const { return n_total_; }
    Eigen::Index n_network() const { return n_network_; }
    Eigen::Index n_physical() const { return n_physical_; }
    const LossBreakdown& breakdown() const { return breakdown_; }

private:
    void build_graph(const CollocationSet& points);

    ModelSpec model_;
    NetworkShape shape_;
    WeightConfig weights_;
    int K_, K0_;

    Tape tape_;
    std::vector<Eigen::Index> order_; // internal column -> CollocationSet index
    Eigen::Index n_left_ = 0, n_right_ = 0, n_initial_ = 0, n_interior_ = 0;
    Eigen::Index n_points_ = 0, n_supervised_ = 0;
    Eigen::Index n_network_ = 0, n_physical_ = 0;

    // node handles
    std::vector<int> weight_leaves_, bias_leaves_, physical_leaves_;
    std::vector<int> physical_value_nodes_;
    int n_output_ = -1; // out_dim x 4M jet of the output layer
    std::vector<int> n_residual_;
    int n_bc_sum_ = -1, n_ic_sum_ = -1, n_data_sum_ = -1, n_res_sum_ = -1, n_reg_sum_ = -1;
    int w_bc_ = -1, w_ic_ = -1, w_data_ = -1, w_res_ = -1;
    int n_total_ = -1;
    std::vector<int> data_ref_inputs_;

    LossBreakdown breakdown_;
    std::vector<Matrix> reference_rows_; // per channel, internal order
    std::vector<std::uint8_t> has_ref_internal_;
};

} // namespace pinnverse

#endif
