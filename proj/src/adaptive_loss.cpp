#include "pinnverse/adaptive_loss.hpp"

#include <cmath>
#include <numeric>

namespace pinnverse {

void WeightConfig::validate() const {
    if (eta_bc < 0.0 || eta_ic < 0.0 || eta_u < 0.0)
        throw config_error("category weights must be non-negative");
    if (iota < 0.0) throw config_error("regularisation weight must be non-negative");
}

double ramp(int k, int K, int K0) {
    if (K <= K0 || K0 < 0) throw config_error("ramp needs K > K0 >= 0");
    if (k <= K0) return 0.0; // hard gate below the threshold epoch
    const double s = 10.0 * (static_cast<double>(k) - 0.5 * K - K0) / K;
    return 0.5 * (std::tanh(s) + 1.0);
}

double raw_weight(PointTag tag, int k, const WeightConfig& cfg, int K, int K0,
                  bool has_reference) {
    switch (tag) {
    case PointTag::BoundaryLeft:
    case PointTag::BoundaryRight:
        return cfg.eta_bc;
    case PointTag::Initial:
        return cfg.eta_ic;
    case PointTag::Collocation:
        return has_reference ? ramp(k, K, K0) * cfg.eta_u : 0.0;
    }
    return 0.0;
}

std::vector<double> normalize(const std::vector<double>& raw) {
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (!(total > 0.0)) throw config_error("cannot normalize all-zero weights");
    std::vector<double> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / total;
    return out;
}

// ---------------------------------------------------------------------------

LossAssembler::LossAssembler(const ModelSpec& model, const NetworkShape& shape,
                             const CollocationSet& points, const WeightConfig& weights,
                             int K, int K0)
    : model_(model), shape_(shape), weights_(weights), K_(K), K0_(K0) {
    model_.validate();
    shape_.validate();
    weights_.validate();
    points.validate();
    if (K_ <= K0_ || K0_ < 0) throw config_error("loss graph needs K > K0 >= 0");
    if (points.channels != model_.channels())
        throw contract_violation("collocation channels do not match the model");
    if (shape_.out_dim != model_.channels())
        throw contract_violation("network output width does not match the model channels");
    if (weights_.iota > 0.0)
        for (const auto& name : model_.parameter_names())
            if (weights_.theta0_ref.find(name) == weights_.theta0_ref.end())
                throw config_error("regularisation needs a reference value for '" + name + "'");

    n_network_ = shape_.parameter_count();
    n_physical_ = static_cast<Eigen::Index>(model_.parameter_names().size());
    build_graph(points);
}

void LossAssembler::build_graph(const CollocationSet& points) {
    const Eigen::Index M = points.size();
    n_points_ = M;

    // category-contiguous internal order: [left | right | initial | interior]
    order_.clear();
    order_.reserve(static_cast<size_t>(M));
    for (PointTag want :
         {PointTag::BoundaryLeft, PointTag::BoundaryRight, PointTag::Initial,
          PointTag::Collocation})
        for (Eigen::Index i = 0; i < M; ++i)
            if (points.tags[static_cast<size_t>(i)] == want) order_.push_back(i);
    n_left_ = points.count(PointTag::BoundaryLeft);
    n_right_ = points.count(PointTag::BoundaryRight);
    n_initial_ = points.count(PointTag::Initial);
    n_interior_ = points.count(PointTag::Collocation);

    n_supervised_ = 0;
    for (Eigen::Index i = 0; i < M; ++i)
        if (points.tags[static_cast<size_t>(i)] == PointTag::Collocation &&
            points.has_reference[static_cast<size_t>(i)])
            ++n_supervised_;

    const int channels = model_.channels();
    reference_rows_.assign(static_cast<size_t>(channels), Matrix::Zero(1, M));
    has_ref_internal_.assign(static_cast<size_t>(M), 0);
    for (Eigen::Index j = 0; j < M; ++j) {
        const Eigen::Index src = order_[static_cast<size_t>(j)];
        has_ref_internal_[static_cast<size_t>(j)] = points.has_reference[static_cast<size_t>(src)];
        for (int c = 0; c < channels; ++c)
            reference_rows_[static_cast<size_t>(c)](0, j) =
                points.reference[static_cast<size_t>(c)](0, src);
    }

    // --- leaves ---------------------------------------------------------
    Eigen::Index offset = 0;
    for (int l = 1; l <= shape_.depth; ++l) {
        const int rows = shape_.layer_width(l);
        const int cols = shape_.layer_width(l - 1);
        weight_leaves_.push_back(tape_.leaf(Matrix::Zero(rows, cols), {LeafTarget::Network, offset}));
        offset += static_cast<Eigen::Index>(rows) * cols;
        bias_leaves_.push_back(tape_.leaf(Matrix::Zero(rows, 1), {LeafTarget::Network, offset}));
        offset += rows;
    }
    const auto names = model_.parameter_names();
    for (Eigen::Index i = 0; i < n_physical_; ++i) {
        physical_leaves_.push_back(tape_.leaf(Matrix::Zero(1, 1), {LeafTarget::Physical, i}));
        physical_value_nodes_.push_back(tape_.expn(physical_leaves_.back()));
    }

    // --- input jet of the coordinate layer ------------------------------
    // column blocks of width M: [ (x,t) | d/dx | d/dt | d2/dx2 ]
    Matrix X0 = Matrix::Zero(2, 4 * M);
    for (Eigen::Index j = 0; j < M; ++j) {
        const Eigen::Index src = order_[static_cast<size_t>(j)];
        X0(0, j) = points.x[static_cast<size_t>(src)];
        X0(1, j) = points.t[static_cast<size_t>(src)];
    }
    X0.block(0, M, 1, M).setOnes();     // dx/dx
    X0.block(1, 2 * M, 1, M).setOnes(); // dt/dt
    int z = tape_.input(X0);

    for (int l = 1; l <= shape_.depth; ++l) {
        z = tape_.affine(weight_leaves_[static_cast<size_t>(l - 1)],
                         bias_leaves_[static_cast<size_t>(l - 1)], z, static_cast<int>(M));
        if (l < shape_.depth) z = tape_.tanh_jet(z, static_cast<int>(M));
    }
    n_output_ = z;

    // per-channel jet rows
    const auto Mi = static_cast<int>(M);
    auto row = [&](int c, int block) {
        return tape_.slice(n_output_, c, 1, block * Mi, Mi);
    };
    std::vector<int> u_row(static_cast<size_t>(channels)), ux_row(static_cast<size_t>(channels)),
        ut_row(static_cast<size_t>(channels)), uxx_row(static_cast<size_t>(channels));
    for (int c = 0; c < channels; ++c) {
        u_row[static_cast<size_t>(c)] = row(c, 0);
        ux_row[static_cast<size_t>(c)] = row(c, 1);
        ut_row[static_cast<size_t>(c)] = row(c, 2);
        uxx_row[static_cast<size_t>(c)] = row(c, 3);
    }

    // --- model residual over every point --------------------------------
    auto param_node = [&](const std::string& name) {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return physical_value_nodes_[i];
        throw config_error("model parameter '" + name + "' is missing from the graph");
    };
    n_residual_.clear();
    switch (model_.kind) {
    case ModelKind::Heat: {
        const int diffusion = tape_.scalar_mul(param_node("D"), uxx_row[0]);
        n_residual_.push_back(tape_.sub(ut_row[0], diffusion));
        break;
    }
    case ModelKind::Adr: {
        int r = tape_.scale(ut_row[0], model_.beta);
        r = tape_.add(r, tape_.scalar_mul(param_node("V"), ux_row[0]));
        r = tape_.sub(r, tape_.scalar_mul(param_node("D"), uxx_row[0]));
        if (model_.reaction.kind == Reaction::Kind::Linear)
            r = tape_.sub(r, tape_.scale(u_row[0], model_.reaction.sigma0));
        n_residual_.push_back(r);
        break;
    }
    case ModelKind::MobileImmobile: {
        const int exchange =
            tape_.scalar_mul(param_node("lambda"), tape_.sub(u_row[1], u_row[0]));
        int ru = tape_.scale(ut_row[0], model_.beta0);
        ru = tape_.add(ru, tape_.scalar_mul(param_node("V"), ux_row[0]));
        ru = tape_.sub(ru, tape_.scalar_mul(param_node("D"), uxx_row[0]));
        ru = tape_.sub(ru, exchange);
        const int rv = tape_.add(tape_.scale(ut_row[1], model_.beta1), exchange);
        n_residual_.push_back(ru);
        n_residual_.push_back(rv);
        break;
    }
    }
    int res_sum = tape_.sq_sum(n_residual_[0]);
    for (size_t c = 1; c < n_residual_.size(); ++c)
        res_sum = tape_.add(res_sum, tape_.sq_sum(n_residual_[c]));
    n_res_sum_ = res_sum;

    // --- category sums ---------------------------------------------------
    const int nL = static_cast<int>(n_left_), nR = static_cast<int>(n_right_),
              nI = static_cast<int>(n_initial_), nInt = static_cast<int>(n_interior_);

    // left boundary: u - g(t); right boundary: u_x (homogeneous Neumann)
    Matrix g_row(1, nL);
    for (int j = 0; j < nL; ++j)
        g_row(0, j) = model_.left.g(points.t[static_cast<size_t>(order_[static_cast<size_t>(j)])]);
    const int left_mismatch =
        tape_.sub(tape_.slice(u_row[0], 0, 1, 0, nL), tape_.input(g_row));
    const int right_mismatch = tape_.slice(ux_row[0], 0, 1, nL, nR);
    n_bc_sum_ = tape_.add(tape_.sq_sum(left_mismatch), tape_.sq_sum(right_mismatch));

    // zero initial data on every channel
    int ic = tape_.sq_sum(tape_.slice(u_row[0], 0, 1, nL + nR, nI));
    for (int c = 1; c < channels; ++c)
        ic = tape_.add(ic, tape_.sq_sum(tape_.slice(u_row[static_cast<size_t>(c)], 0, 1, nL + nR, nI)));
    n_ic_sum_ = ic;

    // interior data misfit; the immobile channel joins when supervised
    data_ref_inputs_.clear();
    const bool masked = n_supervised_ != n_interior_;
    Matrix mask_row(1, nInt);
    if (masked)
        for (int j = 0; j < nInt; ++j)
            mask_row(0, j) = has_ref_internal_[static_cast<size_t>(nL + nR + nI + j)] ? 1.0 : 0.0;
    auto misfit = [&](int c) {
        Matrix ref = reference_rows_[static_cast<size_t>(c)].middleCols(nL + nR + nI, nInt);
        if (masked) ref = ref.cwiseProduct(mask_row);
        const int ref_in = tape_.input(ref);
        data_ref_inputs_.push_back(ref_in);
        int pred = tape_.slice(u_row[static_cast<size_t>(c)], 0, 1, nL + nR + nI, nInt);
        if (masked) pred = tape_.mul(pred, tape_.input(mask_row));
        return tape_.sq_sum(tape_.sub(pred, ref_in));
    };
    int data = misfit(0);
    if (channels == 2 && weights_.supervise_immobile) data = tape_.add(data, misfit(1));
    n_data_sum_ = data;

    // pull toward reference parameter values (off unless iota > 0)
    if (weights_.iota > 0.0) {
        int reg = -1;
        for (size_t i = 0; i < names.size(); ++i) {
            Matrix target(1, 1);
            target(0, 0) = weights_.theta0_ref.at(names[i]);
            const int d = tape_.sub(physical_value_nodes_[i], tape_.input(target));
            const int sq = tape_.sq_sum(d);
            reg = reg < 0 ? sq : tape_.add(reg, sq);
        }
        n_reg_sum_ = reg;
    }

    // --- weighted total --------------------------------------------------
    Matrix zero(1, 1);
    zero.setZero();
    w_bc_ = tape_.input(zero);
    w_ic_ = tape_.input(zero);
    w_data_ = tape_.input(zero);
    w_res_ = tape_.input(zero);
    int total = tape_.scalar_mul(w_bc_, n_bc_sum_);
    total = tape_.add(total, tape_.scalar_mul(w_ic_, n_ic_sum_));
    total = tape_.add(total, tape_.scalar_mul(w_data_, n_data_sum_));
    total = tape_.add(total, tape_.scalar_mul(w_res_, n_res_sum_));
    if (n_reg_sum_ >= 0) total = tape_.add(total, tape_.scale(n_reg_sum_, weights_.iota));
    n_total_ = total;
}

LossAssembler::CategoryWeights LossAssembler::category_weights(double nu) const {
    const double Z = static_cast<double>(n_left_ + n_right_) * weights_.eta_bc +
                     static_cast<double>(n_initial_) * weights_.eta_ic +
                     static_cast<double>(n_supervised_) * nu * weights_.eta_u + 1.0;
    CategoryWeights w;
    w.bc = weights_.eta_bc / Z;
    w.ic = weights_.eta_ic / Z;
    w.data = nu * weights_.eta_u / Z;
    w.residual = 1.0 / Z;
    return w;
}

const LossBreakdown& LossAssembler::forward(const NetworkParams& net,
                                            const PhysicalParams& physical, double nu) {
    if (!net.matches(shape_))
        throw contract_violation("loss forward: network does not match the shape");
    if (physical.names != model_.parameter_names())
        throw contract_violation("loss forward: physical parameter names must match the "
                                 "model's declaration order");
    for (int l = 0; l < shape_.depth; ++l) {
        tape_.set_leaf(weight_leaves_[static_cast<size_t>(l)], net.weights[static_cast<size_t>(l)]);
        tape_.leaf_value(bias_leaves_[static_cast<size_t>(l)]).col(0) =
            net.biases[static_cast<size_t>(l)];
    }
    for (Eigen::Index i = 0; i < n_physical_; ++i)
        tape_.leaf_value(physical_leaves_[static_cast<size_t>(i)])(0, 0) = physical.raw[i];

    const CategoryWeights w = category_weights(nu);
    tape_.set_input_scalar(w_bc_, w.bc);
    tape_.set_input_scalar(w_ic_, w.ic);
    tape_.set_input_scalar(w_data_, w.data);
    tape_.set_input_scalar(w_res_, w.residual);

    tape_.replay();

    breakdown_ = LossBreakdown{};
    breakdown_.bc = {w.bc * tape_.scalar(n_bc_sum_), tape_.scalar(n_bc_sum_)};
    breakdown_.ic = {w.ic * tape_.scalar(n_ic_sum_), tape_.scalar(n_ic_sum_)};
    breakdown_.data = {w.data * tape_.scalar(n_data_sum_), tape_.scalar(n_data_sum_)};
    breakdown_.residual = {w.residual * tape_.scalar(n_res_sum_), tape_.scalar(n_res_sum_)};
    if (n_reg_sum_ >= 0)
        breakdown_.regulariser = {weights_.iota * tape_.scalar(n_reg_sum_),
                                  tape_.scalar(n_reg_sum_)};
    breakdown_.weighted_total = tape_.scalar(n_total_);
    if (!std::isfinite(breakdown_.weighted_total))
        throw numeric_fault("weighted loss is not finite");
    return breakdown_;
}

void LossAssembler::gradients(GradientVector& out) {
    out.setZero(n_network_, n_physical_);
    tape_.reverse(n_total_, out);
}

Vector LossAssembler::predictions(int channel) const {
    const Matrix& out = tape_.value(n_output_);
    return out.block(channel, 0, 1, n_points_).transpose();
}

Vector LossAssembler::residual_values(int channel) const {
    return tape_.value(n_residual_[static_cast<size_t>(channel)]).row(0).transpose();
}

double LossAssembler::solution_rel_error(int channel) const {
    const Vector pred = predictions(channel);
    const Matrix& ref = reference_rows_[static_cast<size_t>(channel)];
    double num = 0.0, den = 0.0;
    for (Eigen::Index j = 0; j < n_points_; ++j) {
        if (!has_ref_internal_[static_cast<size_t>(j)]) continue;
        const double d = pred[j] - ref(0, j);
        num += d * d;
        den += ref(0, j) * ref(0, j);
    }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

} // namespace pinnverse
