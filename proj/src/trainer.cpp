#include "pinnverse/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace pinnverse {

void TrainingConfig::validate() const {
    if (epochs < 1) throw config_error("epoch count must be positive");
    if (threshold_epoch < 0 || threshold_epoch >= epochs)
        throw config_error("threshold epoch must lie in [0, epochs)");
    if (!(alpha0 > 0.0)) throw config_error("learning rate must be positive");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0))
        throw config_error("learning-rate decay must lie in (0, 1]");
    if (lr_step < 1) throw config_error("learning-rate step must be positive");
    if (!(gamma > 0.0)) throw config_error("physical gradient scale must be positive");
    if (convergence_patience < 1) throw config_error("convergence patience must be positive");
    if (log_every < 1) throw config_error("log interval must be positive");
}

double learning_rate(int k, double alpha0, double decay, int step) {
    if (k < 0) throw contract_violation("learning_rate: negative epoch");
    return alpha0 * std::pow(decay, static_cast<double>(k / step));
}

void scale_physical_gradients(GradientVector& grads, int k, double gamma, int K, int K0) {
    grads.wrt_physical *= gamma * ramp(k, K, K0);
}

AdamState::AdamState(Eigen::Index n, double b1, double b2, double e)
    : m(Vector::Zero(n)), v(Vector::Zero(n)), beta1(b1), beta2(b2), eps(e) {}

void AdamState::step(Vector& params, const Vector& grads, double alpha) {
    if (params.size() != m.size() || grads.size() != m.size())
        throw contract_violation("adam: parameter/gradient size does not match the state");
    if (!grads.allFinite()) throw numeric_fault("adam: non-finite gradient");
    ++steps;
    m = beta1 * m + (1.0 - beta1) * grads;
    v = beta2 * v + (1.0 - beta2) * grads.cwiseProduct(grads);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
    params.array() -=
        alpha * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

const EpochRecord& RunHistory::final_record() const {
    if (records.empty()) throw contract_violation("history is empty");
    return records.back();
}

void save_history_csv(const std::string& path, const RunHistory& history) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open history for writing: " + path);
    out << "epoch,lr,nu,weighted_total,bc_w,bc_u,ic_w,ic_u,data_w,data_u,res_w,res_u,"
           "reg_w,reg_u,grad_inf_net,grad_inf_phys,solution_rel_err";
    for (const auto& name : history.param_names) out << ",theta_" << name << ",relerr_" << name;
    out << "\n";
    char buf[40];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    for (const EpochRecord& r : history.records) {
        out << r.epoch << "," << fmt(r.lr) << "," << fmt(r.nu) << ","
            << fmt(r.loss.weighted_total) << "," << fmt(r.loss.bc.weighted) << ","
            << fmt(r.loss.bc.unweighted) << "," << fmt(r.loss.ic.weighted) << ","
            << fmt(r.loss.ic.unweighted) << "," << fmt(r.loss.data.weighted) << ","
            << fmt(r.loss.data.unweighted) << "," << fmt(r.loss.residual.weighted) << ","
            << fmt(r.loss.residual.unweighted) << "," << fmt(r.loss.regulariser.weighted) << ","
            << fmt(r.loss.regulariser.unweighted) << "," << fmt(r.grad_inf_network) << ","
            << fmt(r.grad_inf_physical) << "," << fmt(r.solution_rel_err);
        for (size_t i = 0; i < history.param_names.size(); ++i)
            out << "," << fmt(r.theta[i]) << "," << fmt(r.theta_rel_err[i]);
        out << "\n";
    }
    if (!out) throw config_error("short write: " + path);
}

RunHistory train(const ModelSpec& model, const NetworkShape& shape, NetworkParams& net,
                 PhysicalParams& physical, const CollocationSet& points,
                 const TrainingConfig& cfg, const WeightConfig& weights,
                 const std::map<std::string, double>& truth, const ProgressFn& progress) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    LossAssembler assembler(model, shape, points, weights, cfg.epochs, cfg.threshold_epoch);
    const Eigen::Index n_net = assembler.n_network();
    const Eigen::Index n_phys = assembler.n_physical();

    // which physical entries move (all by default)
    Vector phys_mask = Vector::Ones(n_phys);
    if (!cfg.trainable.empty()) {
        phys_mask.setZero();
        for (const auto& name : cfg.trainable) phys_mask[physical.index(name)] = 1.0;
    }

    RunHistory history;
    history.param_names = physical.names;
    history.stop_reason = "epochs";

    AdamState adam(n_net + n_phys, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    Vector flat(n_net + n_phys);
    GradientVector grads;
    Vector prev_flat;
    int stall_run = 0;

    auto make_record = [&](int k, double lr, double nu, const LossBreakdown& loss,
                           const GradientVector& g) {
        EpochRecord rec;
        rec.epoch = k;
        rec.lr = lr;
        rec.nu = nu;
        rec.loss = loss;
        rec.grad_inf_network = g.wrt_network.size() ? g.wrt_network.lpNorm<Eigen::Infinity>() : 0.0;
        rec.grad_inf_physical =
            g.wrt_physical.size() ? g.wrt_physical.lpNorm<Eigen::Infinity>() : 0.0;
        rec.solution_rel_err = assembler.solution_rel_error(0);
        for (Eigen::Index i = 0; i < n_phys; ++i) {
            const double value = physical.value(i);
            rec.theta.push_back(value);
            const auto it = truth.find(physical.names[static_cast<size_t>(i)]);
            rec.theta_rel_err.push_back(
                it != truth.end() && it->second != 0.0
                    ? std::abs(value - it->second) / std::abs(it->second)
                    : std::numeric_limits<double>::quiet_NaN());
        }
        return rec;
    };

    for (int k = 1; k <= cfg.epochs; ++k) {
        const double lr = learning_rate(k - 1, cfg.alpha0, cfg.lr_decay, cfg.lr_step);
        // direct solves never open the data ramp: the field comes from
        // physics alone, matching the parameter-training gate
        const double nu =
            cfg.train_parameters ? ramp(k, cfg.epochs, cfg.threshold_epoch) : 0.0;

        LossBreakdown loss;
        try {
            loss = assembler.forward(net, physical, nu);
            assembler.gradients(grads);
            if (cfg.train_parameters)
                scale_physical_gradients(grads, k, cfg.gamma, cfg.epochs, cfg.threshold_epoch);
            else
                grads.wrt_physical.setZero();
            grads.wrt_physical.array() *= phys_mask.array();

            flat << net.flatten(), physical.raw;
            Vector gflat(n_net + n_phys);
            gflat << grads.wrt_network, grads.wrt_physical;
            adam.step(flat, gflat, lr);
            net.unflatten(flat.head(n_net));
            physical.raw = flat.tail(n_phys);
        } catch (const numeric_fault& e) {
            history.stop_reason = e.what();
            history.epochs_run = k;
            break;
        }

        history.epochs_run = k;
        history.records.push_back(make_record(k, lr, nu, loss, grads));
        if (progress && (k == 1 || k == cfg.epochs || k % cfg.log_every == 0) &&
            !progress(history.records.back())) {
            history.stop_reason = "callback";
            break;
        }

        if (loss.weighted_total < cfg.convergence_loss) {
            history.converged = true;
            history.stop_reason = "loss";
            break;
        }
        if (prev_flat.size()) {
            const double denom = std::max(prev_flat.norm(), 1e-30);
            if ((flat - prev_flat).norm() / denom < cfg.convergence_delta)
                ++stall_run;
            else
                stall_run = 0;
            if (stall_run >= cfg.convergence_patience) {
                history.converged = true;
                history.stop_reason = "stall";
                break;
            }
        }
        prev_flat = flat;
    }

    history.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return history;
}

} // namespace pinnverse
