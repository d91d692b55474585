// Python bindings for the main operations: reference solves, training runs,
// checkpoint evaluation, and the two schedules worth sanity-checking from
// notebooks.

#include <algorithm>
#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pinnverse/experiment.hpp"

namespace py = pybind11;
using namespace pinnverse;

namespace {

ExperimentConfig resolve_config(const std::string& source) {
    const auto names = builtin_experiment_names();
    if (std::find(names.begin(), names.end(), source) != names.end())
        return builtin_experiment(source);
    return load_experiment_json(source);
}

py::dict summary_dict(const RunArtifacts& run) {
    py::dict d;
    d["name"] = run.config.name;
    d["recovered"] = run.recovered;
    d["true_params"] = run.config.true_params;
    d["rel_error"] = run.rel_error;
    d["solution_rel_err"] = run.solution_rel_err;
    d["epochs_run"] = run.history.epochs_run;
    d["converged"] = run.history.converged;
    d["stop_reason"] = run.history.stop_reason;
    d["wall_seconds"] = run.history.wall_seconds;
    d["output_dir"] = run.output_dir;
    return d;
}

} // namespace

PYBIND11_MODULE(_pinnverse, m) {
    m.doc() = "adaptive-weight physics-informed inversion for transport models";

    py::register_exception<config_error>(m, "ConfigError");
    py::register_exception<numeric_fault>(m, "NumericFault");

    m.def("builtin_names", &builtin_experiment_names,
          "names accepted by run()/solve_reference() besides config paths");

    m.def(
        "config_problems",
        [](const std::string& path) { return load_experiment_json(path).problems(); },
        py::arg("path"), "validation problems for a config file; empty means valid");

    m.def("ramp", &ramp, py::arg("epoch"), py::arg("total_epochs"), py::arg("threshold_epoch"),
          "residual activation factor nu(k): 0 through the threshold, then a "
          "tanh ramp to 1");

    m.def("staircase_lr", &learning_rate, py::arg("epoch"), py::arg("alpha0"), py::arg("decay"),
          py::arg("step") = 100, "alpha0 * decay^floor(epoch/step)");

    m.def(
        "solve_reference",
        [](const std::string& source, const std::string& cache_dir) {
            ExperimentConfig cfg = resolve_config(source);
            cfg.validate();
            const ReferenceField ref = reference_for(cfg, cache_dir);
            py::dict d;
            Vector x(ref.field.nx), t(ref.field.nt);
            for (int i = 0; i < ref.field.nx; ++i) x[i] = ref.field.x_of(i);
            for (int n = 0; n < ref.field.nt; ++n) t[n] = ref.field.t_of(n);
            d["x"] = x;
            d["t"] = t;
            d["u"] = ref.field.values[0]; // (nt, nx)
            if (ref.field.channels() == 2) d["v"] = ref.field.values[1];
            return d;
        },
        py::arg("source"), py::arg("cache_dir") = std::string{},
        "sampled reference solution for a builtin name or config path");

    m.def(
        "predict",
        [](const std::string& checkpoint, const Vector& x, const Vector& t) {
            if (x.size() != t.size())
                throw config_error("predict: x and t must have the same length");
            const auto [shape, net] = load_checkpoint(checkpoint);
            Matrix out(x.size(), shape.out_dim);
            for (Eigen::Index i = 0; i < x.size(); ++i)
                out.row(i) = evaluate(shape, net, x[i], t[i]).transpose();
            return out;
        },
        py::arg("checkpoint"), py::arg("x"), py::arg("t"),
        "evaluate a saved network at points (x_i, t_i); returns (n, channels)");

    m.def(
        "run",
        [](const std::string& source, std::optional<int> epochs, std::optional<double> subsample,
           const std::string& output_dir, const std::string& cache_dir,
           std::optional<std::uint64_t> net_seed, std::optional<std::uint64_t> param_seed,
           bool relative_init, bool direct, bool quiet) {
            ExperimentConfig cfg = resolve_config(source);
            if (epochs) {
                cfg.training.epochs = *epochs;
                // keep the ramp schedule valid when cutting a run short
                cfg.training.threshold_epoch =
                    std::min(cfg.training.threshold_epoch, *epochs - 1);
            }
            if (subsample) cfg.subsample = *subsample;
            if (relative_init) cfg.init_mode = PhysicalInitMode::Relative;
            if (direct) cfg.training.train_parameters = false;
            RunOptions options;
            if (!output_dir.empty()) options.output_dir = output_dir;
            options.cache_dir = cache_dir;
            options.net_seed = net_seed;
            options.param_seed = param_seed;
            options.quiet = quiet;
            return summary_dict(run_experiment(cfg, options));
        },
        py::arg("source"), py::arg("epochs") = std::nullopt, py::arg("subsample") = std::nullopt,
        py::arg("output_dir") = std::string{}, py::arg("cache_dir") = std::string{},
        py::arg("net_seed") = std::nullopt, py::arg("param_seed") = std::nullopt,
        py::arg("relative_init") = false, py::arg("direct") = false, py::arg("quiet") = true,
        "train an experiment and return its summary");
}
