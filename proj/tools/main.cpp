// Command-line front end: run single experiments, seed sweeps, reference
// solves, and config validation.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "pinnverse/experiment.hpp"

using namespace pinnverse;

namespace {

struct ConfigSource {
    std::string builtin;
    std::string path;

    ExperimentConfig load() const {
        if (!builtin.empty() && !path.empty())
            throw config_error("pass either --experiment or --config, not both");
        if (!builtin.empty()) return builtin_experiment(builtin);
        if (!path.empty()) return load_experiment_json(path);
        throw config_error("one of --experiment or --config is required");
    }
};

struct Overrides {
    std::optional<int> epochs;
    std::optional<double> subsample;
    bool relative_init = false;
    bool direct = false;

    void apply(ExperimentConfig& cfg) const {
        if (epochs) {
            cfg.training.epochs = *epochs;
            // keep the ramp schedule valid when cutting a run short
            cfg.training.threshold_epoch = std::min(cfg.training.threshold_epoch, *epochs - 1);
        }
        if (subsample) cfg.subsample = *subsample;
        if (relative_init) cfg.init_mode = PhysicalInitMode::Relative;
        if (direct) cfg.training.train_parameters = false;
    }
};

void add_source_flags(CLI::App* cmd, ConfigSource& src) {
    cmd->add_option("-e,--experiment", src.builtin,
                    "built-in experiment name (see 'list')");
    cmd->add_option("-c,--config", src.path, "experiment config (JSON)");
}

std::string default_cache_dir() {
    const char* env = std::getenv("PINNVERSE_CACHE_DIR");
    return env ? env : "";
}

void print_summary(const RunArtifacts& run) {
    std::cout << run.config.name << ": stopped (" << run.history.stop_reason << ") after "
              << run.history.epochs_run << " epochs, " << run.history.wall_seconds << " s\n";
    for (const auto& [name, value] : run.recovered)
        std::cout << "  " << name << " = " << value << "  (true "
                  << run.config.true_params.at(name) << ", rel err " << run.rel_error.at(name)
                  << ")\n";
    std::cout << "  solution rel err = " << run.solution_rel_err << "\n";
    if (!run.output_dir.empty()) std::cout << "  artifacts: " << run.output_dir << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive-weight physics-informed inversion for transport models"};
    app.require_subcommand(1);

    ConfigSource src;
    Overrides over;
    RunOptions options;
    options.cache_dir = default_cache_dir();

    std::string output_dir;
    std::uint64_t net_seed = 0, param_seed = 0;
    bool deterministic = false;
    int n_seeds = 3;
    std::string reference_out;

    auto add_run_flags = [&](CLI::App* cmd) {
        add_source_flags(cmd, src);
        cmd->add_option("-o,--output-dir", output_dir, "artifact directory");
        cmd->add_option("--cache-dir", options.cache_dir,
                        "reference-solution cache (default: $PINNVERSE_CACHE_DIR)");
        cmd->add_option("--net-seed", net_seed, "override network init seed")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--param-seed", param_seed, "override parameter init seed")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--epochs", over.epochs, "override epoch count");
        cmd->add_option("--subsample", over.subsample, "interior fraction kept for training");
        cmd->add_flag("--relative-init", over.relative_init,
                      "draw initial parameters in [0.1, 10] x truth instead of [0.1, 10]");
        cmd->add_flag("--direct", over.direct,
                      "direct problem: pin parameters at truth and fit the network "
                      "from physics alone (no data term)");
        cmd->add_flag("-q,--quiet", options.quiet, "suppress progress output");
        cmd->add_flag("--deterministic", deterministic,
                      "accepted for compatibility; runs are always single-threaded "
                      "and fully seeded");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "train one experiment");
    add_run_flags(run_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "repeat over parameter-init seeds");
    add_run_flags(sweep_cmd);
    sweep_cmd->add_option("--seeds", n_seeds, "number of seeds")->check(CLI::PositiveNumber);

    CLI::App* validate_cmd = app.add_subcommand("validate", "check a config and exit");
    add_source_flags(validate_cmd, src);

    CLI::App* ref_cmd = app.add_subcommand("solve-reference",
                                           "solve the reference problem and write it as CSV");
    add_source_flags(ref_cmd, src);
    ref_cmd->add_option("-o,--output", reference_out, "output CSV path")->required();
    ref_cmd->add_option("--cache-dir", options.cache_dir,
                        "reference-solution cache (default: $PINNVERSE_CACHE_DIR)");

    CLI::App* list_cmd = app.add_subcommand("list", "list built-in experiments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& name : builtin_experiment_names()) std::cout << name << "\n";
            return 0;
        }
        if (validate_cmd->parsed()) {
            const ExperimentConfig cfg = src.load();
            const auto problems = cfg.problems();
            if (problems.empty()) {
                std::cout << "ok: " << cfg.name << "\n";
                return 0;
            }
            for (const auto& p : problems) std::cerr << "invalid: " << p << "\n";
            return 1;
        }
        if (ref_cmd->parsed()) {
            ExperimentConfig cfg = src.load();
            cfg.validate();
            const ReferenceField ref = reference_for(cfg, options.cache_dir, /*quiet=*/false);
            save_reference_csv(reference_out, ref);
            std::cout << "wrote " << reference_out << "\n";
            return 0;
        }

        ExperimentConfig cfg = src.load();
        over.apply(cfg);
        if (!output_dir.empty()) options.output_dir = output_dir;
        if (net_seed != 0) options.net_seed = net_seed;
        if (param_seed != 0) options.param_seed = param_seed;
        (void)deterministic;

        if (run_cmd->parsed()) {
            print_summary(run_experiment(cfg, options));
            return 0;
        }
        if (sweep_cmd->parsed()) {
            const SweepResult sweep = run_sweep(cfg, n_seeds, options);
            for (const RunArtifacts& run : sweep.runs) print_summary(run);
            std::cout << "worst relative errors over " << sweep.runs.size() << " seeds:\n";
            for (const auto& [name, err] : sweep.worst_rel_error)
                std::cout << "  " << name << " = " << err << "\n";
            return 0;
        }
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
