#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "pinnverse/experiment.hpp"

using namespace pinnverse;
namespace fs = std::filesystem;

namespace {

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
    for (const auto& p : problems)
        if (p.find(needle) != std::string::npos) return true;
    return false;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "pinnverse_exp_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("builtin hyperparameters are pinned") {
    SUBCASE("heat inversion") {
        const ExperimentConfig cfg = builtin_experiment("testcase0");
        CHECK(cfg.model.kind == ModelKind::Heat);
        CHECK(cfg.model.left.kind == LeftBc::Kind::Dirichlet);
        CHECK(cfg.model.left.value == 1.0);
        CHECK(cfg.shape.depth == 9);
        CHECK(cfg.shape.hidden_width == 20);
        CHECK(cfg.shape.parameter_count() == 3021);
        CHECK(cfg.training.epochs == 5000);
        CHECK(cfg.training.threshold_epoch == 1000);
        CHECK(cfg.training.alpha0 == 0.01);
        CHECK(cfg.training.lr_decay == 0.95);
        CHECK(cfg.training.lr_step == 100);
        CHECK(cfg.training.gamma == 0.2);
        CHECK(cfg.weights.eta_bc == 10.0);
        CHECK(cfg.weights.eta_ic == 10.0);
        CHECK(cfg.weights.eta_u == 1.0);
        CHECK(cfg.grid.nx == 496);
        CHECK(cfg.grid.nt == 2080);
        CHECK(cfg.init_mode == PhysicalInitMode::Absolute);
        CHECK(cfg.true_params.at("D") == 1.2125501791755631); // frozen draw
        CHECK_NOTHROW(cfg.validate());
    }
    SUBCASE("pulse-fed advection-dispersion inversion") {
        const ExperimentConfig cfg = builtin_experiment("testcase5");
        CHECK(cfg.model.kind == ModelKind::Adr);
        CHECK(cfg.model.beta == 1.0);
        CHECK(cfg.model.left.kind == LeftBc::Kind::Pulse);
        CHECK(cfg.model.left.duration == 0.01);
        CHECK(cfg.model.left.eps == 0.002);
        CHECK(cfg.weights.eta_u == 2.0);
        CHECK(cfg.training.epochs == 10000);
        CHECK(cfg.training.threshold_epoch == 1000);
        CHECK(cfg.training.lr_decay == 0.95);
        CHECK(cfg.shape.depth == 9);
        CHECK(cfg.true_params.at("V") == 1.2895038844355717); // frozen draws
        CHECK(cfg.true_params.at("D") == 2.4306781524517094);
        CHECK_NOTHROW(cfg.validate());
    }
    SUBCASE("mobile-immobile inversion") {
        const ExperimentConfig cfg = builtin_experiment("testcase1");
        CHECK(cfg.model.kind == ModelKind::MobileImmobile);
        CHECK(cfg.model.beta0 == 0.3);
        CHECK(cfg.model.beta1 == 0.1);
        CHECK(cfg.shape.depth == 11);
        CHECK(cfg.shape.hidden_width == 25);
        CHECK(cfg.shape.out_dim == 2);
        CHECK(cfg.shape.parameter_count() == 5977);
        CHECK(cfg.training.epochs == 10000);
        CHECK(cfg.training.threshold_epoch == 2000);
        CHECK(cfg.training.gamma == 0.1);
        CHECK(cfg.training.lr_decay == 0.98);
        CHECK(cfg.true_params.at("V") == 1.0);
        CHECK(cfg.true_params.at("D") == 0.1);
        CHECK(cfg.true_params.at("lambda") == 10.0);
        CHECK(cfg.trainable == std::vector<std::string>{"V", "D", "lambda"});
        CHECK_NOTHROW(cfg.validate());
    }
    CHECK_THROWS_AS(builtin_experiment("testcase9"), config_error);
    CHECK(builtin_experiment_names().size() == 3);
}

TEST_CASE("config validation catches field-level problems") {
    ExperimentConfig cfg = builtin_experiment("testcase0");

    cfg.training.lr_decay = 0.5;
    CHECK(mentions(cfg.problems(), "lr_decay out of (0.9,0.99)"));
    cfg.training.lr_decay = 0.95;

    cfg.grid.nx = 99;
    CHECK(mentions(cfg.problems(), "nx"));
    cfg.grid.nx = 496;

    cfg.true_params.clear();
    CHECK(mentions(cfg.problems(), "true value for parameter 'D'"));
    cfg.true_params = {{"D", -2.0}};
    CHECK(mentions(cfg.problems(), "positive"));
    cfg.true_params = {{"D", 1.0}};

    cfg.trainable = {"V"};
    CHECK(mentions(cfg.problems(), "trainable parameter 'V'"));
    cfg.trainable = {"D"};

    cfg.subsample = 0.0;
    CHECK(mentions(cfg.problems(), "subsample"));
    cfg.subsample = 1.0;

    CHECK(cfg.problems().empty());
    CHECK_NOTHROW(cfg.validate());

    // advection too strong for the grid
    ExperimentConfig adr = builtin_experiment("testcase5");
    adr.true_params["V"] = 1000.0;
    adr.true_params["D"] = 0.1;
    CHECK(mentions(adr.problems(), "Peclet"));
    CHECK_THROWS_AS(adr.validate(), config_error);
}

TEST_CASE("JSON round trip preserves every field") {
    TempDir tmp;
    ExperimentConfig cfg = builtin_experiment("testcase5");
    cfg.name = "roundtrip";
    cfg.subsample = 0.37;
    cfg.trainable = {"D"};
    cfg.init_mode = PhysicalInitMode::Relative;
    cfg.weights.iota = 0.01;
    cfg.weights.theta0_ref = {{"V", 2.0}, {"D", 0.7}};
    cfg.weights.supervise_immobile = false;
    cfg.training.net_seed = 12;
    cfg.training.param_seed = 34;
    cfg.training.log_every = 17;
    cfg.output_dir = "some/dir";

    const std::string path = (tmp.path / "cfg.json").string();
    save_experiment_json(path, cfg);
    const ExperimentConfig back = load_experiment_json(path);

    CHECK(back.name == cfg.name);
    CHECK(back.model.kind == cfg.model.kind);
    CHECK(back.model.left.kind == cfg.model.left.kind);
    CHECK(back.model.left.duration == cfg.model.left.duration);
    CHECK(back.model.left.eps == cfg.model.left.eps);
    CHECK(back.model.beta == cfg.model.beta);
    CHECK(back.true_params == cfg.true_params);
    CHECK(back.trainable == cfg.trainable);
    CHECK(back.shape.depth == cfg.shape.depth);
    CHECK(back.shape.out_dim == 1);
    CHECK(back.grid.nx == cfg.grid.nx);
    CHECK(back.grid.sample_nt == cfg.grid.sample_nt);
    CHECK(back.training.epochs == cfg.training.epochs);
    CHECK(back.training.alpha0 == cfg.training.alpha0);
    CHECK(back.training.net_seed == 12);
    CHECK(back.training.param_seed == 34);
    CHECK(back.training.log_every == 17);
    CHECK(back.weights.eta_u == cfg.weights.eta_u);
    CHECK(back.weights.iota == cfg.weights.iota);
    CHECK(back.weights.theta0_ref == cfg.weights.theta0_ref);
    CHECK(back.weights.supervise_immobile == false);
    CHECK(back.init_mode == PhysicalInitMode::Relative);
    CHECK(back.subsample == cfg.subsample);
    CHECK(back.output_dir == cfg.output_dir);
}

TEST_CASE("unknown JSON keys are rejected") {
    TempDir tmp;
    const std::string path = (tmp.path / "bad.json").string();
    {
        std::ofstream out(path);
        out << R"({"model": {"kindd": "heat"}})";
    }
    try {
        load_experiment_json(path);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("kindd") != std::string::npos);
    }
    {
        std::ofstream out(path);
        out << R"({"nam": "x"})";
    }
    CHECK_THROWS_AS(load_experiment_json(path), config_error);
    {
        std::ofstream out(path);
        out << R"({"training": {"epochs": "many"}})";
    }
    CHECK_THROWS_AS(load_experiment_json(path), config_error);
}

TEST_CASE("short run writes the full artifact set") {
    TempDir tmp;
    ExperimentConfig cfg = builtin_experiment("testcase0");
    cfg.training.epochs = 3;
    cfg.training.threshold_epoch = 1;
    cfg.subsample = 0.02;

    RunOptions options;
    options.quiet = true;
    options.cache_dir = (tmp.path / "cache").string();
    options.output_dir = (tmp.path / "run").string();

    const RunArtifacts run = run_experiment(cfg, options);
    CHECK(run.history.epochs_run == 3);
    CHECK(run.recovered.count("D") == 1);
    CHECK(run.rel_error.at("D") >= 0.0);
    CHECK(run.output_dir == options.output_dir.value());

    for (const char* name : {"config.json", "history.csv", "summary.json", "net.ckpt",
                             "profiles_x.csv", "profiles_t.csv", "param_relerr.csv",
                             "loss_curves.csv"})
        CHECK(fs::exists(tmp.path / "run" / name));

    // the reference solve landed in the cache and reloads bit-for-bit
    bool cached = false;
    for (const auto& entry : fs::directory_iterator(tmp.path / "cache")) cached |= entry.is_regular_file();
    CHECK(cached);
    const ReferenceField ref1 = reference_for(cfg, options.cache_dir);
    const ReferenceField ref2 = reference_for(cfg, options.cache_dir);
    CHECK((ref1.field.values[0] - ref2.field.values[0]).lpNorm<Eigen::Infinity>() == 0.0);

    // config round trips through the artifact copy
    const ExperimentConfig back = load_experiment_json((tmp.path / "run" / "config.json").string());
    CHECK(back.training.epochs == 3);
    CHECK(back.subsample == 0.02);
}

TEST_CASE("sweep varies the parameter seed only") {
    TempDir tmp;
    ExperimentConfig cfg = builtin_experiment("testcase0");
    cfg.training.epochs = 2;
    cfg.training.threshold_epoch = 1;
    cfg.subsample = 0.01;

    RunOptions options;
    options.quiet = true;
    options.cache_dir = (tmp.path / "cache").string();
    options.output_dir = (tmp.path / "sweep").string();

    const SweepResult sweep = run_sweep(cfg, 2, options);
    REQUIRE(sweep.runs.size() == 2);
    // different draws, identical network init
    CHECK(sweep.runs[0].history.records.front().theta[0] !=
          sweep.runs[1].history.records.front().theta[0]);
    CHECK(sweep.worst_rel_error.at("D") >=
          std::min(sweep.runs[0].rel_error.at("D"), sweep.runs[1].rel_error.at("D")));
    CHECK(fs::exists(tmp.path / "sweep" / "seed0" / "summary.json"));
    CHECK(fs::exists(tmp.path / "sweep" / "seed1" / "summary.json"));

    std::ifstream in(tmp.path / "sweep" / "sweep.csv");
    REQUIRE(in.good());
    std::string line;
    int rows = 0;
    std::getline(in, line);
    CHECK(line.find("seed") == 0);
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}
