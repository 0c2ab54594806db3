#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "initlab/cli.hpp"

using namespace initlab;

namespace {

void add_dataset_flags(CLI::App* cmd, DatasetSpec& d) {
    cmd->add_flag("--synthetic,!--idx", d.synthetic,
                  "use synthetic blob data (default) or IDX files");
    cmd->add_option("--dim", d.d, "synthetic input dimension");
    cmd->add_option("--classes", d.num_classes, "synthetic class count");
    cmd->add_option("--n-per-class", d.n_per_class, "synthetic samples per class");
    cmd->add_option("--separation", d.separation, "synthetic blob center separation");
    cmd->add_option("--blob-sigma", d.blob_sigma, "synthetic blob spread");
    cmd->add_option("--data-seed", d.data_seed, "seed for data generation and split");
    cmd->add_option("--val-fraction", d.val_fraction, "validation split fraction");
    cmd->add_option("--train-images", d.train_images, "IDX training image file");
    cmd->add_option("--train-labels", d.train_labels, "IDX training label file");
    cmd->add_option("--val-images", d.val_images, "IDX validation image file");
    cmd->add_option("--val-labels", d.val_labels, "IDX validation label file");
    cmd->add_option("--subset", d.subset_n, "use only the first n training examples");
}

void add_train_flags(CLI::App* cmd, ExperimentSpec& spec) {
    cmd->add_option("--alpha", spec.train_cfg.alpha, "learning rate");
    cmd->add_option("--batch", spec.train_cfg.batch_size, "minibatch size");
    cmd->add_option("--epochs", spec.train_cfg.epochs, "training epochs");
    cmd->add_option("--sigma0", spec.train_cfg.sigma0, "initialization std");
    cmd->add_option("--hidden", spec.train_cfg.hidden_dims, "hidden layer widths");
    cmd->add_flag("--biases", spec.train_cfg.biases_enabled, "enable bias parameters");
    cmd->add_flag_function(
        "--he-init",
        [&spec](std::int64_t) { spec.train_cfg.init_scheme = InitScheme::HeNormal; },
        "use He-normal initialization");
    cmd->add_option("--record-every", spec.train_cfg.record_every,
                    "epochs between stat snapshots");
    cmd->add_option("--seeds", spec.seeds, "training seeds");
}

void add_common_flags(CLI::App* cmd, ExperimentSpec& spec) {
    cmd->add_option("--out", spec.out_dir, "output directory");
    cmd->add_flag("--plot", spec.plot, "emit SVG plots");
    cmd->add_option("--jobs", spec.jobs, "max concurrent run cells");
    cmd->set_config("--config", "", "flat key=value config file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SGD initialization-variance laboratory"};
    app.require_subcommand(1);

    ExperimentSpec spec;
    if (const char* env_seed = std::getenv("SGD_INITLAB_SEED"))
        spec.seeds = {std::strtoull(env_seed, nullptr, 10)};

    // default sigma0 grid: 12 log-spaced values in [0.01, 1.0]
    spec.sigma0_grid.clear();
    for (int i = 0; i < 12; ++i)
        spec.sigma0_grid.push_back(0.01 * std::pow(100.0, i / 11.0));

    CLI::App* train_cmd = app.add_subcommand("train", "train one model per seed");
    add_dataset_flags(train_cmd, spec.data);
    add_train_flags(train_cmd, spec);
    add_common_flags(train_cmd, spec);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "sigma0 sweep with aggregation");
    add_dataset_flags(sweep_cmd, spec.data);
    add_train_flags(sweep_cmd, spec);
    add_common_flags(sweep_cmd, spec);
    sweep_cmd->add_option("--sigma0-grid", spec.sigma0_grid, "sigma0 values, sorted ascending")
        ->expected(-1);
    sweep_cmd->add_flag("--he-baseline", spec.he_baseline, "add a He-normal baseline row");
    sweep_cmd->add_option("--noise-probe-at", spec.noise_probe_at,
                          "probe gradient noise at 'init' or 'warmup'")
        ->check(CLI::IsMember({"init", "warmup"}));

    CLI::App* langevin_cmd =
        app.add_subcommand("langevin", "verify the Gibbs stationary covariance by simulation");
    langevin_cmd->add_option("--a-diag", spec.a_diag, "diagonal of the quadratic Hessian")
        ->expected(-1);
    langevin_cmd->add_option("--alpha", spec.sim.alpha, "learning rate / time step");
    langevin_cmd->add_option("--batch", spec.sim.batch_size, "batch size b");
    langevin_cmd->add_option("--noise", spec.sim.noise_scale, "gradient-noise scale sigma^2");
    langevin_cmd->add_option("--steps", spec.sim.steps, "simulation steps");
    langevin_cmd->add_option("--burn-in", spec.sim.burn_in_fraction, "burn-in fraction");
    langevin_cmd->add_option("--sim-sigma0", spec.sim.sigma0, "initial iterate std");
    langevin_cmd->add_option("--seed", spec.sim.seed, "simulation seed");
    add_common_flags(langevin_cmd, spec);

    CLI::App* theory_cmd = app.add_subcommand("theory", "tabulate the loss bound vs sigma0^2");
    theory_cmd->add_option("--a-diag", spec.a_diag, "diagonal of the quadratic Hessian")
        ->expected(-1);
    theory_cmd->add_option("--alpha", spec.sim.alpha, "learning rate");
    theory_cmd->add_option("--batch", spec.sim.batch_size, "batch size b");
    theory_cmd->add_option("--noise", spec.sim.noise_scale, "gradient-noise scale sigma^2");
    theory_cmd->add_option("--k", spec.theory_k, "parameter count (overrides quadratic)");
    theory_cmd->add_option("--e-w-sq", spec.theory_e_w_sq, "E_ss[||W||^2] (overrides quadratic)");
    theory_cmd->add_option("--log-c", spec.theory_log_c, "log normalizer (default 0)");
    theory_cmd->add_option("--grid-points", spec.grid_points, "sigma0^2 grid size");
    theory_cmd->add_option("--grid-lo", spec.grid_lo, "sigma0^2 grid lower bound");
    theory_cmd->add_option("--grid-hi", spec.grid_hi, "sigma0^2 grid upper bound");
    add_common_flags(theory_cmd, spec);

    CLI::App* search_cmd =
        app.add_subcommand("sigma-search", "fixed-point search for sigma0^2 = vbar");
    add_dataset_flags(search_cmd, spec.data);
    add_train_flags(search_cmd, spec);
    add_common_flags(search_cmd, spec);
    search_cmd->add_option("--max-iters", spec.max_iters, "maximum search iterations");
    search_cmd->add_option("--damping", spec.damping, "update damping factor gamma");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(spec);
        if (sweep_cmd->parsed()) return cmd_sweep(spec);
        if (langevin_cmd->parsed()) return cmd_langevin(spec);
        if (theory_cmd->parsed()) return cmd_theory(spec);
        if (search_cmd->parsed()) return cmd_sigma_search(spec);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const initlab::FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternalError;
    }
    return kExitUserError;
}
