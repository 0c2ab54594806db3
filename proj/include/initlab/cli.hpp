#ifndef INITLAB_CLI_HPP
#define INITLAB_CLI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "initlab/data.hpp"
#include "initlab/langevin.hpp"
#include "initlab/optimize.hpp"

namespace initlab {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 2;
inline constexpr int kExitInternalError = 3;

struct DatasetSpec {
    bool synthetic = true;
    int d = 20;
    int num_classes = 3;
    int n_per_class = 1000;
    double separation = 6.0;
    double blob_sigma = 1.0;
    std::uint64_t data_seed = 12345;
    double val_fraction = 0.2;
    // IDX paths (used when synthetic == false)
    std::string train_images, train_labels, val_images, val_labels;
    int subset_n = 0;  // 0 = all
};

struct ExperimentSpec {
    DatasetSpec data;
    TrainConfig train_cfg;
    SimConfig sim;
    std::vector<double> a_diag = {1.0};  // diagonal quadratic Hessian for langevin/theory
    std::vector<double> sigma0_grid;
    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir = "out";
    bool plot = false;
    bool he_baseline = false;
    int jobs = 1;
    std::string noise_probe_at = "warmup";  // or "init"
    // theory command
    double theory_k = 0.0;       // 0 = derive from a_diag
    double theory_e_w_sq = 0.0;  // 0 = derive from a_diag
    double theory_log_c = 0.0;
    int grid_points = 100;
    double grid_lo = 1e-4;  // sigma0^2 grid bounds
    double grid_hi = 1e4;
    // sigma-search
    int max_iters = 10;
    double damping = 0.5;
};

Dataset build_train_set(const DatasetSpec& spec);
std::pair<Dataset, Dataset> build_datasets(const DatasetSpec& spec);

// Gradient-noise scale sigma_hat^2 at init or after a short SGD warm-up.
double probe_noise_scale(const TrainConfig& cfg, const Dataset& train_set, std::uint64_t seed,
                         bool at_init, int warmup_steps = 100, int n_probe = 1000);

int cmd_train(const ExperimentSpec& spec);
int cmd_sweep(const ExperimentSpec& spec);
int cmd_langevin(const ExperimentSpec& spec);
int cmd_theory(const ExperimentSpec& spec);
int cmd_sigma_search(const ExperimentSpec& spec);

// Deterministic shortest round-trip double formatting shared by all writers.
std::string format_double(double v);

// Minimal deterministic SVG line plot; one polyline per series.
struct PlotSeries {
    std::string name;
    std::vector<double> xs, ys;
};
void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series,
                    bool log_x = false, bool log_y = false);

}  // namespace initlab

#endif
