#ifndef INITLAB_STATS_HPP
#define INITLAB_STATS_HPP

#include <vector>

#include "initlab/model.hpp"
#include "initlab/optimize_types.hpp"
#include "initlab/tensor.hpp"

namespace initlab {

struct WeightMoments {
    double vbar = 0.0;          // uncentered second moment, ||W||^2 / K
    double mean_norm_sq = 0.0;  // (sum w_i / K)^2 * K, the ||E[W]||^2 proxy
    double centered_var = 0.0;  // vbar - mean^2
};

// Pooled over all trainable parameters (all layers, biases if enabled).
WeightMoments weight_second_moment(const MlpModel& model);

// Isotropic gradient-noise proxy tr(Sigma_hat)/K at the current parameters,
// estimated from n_probe per-example gradients.
double estimate_noise_scale(const MlpModel& model, const Matrix& inputs,
                            const std::vector<int>& labels, int n_probe, RngState& rng);

struct RunAggregate {
    std::vector<int> epochs;
    std::vector<double> train_loss_mean, train_loss_std;
    std::vector<double> val_loss_mean, val_loss_std;
    std::vector<double> val_acc_mean, val_acc_std;
    std::vector<double> vbar_mean, vbar_std;
    bool degenerate_std = false;  // only one record, std is identically 0
    double final_loss_mean = 0.0, final_loss_std = 0.0;
    double final_vbar_mean = 0.0;
    double final_acc_mean = 0.0;
};

RunAggregate aggregate_runs(const std::vector<RunRecord>& records);

double steady_state_ratio(double final_vbar, double sigma0_sq);

}  // namespace initlab

#endif
