#ifndef INITLAB_OPTIMIZE_TYPES_HPP
#define INITLAB_OPTIMIZE_TYPES_HPP

#include <cstdint>
#include <vector>

namespace initlab {

enum class InitScheme { Gaussian, HeNormal };

struct TrainConfig {
    double alpha = 1e-4;
    int batch_size = 100;
    int epochs = 100;
    double sigma0 = 0.1;
    InitScheme init_scheme = InitScheme::Gaussian;
    std::vector<int> hidden_dims = {128, 128};
    bool biases_enabled = false;
    int record_every = 1;
};

struct Snapshot {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double vbar = 0.0;
    double mean_norm_sq = 0.0;
    double centered_var = 0.0;
};

struct RunRecord {
    std::uint64_t seed = 0;
    double sigma0 = 0.0;
    std::vector<Snapshot> series;
    std::size_t param_count = 0;
    double final_vbar = 0.0;
    bool diverged = false;
};

}  // namespace initlab

#endif
