#ifndef INITLAB_OPTIMIZE_HPP
#define INITLAB_OPTIMIZE_HPP

#include "initlab/data.hpp"
#include "initlab/model.hpp"
#include "initlab/optimize_types.hpp"

namespace initlab {

// RNG stream ids per seed: 0 init, 1 minibatch sampling, 2 noise probe.
inline constexpr std::uint64_t kStreamInit = 0;
inline constexpr std::uint64_t kStreamMinibatch = 1;
inline constexpr std::uint64_t kStreamNoiseProbe = 2;

MlpModel init_gaussian(const std::vector<int>& dims, double sigma0, bool biases_enabled,
                       RngState& rng);

// Weights N(0, 2/fan_in) per layer, biases zero.
MlpModel init_he_normal(const std::vector<int>& dims, bool biases_enabled, RngState& rng);

// b distinct indices from [0, n), uniform over subsets (partial Fisher-Yates).
std::vector<int> sample_minibatch(int n, int b, RngState& rng);

void sgd_step(MlpModel& model, const Gradient& grad, double alpha);

Batch gather_batch(const Dataset& ds, const std::vector<int>& indices);

RunRecord train(const TrainConfig& config, const Dataset& train_set, const Dataset& val_set,
                std::uint64_t seed);

}  // namespace initlab

#endif
