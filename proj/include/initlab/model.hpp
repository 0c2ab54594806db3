#ifndef INITLAB_MODEL_HPP
#define INITLAB_MODEL_HPP

#include <vector>

#include "initlab/tensor.hpp"

namespace initlab {

// Fully connected ReLU network with a softmax head. Biases are optional and
// off by default.
struct MlpModel {
    std::vector<int> layer_dims;           // [d, h1, ..., M]
    std::vector<Matrix> weights;           // weights[l]: layer_dims[l] x layer_dims[l+1]
    std::vector<std::vector<double>> biases;  // empty when biases are disabled
    bool biases_enabled = false;

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    // Total trainable parameter count K.
    std::size_t param_count() const;
};

struct Batch {
    Matrix inputs;            // b x d, entries in [0,1]
    std::vector<int> labels;  // length b, each in [0, M)

    int size() const { return inputs.rows; }
};

// Same shape structure as the model's parameters.
struct Gradient {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

struct ForwardCache {
    std::vector<Matrix> activations;  // post-ReLU layer outputs, [0] = inputs
    Matrix probs;                     // b x M softmax outputs
    double mean_loss = 0.0;
};

std::vector<double> softmax(const std::vector<double>& logits);

std::vector<double> one_hot(int label, int num_classes);

double cross_entropy(const std::vector<double>& probs, int label);

ForwardCache forward(const MlpModel& model, const Batch& batch);

Gradient backward(const MlpModel& model, const Batch& batch, const ForwardCache& cache);

double accuracy(const MlpModel& model, const Batch& data);

}  // namespace initlab

#endif
