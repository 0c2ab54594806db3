#include "initlab/model.hpp"

#include <algorithm>
#include <cmath>

namespace initlab {

namespace {

// Pairwise summation caps floating-point drift so batch-order permutations
// agree to ~1e-12.
double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

void softmax_row_inplace(double* row, int m) {
    double zmax = row[0];
    for (int j = 1; j < m; ++j) zmax = std::max(zmax, row[j]);
    if (!std::isfinite(zmax)) throw std::invalid_argument("softmax: non-finite input");
    double denom = 0.0;
    for (int j = 0; j < m; ++j) {
        row[j] = std::exp(row[j] - zmax);
        denom += row[j];
    }
    for (int j = 0; j < m; ++j) row[j] /= denom;
}

}  // namespace

std::size_t MlpModel::param_count() const {
    std::size_t k = 0;
    for (const Matrix& w : weights) k += w.size();
    for (const auto& b : biases) k += b.size();
    return k;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    for (double z : logits)
        if (!std::isfinite(z)) throw std::invalid_argument("softmax: non-finite input");
    std::vector<double> out(logits);
    softmax_row_inplace(out.data(), static_cast<int>(out.size()));
    return out;
}

std::vector<double> one_hot(int label, int num_classes) {
    if (label < 0 || label >= num_classes)
        throw std::invalid_argument("one_hot: label " + std::to_string(label) +
                                    " out of range [0, " + std::to_string(num_classes) + ")");
    std::vector<double> t(num_classes, 0.0);
    t[label] = 1.0;
    return t;
}

double cross_entropy(const std::vector<double>& probs, int label) {
    if (label < 0 || label >= static_cast<int>(probs.size()))
        throw std::invalid_argument("cross_entropy: label out of range");
    return -std::log(std::max(probs[label], 1e-300));
}

ForwardCache forward(const MlpModel& model, const Batch& batch) {
    if (batch.inputs.cols != model.input_dim())
        throw std::invalid_argument("forward: batch width does not match model input dim");
    const int n_layers = static_cast<int>(model.weights.size());
    ForwardCache cache;
    cache.activations.reserve(n_layers);
    cache.activations.push_back(batch.inputs);

    Matrix a = batch.inputs;
    for (int l = 0; l < n_layers; ++l) {
        Matrix z = matmul(a, model.weights[l]);
        if (model.biases_enabled) {
            const auto& bias = model.biases[l];
            for (int i = 0; i < z.rows; ++i)
                for (int j = 0; j < z.cols; ++j) z(i, j) += bias[j];
        }
        if (l + 1 < n_layers) {
            for (double& v : z.data) v = std::max(v, 0.0);
            cache.activations.push_back(z);
        }
        a = std::move(z);
    }

    for (int i = 0; i < a.rows; ++i) softmax_row_inplace(&a.data[static_cast<std::size_t>(i) * a.cols], a.cols);
    cache.probs = std::move(a);

    const int b = batch.size();
    std::vector<double> losses(b);
    for (int i = 0; i < b; ++i) {
        const int label = batch.labels[i];
        if (label < 0 || label >= model.output_dim())
            throw std::invalid_argument("forward: label out of range");
        losses[i] = -std::log(std::max(cache.probs(i, label), 1e-300));
    }
    cache.mean_loss = pairwise_sum(losses.data(), losses.size()) / b;
    return cache;
}

Gradient backward(const MlpModel& model, const Batch& batch, const ForwardCache& cache) {
    const int n_layers = static_cast<int>(model.weights.size());
    const int b = batch.size();
    if (cache.probs.rows != b || cache.probs.cols != model.output_dim() ||
        static_cast<int>(cache.activations.size()) != n_layers)
        throw std::invalid_argument("backward: cache does not match (model, batch)");

    Gradient grad;
    grad.weights.resize(n_layers);
    if (model.biases_enabled) grad.biases.resize(n_layers);

    // Output-layer residual (probs - one_hot)/b; mean loss already carries 1/b.
    Matrix delta = cache.probs;
    for (int i = 0; i < b; ++i) delta(i, batch.labels[i]) -= 1.0;
    for (double& v : delta.data) v /= b;

    for (int l = n_layers - 1; l >= 0; --l) {
        const Matrix& a = cache.activations[l];
        // gradW = a^T delta
        Matrix gw(model.weights[l].rows, model.weights[l].cols);
        for (int i = 0; i < b; ++i) {
            const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
            const double* drow = &delta.data[static_cast<std::size_t>(i) * delta.cols];
            for (int r = 0; r < gw.rows; ++r) {
                const double av = arow[r];
                if (av == 0.0) continue;
                double* grow = &gw.data[static_cast<std::size_t>(r) * gw.cols];
                for (int c = 0; c < gw.cols; ++c) grow[c] += av * drow[c];
            }
        }
        grad.weights[l] = std::move(gw);
        if (model.biases_enabled) {
            std::vector<double> gb(delta.cols, 0.0);
            for (int i = 0; i < b; ++i)
                for (int j = 0; j < delta.cols; ++j) gb[j] += delta(i, j);
            grad.biases[l] = std::move(gb);
        }
        if (l > 0) {
            Matrix prev = matmul_transposed(delta, model.weights[l]);
            // ReLU mask: subgradient at 0 is 0.
            for (std::size_t i = 0; i < prev.data.size(); ++i)
                if (a.data[i] <= 0.0) prev.data[i] = 0.0;
            delta = std::move(prev);
        }
    }
    return grad;
}

double accuracy(const MlpModel& model, const Batch& data) {
    if (data.size() == 0) throw std::invalid_argument("accuracy: empty batch");
    const ForwardCache cache = forward(model, data);
    int correct = 0;
    for (int i = 0; i < data.size(); ++i) {
        int best = 0;
        for (int j = 1; j < cache.probs.cols; ++j)
            if (cache.probs(i, j) > cache.probs(i, best)) best = j;  // ties go to lowest index
        if (best == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / data.size();
}

}  // namespace initlab
