#include "initlab/optimize.hpp"

#include <cmath>
#include <limits>

#include "initlab/stats.hpp"

namespace initlab {

MlpModel init_gaussian(const std::vector<int>& dims, double sigma0, bool biases_enabled,
                       RngState& rng) {
    if (sigma0 < 0.0) throw std::invalid_argument("init_gaussian: sigma0 must be >= 0");
    if (dims.size() < 2) throw std::invalid_argument("init_gaussian: need at least two layer dims");
    MlpModel model;
    model.layer_dims = dims;
    model.biases_enabled = biases_enabled;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        model.weights.push_back(gaussian_matrix(dims[l], dims[l + 1], 0.0, sigma0, rng));
        if (biases_enabled) {
            std::vector<double> b(dims[l + 1]);
            for (double& v : b) v = sigma0 * rng.next_gaussian();
            model.biases.push_back(std::move(b));
        }
    }
    return model;
}

MlpModel init_he_normal(const std::vector<int>& dims, bool biases_enabled, RngState& rng) {
    if (dims.size() < 2) throw std::invalid_argument("init_he_normal: need at least two layer dims");
    MlpModel model;
    model.layer_dims = dims;
    model.biases_enabled = biases_enabled;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double std = std::sqrt(2.0 / dims[l]);
        model.weights.push_back(gaussian_matrix(dims[l], dims[l + 1], 0.0, std, rng));
        if (biases_enabled) model.biases.emplace_back(dims[l + 1], 0.0);
    }
    return model;
}

std::vector<int> sample_minibatch(int n, int b, RngState& rng) {
    if (b < 1 || b > n) throw std::invalid_argument("sample_minibatch: need 1 <= b <= n");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < b; ++i) {
        // next_u64 modulo remaining range; bias is < 2^-40 for n < 2^24.
        const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(b);
    return pool;
}

void sgd_step(MlpModel& model, const Gradient& grad, double alpha) {
    if (grad.weights.size() != model.weights.size())
        throw std::invalid_argument("sgd_step: gradient layer count mismatch");
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        Matrix& w = model.weights[l];
        const Matrix& g = grad.weights[l];
        if (w.rows != g.rows || w.cols != g.cols)
            throw std::invalid_argument("sgd_step: gradient shape mismatch");
        for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] -= alpha * g.data[i];
    }
    if (model.biases_enabled) {
        for (std::size_t l = 0; l < model.biases.size(); ++l) {
            auto& b = model.biases[l];
            const auto& g = grad.biases[l];
            for (std::size_t i = 0; i < b.size(); ++i) b[i] -= alpha * g[i];
        }
    }
}

Batch gather_batch(const Dataset& ds, const std::vector<int>& indices) {
    Batch batch;
    batch.inputs = Matrix(static_cast<int>(indices.size()), ds.dim());
    batch.labels.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const int src = indices[i];
        for (int j = 0; j < ds.dim(); ++j) batch.inputs(static_cast<int>(i), j) = ds.inputs(src, j);
        batch.labels[i] = ds.labels[src];
    }
    return batch;
}

namespace {

Batch full_batch(const Dataset& ds) {
    Batch b;
    b.inputs = ds.inputs;
    b.labels = ds.labels;
    return b;
}

Snapshot take_snapshot(const MlpModel& model, int epoch, const Batch& train_all,
                       const Batch& val_all) {
    Snapshot s;
    s.epoch = epoch;
    s.train_loss = forward(model, train_all).mean_loss;
    const ForwardCache vc = forward(model, val_all);
    s.val_loss = vc.mean_loss;
    int correct = 0;
    for (int i = 0; i < val_all.size(); ++i) {
        int best = 0;
        for (int j = 1; j < vc.probs.cols; ++j)
            if (vc.probs(i, j) > vc.probs(i, best)) best = j;
        if (best == val_all.labels[i]) ++correct;
    }
    s.val_accuracy = static_cast<double>(correct) / val_all.size();
    const WeightMoments m = weight_second_moment(model);
    s.vbar = m.vbar;
    s.mean_norm_sq = m.mean_norm_sq;
    s.centered_var = m.centered_var;
    return s;
}

}  // namespace

RunRecord train(const TrainConfig& config, const Dataset& train_set, const Dataset& val_set,
                std::uint64_t seed) {
    if (train_set.size() == 0 || val_set.size() == 0)
        throw std::invalid_argument("train: empty dataset");
    if (config.alpha < 0.0) throw std::invalid_argument("train: alpha must be >= 0");
    if (config.batch_size > train_set.size())
        throw std::invalid_argument("train: batch size exceeds dataset size");

    std::vector<int> dims;
    dims.push_back(train_set.dim());
    for (int h : config.hidden_dims) dims.push_back(h);
    dims.push_back(train_set.num_classes);

    RngState init_rng = rng_fork(seed, kStreamInit);
    MlpModel model = config.init_scheme == InitScheme::HeNormal
                         ? init_he_normal(dims, config.biases_enabled, init_rng)
                         : init_gaussian(dims, config.sigma0, config.biases_enabled, init_rng);
    RngState batch_rng = rng_fork(seed, kStreamMinibatch);

    RunRecord record;
    record.seed = seed;
    record.sigma0 = config.sigma0;
    record.param_count = model.param_count();

    const Batch train_all = full_batch(train_set);
    const Batch val_all = full_batch(val_set);
    const int steps_per_epoch = train_set.size() / config.batch_size;

    record.series.push_back(take_snapshot(model, 0, train_all, val_all));

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        for (int step = 0; step < steps_per_epoch; ++step) {
            const std::vector<int> idx =
                sample_minibatch(train_set.size(), config.batch_size, batch_rng);
            const Batch batch = gather_batch(train_set, idx);
            const ForwardCache cache = forward(model, batch);
            if (!std::isfinite(cache.mean_loss) || cache.mean_loss > 1e10) {
                record.diverged = true;
                break;
            }
            const Gradient grad = backward(model, batch, cache);
            sgd_step(model, grad, config.alpha);
        }
        if (record.diverged) {
            Snapshot s;
            s.epoch = epoch;
            const WeightMoments m = weight_second_moment(model);
            s.train_loss = std::numeric_limits<double>::infinity();
            s.val_loss = std::numeric_limits<double>::infinity();
            s.vbar = m.vbar;
            s.mean_norm_sq = m.mean_norm_sq;
            s.centered_var = m.centered_var;
            record.series.push_back(s);
            break;
        }
        if (epoch % config.record_every == 0 || epoch == config.epochs)
            record.series.push_back(take_snapshot(model, epoch, train_all, val_all));
    }
    record.final_vbar = record.series.back().vbar;
    return record;
}

}  // namespace initlab
