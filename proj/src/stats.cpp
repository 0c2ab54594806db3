#include "initlab/stats.hpp"

#include <cmath>

#include "initlab/data.hpp"
#include "initlab/optimize.hpp"

namespace initlab {

WeightMoments weight_second_moment(const MlpModel& model) {
    const std::size_t k = model.param_count();
    if (k == 0) throw std::invalid_argument("weight_second_moment: model has no parameters");
    double sum = 0.0, sum_sq = 0.0;
    auto accumulate = [&](double v) {
        sum += v;
        sum_sq += v * v;
    };
    for (const Matrix& w : model.weights)
        for (double v : w.data) accumulate(v);
    for (const auto& b : model.biases)
        for (double v : b) accumulate(v);

    WeightMoments m;
    m.vbar = sum_sq / k;
    const double mean = sum / k;
    m.mean_norm_sq = mean * mean * k;
    m.centered_var = m.vbar - mean * mean;
    return m;
}

double estimate_noise_scale(const MlpModel& model, const Matrix& inputs,
                            const std::vector<int>& labels, int n_probe, RngState& rng) {
    if (n_probe < 2) throw std::invalid_argument("estimate_noise_scale: n_probe must be >= 2");
    const int n = inputs.rows;
    const int probes = std::min(n_probe, n);
    const std::vector<int> idx = sample_minibatch(n, probes, rng);

    const std::size_t k = model.param_count();
    std::vector<double> mean(k, 0.0), mean_sq(k, 0.0);
    Batch one;
    one.inputs = Matrix(1, inputs.cols);
    one.labels.resize(1);
    for (int p = 0; p < probes; ++p) {
        const int src = idx[p];
        for (int j = 0; j < inputs.cols; ++j) one.inputs(0, j) = inputs(src, j);
        one.labels[0] = labels[src];
        const Gradient g = backward(model, one, forward(model, one));
        std::size_t pos = 0;
        for (const Matrix& gw : g.weights)
            for (double v : gw.data) {
                mean[pos] += v;
                mean_sq[pos] += v * v;
                ++pos;
            }
        for (const auto& gb : g.biases)
            for (double v : gb) {
                mean[pos] += v;
                mean_sq[pos] += v * v;
                ++pos;
            }
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double m = mean[i] / probes;
        const double var = (mean_sq[i] - probes * m * m) / (probes - 1);
        trace += std::max(var, 0.0);
    }
    return trace / k;
}

RunAggregate aggregate_runs(const std::vector<RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate_runs: no records");
    const std::size_t t = records.front().series.size();
    for (const RunRecord& r : records) {
        if (r.series.size() != t || r.sigma0 != records.front().sigma0)
            throw std::invalid_argument("aggregate_runs: records have mismatched schedules");
        for (std::size_t i = 0; i < t; ++i)
            if (r.series[i].epoch != records.front().series[i].epoch)
                throw std::invalid_argument("aggregate_runs: records have mismatched schedules");
    }
    const int n = static_cast<int>(records.size());
    RunAggregate agg;
    agg.degenerate_std = (n == 1);
    agg.epochs.resize(t);
    auto stat = [&](auto get, std::vector<double>& mean_out, std::vector<double>& std_out) {
        mean_out.resize(t);
        std_out.resize(t);
        for (std::size_t i = 0; i < t; ++i) {
            double m = 0.0;
            for (const RunRecord& r : records) m += get(r.series[i]);
            m /= n;
            double ss = 0.0;
            for (const RunRecord& r : records) {
                const double d = get(r.series[i]) - m;
                ss += d * d;
            }
            mean_out[i] = m;
            std_out[i] = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        }
    };
    for (std::size_t i = 0; i < t; ++i) agg.epochs[i] = records.front().series[i].epoch;
    stat([](const Snapshot& s) { return s.train_loss; }, agg.train_loss_mean, agg.train_loss_std);
    stat([](const Snapshot& s) { return s.val_loss; }, agg.val_loss_mean, agg.val_loss_std);
    stat([](const Snapshot& s) { return s.val_accuracy; }, agg.val_acc_mean, agg.val_acc_std);
    stat([](const Snapshot& s) { return s.vbar; }, agg.vbar_mean, agg.vbar_std);
    agg.final_loss_mean = agg.train_loss_mean.back();
    agg.final_loss_std = agg.train_loss_std.back();
    agg.final_vbar_mean = agg.vbar_mean.back();
    agg.final_acc_mean = agg.val_acc_mean.back();
    return agg;
}

double steady_state_ratio(double final_vbar, double sigma0_sq) {
    if (sigma0_sq <= 0.0) throw std::invalid_argument("steady_state_ratio: sigma0_sq must be > 0");
    return final_vbar / sigma0_sq;
}

}  // namespace initlab
