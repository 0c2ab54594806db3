#include "initlab/langevin.hpp"

#include <cmath>
#include <string>

#include "initlab/theory.hpp"

namespace initlab {

double quadratic_loss(const QuadraticModel& quad, const std::vector<double>& w) {
    const int k = quad.dim();
    if (static_cast<int>(w.size()) != k)
        throw std::invalid_argument("quadratic_loss: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
        double aw = 0.0;
        for (int j = 0; j < k; ++j) aw += quad.a(i, j) * w[j];
        s += w[i] * aw;
    }
    return 0.5 * s;
}

double spectral_radius_estimate(const Matrix& a, int iters) {
    const int n = a.rows;
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        std::vector<double> av(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) av[i] += a(i, j) * v[j];
        double norm = 0.0;
        for (double x : av) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        lambda = norm;
        for (int i = 0; i < n; ++i) v[i] = av[i] / norm;
    }
    return lambda;
}

std::vector<std::vector<double>> simulate(const QuadraticModel& quad, const SimConfig& cfg) {
    const int k = quad.dim();
    const double lambda_max = spectral_radius_estimate(quad.a);
    if (cfg.alpha * lambda_max >= 2.0)
        throw std::invalid_argument("simulate: unstable step size, alpha*lambda_max = " +
                                    std::to_string(cfg.alpha * lambda_max) + " >= 2");

    RngState init_rng = rng_fork(cfg.seed, 0);
    RngState noise_rng = rng_fork(cfg.seed, 1);

    std::vector<double> w(k, 0.0);
    for (double& v : w) v = cfg.sigma0 * init_rng.next_gaussian();

    // Noise per step has variance eps*sigma^2*dt with dt = alpha.
    const double noise_std = std::sqrt(cfg.alpha * cfg.epsilon() * cfg.noise_scale);
    const long burn_in = static_cast<long>(cfg.burn_in_fraction * cfg.steps);

    std::vector<std::vector<double>> samples;
    samples.reserve(cfg.steps - burn_in);
    std::vector<double> aw(k);
    for (long step = 0; step < cfg.steps; ++step) {
        for (int i = 0; i < k; ++i) {
            double s = 0.0;
            for (int j = 0; j < k; ++j) s += quad.a(i, j) * w[j];
            aw[i] = s;
        }
        for (int i = 0; i < k; ++i)
            w[i] += -cfg.alpha * aw[i] + noise_std * noise_rng.next_gaussian();
        if (step >= burn_in) samples.push_back(w);
    }
    return samples;
}

Matrix stationary_covariance_oracle(const QuadraticModel& quad, double alpha, int batch_size,
                                    double sigma_sq) {
    Matrix cov = spd_inverse(quad.a);
    const double scale = alpha * sigma_sq / (2.0 * batch_size);
    for (double& v : cov.data) v *= scale;
    return cov;
}

Matrix empirical_covariance(const std::vector<std::vector<double>>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("empirical_covariance: need at least 2 samples");
    const int k = static_cast<int>(samples.front().size());
    const std::vector<double> mean = empirical_mean(samples);
    Matrix cov(k, k);
    for (const auto& s : samples)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) cov(i, j) += (s[i] - mean[i]) * (s[j] - mean[j]);
    for (double& v : cov.data) v /= static_cast<double>(samples.size() - 1);
    return cov;
}

std::vector<double> empirical_mean(const std::vector<std::vector<double>>& samples) {
    if (samples.empty()) throw std::invalid_argument("empirical_mean: no samples");
    const int k = static_cast<int>(samples.front().size());
    std::vector<double> mean(k, 0.0);
    for (const auto& s : samples)
        for (int i = 0; i < k; ++i) mean[i] += s[i];
    for (double& v : mean) v /= static_cast<double>(samples.size());
    return mean;
}

double gibbs_log_density(const QuadraticModel& quad, double alpha, int batch_size, double sigma_sq,
                         const std::vector<double>& w) {
    const double log_c = log_normalizer_quadratic(quad, alpha, batch_size, sigma_sq);
    return log_c - 2.0 * batch_size / (alpha * sigma_sq) * quadratic_loss(quad, w);
}

}  // namespace initlab
