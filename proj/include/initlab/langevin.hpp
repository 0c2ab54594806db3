#ifndef INITLAB_LANGEVIN_HPP
#define INITLAB_LANGEVIN_HPP

#include <cstdint>
#include <vector>

#include "initlab/tensor.hpp"

namespace initlab {

// Quadratic loss L(w) = 1/2 w^T A w with SPD A and minimum at the origin.
struct QuadraticModel {
    Matrix a;

    explicit QuadraticModel(Matrix hessian) : a(std::move(hessian)) {
        cholesky_spd(a);  // validates SPD
    }
    int dim() const { return a.rows; }
};

struct SimConfig {
    double alpha = 0.01;   // learning rate, doubles as the time step
    int batch_size = 10;
    double noise_scale = 1.0;  // sigma^2 of the isotropic gradient-noise covariance
    long steps = 200000;
    double burn_in_fraction = 0.5;
    double sigma0 = 0.0;  // std of the initial iterate
    std::uint64_t seed = 0;

    double epsilon() const { return alpha / batch_size; }
};

double quadratic_loss(const QuadraticModel& quad, const std::vector<double>& w);

// Largest eigenvalue of SPD A by power iteration; used for the stability check.
double spectral_radius_estimate(const Matrix& a, int iters = 100);

// Euler-Maruyama chain w <- w - alpha A w + sqrt(alpha*eps)*sigma*xi,
// returning the iterates after burn-in.
std::vector<std::vector<double>> simulate(const QuadraticModel& quad, const SimConfig& cfg);

// Gibbs stationary covariance (alpha sigma^2 / 2b) A^{-1}.
Matrix stationary_covariance_oracle(const QuadraticModel& quad, double alpha, int batch_size,
                                    double sigma_sq);

Matrix empirical_covariance(const std::vector<std::vector<double>>& samples);

std::vector<double> empirical_mean(const std::vector<std::vector<double>>& samples);

// log p(w) of the Gibbs density C exp(-2b L(w) / (alpha sigma^2)).
double gibbs_log_density(const QuadraticModel& quad, double alpha, int batch_size, double sigma_sq,
                         const std::vector<double>& w);

}  // namespace initlab

#endif
