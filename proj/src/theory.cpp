#include "initlab/theory.hpp"

#include <cmath>
#include <numbers>

namespace initlab {

void BoundInputs::validate() const {
    if (!(alpha > 0.0 && batch_size > 0.0 && sigma_sq > 0.0 && sigma0_sq > 0.0 && k > 0.0 &&
          e_w_sq > 0.0))
        throw std::invalid_argument(
            "BoundInputs: alpha, b, sigma^2, sigma0^2, K, E||W||^2 must all be positive");
}

double log_normalizer_quadratic(const QuadraticModel& quad, double alpha, int batch_size,
                                double sigma_sq) {
    const double beta = batch_size / (alpha * sigma_sq);
    const int k = quad.dim();
    // logdet(beta A) = K log beta + logdet A
    return 0.5 * (k * std::log(beta) + spd_log_det(quad.a)) -
           0.5 * k * std::log(std::numbers::pi);
}

double stationary_e_w_sq(const QuadraticModel& quad, double alpha, int batch_size,
                         double sigma_sq) {
    const Matrix cov = stationary_covariance_oracle(quad, alpha, batch_size, sigma_sq);
    double tr = 0.0;
    for (int i = 0; i < cov.rows; ++i) tr += cov(i, i);
    return tr;
}

double kl_gaussian_init_vs_gibbs(const QuadraticModel& quad, double alpha, int batch_size,
                                 double sigma_sq, double sigma0_sq) {
    if (sigma0_sq <= 0.0)
        throw std::invalid_argument("kl_gaussian_init_vs_gibbs: sigma0_sq must be > 0");
    const int k = quad.dim();
    const Matrix cov_ss = stationary_covariance_oracle(quad, alpha, batch_size, sigma_sq);
    double tr = 0.0;
    for (int i = 0; i < k; ++i) tr += cov_ss(i, i);
    const double log_det_ss = spd_log_det(cov_ss);
    return 0.5 * (tr / sigma0_sq - k + k * std::log(sigma0_sq) - log_det_ss);
}

double loss_bound_rhs(const BoundInputs& in) {
    in.validate();
    const double prefactor = in.alpha * in.sigma_sq / (2.0 * in.batch_size * in.k);
    const double bracket = 0.5 * in.k * std::log(2.0 * in.sigma0_sq * std::numbers::pi) +
                           in.log_c + in.e_w_sq / (2.0 * in.sigma0_sq);
    return prefactor * bracket;
}

double small_variance_bound_coefficient(double alpha, double batch_size, double sigma_sq,
                                        double sigma0_sq) {
    if (!(alpha > 0.0 && batch_size > 0.0 && sigma_sq > 0.0 && sigma0_sq > 0.0))
        throw std::invalid_argument("small_variance_bound_coefficient: inputs must be positive");
    return alpha * sigma_sq / (4.0 * batch_size * sigma0_sq);
}

double large_variance_bound_coefficient(double alpha, double batch_size, double sigma_sq) {
    if (!(alpha > 0.0 && batch_size > 0.0 && sigma_sq > 0.0))
        throw std::invalid_argument("large_variance_bound_coefficient: inputs must be positive");
    return alpha * sigma_sq / (4.0 * batch_size);
}

double optimal_sigma0(double e_w_sq, double k) {
    if (!(e_w_sq > 0.0) || k < 1.0)
        throw std::invalid_argument("optimal_sigma0: e_w_sq must be > 0 and K >= 1");
    return std::sqrt(e_w_sq / k);
}

double optimized_bound_rhs(const BoundInputs& in) {
    BoundInputs at_opt = in;
    at_opt.sigma0_sq = in.e_w_sq / in.k;
    return loss_bound_rhs(at_opt);
}

double analytic_mean_loss(const QuadraticModel& quad, double alpha, int batch_size,
                          double sigma_sq) {
    // E_ss[w^T A w]/2 = tr(A Sigma_ss)/2 = K alpha sigma^2 / (4b); per parameter
    // this is alpha sigma^2 / (4b) regardless of A.
    const Matrix cov = stationary_covariance_oracle(quad, alpha, batch_size, sigma_sq);
    const Matrix prod = matmul(quad.a, cov);
    double tr = 0.0;
    for (int i = 0; i < prod.rows; ++i) tr += prod(i, i);
    return tr / (2.0 * quad.dim());
}

}  // namespace initlab
