#ifndef INITLAB_THEORY_HPP
#define INITLAB_THEORY_HPP

#include "initlab/langevin.hpp"
#include "initlab/tensor.hpp"

namespace initlab {

// Everything the loss-bound inequality needs. For quadratic models e_w_sq and
// log_c are exact; for trained networks log_c is user-supplied (default 0).
struct BoundInputs {
    double alpha = 0.0;
    double batch_size = 0.0;
    double sigma_sq = 0.0;   // gradient-noise scale sigma^2
    double sigma0_sq = 0.0;  // initialization variance sigma_0^2
    double k = 0.0;          // parameter count
    double e_w_sq = 0.0;     // E_ss[||W||^2]
    double log_c = 0.0;      // log C_1,loc

    void validate() const;
};

// log C_1,loc for the Gibbs density over a quadratic loss; exact Gaussian
// integral: 1/2 logdet(beta A) - K/2 log pi with beta = b/(alpha sigma^2).
double log_normalizer_quadratic(const QuadraticModel& quad, double alpha, int batch_size,
                                double sigma_sq);

// E_ss[||W||^2] = tr(Sigma_ss) for the quadratic stationary Gaussian.
double stationary_e_w_sq(const QuadraticModel& quad, double alpha, int batch_size,
                         double sigma_sq);

// Closed-form KL between the zero-mean stationary Gaussian and N(0, sigma0^2 I).
double kl_gaussian_init_vs_gibbs(const QuadraticModel& quad, double alpha, int batch_size,
                                 double sigma_sq, double sigma0_sq);

// Upper bound on the per-parameter steady-state loss:
// (alpha sigma^2 / 2bK) [ K/2 log(2 sigma0^2 pi) + log C + E||W||^2 / (2 sigma0^2) ].
double loss_bound_rhs(const BoundInputs& in);

// K1 = alpha sigma^2 / (4 b sigma0^2), the small-variance linear coefficient.
double small_variance_bound_coefficient(double alpha, double batch_size, double sigma_sq,
                                        double sigma0_sq);

// K2 = alpha sigma^2 / (4 b), the large-variance log coefficient.
double large_variance_bound_coefficient(double alpha, double batch_size, double sigma_sq);

// sigma0 = sqrt(E||W||^2 / K), the bound-minimizing initialization std.
double optimal_sigma0(double e_w_sq, double k);

// loss_bound_rhs evaluated at the optimal sigma0^2 = e_w_sq / K.
double optimized_bound_rhs(const BoundInputs& in);

// Analytic per-parameter steady-state loss tr(A Sigma_ss) / (2K) on the
// quadratic track.
double analytic_mean_loss(const QuadraticModel& quad, double alpha, int batch_size,
                          double sigma_sq);

}  // namespace initlab

#endif
