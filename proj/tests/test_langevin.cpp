#include <cmath>
#include <limits>
#include <numbers>

#include <doctest.h>

#include "initlab/langevin.hpp"
#include "initlab/theory.hpp"

using namespace initlab;

namespace {

// Independent oracle: solve the Lyapunov equation A S + S A = Q by Gaussian
// elimination on the K^2 x K^2 vectorized system (I (x) A + A (x) I) vec(S) = vec(Q).
Matrix lyapunov_solve(const Matrix& a, const Matrix& q) {
    const int n = a.rows;
    const int nn = n * n;
    std::vector<std::vector<double>> sys(nn, std::vector<double>(nn + 1, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int row = i * n + j;
            for (int k = 0; k < n; ++k) {
                sys[row][i * n + k] += a(k, j);  // (S A)_{ij}
                sys[row][k * n + j] += a(i, k);  // (A S)_{ij}
            }
            sys[row][nn] = q(i, j);
        }
    for (int col = 0; col < nn; ++col) {
        int pivot = col;
        for (int r = col + 1; r < nn; ++r)
            if (std::abs(sys[r][col]) > std::abs(sys[pivot][col])) pivot = r;
        std::swap(sys[col], sys[pivot]);
        for (int r = col + 1; r < nn; ++r) {
            const double f = sys[r][col] / sys[col][col];
            for (int c = col; c <= nn; ++c) sys[r][c] -= f * sys[col][c];
        }
    }
    std::vector<double> x(nn);
    for (int r = nn - 1; r >= 0; --r) {
        double s = sys[r][nn];
        for (int c = r + 1; c < nn; ++c) s -= sys[r][c] * x[c];
        x[r] = s / sys[r][r];
    }
    Matrix sol(n, n);
    sol.data = std::move(x);
    return sol;
}

Matrix random_spd(int n, RngState& rng) {
    const Matrix g = gaussian_matrix(n, n, 0.0, 1.0, rng);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += g(k, i) * g(k, j);
            a(i, j) = s + (i == j ? 0.1 : 0.0);
        }
    return a;
}

}  // namespace

TEST_CASE("quadratic_loss hand values") {
    const QuadraticModel eye2(Matrix::identity(2));
    CHECK(quadratic_loss(eye2, {0.0, 0.0}) == 0.0);
    CHECK(quadratic_loss(eye2, {3.0, 4.0}) == doctest::Approx(12.5).epsilon(1e-15));

    Matrix d(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 4.0;
    const QuadraticModel diag(std::move(d));
    CHECK(quadratic_loss(diag, {1.0, 1.0}) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK_THROWS_AS(quadratic_loss(diag, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("QuadraticModel rejects non-SPD hessian") {
    Matrix bad(2, 2);
    bad.data = {1, 2, 2, 1};
    CHECK_THROWS_AS(QuadraticModel(std::move(bad)), NotPositiveDefinite);
}

TEST_CASE("noise-free simulation contracts monotonically to 0") {
    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 3.0;
    const QuadraticModel quad(std::move(a));
    SimConfig cfg;
    cfg.alpha = 0.1;
    cfg.noise_scale = 0.0;
    cfg.sigma0 = 1.0;
    cfg.steps = 200;
    cfg.burn_in_fraction = 0.0;
    cfg.seed = 5;
    const auto samples = simulate(quad, cfg);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& w : samples) {
        const double norm = std::sqrt(w[0] * w[0] + w[1] * w[1]);
        CHECK(norm < prev);
        prev = norm;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("simulate rejects unstable step sizes") {
    Matrix a(1, 1);
    a(0, 0) = 300.0;
    const QuadraticModel quad(std::move(a));
    SimConfig cfg;
    cfg.alpha = 0.01;  // alpha*lambda = 3 >= 2
    CHECK_THROWS_WITH_AS(simulate(quad, cfg), doctest::Contains("alpha*lambda_max"),
                         std::invalid_argument);
}

TEST_CASE("1-D stationary variance matches eps*sigma^2/2") {
    const QuadraticModel quad(Matrix::identity(1));
    SimConfig cfg;
    cfg.alpha = 0.01;
    cfg.batch_size = 10;
    cfg.noise_scale = 1.0;
    cfg.steps = 200000;
    cfg.seed = 17;
    const auto samples = simulate(quad, cfg);
    const Matrix cov = empirical_covariance(samples);
    CHECK(cov(0, 0) == doctest::Approx(5e-4).epsilon(0.05));
}

TEST_CASE("simulate is deterministic given the seed") {
    const QuadraticModel quad(Matrix::identity(2));
    SimConfig cfg;
    cfg.steps = 1000;
    cfg.seed = 23;
    cfg.sigma0 = 0.1;
    const auto a = simulate(quad, cfg);
    const auto b = simulate(quad, cfg);
    CHECK(a == b);
}

TEST_CASE("stationary covariance oracle closed forms") {
    const QuadraticModel eye2(Matrix::identity(2));
    const Matrix c1 = stationary_covariance_oracle(eye2, 0.01, 100, 1.0);
    CHECK(c1(0, 0) == doctest::Approx(5e-5).epsilon(1e-12));
    CHECK(c1(1, 1) == doctest::Approx(5e-5).epsilon(1e-12));
    CHECK(c1(0, 1) == 0.0);

    Matrix d(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 4.0;
    const QuadraticModel diag(std::move(d));
    const Matrix c2 = stationary_covariance_oracle(diag, 0.01, 100, 1.0);
    CHECK(c2(0, 0) == doctest::Approx(5e-5).epsilon(1e-12));
    CHECK(c2(1, 1) == doctest::Approx(1.25e-5).epsilon(1e-12));
}

TEST_CASE("Gibbs covariance equals the Lyapunov solution for 50 random SPD A") {
    RngState rng = rng_fork(31, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 2 + static_cast<int>(rng.next_u64() % 7);  // <= 8
        const Matrix a = random_spd(k, rng);
        const double alpha = 0.01, sigma_sq = 1.0;
        const int b = 10;
        const QuadraticModel quad(a);
        const Matrix gibbs = stationary_covariance_oracle(quad, alpha, b, sigma_sq);

        Matrix q(k, k);
        for (int i = 0; i < k; ++i) q(i, i) = alpha * sigma_sq / b;
        const Matrix lyap = lyapunov_solve(a, q);

        Matrix diff = gibbs;
        for (std::size_t i = 0; i < diff.data.size(); ++i) diff.data[i] -= lyap.data[i];
        CHECK(frobenius_norm(diff) / frobenius_norm(gibbs) < 1e-10);
    }
}

TEST_CASE("empirical_covariance hand values and errors") {
    const Matrix c = empirical_covariance({{0.0, 0.0}, {2.0, 0.0}});
    CHECK(c(0, 0) == 2.0);
    CHECK(c(0, 1) == 0.0);
    CHECK(c(1, 1) == 0.0);

    const Matrix z = empirical_covariance({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}});
    for (double v : z.data) CHECK(v == 0.0);

    CHECK_THROWS_AS(empirical_covariance({{1.0}}), std::invalid_argument);
}

TEST_CASE("empirical_covariance recovers diag(1,2) from 1e5 draws") {
    RngState rng = rng_fork(37, 0);
    std::vector<std::vector<double>> samples(100000, std::vector<double>(2));
    for (auto& s : samples) {
        s[0] = rng.next_gaussian();
        s[1] = std::sqrt(2.0) * rng.next_gaussian();
    }
    const Matrix cov = empirical_covariance(samples);
    CHECK(cov(0, 0) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(cov(1, 1) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("gibbs_log_density 1-D values and quadrature normalization") {
    const QuadraticModel quad(Matrix::identity(1));
    const double alpha = 0.01, sigma_sq = 1.0;
    const int b = 100;
    // Density is N(0, 5e-5); at 0 the log density is -0.5*log(2*pi*5e-5).
    const double at_zero = gibbs_log_density(quad, alpha, b, sigma_sq, {0.0});
    CHECK(at_zero == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi * 5e-5)).epsilon(1e-12));
    CHECK(at_zero == doctest::Approx(log_normalizer_quadratic(quad, alpha, b, sigma_sq)).epsilon(1e-12));

    // 1-D trapezoid quadrature of exp(log density) over +-12 std.
    const double std_dev = std::sqrt(5e-5);
    const int n = 20001;
    const double lo = -12.0 * std_dev, hi = 12.0 * std_dev;
    const double h = (hi - lo) / (n - 1);
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = lo + i * h;
        const double f = std::exp(gibbs_log_density(quad, alpha, b, sigma_sq, {x}));
        integral += (i == 0 || i == n - 1) ? 0.5 * f : f;
    }
    integral *= h;
    CHECK(std::abs(integral - 1.0) < 1e-6);
}

TEST_CASE("gibbs density integrates to 1 in 2-D") {
    Matrix a(2, 2);
    a.data = {2.0, 0.5, 0.5, 1.0};
    const QuadraticModel quad(std::move(a));
    const double alpha = 0.05, sigma_sq = 2.0;
    const int b = 5;
    // Covariance scale ~ alpha*sigma_sq/(2b) * A^{-1}; integrate over a wide grid.
    const double span = 12.0 * std::sqrt(alpha * sigma_sq / (2.0 * b));
    const int n = 801;
    const double h = 2.0 * span / (n - 1);
    double integral = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = -span + i * h;
            const double y = -span + j * h;
            double w = std::exp(gibbs_log_density(quad, alpha, b, sigma_sq, {x, y}));
            if (i == 0 || i == n - 1) w *= 0.5;
            if (j == 0 || j == n - 1) w *= 0.5;
            integral += w;
        }
    integral *= h * h;
    CHECK(std::abs(integral - 1.0) < 1e-6);
}

TEST_CASE("post burn-in sample mean is small relative to the stationary spread") {
    Matrix a(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    a(2, 2) = 4.0;
    const QuadraticModel quad(std::move(a));
    SimConfig cfg;
    cfg.alpha = 0.01;
    cfg.batch_size = 10;
    cfg.noise_scale = 1.0;
    cfg.steps = 400000;
    cfg.seed = 41;
    const auto samples = simulate(quad, cfg);
    const auto mean = empirical_mean(samples);
    const Matrix oracle = stationary_covariance_oracle(quad, cfg.alpha, cfg.batch_size, cfg.noise_scale);
    double tr = 0.0;
    for (int i = 0; i < 3; ++i) tr += oracle(i, i);
    double mean_norm = 0.0;
    for (double v : mean) mean_norm += v * v;
    mean_norm = std::sqrt(mean_norm);
    // integrated autocorrelation time of the slowest mode is about
    // 2/(alpha*lambda_min) = 200 steps
    const double n_eff = samples.size() / 200.0;
    CHECK(mean_norm < 4.0 * std::sqrt(tr / n_eff));
}
