#include "initlab/tensor.hpp"

#include <cmath>
#include <numbers>

namespace initlab {

namespace {

// SplitMix64 finalizer; full-avalanche 64-bit mix.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

RngState rng_fork(std::uint64_t base_seed, std::uint64_t stream_id) {
    RngState rng;
    rng.key = mix64(mix64(base_seed) ^ mix64(stream_id * 0xda942042e4dd58b5ULL + 1));
    rng.counter = 0;
    return rng;
}

std::uint64_t RngState::next_u64() {
    return mix64(key ^ mix64(counter++ * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

double RngState::next_uniform() {
    // 53-bit mantissa, offset by half an ulp so the value is in (0,1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngState::next_gaussian() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix gaussian_matrix(int rows, int cols, double mean, double std, RngState& rng) {
    if (std < 0.0) throw std::invalid_argument("gaussian_matrix: std must be >= 0");
    Matrix m(rows, cols);
    for (double& v : m.data) v = mean + std * rng.next_gaussian();
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw std::invalid_argument("matmul: shape mismatch (" + std::to_string(a.rows) + "x" +
                                    std::to_string(a.cols) + " * " + std::to_string(b.rows) + "x" +
                                    std::to_string(b.cols) + ")");
    Matrix c(a.rows, b.cols);
    // ikj loop order keeps the inner loop contiguous in both b and c.
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
            double* crow = &c.data[static_cast<std::size_t>(i) * c.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix matmul_transposed(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols)
        throw std::invalid_argument("matmul_transposed: inner dimension mismatch");
    Matrix c(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
        for (int j = 0; j < b.rows; ++j) {
            const double* brow = &b.data[static_cast<std::size_t>(j) * b.cols];
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
            c(i, j) = s;
        }
    }
    return c;
}

Matrix cholesky_spd(const Matrix& a) {
    if (a.rows != a.cols) throw std::invalid_argument("cholesky_spd: matrix must be square");
    const int n = a.rows;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-12 * (1.0 + std::abs(a(i, j))))
                throw std::invalid_argument("cholesky_spd: matrix is not symmetric");
    Matrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw NotPositiveDefinite("cholesky_spd: pivot " + std::to_string(j) +
                                                  " is not positive; matrix is not SPD");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

std::vector<double> cholesky_solve(const Matrix& chol_lower, const std::vector<double>& rhs) {
    const int n = chol_lower.rows;
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("cholesky_solve: rhs size mismatch");
    std::vector<double> y(rhs);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) y[i] -= chol_lower(i, k) * y[k];
        y[i] /= chol_lower(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) y[i] -= chol_lower(k, i) * y[k];
        y[i] /= chol_lower(i, i);
    }
    return y;
}

Matrix spd_inverse(const Matrix& a) {
    const Matrix l = cholesky_spd(a);
    const int n = a.rows;
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        const std::vector<double> col = cholesky_solve(l, e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    return inv;
}

double spd_log_det(const Matrix& a) {
    const Matrix l = cholesky_spd(a);
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

}  // namespace initlab
