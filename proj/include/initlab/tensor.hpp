#ifndef INITLAB_TENSOR_HPP
#define INITLAB_TENSOR_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace initlab {

// Dense row-major matrix of doubles. The universal numeric carrier.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {
        if (r <= 0 || c <= 0)
            throw std::invalid_argument("Matrix: dimensions must be positive");
    }

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    std::size_t size() const { return data.size(); }

    static Matrix identity(int n);
};

// Counter-based generator: each draw is a hash of (key, counter), so streams
// forked from one seed never share subsequences and replay is exact on any
// platform.
struct RngState {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;

    // Next raw 64-bit word.
    std::uint64_t next_u64();
    // Uniform double in (0, 1), never exactly 0 or 1.
    double next_uniform();
    // Standard normal via Box-Muller (cosine branch only; branch-free).
    double next_gaussian();
};

RngState rng_fork(std::uint64_t base_seed, std::uint64_t stream_id);

Matrix gaussian_matrix(int rows, int cols, double mean, double std, RngState& rng);

Matrix matmul(const Matrix& a, const Matrix& b);

// a * b^T without materializing the transpose.
Matrix matmul_transposed(const Matrix& a, const Matrix& b);

// Lower-triangular L with L L^T = a. Throws NotPositiveDefinite on failure,
// so this doubles as the SPD validity check.
class NotPositiveDefinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Matrix cholesky_spd(const Matrix& a);

// Solve a x = rhs for SPD a given its Cholesky factor (forward + back subst).
std::vector<double> cholesky_solve(const Matrix& chol_lower, const std::vector<double>& rhs);

// Inverse of an SPD matrix via column-wise Cholesky solves.
Matrix spd_inverse(const Matrix& a);

// log det(a) for SPD a, via the Cholesky factor.
double spd_log_det(const Matrix& a);

double frobenius_norm(const Matrix& a);

}  // namespace initlab

#endif
