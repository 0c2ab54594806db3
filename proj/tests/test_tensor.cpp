#include <cmath>
#include <fstream>

#include <doctest.h>

#include "initlab/tensor.hpp"

using namespace initlab;

TEST_CASE("rng_fork is deterministic for identical (seed, stream)") {
    RngState a = rng_fork(42, 0);
    RngState b = rng_fork(42, 0);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng_fork streams with distinct ids differ") {
    RngState a = rng_fork(42, 0);
    RngState b = rng_fork(42, 1);
    bool any_diff = false;
    for (int i = 0; i < 10000; ++i)
        if (a.next_uniform() != b.next_uniform()) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("rng_fork(42, 7) first draw matches the golden file") {
    std::ifstream golden(std::string(TEST_SOURCE_DIR) + "/golden/rng_42_7_first_draw.txt");
    REQUIRE(golden.good());
    std::uint64_t expected = 0;
    golden >> expected;
    RngState rng = rng_fork(42, 7);
    CHECK(rng.next_u64() == expected);
}

TEST_CASE("gaussian_matrix zero std returns constants") {
    RngState rng = rng_fork(1, 0);
    const Matrix z = gaussian_matrix(2, 2, 0.0, 0.0, rng);
    for (double v : z.data) CHECK(v == 0.0);
    const Matrix fives = gaussian_matrix(3, 1, 5.0, 0.0, rng);
    for (double v : fives.data) CHECK(v == 5.0);
}

TEST_CASE("gaussian_matrix rejects negative std") {
    RngState rng = rng_fork(1, 0);
    CHECK_THROWS_AS(gaussian_matrix(2, 2, 0.0, -1.0, rng), std::invalid_argument);
}

TEST_CASE("gaussian_matrix sample moments, 1e6 draws") {
    RngState rng = rng_fork(7, 0);
    const Matrix m = gaussian_matrix(1000, 1000, 0.0, 1.0, rng);
    double sum = 0.0, sum_sq = 0.0;
    for (double v : m.data) {
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(m.size());
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("matmul identity and hand example") {
    Matrix m(3, 2);
    for (int i = 0; i < 6; ++i) m.data[i] = i + 1;
    const Matrix im = matmul(Matrix::identity(3), m);
    for (int i = 0; i < 6; ++i) CHECK(im.data[i] == m.data[i]);

    Matrix a(2, 2), b(2, 2);
    a.data = {1, 2, 3, 4};
    b.data = {5, 6, 7, 8};
    const Matrix c = matmul(a, b);
    CHECK(c.data == std::vector<double>{19, 22, 43, 50});
}

TEST_CASE("matmul shape mismatch throws") {
    CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(4, 2)), std::invalid_argument);
}

TEST_CASE("cholesky identity and hand example") {
    const Matrix li = cholesky_spd(Matrix::identity(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(li(i, j) == (i == j ? 1.0 : 0.0));

    Matrix a(2, 2);
    a.data = {4, 2, 2, 3};
    const Matrix l = cholesky_spd(a);
    CHECK(l(0, 0) == doctest::Approx(2.0));
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == doctest::Approx(1.0));
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("cholesky rejects indefinite matrix") {
    Matrix a(2, 2);
    a.data = {1, 2, 2, 1};  // eigenvalues 3, -1
    CHECK_THROWS_AS(cholesky_spd(a), NotPositiveDefinite);
}

TEST_CASE("cholesky round trip on random SPD matrices") {
    RngState rng = rng_fork(11, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 7);
        const Matrix g = gaussian_matrix(n, n, 0.0, 1.0, rng);
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += g(k, i) * g(k, j);
                a(i, j) = s + (i == j ? 1e-3 : 0.0);
            }
        const Matrix l = cholesky_spd(a);
        Matrix llt(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += l(i, k) * l(j, k);
                llt(i, j) = s - a(i, j);
            }
        CHECK(frobenius_norm(llt) / frobenius_norm(a) < 1e-10);
    }
}

TEST_CASE("cholesky_solve and spd_inverse agree") {
    Matrix a(3, 3);
    a.data = {4, 1, 0, 1, 3, 1, 0, 1, 2};
    const Matrix inv = spd_inverse(a);
    const Matrix prod = matmul(a, inv);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
}

TEST_CASE("spd_log_det matches direct determinant for diag") {
    Matrix a(3, 3);
    a(0, 0) = 2.0;
    a(1, 1) = 5.0;
    a(2, 2) = 0.5;
    CHECK(spd_log_det(a) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}
