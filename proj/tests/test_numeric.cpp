#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bootood/numeric.hpp"

using namespace bootood;

TEST_SUITE_BEGIN("numeric");

TEST_CASE("l2_normalize basic values") {
    const Vector a = l2_normalize({3.0, 4.0});
    CHECK(a[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(0.8).epsilon(1e-12));

    const Vector b = l2_normalize({1.0, 0.0, 0.0});
    CHECK(b[0] == 1.0);
    CHECK(b[1] == 0.0);

    CHECK_THROWS_AS(l2_normalize({0.0, 0.0}), NumericError);
}

TEST_CASE("l2_normalize is idempotent") {
    SeededRng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Vector u(5);
        for (double& v : u) v = rng.next_uniform(-10.0, 10.0);
        const Vector once = l2_normalize(u);
        const Vector twice = l2_normalize(once);
        CHECK(std::abs(l2_norm(once) - 1.0) < 1e-12);
        for (std::size_t i = 0; i < u.size(); ++i) {
            CHECK(std::abs(once[i] - twice[i]) < 1e-12);
        }
    }
}

TEST_CASE("softmax values") {
    const Vector uniform = softmax({0.0, 0.0, 0.0, 0.0});
    for (double p : uniform) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));

    const Vector large = softmax({1000.0, 0.0});
    CHECK(large[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(large[1] == doctest::Approx(0.0).epsilon(1e-12));

    // e^{ln 1} : e^{ln 3} = 1 : 3
    const Vector hand = softmax({std::log(1.0), std::log(3.0)});
    CHECK(hand[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(hand[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("softmax shift invariance") {
    SeededRng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        Vector v(4);
        for (double& x : v) x = rng.next_uniform(-5.0, 5.0);
        const double shift = rng.next_uniform(-100.0, 100.0);
        Vector shifted = v;
        for (double& x : shifted) x += shift;
        const Vector a = softmax(v);
        const Vector b = softmax(shifted);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
        double sum = 0.0;
        for (double p : a) {
            CHECK(p > 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("logsumexp values and shift") {
    CHECK(logsumexp(Vector{0.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(logsumexp(Vector{5.0}) == doctest::Approx(5.0).epsilon(1e-12));
    // 3 + log(1 + e^-1 + e^-2), evaluated at high precision
    CHECK(logsumexp(Vector{1.0, 2.0, 3.0}) ==
          doctest::Approx(3.4076059644443806).epsilon(1e-12));

    SeededRng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        Vector v(5);
        for (double& x : v) x = rng.next_uniform(-5.0, 5.0);
        const double c = rng.next_uniform(-50.0, 50.0);
        Vector shifted = v;
        for (double& x : shifted) x += c;
        CHECK(std::abs(logsumexp(shifted) - (logsumexp(v) + c)) < 1e-9);
        CHECK(logsumexp(v) >= *std::max_element(v.begin(), v.end()));
    }
}

TEST_CASE("rng determinism and streams") {
    SeededRng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    SeededRng parent(7);
    const std::uint64_t before = parent.state();
    SeededRng child = parent.stream(1);
    CHECK(parent.state() == before);
    SeededRng parent_copy(7);
    bool all_equal = true;
    for (int i = 0; i < 16; ++i) {
        if (child.next_u64() != parent_copy.next_u64()) all_equal = false;
    }
    CHECK_FALSE(all_equal);
}

TEST_CASE("rng uniform and index ranges") {
    SeededRng rng(21);
    for (int i = 0; i < 1000; ++i) {
        const double d = rng.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        CHECK(rng.next_index(7) < 7);
    }
    CHECK_THROWS_AS(rng.next_index(0), NumericError);
}

TEST_CASE("sample_beta alpha=1 is uniform") {
    SeededRng rng(31);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = sample_beta(rng, 1.0);
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        sum += x;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("sample_beta alpha=0.2 is bimodal") {
    SeededRng rng(32);
    int tails = 0, middle = 0;
    for (int i = 0; i < 100000; ++i) {
        const double x = sample_beta(rng, 0.2);
        if (x <= 0.1 || x >= 0.9) ++tails;
        if (x >= 0.45 && x <= 0.55) ++middle;
    }
    CHECK(tails > middle);
}

TEST_CASE("sample_beta variance decreases with alpha") {
    auto empirical_var = [](double alpha, std::uint64_t seed) {
        SeededRng rng(seed);
        double sum = 0.0, sq = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const double x = sample_beta(rng, alpha);
            sum += x;
            sq += x * x;
        }
        const double mean = sum / n;
        return sq / n - mean * mean;
    };
    CHECK(empirical_var(5.0, 33) < empirical_var(1.0, 34));
    SeededRng rng(35);
    CHECK_THROWS_AS(sample_beta(rng, 0.0), NumericError);
    CHECK_THROWS_AS(sample_beta(rng, -1.0), NumericError);
}

TEST_CASE("finite_diff_grad on simple functions") {
    auto sq_norm = [](const Vector& x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    const Vector g = finite_diff_grad(sq_norm, {1.0, 2.0}, 1e-5);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-6));

    auto constant = [](const Vector&) { return 3.5; };
    const Vector zero = finite_diff_grad(constant, {1.0, -1.0, 2.0}, 1e-5);
    for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("matrix dimension checks and hand product") {
    Matrix a(2, 3), b(3, 2);
    CHECK_THROWS_AS(a + b, NumericError);
    CHECK_THROWS_AS(matmul_nt(a, Matrix(2, 4)), NumericError);
    CHECK_THROWS_AS(Matrix::from_rows(2, 2, Vector{1.0, 2.0, 3.0}), NumericError);
    CHECK_THROWS_AS(row_means(Matrix(0, 3)), NumericError);

    Matrix x(2, 3), w(2, 3);
    x(0, 0) = 1;
    x(0, 1) = 2;
    x(0, 2) = 3;
    x(1, 0) = 4;
    x(1, 1) = 5;
    x(1, 2) = 6;
    w(0, 0) = 1;
    w(1, 2) = 2;
    const Matrix z = matmul_nt(x, w);
    CHECK(z(0, 0) == 1.0);
    CHECK(z(0, 1) == 6.0);
    CHECK(z(1, 0) == 4.0);
    CHECK(z(1, 1) == 12.0);
}

TEST_SUITE_END();
