#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bootood/error.hpp"

namespace bootood {

using Vector = std::vector<double>;

// Vectors with L2 norm at or below this are rejected by l2_normalize.
inline constexpr double kNormEpsilon = 1e-12;

// Row-major dense matrix of doubles. Dimensions are explicit and every
// operation that combines two matrices checks them; nothing broadcasts.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::size_t rows, std::size_t cols, Vector data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    Vector row_copy(std::size_t r) const;
    void set_row(std::size_t r, std::span<const double> values);

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

bool all_finite(std::span<const double> values);
void require_finite(std::span<const double> values, const char* what);

double l2_norm(std::span<const double> u);
double dot(std::span<const double> a, std::span<const double> b);

// u / ||u||; throws NumericError("ZeroNorm") when ||u|| <= kNormEpsilon.
Vector l2_normalize(const Vector& u);
void l2_normalize_inplace(std::span<double> u);

// Max-shifted softmax; entries positive and summing to 1.
Vector softmax(const Vector& v);
void softmax_inplace(std::span<double> v);

// log sum exp(v_i), max-shifted.
double logsumexp(std::span<const double> v);

// a - b, a + b, elementwise; dimension-checked.
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

// A (r×k) * B^T (c×k) -> r×c. The shape used by every linear layer here.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// A (r×k) * B (k×c) -> r×c.
Matrix matmul_nn(const Matrix& a, const Matrix& b);
// A^T (k×r) * B (k×c) -> r×c.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Vector column_sums(const Matrix& a);
Vector row_means(const Matrix& a);

// Deterministic counter-based generator (splitmix64): the state advances by
// the 64-bit golden-ratio constant and the output is the splitmix64
// finalizer of the new state. Identical seed and call sequence give
// identical streams on every platform. Doubles take the top 53 bits.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double next_double(); // [0, 1)
    double next_uniform(double lo, double hi);
    // Box-Muller; consumes exactly two uniforms per call.
    double next_normal();
    // Uniform index in [0, n); rejection-sampled so it is exactly uniform.
    std::size_t next_index(std::size_t n);

    // Independent stream derived from this rng's seed and a stream id.
    // Does not advance this rng.
    SeededRng stream(std::uint64_t stream_id) const;

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

// Symmetric Beta(alpha, alpha) via the ratio of two Gamma(alpha) draws
// (Marsaglia-Tsang squeeze; boosted for alpha < 1). alpha = 1 short-circuits
// to a single uniform draw.
double sample_beta(SeededRng& rng, double alpha);

// Central differences (f(x+eps e_i) - f(x-eps e_i)) / 2eps per coordinate.
// The gradient oracle every analytic backward pass is checked against.
Vector finite_diff_grad(const std::function<double(const Vector&)>& f,
                        const Vector& x, double eps);

} // namespace bootood
