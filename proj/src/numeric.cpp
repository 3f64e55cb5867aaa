#include "bootood/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bootood {

Matrix Matrix::from_rows(std::size_t rows, std::size_t cols, Vector data) {
    if (data.size() != rows * cols) {
        throw NumericError("DimensionMismatch: from_rows payload " +
                           std::to_string(data.size()) + " != " + std::to_string(rows) +
                           "x" + std::to_string(cols));
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
}

Vector Matrix::row_copy(std::size_t r) const {
    auto s = row(r);
    return Vector(s.begin(), s.end());
}

void Matrix::set_row(std::size_t r, std::span<const double> values) {
    if (values.size() != cols_) {
        throw NumericError("DimensionMismatch: set_row expects " + std::to_string(cols_) +
                           " values, got " + std::to_string(values.size()));
    }
    std::copy(values.begin(), values.end(), row(r).begin());
}

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(),
                       [](double v) { return std::isfinite(v); });
}

void require_finite(std::span<const double> values, const char* what) {
    if (!all_finite(values)) {
        throw NumericError(std::string("NonFinite: ") + what);
    }
}

double l2_norm(std::span<const double> u) {
    double acc = 0.0;
    for (double v : u) acc += v * v;
    return std::sqrt(acc);
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw NumericError("DimensionMismatch: dot of lengths " + std::to_string(a.size()) +
                           " and " + std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void l2_normalize_inplace(std::span<double> u) {
    require_finite(u, "l2_normalize input");
    const double n = l2_norm(u);
    if (n <= kNormEpsilon) {
        throw NumericError("ZeroNorm: vector norm " + std::to_string(n) +
                           " at or below " + std::to_string(kNormEpsilon));
    }
    for (double& v : u) v /= n;
}

Vector l2_normalize(const Vector& u) {
    Vector out = u;
    l2_normalize_inplace(out);
    return out;
}

void softmax_inplace(std::span<double> v) {
    require_finite(v, "softmax input");
    if (v.empty()) throw NumericError("DimensionMismatch: softmax of empty vector");
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - m);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

Vector softmax(const Vector& v) {
    Vector out = v;
    softmax_inplace(out);
    return out;
}

double logsumexp(std::span<const double> v) {
    require_finite(v, "logsumexp input");
    if (v.empty()) throw NumericError("DimensionMismatch: logsumexp of empty vector");
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - m);
    return m + std::log(sum);
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw NumericError(std::string("DimensionMismatch: ") + op + " on " +
                           std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                           std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

} // namespace

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "subtract");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw NumericError("DimensionMismatch: matmul_nt inner dims " +
                           std::to_string(a.cols()) + " vs " + std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < b.rows(); ++c) {
            out(r, c) = dot(a.row(r), b.row(c));
        }
    }
    return out;
}

Matrix matmul_nn(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw NumericError("DimensionMismatch: matmul_nn inner dims " +
                           std::to_string(a.cols()) + " vs " + std::to_string(b.rows()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double av = a(r, k);
            if (av == 0.0) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += av * b(k, c);
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw NumericError("DimensionMismatch: matmul_tn outer dims " +
                           std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
    }
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        for (std::size_t r = 0; r < a.cols(); ++r) {
            const double av = a(k, r);
            if (av == 0.0) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += av * b(k, c);
        }
    }
    return out;
}

Vector column_sums(const Matrix& a) {
    Vector out(a.cols(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) out[c] += a(r, c);
    }
    return out;
}

Vector row_means(const Matrix& a) {
    if (a.rows() == 0) throw NumericError("EmptyBatch: row_means of empty matrix");
    Vector out = column_sums(a);
    for (double& v : out) v /= static_cast<double>(a.rows());
    return out;
}

std::uint64_t SeededRng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SeededRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double SeededRng::next_normal() {
    // u1 shifted away from 0 so log stays finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t SeededRng::next_index(std::size_t n) {
    if (n == 0) throw NumericError("DimensionMismatch: next_index(0)");
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::size_t>(x % bound);
}

SeededRng SeededRng::stream(std::uint64_t stream_id) const {
    // Hash (state, stream_id) through one splitmix64 round each so streams
    // with nearby ids decorrelate.
    SeededRng mixer(state_ ^ (stream_id * 0xd1342543de82ef95ULL));
    return SeededRng(mixer.next_u64());
}

namespace {

// Marsaglia-Tsang for shape >= 1.
double sample_gamma_ge1(SeededRng& rng, double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = rng.next_normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.next_double();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_gamma(SeededRng& rng, double shape) {
    if (shape >= 1.0) return sample_gamma_ge1(rng, shape);
    // Gamma(a) = Gamma(a + 1) * U^(1/a) for a < 1.
    const double g = sample_gamma_ge1(rng, shape + 1.0);
    const double u = rng.next_double();
    return g * std::pow(u, 1.0 / shape);
}

} // namespace

double sample_beta(SeededRng& rng, double alpha) {
    if (!(alpha > 0.0)) {
        throw NumericError("NonPositiveAlpha: Beta shape must be > 0, got " +
                           std::to_string(alpha));
    }
    if (alpha == 1.0) return rng.next_double();
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double x = sample_gamma(rng, alpha);
        const double y = sample_gamma(rng, alpha);
        if (x + y > 0.0) return x / (x + y);
    }
    // Both gammas underflowed (only reachable for extreme alpha); the
    // symmetric distribution's center is the least-wrong answer.
    return 0.5;
}

Vector finite_diff_grad(const std::function<double(const Vector&)>& f,
                        const Vector& x, double eps) {
    if (!(eps > 0.0)) {
        throw NumericError("NonPositiveEpsilon: finite_diff_grad step must be > 0");
    }
    Vector grad(x.size());
    Vector probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = probe[i];
        probe[i] = orig + eps;
        const double fp = f(probe);
        probe[i] = orig - eps;
        const double fm = f(probe);
        probe[i] = orig;
        grad[i] = (fp - fm) / (2.0 * eps);
    }
    return grad;
}

} // namespace bootood
