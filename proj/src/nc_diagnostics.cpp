#include "bootood/nc_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bootood {

NCReport nc_metrics(const Matrix& features, const std::vector<int>& labels) {
    if (labels.size() != features.rows()) {
        throw NumericError("DimensionMismatch: one label per feature row expected");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < features.rows(); ++r) by_class[labels[r]].push_back(r);
    if (by_class.size() < 2) {
        throw NumericError("ClassTooSmall: collapse diagnostics need >= 2 classes");
    }
    for (const auto& [cls, rows] : by_class) {
        if (rows.size() < 2) {
            throw NumericError("ClassTooSmall: class " + std::to_string(cls) +
                               " has fewer than 2 samples");
        }
    }

    const std::size_t dim = features.cols();
    const double n = static_cast<double>(features.rows());
    const Vector global_mean = row_means(features);

    std::map<int, Vector> class_means;
    for (const auto& [cls, rows] : by_class) {
        Vector mean(dim, 0.0);
        for (std::size_t r : rows) {
            auto row = features.row(r);
            for (std::size_t c = 0; c < dim; ++c) mean[c] += row[c];
        }
        for (double& v : mean) v /= static_cast<double>(rows.size());
        class_means[cls] = std::move(mean);
    }

    double within = 0.0, between = 0.0;
    for (const auto& [cls, rows] : by_class) {
        const Vector& mean = class_means[cls];
        for (std::size_t r : rows) {
            auto row = features.row(r);
            for (std::size_t c = 0; c < dim; ++c) {
                const double d = row[c] - mean[c];
                within += d * d;
            }
        }
        for (std::size_t c = 0; c < dim; ++c) {
            const double d = mean[c] - global_mean[c];
            between += static_cast<double>(rows.size()) * d * d;
        }
    }
    within /= n;
    between /= n;

    NCReport report;
    report.nc1 = (between > 0.0) ? within / between
                                 : std::numeric_limits<double>::infinity();

    // Centered class-mean norms.
    std::vector<Vector> centered;
    Vector norms;
    for (const auto& [cls, mean] : class_means) {
        Vector m(dim);
        for (std::size_t c = 0; c < dim; ++c) m[c] = mean[c] - global_mean[c];
        norms.push_back(l2_norm(m));
        centered.push_back(std::move(m));
    }
    double norm_mean = 0.0;
    for (double v : norms) norm_mean += v;
    norm_mean /= static_cast<double>(norms.size());
    double var = 0.0;
    for (double v : norms) var += (v - norm_mean) * (v - norm_mean);
    var /= static_cast<double>(norms.size());
    report.norm_cv = (norm_mean > 0.0) ? std::sqrt(var) / norm_mean
                                       : std::numeric_limits<double>::infinity();

    const double target = -1.0 / (static_cast<double>(centered.size()) - 1.0);
    double dev = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < centered.size(); ++a) {
        for (std::size_t b = a + 1; b < centered.size(); ++b) {
            const double na = l2_norm(centered[a]);
            const double nb = l2_norm(centered[b]);
            if (na <= kNormEpsilon || nb <= kNormEpsilon) {
                throw NumericError("ZeroNorm: degenerate centered class mean");
            }
            const double cosv = dot(centered[a], centered[b]) / (na * nb);
            dev += std::abs(cosv - target);
            ++pairs;
        }
    }
    report.etf_deviation = dev / static_cast<double>(pairs);
    return report;
}

std::size_t Histogram::total() const {
    std::size_t t = 0;
    for (std::size_t c : counts) t += c;
    return t;
}

double Histogram::bin_width() const {
    return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size());
}

Histogram histogram_from_values(const Vector& values, std::size_t bins, double lo, double hi) {
    if (bins < 2) throw NumericError("ConfigInvalid: histogram needs >= 2 bins");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(bins, 0);
    if (values.empty()) return h;
    const double width = (hi - lo);
    for (double v : values) {
        std::size_t idx;
        if (width <= 0.0) {
            idx = 0;
        } else {
            double t = (v - lo) / width * static_cast<double>(bins);
            if (t < 0.0) t = 0.0;
            idx = std::min(static_cast<std::size_t>(t), bins - 1);
        }
        ++h.counts[idx];
    }
    return h;
}

Vector radius_values(const Matrix& features, const Vector& mu) {
    Vector out(features.rows());
    Vector diff(mu.size());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        auto row = features.row(r);
        for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = row[c] - mu[c];
        out[r] = l2_norm(diff);
    }
    return out;
}

Vector max_cosine_values(const Matrix& features, const ClassifierParams& classifier) {
    Matrix w_hat = classifier.w;
    for (std::size_t c = 0; c < w_hat.rows(); ++c) l2_normalize_inplace(w_hat.row(c));
    Vector out(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        const Vector u = l2_normalize(features.row_copy(r));
        double best = -1.0;
        for (std::size_t c = 0; c < w_hat.rows(); ++c) {
            best = std::max(best, dot(u, w_hat.row(c)));
        }
        out[r] = best;
    }
    return out;
}

Histogram radius_histogram(const Matrix& features, const Vector& mu, std::size_t bins) {
    const Vector values = radius_values(features, mu);
    if (values.empty()) return histogram_from_values(values, bins, 0.0, 1.0);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return histogram_from_values(values, bins, *mn, *mx);
}

Histogram max_cosine_histogram(const Matrix& features, const ClassifierParams& classifier,
                               std::size_t bins) {
    const Vector values = max_cosine_values(features, classifier);
    if (values.empty()) return histogram_from_values(values, bins, -1.0, 1.0);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return histogram_from_values(values, bins, *mn, *mx);
}

} // namespace bootood
