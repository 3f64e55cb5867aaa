#include "bootood/losses.hpp"

#include <cmath>
#include <string>

namespace bootood {

namespace {

CeLossResult cross_entropy_impl(const Matrix& logits, const std::vector<int>& targets,
                                const char* index_error) {
    if (logits.rows() == 0) throw NumericError("EmptyBatch: cross-entropy of empty batch");
    if (targets.size() != logits.rows()) {
        throw NumericError("DimensionMismatch: targets length " + std::to_string(targets.size()) +
                           " != batch size " + std::to_string(logits.rows()));
    }
    const std::size_t n = logits.rows();
    const std::size_t c = logits.cols();
    CeLossResult result;
    result.dlogits = Matrix(n, c);
    double total = 0.0;
    Vector probs(c);
    for (std::size_t r = 0; r < n; ++r) {
        const int y = targets[r];
        if (y < 0 || static_cast<std::size_t>(y) >= c) {
            throw NumericError(std::string(index_error) + ": target " + std::to_string(y) +
                               " outside [0, " + std::to_string(c) + ")");
        }
        auto row = logits.row(r);
        std::copy(row.begin(), row.end(), probs.begin());
        softmax_inplace(probs);
        // -log p[y] via logsumexp for stability when p[y] underflows.
        total += logsumexp(row) - row[static_cast<std::size_t>(y)];
        auto d = result.dlogits.row(r);
        for (std::size_t j = 0; j < c; ++j) {
            d[j] = probs[j] / static_cast<double>(n);
        }
        d[static_cast<std::size_t>(y)] -= 1.0 / static_cast<double>(n);
    }
    result.value = total / static_cast<double>(n);
    if (result.value < 0.0 && result.value > -1e-15) result.value = 0.0;
    return result;
}

} // namespace

CeLossResult ce_loss(const Matrix& logits, const std::vector<int>& labels) {
    return cross_entropy_impl(logits, labels, "LabelOutOfRange");
}

CeLossResult radius_cls_loss(const Matrix& shell_logits, const std::vector<int>& shells) {
    return cross_entropy_impl(shell_logits, shells, "IndexOutOfRange");
}

RadiusRegResult radius_reg_loss(const Matrix& features, const Vector& mu,
                                const Vector& rho_targets) {
    if (features.rows() == 0) throw NumericError("EmptyBatch: radius regression of empty batch");
    if (features.cols() != mu.size()) {
        throw NumericError("DimensionMismatch: features dim " + std::to_string(features.cols()) +
                           " != mu dim " + std::to_string(mu.size()));
    }
    if (rho_targets.size() != features.rows()) {
        throw NumericError("DimensionMismatch: one radius target per row expected");
    }
    require_finite(mu, "radius regression center");

    const std::size_t n = features.rows();
    RadiusRegResult result;
    result.dfeatures = Matrix(n, features.cols());
    Vector diff(features.cols());
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        auto row = features.row(r);
        for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = row[c] - mu[c];
        const double dist = l2_norm(diff);
        const double err = dist - rho_targets[r];
        total += err * err;
        if (dist == 0.0) {
            ++result.degenerate_rows;
            continue; // subgradient 0 at the center
        }
        const double coef = 2.0 * err / (dist * static_cast<double>(n));
        auto d = result.dfeatures.row(r);
        for (std::size_t c = 0; c < diff.size(); ++c) d[c] = coef * diff[c];
    }
    result.value = total / static_cast<double>(n);
    return result;
}

SeparationResult separation_loss(const Matrix& features, const ClassifierParams& classifier) {
    if (features.rows() == 0) throw NumericError("EmptyBatch: separation loss of empty batch");
    if (features.cols() != classifier.feature_dim()) {
        throw NumericError("DimensionMismatch: features dim " + std::to_string(features.cols()) +
                           " != classifier dim " + std::to_string(classifier.feature_dim()));
    }
    const std::size_t n = features.rows();
    const std::size_t num_classes = classifier.num_classes();

    Matrix w_hat = classifier.w;
    for (std::size_t c = 0; c < num_classes; ++c) l2_normalize_inplace(w_hat.row(c));

    SeparationResult result;
    result.dfeatures = Matrix(n, features.cols());
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(num_classes));
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const Vector u_hat = l2_normalize(features.row_copy(r));
        const double norm = l2_norm(features.row(r));
        auto d = result.dfeatures.row(r);
        for (std::size_t c = 0; c < num_classes; ++c) {
            const double cosv = dot(u_hat, w_hat.row(c));
            total += std::abs(cosv);
            const double sign = (cosv > 0.0) ? 1.0 : (cosv < 0.0 ? -1.0 : 0.0);
            // d|cos|/du = sign * (w_hat - cos * u_hat) / ||u||
            auto wc = w_hat.row(c);
            for (std::size_t j = 0; j < d.size(); ++j) {
                d[j] += scale * sign * (wc[j] - cosv * u_hat[j]) / norm;
            }
        }
    }
    result.value = total * scale;
    return result;
}

double warmup_weight(long t, long start, long end, double lambda_max) {
    if (start >= end) throw ConfigError("ConfigInvalid: warm-up end must exceed start");
    if (t <= start) return 0.0;
    if (t >= end) return lambda_max;
    return lambda_max * static_cast<double>(t - start) / static_cast<double>(end - start);
}

LossBreakdown total_loss(double ce, double radius_cls, double radius_reg, double sep,
                         const LossWeights& weights, long t) {
    LossBreakdown out;
    out.ce = ce;
    out.radius_cls = radius_cls;
    out.radius_reg = radius_reg;
    out.sep = sep;
    out.w_ood = warmup_weight(t, weights.ood_warmup_start, weights.ood_warmup_end,
                              weights.lambda_ood_max);
    out.w_sep = warmup_weight(t, weights.sep_warmup_start, weights.sep_warmup_end,
                              weights.lambda_sep_max);
    out.total = ce +
                out.w_ood * (weights.lambda_cls * radius_cls + weights.lambda_reg * radius_reg) +
                out.w_sep * sep;
    return out;
}

} // namespace bootood
