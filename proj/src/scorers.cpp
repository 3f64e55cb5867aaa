#include "bootood/scorers.hpp"

#include <algorithm>
#include <cmath>

#include "bootood/metrics.hpp"
#include "bootood/pseudo_ood.hpp"

namespace bootood {

bool is_scorer_id(std::string_view id) {
    return std::find(kScorerIds.begin(), kScorerIds.end(), id) != kScorerIds.end();
}

Vector score_msp(const Matrix& logits) {
    if (logits.cols() < 2) throw NumericError("DimensionMismatch: MSP needs >= 2 classes");
    Vector out(logits.rows());
    Vector probs(logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        auto row = logits.row(r);
        std::copy(row.begin(), row.end(), probs.begin());
        softmax_inplace(probs);
        out[r] = *std::max_element(probs.begin(), probs.end());
    }
    return out;
}

Vector score_ebo(const Matrix& logits, double temperature) {
    if (!(temperature > 0.0)) {
        throw NumericError("NonPositiveTemperature: EBO temperature must be > 0");
    }
    Vector out(logits.rows());
    Vector scaled(logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        auto row = logits.row(r);
        for (std::size_t c = 0; c < scaled.size(); ++c) scaled[c] = row[c] / temperature;
        out[r] = temperature * logsumexp(scaled);
    }
    return out;
}

Vector score_entropy(const Matrix& logits) {
    if (logits.cols() < 2) throw NumericError("DimensionMismatch: entropy needs >= 2 classes");
    Vector out(logits.rows());
    Vector probs(logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        auto row = logits.row(r);
        std::copy(row.begin(), row.end(), probs.begin());
        softmax_inplace(probs);
        double entropy = 0.0;
        for (double p : probs) {
            if (p > 0.0) entropy -= p * std::log(p);
        }
        out[r] = -entropy;
    }
    return out;
}

Vector score_react(const Matrix& features, const ClassifierParams& classifier,
                   double clip, double temperature) {
    if (!(clip > 0.0)) throw NumericError("NonPositiveClip: ReAct clip must be > 0");
    Matrix clipped = features;
    for (double& v : clipped.data()) v = std::min(v, clip);
    return score_ebo(classifier_forward(classifier, clipped), temperature);
}

Vector score_norm(const Matrix& features, const Vector& mu) {
    if (features.cols() != mu.size()) {
        throw NumericError("DimensionMismatch: norm score features dim " +
                           std::to_string(features.cols()) + " != mu dim " +
                           std::to_string(mu.size()));
    }
    Vector out(features.rows());
    Vector diff(mu.size());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        auto row = features.row(r);
        for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = row[c] - mu[c];
        out[r] = l2_norm(diff);
    }
    return out;
}

double percentile(Vector values, double pct) {
    if (values.empty()) throw NumericError("EmptyScoreSet: percentile of empty set");
    if (!(pct >= 0.0 && pct <= 100.0)) {
        throw NumericError("ConfigInvalid: percentile must lie in [0, 100]");
    }
    std::sort(values.begin(), values.end());
    const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double calibrate_react_clip(const Matrix& val_features, double pct) {
    if (val_features.rows() == 0) throw NumericError("EmptyValidation: ReAct calibration");
    Vector pooled(val_features.data().begin(), val_features.data().end());
    return percentile(std::move(pooled), pct);
}

Vector apply_scorer(std::string_view id, const Matrix& logits, const Matrix& features,
                    const ClassifierParams& classifier, const Vector& mu, double react_clip,
                    double temperature) {
    if (id == "msp") return score_msp(logits);
    if (id == "ebo") return score_ebo(logits, temperature);
    if (id == "entropy") return score_entropy(logits);
    if (id == "react") return score_react(features, classifier, react_clip, temperature);
    if (id == "norm") return score_norm(features, mu);
    throw ConfigError("ConfigInvalid: unknown scorer '" + std::string(id) + "'");
}

std::string select_scorer(const ModelState& model, const GeometryState& geometry,
                          const Matrix& val_features, const ScorerSettings& settings,
                          std::uint64_t seed, double mix_alpha) {
    if (val_features.rows() == 0) throw NumericError("EmptyValidation: select_scorer");
    SeededRng rng(seed);
    PseudoOODBatch proxy = generate_pseudo_ood(val_features, val_features.rows(), mix_alpha,
                                               geometry.num_shells, rng);

    const double clip = calibrate_react_clip(val_features, settings.react_percentile);
    const Matrix id_logits = classifier_forward(model.classifier, val_features);
    const Matrix ood_logits = classifier_forward(model.classifier, proxy.raw);

    std::string best;
    double best_auroc = -1.0;
    for (auto id : kScorerIds) {
        const Vector id_scores = apply_scorer(id, id_logits, val_features, model.classifier,
                                              geometry.mu, clip, settings.temperature);
        const Vector ood_scores = apply_scorer(id, ood_logits, proxy.raw, model.classifier,
                                               geometry.mu, clip, settings.temperature);
        const double a = auroc(id_scores, ood_scores);
        if (a > best_auroc) {
            best_auroc = a;
            best = std::string(id);
        }
    }
    return best;
}

} // namespace bootood
