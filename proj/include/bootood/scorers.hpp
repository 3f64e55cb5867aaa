#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "bootood/geometry.hpp"
#include "bootood/model.hpp"
#include "bootood/numeric.hpp"

namespace bootood {

// Post-hoc OOD scores over a frozen model. Every scorer returns one scalar
// per row, oriented higher = more ID-like.

// Stable CLI/config tokens, also the tie-break order of select_scorer.
inline constexpr std::array<std::string_view, 5> kScorerIds = {"msp", "ebo", "entropy",
                                                               "react", "norm"};

bool is_scorer_id(std::string_view id);

// Max softmax probability per row.
Vector score_msp(const Matrix& logits);

// T * logsumexp(z / T); adding c to all logits shifts the score by c.
Vector score_ebo(const Matrix& logits, double temperature);

// Negative Shannon entropy of softmax(z).
Vector score_entropy(const Matrix& logits);

// Energy score on logits recomputed from element-wise min(h, clip).
Vector score_react(const Matrix& features, const ClassifierParams& classifier,
                   double clip, double temperature);

// ||h - mu|| per row; the trained norm gap puts ID at larger radii.
Vector score_norm(const Matrix& features, const Vector& mu);

// Linear-interpolation percentile over all feature entries pooled; the ReAct
// clip calibration.
double percentile(Vector values, double pct);
double calibrate_react_clip(const Matrix& val_features, double pct);

struct ScorerSettings {
    double temperature = 1.0;
    double react_percentile = 90.0;
};

// Dispatch by id. react_clip must already be calibrated.
Vector apply_scorer(std::string_view id, const Matrix& logits, const Matrix& features,
                    const ClassifierParams& classifier, const Vector& mu, double react_clip,
                    double temperature);

// Picks the scorer with the best AUROC against pseudo-OOD mixtures of the
// validation features (raw mixtures; the only negatives available without
// real OOD data). Ties go to the earlier id in kScorerIds.
std::string select_scorer(const ModelState& model, const GeometryState& geometry,
                          const Matrix& val_features, const ScorerSettings& settings,
                          std::uint64_t seed, double mix_alpha = 1.0);

} // namespace bootood
