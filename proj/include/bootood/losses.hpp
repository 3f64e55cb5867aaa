#pragma once

#include <cstddef>
#include <vector>

#include "bootood/model.hpp"
#include "bootood/numeric.hpp"

namespace bootood {

// Mixing weights of the total objective. The two warm-up schedules ramp the
// auxiliary losses in linearly; before `start` they contribute nothing.
struct LossWeights {
    double lambda_cls = 1.0;
    double lambda_reg = 1.0;
    double lambda_ood_max = 0.5;
    double lambda_sep_max = 0.1;
    long ood_warmup_start = 0;
    long ood_warmup_end = 1;
    long sep_warmup_start = 0;
    long sep_warmup_end = 1;
};

struct LossBreakdown {
    double ce = 0.0;
    double radius_cls = 0.0;
    double radius_reg = 0.0;
    double sep = 0.0;
    double total = 0.0;
    double w_ood = 0.0;
    double w_sep = 0.0;
};

struct CeLossResult {
    double value = 0.0;
    Matrix dlogits; // same shape as logits, already divided by the batch size
};

// Mean over the batch of -log softmax(logits)[label]. Labels are 0-based.
CeLossResult ce_loss(const Matrix& logits, const std::vector<int>& labels);

// Cross-entropy of the radius head's shell logits against the target shells;
// identical machinery, kept separate for the distinct error message.
CeLossResult radius_cls_loss(const Matrix& shell_logits, const std::vector<int>& shells);

struct RadiusRegResult {
    double value = 0.0;
    Matrix dfeatures;
    std::size_t degenerate_rows = 0; // rows exactly at mu; subgradient 0 used
};

// Mean over rows of (||row - mu|| - rho_row)^2.
RadiusRegResult radius_reg_loss(const Matrix& features, const Vector& mu,
                                const Vector& rho_targets);

struct SeparationResult {
    double value = 0.0;
    Matrix dfeatures; // gradient w.r.t. the feature rows; W is detached
};

// Mean over rows and classes of |cos(row, w_c)|. Both sides are normalized
// inside; the returned gradient is w.r.t. the feature rows only.
SeparationResult separation_loss(const Matrix& features, const ClassifierParams& classifier);

// 0 for t <= start, lambda_max for t >= end, linear in between.
double warmup_weight(long t, long start, long end, double lambda_max);

// total = ce + w_ood(t) * (lambda_cls * cls + lambda_reg * reg) + w_sep(t) * sep.
LossBreakdown total_loss(double ce, double radius_cls, double radius_reg, double sep,
                         const LossWeights& weights, long t);

} // namespace bootood
