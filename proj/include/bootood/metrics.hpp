#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bootood/numeric.hpp"

namespace bootood {

// Scores are oriented higher = more ID-like throughout.

// Probability a random ID score exceeds a random OOD score, ties half.
// Rank-based (midranks), single final division so auroc(a,b)+auroc(b,a)=1.
double auroc(const Vector& id_scores, const Vector& ood_scores);

// Threshold = the largest score admitting at least tpr_target of the ID
// scores (score >= threshold counts as ID); returns the OOD fraction passing.
double fpr_at_tpr(const Vector& id_scores, const Vector& ood_scores,
                  double tpr_target = 0.95);

// Area under the precision-recall curve, step interpolation over the
// distinct thresholds (positives are score >= threshold).
double aupr(const Vector& pos_scores, const Vector& neg_scores);

// Fraction of rows whose argmax logit matches the label; argmax ties go to
// the lowest class index.
double id_accuracy(const Matrix& logits, const std::vector<int>& labels);

struct EvalReport {
    std::string scorer;
    std::string ood_set;
    double auroc_v = 0.0;
    double fpr95 = 0.0;
    double aupr_in = 0.0;
    double aupr_out = 0.0;
    double id_acc = 0.0;
    std::size_t n_id = 0;
    std::size_t n_ood = 0;
};

// Fixed column order shared by the CSV artifacts and their tests.
std::string eval_report_csv_header();
std::string eval_report_csv_row(const EvalReport& report);

// AUPR with ID as the positive class / OOD as the positive class (negated
// scores so that the positive class still sorts high).
double aupr_in(const Vector& id_scores, const Vector& ood_scores);
double aupr_out(const Vector& id_scores, const Vector& ood_scores);

} // namespace bootood
