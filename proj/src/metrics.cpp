#include "bootood/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bootood {

namespace {

void require_nonempty(const Vector& a, const Vector& b, const char* what) {
    if (a.empty() || b.empty()) {
        throw NumericError(std::string("EmptyScoreSet: ") + what);
    }
    require_finite(a, what);
    require_finite(b, what);
}

} // namespace

double auroc(const Vector& id_scores, const Vector& ood_scores) {
    require_nonempty(id_scores, ood_scores, "auroc");
    // Count (wins, ties) of ID over OOD with a sorted merge. 2*wins + ties is
    // an exact integer, so the only rounding is the final division.
    Vector id_sorted = id_scores;
    Vector ood_sorted = ood_scores;
    std::sort(id_sorted.begin(), id_sorted.end());
    std::sort(ood_sorted.begin(), ood_sorted.end());

    // For each ID score, count OOD scores strictly below and equal. The
    // counts are exact in a double up to 2^53 pair comparisons.
    double two_wins_plus_ties = 0.0;
    std::size_t below = 0, upto = 0;
    for (double s : id_sorted) {
        while (below < ood_sorted.size() && ood_sorted[below] < s) ++below;
        if (upto < below) upto = below;
        while (upto < ood_sorted.size() && ood_sorted[upto] <= s) ++upto;
        two_wins_plus_ties += static_cast<double>(2 * below + (upto - below));
    }
    const double denom =
        2.0 * static_cast<double>(id_scores.size()) * static_cast<double>(ood_scores.size());
    return two_wins_plus_ties / denom;
}

double fpr_at_tpr(const Vector& id_scores, const Vector& ood_scores, double tpr_target) {
    require_nonempty(id_scores, ood_scores, "fpr_at_tpr");
    if (!(tpr_target > 0.0 && tpr_target <= 1.0)) {
        throw NumericError("ConfigInvalid: tpr target must lie in (0, 1]");
    }
    // Largest threshold keeping >= tpr_target of the ID scores: the
    // ceil(tpr*n)-th ID score from the top.
    Vector id_sorted = id_scores;
    std::sort(id_sorted.begin(), id_sorted.end(), std::greater<>());
    const std::size_t n = id_sorted.size();
    std::size_t need = static_cast<std::size_t>(
        std::ceil(tpr_target * static_cast<double>(n) - 1e-12));
    if (need == 0) need = 1;
    if (need > n) need = n;
    const double threshold = id_sorted[need - 1];

    std::size_t false_positives = 0;
    for (double s : ood_scores) {
        if (s >= threshold) ++false_positives;
    }
    return static_cast<double>(false_positives) / static_cast<double>(ood_scores.size());
}

double aupr(const Vector& pos_scores, const Vector& neg_scores) {
    require_nonempty(pos_scores, neg_scores, "aupr");
    // Walk thresholds from high to low over the pooled distinct scores;
    // at each threshold precision is evaluated after admitting the whole
    // tie group (step interpolation).
    struct Tagged {
        double score;
        bool positive;
    };
    std::vector<Tagged> all;
    all.reserve(pos_scores.size() + neg_scores.size());
    for (double s : pos_scores) all.push_back({s, true});
    for (double s : neg_scores) all.push_back({s, false});
    std::sort(all.begin(), all.end(),
              [](const Tagged& a, const Tagged& b) { return a.score > b.score; });

    const double total_pos = static_cast<double>(pos_scores.size());
    double tp = 0.0, fp = 0.0;
    double area = 0.0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].score == all[i].score) {
            if (all[j].positive) tp += 1.0;
            else fp += 1.0;
            ++j;
        }
        const double recall = tp / total_pos;
        const double precision = tp / (tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return area;
}

double aupr_in(const Vector& id_scores, const Vector& ood_scores) {
    return aupr(id_scores, ood_scores);
}

double aupr_out(const Vector& id_scores, const Vector& ood_scores) {
    Vector neg_ood(ood_scores.size()), neg_id(id_scores.size());
    for (std::size_t i = 0; i < ood_scores.size(); ++i) neg_ood[i] = -ood_scores[i];
    for (std::size_t i = 0; i < id_scores.size(); ++i) neg_id[i] = -id_scores[i];
    return aupr(neg_ood, neg_id);
}

double id_accuracy(const Matrix& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows()) {
        throw NumericError("DimensionMismatch: one label per logits row expected");
    }
    if (logits.rows() == 0) throw NumericError("EmptyBatch: id_accuracy of empty batch");
    std::size_t correct = 0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        auto row = logits.row(r);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c] > row[best]) best = c; // ties keep the lowest index
        }
        if (labels[r] >= 0 && static_cast<std::size_t>(labels[r]) == best) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

std::string eval_report_csv_header() {
    return "scorer,ood_set,auroc,fpr_at_95tpr,aupr_in,aupr_out,id_acc,n_id,n_ood";
}

std::string eval_report_csv_row(const EvalReport& report) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%zu",
                  report.scorer.c_str(), report.ood_set.c_str(), report.auroc_v, report.fpr95,
                  report.aupr_in, report.aupr_out, report.id_acc, report.n_id, report.n_ood);
    return buf;
}

} // namespace bootood
