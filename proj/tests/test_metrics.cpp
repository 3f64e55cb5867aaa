#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "bootood/metrics.hpp"

using namespace bootood;

TEST_SUITE_BEGIN("metrics");

namespace {

// O(n*m) pairwise oracle: win 1, tie 1/2.
double auroc_oracle(const Vector& id, const Vector& ood) {
    double credit = 0.0;
    for (double a : id) {
        for (double b : ood) {
            if (a > b) credit += 1.0;
            else if (a == b) credit += 0.5;
        }
    }
    return credit / (static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

// Exhaustive threshold sweep over pooled scores: the largest threshold
// admitting at least the target fraction of ID scores.
double fpr_oracle(const Vector& id, const Vector& ood, double tpr_target) {
    std::set<double, std::greater<>> thresholds(id.begin(), id.end());
    thresholds.insert(ood.begin(), ood.end());
    double best_threshold = 0.0;
    bool found = false;
    for (double tau : thresholds) {
        std::size_t admitted = 0;
        for (double s : id) {
            if (s >= tau) ++admitted;
        }
        // integer comparison: admitted / n >= target
        if (static_cast<double>(admitted) >= tpr_target * static_cast<double>(id.size()) - 1e-12) {
            best_threshold = tau;
            found = true;
            break; // descending order: first hit is the largest threshold
        }
    }
    REQUIRE(found);
    std::size_t fp = 0;
    for (double s : ood) {
        if (s >= best_threshold) ++fp;
    }
    return static_cast<double>(fp) / static_cast<double>(ood.size());
}

// Recount precision/recall from scratch at every distinct threshold.
double aupr_oracle(const Vector& pos, const Vector& neg) {
    std::set<double, std::greater<>> thresholds(pos.begin(), pos.end());
    thresholds.insert(neg.begin(), neg.end());
    double area = 0.0, prev_recall = 0.0;
    for (double tau : thresholds) {
        std::size_t tp = 0, fp = 0;
        for (double s : pos) {
            if (s >= tau) ++tp;
        }
        for (double s : neg) {
            if (s >= tau) ++fp;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(pos.size());
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return area;
}

Vector random_scores(SeededRng& rng, std::size_t n, bool with_ties) {
    Vector out(n);
    for (double& v : out) {
        // draws from a small integer grid force ties
        v = with_ties ? static_cast<double>(rng.next_index(8)) : rng.next_uniform(-3.0, 3.0);
    }
    return out;
}

} // namespace

TEST_CASE("auroc examples") {
    CHECK(auroc({2.0, 3.0}, {0.0, 1.0}) == 1.0);
    CHECK(auroc({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.5);
    // pairs: (1 > 2? no) (3 > 2? yes)
    CHECK(auroc({1.0, 3.0}, {2.0}) == 0.5);
    CHECK_THROWS_AS(auroc({}, {1.0}), NumericError);
}

TEST_CASE("auroc equals the pairwise oracle on 200 random instances") {
    SeededRng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const bool ties = trial % 2 == 0;
        const Vector id = random_scores(rng, 1 + rng.next_index(50), ties);
        const Vector ood = random_scores(rng, 1 + rng.next_index(50), ties);
        CHECK(std::abs(auroc(id, ood) - auroc_oracle(id, ood)) < 1e-9);
    }
}

TEST_CASE("auroc complement identity is exact") {
    SeededRng rng(102);
    for (int trial = 0; trial < 200; ++trial) {
        const Vector a = random_scores(rng, 1 + rng.next_index(50), true);
        const Vector b = random_scores(rng, 1 + rng.next_index(50), true);
        CHECK(auroc(a, b) + auroc(b, a) == 1.0);
    }
}

TEST_CASE("fpr_at_tpr examples") {
    CHECK(fpr_at_tpr({10.0, 11.0, 12.0}, {1.0, 2.0}) == 0.0);

    // same grid both sides: threshold passes 95% of everything
    Vector grid(100);
    for (std::size_t i = 0; i < 100; ++i) grid[i] = static_cast<double>(i + 1);
    CHECK(fpr_at_tpr(grid, grid, 0.95) == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(fpr_at_tpr(grid, grid, 0.95) ==
          doctest::Approx(fpr_oracle(grid, grid, 0.95)).epsilon(1e-12));

    // identical continuous distributions, large n: close to 0.95
    SeededRng rng(103);
    Vector id(10000), ood(10000);
    for (double& v : id) v = rng.next_normal();
    for (double& v : ood) v = rng.next_normal();
    CHECK(std::abs(fpr_at_tpr(id, ood, 0.95) - 0.95) < 0.02);
}

TEST_CASE("fpr_at_tpr equals the exhaustive sweep oracle") {
    SeededRng rng(104);
    for (int trial = 0; trial < 200; ++trial) {
        const bool ties = trial % 2 == 0;
        const Vector id = random_scores(rng, 1 + rng.next_index(50), ties);
        const Vector ood = random_scores(rng, 1 + rng.next_index(50), ties);
        const double target = 0.5 + 0.5 * rng.next_double();
        CHECK(std::abs(fpr_at_tpr(id, ood, target) - fpr_oracle(id, ood, target)) < 1e-9);
    }
}

TEST_CASE("aupr examples") {
    CHECK(aupr({2.0, 3.0}, {0.0, 1.0}) == 1.0);

    // all scores equal: precision is the prevalence everywhere
    const Vector pos(3, 1.0), neg(9, 1.0);
    CHECK(aupr(pos, neg) == doctest::Approx(0.25).epsilon(1e-12));

    // random 6-element instance against the oracle
    const Vector p{0.9, 0.4, 0.65};
    const Vector n{0.5, 0.4, 0.1};
    CHECK(std::abs(aupr(p, n) - aupr_oracle(p, n)) < 1e-9);
}

TEST_CASE("aupr equals the exhaustive sweep oracle on 200 instances") {
    SeededRng rng(105);
    for (int trial = 0; trial < 200; ++trial) {
        const bool ties = trial % 2 == 0;
        const Vector pos = random_scores(rng, 1 + rng.next_index(50), ties);
        const Vector neg = random_scores(rng, 1 + rng.next_index(50), ties);
        CHECK(std::abs(aupr(pos, neg) - aupr_oracle(pos, neg)) < 1e-9);
    }
}

TEST_CASE("aupr_out equals aupr_in with swapped roles and negated scores") {
    SeededRng rng(106);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector id = random_scores(rng, 1 + rng.next_index(30), trial % 2 == 0);
        const Vector ood = random_scores(rng, 1 + rng.next_index(30), trial % 2 == 0);
        Vector neg_id(id.size()), neg_ood(ood.size());
        for (std::size_t i = 0; i < id.size(); ++i) neg_id[i] = -id[i];
        for (std::size_t i = 0; i < ood.size(); ++i) neg_ood[i] = -ood[i];
        CHECK(aupr_out(id, ood) == doctest::Approx(aupr_in(neg_ood, neg_id)).epsilon(1e-12));
    }
}

TEST_CASE("rank metrics are invariant under strictly increasing transforms") {
    SeededRng rng(107);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector id = random_scores(rng, 1 + rng.next_index(40), false);
        const Vector ood = random_scores(rng, 1 + rng.next_index(40), false);
        auto transform = [](const Vector& v) {
            Vector out(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::exp(v[i]);
            return out;
        };
        CHECK(std::abs(auroc(id, ood) - auroc(transform(id), transform(ood))) < 1e-12);
        CHECK(std::abs(fpr_at_tpr(id, ood, 0.95) -
                       fpr_at_tpr(transform(id), transform(ood), 0.95)) < 1e-12);
    }
}

TEST_CASE("id_accuracy") {
    Matrix onehot(3, 4);
    onehot(0, 2) = 1.0;
    onehot(1, 0) = 1.0;
    onehot(2, 3) = 1.0;
    CHECK(id_accuracy(onehot, {2, 0, 3}) == 1.0);
    CHECK(id_accuracy(onehot, {1, 1, 1}) == 0.0);

    Matrix three_of_four(4, 2);
    three_of_four(0, 0) = 1.0;
    three_of_four(1, 0) = 1.0;
    three_of_four(2, 1) = 1.0;
    three_of_four(3, 1) = 1.0;
    CHECK(id_accuracy(three_of_four, {0, 0, 1, 0}) == 0.75);

    // argmax ties break to the lowest class index
    Matrix tie(1, 3);
    CHECK(id_accuracy(tie, {0}) == 1.0);
    CHECK(id_accuracy(tie, {1}) == 0.0);
}

TEST_CASE("csv row format is stable") {
    EvalReport report;
    report.scorer = "msp";
    report.ood_set = "near";
    report.auroc_v = 0.5;
    report.n_id = 10;
    report.n_ood = 20;
    CHECK(eval_report_csv_header() ==
          "scorer,ood_set,auroc,fpr_at_95tpr,aupr_in,aupr_out,id_acc,n_id,n_ood");
    CHECK(eval_report_csv_row(report) == "msp,near,0.5,0,0,0,0,10,20");
}

TEST_SUITE_END();
