#include <doctest.h>

#include <cmath>

#include "bootood/losses.hpp"

using namespace bootood;

TEST_SUITE_BEGIN("losses");

namespace {

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

} // namespace

TEST_CASE("ce_loss values") {
    Matrix uniform(3, 4); // all-zero logits
    const CeLossResult u = ce_loss(uniform, {0, 1, 3});
    CHECK(u.value == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    Matrix confident(2, 3);
    confident(0, 1) = 1000.0;
    confident(1, 2) = 1000.0;
    const CeLossResult c = ce_loss(confident, {1, 2});
    CHECK(std::abs(c.value) < 1e-9);

    CHECK_THROWS_AS(ce_loss(uniform, {0, 1, 4}), NumericError);
    CHECK_THROWS_AS(ce_loss(uniform, {0, -1, 2}), NumericError);
    CHECK_THROWS_AS(ce_loss(uniform, {0, 1}), NumericError);
}

TEST_CASE("ce_loss gradient is softmax minus one-hot, oracle checked") {
    SeededRng rng(41);
    Matrix logits(3, 4);
    for (double& v : logits.data()) v = rng.next_uniform(-2.0, 2.0);
    const std::vector<int> labels{2, 0, 3};
    const CeLossResult result = ce_loss(logits, labels);

    for (std::size_t r = 0; r < 3; ++r) {
        const Vector p = softmax(logits.row_copy(r));
        for (std::size_t c = 0; c < 4; ++c) {
            const double expected =
                (p[c] - (labels[r] == static_cast<int>(c) ? 1.0 : 0.0)) / 3.0;
            CHECK(result.dlogits(r, c) == doctest::Approx(expected).epsilon(1e-10));
        }
    }

    auto loss_at = [&](const Vector& flat) {
        return ce_loss(Matrix::from_rows(3, 4, flat), labels).value;
    };
    const Vector numeric =
        finite_diff_grad(loss_at, Vector(logits.data().begin(), logits.data().end()), 1e-6);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        CHECK(rel_err(result.dlogits.data()[i], numeric[i]) < 1e-4);
    }
}

TEST_CASE("radius_cls_loss degenerate and uniform cases") {
    Matrix one_class(3, 1); // K = 1: softmax of a single logit is 1
    const CeLossResult k1 = radius_cls_loss(one_class, {0, 0, 0});
    CHECK(k1.value == doctest::Approx(0.0).epsilon(1e-12));

    Matrix uniform(2, 4);
    const CeLossResult u = radius_cls_loss(uniform, {1, 2});
    CHECK(u.value == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    CHECK_THROWS_AS(radius_cls_loss(uniform, {1, 4}), NumericError);
}

TEST_CASE("radius_reg_loss values and degenerate row") {
    // distance exactly on target contributes zero
    Matrix on_target(1, 2);
    on_target(0, 0) = 3.0;
    on_target(0, 1) = 4.0;
    const RadiusRegResult zero = radius_reg_loss(on_target, {0.0, 0.0}, {5.0});
    CHECK(zero.value == doctest::Approx(0.0).epsilon(1e-12));

    const RadiusRegResult nine = radius_reg_loss(on_target, {0.0, 0.0}, {2.0});
    CHECK(nine.value == doctest::Approx(9.0).epsilon(1e-12));

    // feature at mu: subgradient zero, counted not thrown
    Matrix at_center(1, 2);
    at_center(0, 0) = 1.0;
    at_center(0, 1) = -1.0;
    const RadiusRegResult degenerate = radius_reg_loss(at_center, {1.0, -1.0}, {0.5});
    CHECK(degenerate.degenerate_rows == 1);
    CHECK(degenerate.dfeatures(0, 0) == 0.0);
    CHECK(degenerate.value == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(radius_reg_loss(on_target, {0.0}, Vector{1.0}), NumericError);
}

TEST_CASE("radius_reg_loss gradient matches the oracle") {
    SeededRng rng(42);
    Matrix features(4, 3);
    for (double& v : features.data()) v = rng.next_uniform(-3.0, 3.0);
    const Vector mu{0.2, -0.4, 0.8};
    Vector targets(4);
    for (double& v : targets) v = rng.next_uniform(0.2, 2.0);

    const RadiusRegResult result = radius_reg_loss(features, mu, targets);
    auto loss_at = [&](const Vector& flat) {
        return radius_reg_loss(Matrix::from_rows(4, 3, flat), mu, targets).value;
    };
    const Vector numeric = finite_diff_grad(
        loss_at, Vector(features.data().begin(), features.data().end()), 1e-6);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        CHECK(rel_err(result.dfeatures.data()[i], numeric[i]) < 1e-4);
    }
}

TEST_CASE("separation_loss values") {
    // orthogonal feature scores zero
    ClassifierParams w{Matrix(2, 3)};
    w.w(0, 0) = 2.0;
    w.w(1, 1) = -1.0;
    Matrix ortho(1, 3);
    ortho(0, 2) = 5.0;
    CHECK(separation_loss(ortho, w).value == doctest::Approx(0.0).epsilon(1e-12));

    // single class, feature along it: |cos| = 1
    ClassifierParams one{Matrix(1, 2)};
    one.w(0, 0) = 3.0;
    Matrix aligned(1, 2);
    aligned(0, 0) = 0.5;
    CHECK(separation_loss(aligned, one).value == doctest::Approx(1.0).epsilon(1e-12));

    // two orthogonal classes, diagonal feature: mean |cos| = 1/sqrt(2)
    ClassifierParams two{Matrix(2, 2)};
    two.w(0, 0) = 1.0;
    two.w(1, 1) = 1.0;
    Matrix diag(1, 2);
    diag(0, 0) = 1.0;
    diag(0, 1) = 1.0;
    CHECK(separation_loss(diag, two).value ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(separation_loss(Matrix(1, 2), two), NumericError); // zero-norm row
}

TEST_CASE("separation_loss gradient w.r.t. features matches the oracle") {
    SeededRng rng(43);
    ClassifierParams w{Matrix(3, 4)};
    for (double& v : w.w.data()) v = rng.next_uniform(-1.0, 1.0);
    Matrix features(3, 4);
    for (double& v : features.data()) v = rng.next_uniform(-2.0, 2.0);

    const SeparationResult result = separation_loss(features, w);
    auto loss_at = [&](const Vector& flat) {
        return separation_loss(Matrix::from_rows(3, 4, flat), w).value;
    };
    const Vector numeric = finite_diff_grad(
        loss_at, Vector(features.data().begin(), features.data().end()), 1e-6);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        CHECK(rel_err(result.dfeatures.data()[i], numeric[i]) < 1e-4);
    }
}

TEST_CASE("warmup_weight ramp") {
    CHECK(warmup_weight(10, 10, 20, 0.5) == 0.0);
    CHECK(warmup_weight(0, 10, 20, 0.5) == 0.0);
    CHECK(warmup_weight(20, 10, 20, 0.5) == 0.5);
    CHECK(warmup_weight(100, 10, 20, 0.5) == 0.5);
    CHECK(warmup_weight(15, 10, 20, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(warmup_weight(0, 20, 10, 0.5), ConfigError);
}

TEST_CASE("total_loss composition") {
    LossWeights w;
    w.lambda_cls = 1.0;
    w.lambda_reg = 1.0;
    w.lambda_ood_max = 1.0;
    w.lambda_sep_max = 1.0;
    w.ood_warmup_start = 0;
    w.ood_warmup_end = 10;
    w.sep_warmup_start = 0;
    w.sep_warmup_end = 10;

    // before both ramps: the total is the CE term alone
    const LossBreakdown early = total_loss(1.5, 9.0, 9.0, 9.0, w, 0);
    CHECK(early.total == 1.5);
    CHECK(early.w_ood == 0.0);

    // all components 1 at full weights: 1 + (1 + 1) + 1 = 4
    const LossBreakdown full = total_loss(1.0, 1.0, 1.0, 1.0, w, 10);
    CHECK(full.total == doctest::Approx(4.0).epsilon(1e-12));

    // zero inner weights reduce to CE + sep
    LossWeights no_inner = w;
    no_inner.lambda_cls = 0.0;
    no_inner.lambda_reg = 0.0;
    const LossBreakdown ce_sep = total_loss(2.0, 5.0, 7.0, 0.5, no_inner, 10);
    CHECK(ce_sep.total == doctest::Approx(2.5).epsilon(1e-12));

    // reconstruction identity
    const LossBreakdown mid = total_loss(0.7, 0.3, 0.9, 0.2, w, 5);
    CHECK(std::abs(mid.total - (mid.ce + mid.w_ood * (0.3 + 0.9) + mid.w_sep * 0.2)) < 1e-12);
}

TEST_CASE("loss values are non-negative on random inputs") {
    SeededRng rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix logits(3, 4);
        for (double& v : logits.data()) v = rng.next_uniform(-3.0, 3.0);
        CHECK(ce_loss(logits, {0, 1, 2}).value >= 0.0);

        Matrix features(3, 4);
        for (double& v : features.data()) v = rng.next_uniform(-3.0, 3.0);
        Vector mu(4), targets(3);
        for (double& v : mu) v = rng.next_uniform(-1.0, 1.0);
        for (double& v : targets) v = rng.next_uniform(0.1, 2.0);
        CHECK(radius_reg_loss(features, mu, targets).value >= 0.0);

        ClassifierParams w{Matrix(2, 4)};
        for (double& v : w.w.data()) v = rng.next_uniform(-1.0, 1.0);
        CHECK(separation_loss(features, w).value >= 0.0);
    }
}

TEST_SUITE_END();
