#include <doctest.h>

#include <cmath>
#include <set>

#include "bootood/data_synth.hpp"

using namespace bootood;

TEST_SUITE_BEGIN("data_synth");

TEST_CASE("blob geometry matches the simplex construction") {
    const BlobTask task = make_blob_task(4, 8, 10, 5, 5, 6.0, 1.0, 7);
    CHECK(task.centers.rows() == 4);
    // unit-norm frame scaled by the separation, pairwise cosine -1/3
    for (std::size_t c = 0; c < 4; ++c) {
        CHECK(l2_norm(task.centers.row(c)) == doctest::Approx(6.0).epsilon(1e-9));
    }
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b) {
            const double cosv = dot(task.centers.row(a), task.centers.row(b)) / 36.0;
            CHECK(cosv == doctest::Approx(-1.0 / 3.0).epsilon(1e-9));
        }
    }
    CHECK(task.train.size() == 40);
    CHECK(task.val.size() == 20);
    CHECK(task.test.size() == 20);
    CHECK(task.train.split == "train");
}

TEST_CASE("tiny sigma collapses samples onto the centers") {
    const LabeledDataset ds = make_blobs(3, 4, 5, 2.0, 1e-9, 11);
    // nearest-center classification is perfect
    const BlobTask ref = make_blob_task(3, 4, 5, 2, 2, 2.0, 1e-9, 11);
    for (std::size_t i = 0; i < ref.train.size(); ++i) {
        double best = 1e300;
        int arg = -1;
        for (std::size_t c = 0; c < 3; ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < 4; ++j) {
                const double diff = ref.train.inputs(i, j) - ref.centers(c, j);
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                arg = static_cast<int>(c);
            }
        }
        CHECK(arg == ref.train.labels[i]);
        CHECK(std::sqrt(best) < 1e-6);
    }
    CHECK(ds.size() == 15);
}

TEST_CASE("zero separation collapses the centers") {
    const BlobTask task = make_blob_task(3, 4, 5, 2, 2, 0.0, 1.0, 13);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(l2_norm(task.centers.row(c)) < 1e-9);
    }
}

TEST_CASE("default task is linearly separable via nearest centroid") {
    const BlobTask task = make_blob_task(4, 8, 500, 100, 100, 6.0, 1.0, 7);
    // class means of the train split as the probe
    Matrix means(4, 8);
    std::vector<std::size_t> counts(4, 0);
    for (std::size_t i = 0; i < task.train.size(); ++i) {
        const int y = task.train.labels[i];
        for (std::size_t j = 0; j < 8; ++j) means(y, j) += task.train.inputs(i, j);
        ++counts[static_cast<std::size_t>(y)];
    }
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t j = 0; j < 8; ++j) means(c, j) /= static_cast<double>(counts[c]);
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < task.test.size(); ++i) {
        double best = 1e300;
        int arg = -1;
        for (std::size_t c = 0; c < 4; ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < 8; ++j) {
                const double diff = task.test.inputs(i, j) - means(c, j);
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                arg = static_cast<int>(c);
            }
        }
        if (arg == task.test.labels[i]) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(task.test.size()) > 0.99);
}

TEST_CASE("splits are disjoint and seed-deterministic") {
    const BlobTask a = make_blob_task(3, 4, 20, 10, 10, 4.0, 1.0, 17);
    const BlobTask b = make_blob_task(3, 4, 20, 10, 10, 4.0, 1.0, 17);
    CHECK(a.train.inputs == b.train.inputs);
    CHECK(a.val.inputs == b.val.inputs);
    CHECK(a.test.inputs == b.test.inputs);

    // continuous draws: identical rows across splits would mean overlap
    std::set<std::pair<double, double>> seen;
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        seen.insert({a.train.inputs(i, 0), a.train.inputs(i, 1)});
    }
    for (std::size_t i = 0; i < a.val.size(); ++i) {
        CHECK(seen.count({a.val.inputs(i, 0), a.val.inputs(i, 1)}) == 0);
    }
    const BlobTask c = make_blob_task(3, 4, 20, 10, 10, 4.0, 1.0, 18);
    CHECK_FALSE(a.train.inputs == c.train.inputs);
}

TEST_CASE("near ood points rebuild exactly from the recorded draws") {
    const BlobTask task = make_blob_task(4, 8, 50, 10, 10, 6.0, 1.0, 7);
    const NearOODSet set = make_near_ood(task.train, 64, 0.0, 99, 0.1, 0.9);
    CHECK(set.points.rows() == 64);
    for (std::size_t k = 0; k < 64; ++k) {
        CHECK(set.center_a[k] != set.center_b[k]);
        CHECK(set.lambdas[k] >= 0.1);
        CHECK(set.lambdas[k] <= 0.9);
        for (std::size_t j = 0; j < 8; ++j) {
            const double rebuilt = set.lambdas[k] * set.centers(set.center_a[k], j) +
                                   (1.0 - set.lambdas[k]) * set.centers(set.center_b[k], j);
            CHECK(set.points(k, j) == rebuilt);
            const double lo =
                std::min(set.centers(set.center_a[k], j), set.centers(set.center_b[k], j));
            const double hi =
                std::max(set.centers(set.center_a[k], j), set.centers(set.center_b[k], j));
            CHECK(set.points(k, j) >= lo - 1e-12);
            CHECK(set.points(k, j) <= hi + 1e-12);
        }
    }
    CHECK_THROWS_AS(make_near_ood(task.train, 8, 0.0, 1, 0.9, 0.1), ConfigError);
}

TEST_CASE("far ood modes and support disjointness") {
    const Matrix empty = make_far_ood(4, 0, FarOODMode::UniformBox, 10.0, 3);
    CHECK(empty.rows() == 0);

    const BlobTask task = make_blob_task(4, 8, 50, 10, 10, 6.0, 1.0, 7);
    const double scale = 3.0 * (6.0 + 3.0);
    const Matrix far = make_far_ood(8, 400, FarOODMode::UniformBox, scale, 5);
    CHECK(fraction_near_centers(far, task.centers, 3.0) < 0.01);

    // a huge box keeps every sample far from every center
    const Matrix huge = make_far_ood(8, 50, FarOODMode::UniformBox, 1e6, 6);
    bool all_far = true;
    for (std::size_t i = 0; i < huge.rows(); ++i) {
        double best = 1e300;
        for (std::size_t c = 0; c < 4; ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < 8; ++j) {
                const double diff = huge(i, j) - task.centers(c, j);
                d += diff * diff;
            }
            best = std::min(best, d);
        }
        if (std::sqrt(best) <= 6.0) all_far = false;
    }
    CHECK(all_far);

    const Matrix shifted = make_far_ood(8, 100, FarOODMode::ShiftedGaussian, scale, 7);
    CHECK(shifted.rows() == 100);
    CHECK(fraction_near_centers(shifted, task.centers, 3.0) < 0.01);

    CHECK(far == make_far_ood(8, 400, FarOODMode::UniformBox, scale, 5));
    CHECK_THROWS_AS(far_ood_mode_from_string("noise"), ConfigError);
    CHECK_THROWS_AS(make_far_ood(8, 10, FarOODMode::UniformBox, 0.0, 1), ConfigError);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(make_blobs(1, 4, 10, 2.0, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(make_blobs(3, 2, 10, 2.0, 1.0, 1), ConfigError); // dim < classes
    CHECK_THROWS_AS(make_blobs(3, 4, 10, 2.0, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(make_blobs(3, 4, 1, 2.0, 1.0, 1), ConfigError);
}

TEST_SUITE_END();
