#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bootood/numeric.hpp"

namespace bootood {

struct LabeledDataset {
    Matrix inputs;           // N×d
    std::vector<int> labels; // 0-based, in [0, num_classes)
    int num_classes = 0;
    std::string split;       // train / val / test
    std::string provenance;  // generator + seed

    std::size_t size() const { return inputs.rows(); }
    std::size_t dim() const { return inputs.cols(); }
};

// Gaussian blobs around class centers placed at separation * (vertices of a
// simplex frame rotated by a random orthonormal basis): the centers are unit
// length, pairwise cosine -1/(C-1), scaled by `separation`.
LabeledDataset make_blobs(int num_classes, std::size_t dim, std::size_t n_per_class,
                          double separation, double sigma, std::uint64_t seed);

// Shared centers, three disjoint splits.
struct BlobTask {
    Matrix centers; // C×d
    LabeledDataset train;
    LabeledDataset val;
    LabeledDataset test;
};

BlobTask make_blob_task(int num_classes, std::size_t dim, std::size_t n_train_per_class,
                        std::size_t n_val_per_class, std::size_t n_test_per_class,
                        double separation, double sigma, std::uint64_t seed);

// Points between two random class centers: lambda*c_a + (1-lambda)*c_b +
// N(0, jitter^2), lambda ~ U(lambda_lo, lambda_hi). Class centers are the
// empirical class means of the dataset. The (a, b, lambda) draws are
// recorded so each point can be rebuilt exactly. The default window reaches
// toward the segment endpoints: points there sit in the tails of a class
// where a softmax classifier stays confident, which is what makes the set
// genuinely near rather than just uncertain.
struct NearOODSet {
    Matrix points;
    Matrix centers; // empirical class means used for mixing
    std::vector<std::size_t> center_a;
    std::vector<std::size_t> center_b;
    Vector lambdas;
};

NearOODSet make_near_ood(const LabeledDataset& dataset, std::size_t n, double jitter,
                         std::uint64_t seed, double lambda_lo = 0.1, double lambda_hi = 0.9);

enum class FarOODMode { UniformBox, ShiftedGaussian };

FarOODMode far_ood_mode_from_string(const std::string& token);
std::string to_string(FarOODMode mode);

// Mass well outside the ID support: uniform over [-scale, scale]^d or a unit
// Gaussian centered at distance `scale` in a random direction.
Matrix make_far_ood(std::size_t dim, std::size_t n, FarOODMode mode, double scale,
                    std::uint64_t seed);

// Fraction of rows within `radius` of any center; the support-disjointness
// measure recorded for far-OOD sets.
double fraction_near_centers(const Matrix& samples, const Matrix& centers, double radius);

} // namespace bootood
