#pragma once

#include <cstddef>
#include <vector>

#include "bootood/numeric.hpp"

namespace bootood {

// The sampled randomness of one pseudo-OOD batch, kept separate from the
// feature math so mixtures can be recomputed from fresh features during
// backpropagation and gradient checking.
struct MixPlan {
    std::vector<std::size_t> src_i;
    std::vector<std::size_t> src_j;
    Vector lambdas;          // in [0, 1]
    std::vector<int> shells; // 0-based target shell per row

    std::size_t size() const { return lambdas.size(); }
};

struct PseudoOODBatch {
    Matrix raw;        // lambda*h_i + (1-lambda)*h_j, pre-normalization
    Matrix normalized; // unit rows
    MixPlan plan;
};

// Draws (i != j) pairs uniformly, lambda ~ Beta(alpha, alpha), and a uniform
// shell target per row.
MixPlan sample_mix_plan(std::size_t batch_size, std::size_t count, double alpha,
                        int num_shells, SeededRng& rng);

// Deterministic given the plan; throws ZeroNorm if a mixture collapses.
PseudoOODBatch mix_features(const Matrix& features, const MixPlan& plan);

PseudoOODBatch generate_pseudo_ood(const Matrix& features, std::size_t count,
                                   double alpha, int num_shells, SeededRng& rng);

// d(normalized)/d(raw) applied to an upstream gradient, row-wise:
//   draw = (g - <g, n> n) / ||raw||.
Matrix normalize_rows_backward(const Matrix& raw, const Matrix& normalized,
                               const Matrix& dnormalized);

// Routes gradients w.r.t. the raw mixtures back to the source features:
//   dfeatures[i] += lambda * draw,  dfeatures[j] += (1 - lambda) * draw.
void scatter_mix_grad(const MixPlan& plan, const Matrix& draw, Matrix& dfeatures);

} // namespace bootood
