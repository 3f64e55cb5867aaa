#pragma once

#include <cstddef>
#include <vector>

#include "bootood/model.hpp"
#include "bootood/numeric.hpp"

namespace bootood {

// Collapse diagnostics over a labeled feature snapshot.
//   nc1:            trace of within-class scatter over trace of between-class
//                   scatter, both about the global mean.
//   norm_cv:        std/mean of the centered class-mean norms.
//   etf_deviation:  mean |cos(m_a, m_b) + 1/(C-1)| over centered class-mean
//                   pairs; zero for a perfect simplex frame.
struct NCReport {
    double nc1 = 0.0;
    double norm_cv = 0.0;
    double etf_deviation = 0.0;
    double train_error = -1.0; // filled by callers that also have logits
};

NCReport nc_metrics(const Matrix& features, const std::vector<int>& labels);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;

    std::size_t total() const;
    double bin_width() const;
};

// Uniform bins spanning [lo, hi]; values outside clamp into the end bins.
Histogram histogram_from_values(const Vector& values, std::size_t bins, double lo, double hi);

Vector radius_values(const Matrix& features, const Vector& mu);
Vector max_cosine_values(const Matrix& features, const ClassifierParams& classifier);

// Bins span the observed range of the values themselves.
Histogram radius_histogram(const Matrix& features, const Vector& mu, std::size_t bins);
Histogram max_cosine_histogram(const Matrix& features, const ClassifierParams& classifier,
                               std::size_t bins = 30);

} // namespace bootood
