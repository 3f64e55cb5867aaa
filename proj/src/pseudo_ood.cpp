#include "bootood/pseudo_ood.hpp"

#include <string>

namespace bootood {

MixPlan sample_mix_plan(std::size_t batch_size, std::size_t count, double alpha,
                        int num_shells, SeededRng& rng) {
    if (batch_size < 2) {
        throw NumericError("BatchTooSmall: pseudo-OOD mixing needs at least 2 features, got " +
                           std::to_string(batch_size));
    }
    if (count < 1) throw NumericError("EmptyBatch: pseudo-OOD count must be >= 1");
    if (num_shells < 1) throw ConfigError("InvalidK: shell count must be >= 1");

    MixPlan plan;
    plan.src_i.reserve(count);
    plan.src_j.reserve(count);
    plan.lambdas.reserve(count);
    plan.shells.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = rng.next_index(batch_size);
        std::size_t j = rng.next_index(batch_size - 1);
        if (j >= i) ++j;
        plan.src_i.push_back(i);
        plan.src_j.push_back(j);
        plan.lambdas.push_back(sample_beta(rng, alpha));
        plan.shells.push_back(static_cast<int>(rng.next_index(static_cast<std::size_t>(num_shells))));
    }
    return plan;
}

PseudoOODBatch mix_features(const Matrix& features, const MixPlan& plan) {
    PseudoOODBatch batch;
    batch.plan = plan;
    batch.raw = Matrix(plan.size(), features.cols());
    for (std::size_t k = 0; k < plan.size(); ++k) {
        const double lam = plan.lambdas[k];
        auto hi = features.row(plan.src_i[k]);
        auto hj = features.row(plan.src_j[k]);
        auto out = batch.raw.row(k);
        for (std::size_t c = 0; c < out.size(); ++c) {
            out[c] = lam * hi[c] + (1.0 - lam) * hj[c];
        }
    }
    batch.normalized = batch.raw;
    for (std::size_t k = 0; k < plan.size(); ++k) {
        l2_normalize_inplace(batch.normalized.row(k));
    }
    return batch;
}

PseudoOODBatch generate_pseudo_ood(const Matrix& features, std::size_t count,
                                   double alpha, int num_shells, SeededRng& rng) {
    MixPlan plan = sample_mix_plan(features.rows(), count, alpha, num_shells, rng);
    return mix_features(features, plan);
}

Matrix normalize_rows_backward(const Matrix& raw, const Matrix& normalized,
                               const Matrix& dnormalized) {
    Matrix draw(raw.rows(), raw.cols());
    for (std::size_t k = 0; k < raw.rows(); ++k) {
        const double norm = l2_norm(raw.row(k));
        const double proj = dot(dnormalized.row(k), normalized.row(k));
        auto g = dnormalized.row(k);
        auto n = normalized.row(k);
        auto out = draw.row(k);
        for (std::size_t c = 0; c < out.size(); ++c) {
            out[c] = (g[c] - proj * n[c]) / norm;
        }
    }
    return draw;
}

void scatter_mix_grad(const MixPlan& plan, const Matrix& draw, Matrix& dfeatures) {
    if (draw.rows() != plan.size()) {
        throw NumericError("ShapeMismatch: mix gradient rows do not match the plan");
    }
    for (std::size_t k = 0; k < plan.size(); ++k) {
        const double lam = plan.lambdas[k];
        auto g = draw.row(k);
        auto di = dfeatures.row(plan.src_i[k]);
        auto dj = dfeatures.row(plan.src_j[k]);
        for (std::size_t c = 0; c < g.size(); ++c) {
            di[c] += lam * g[c];
            dj[c] += (1.0 - lam) * g[c];
        }
    }
}

} // namespace bootood
