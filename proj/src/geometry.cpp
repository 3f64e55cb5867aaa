#include "bootood/geometry.hpp"

#include <cmath>
#include <numbers>

namespace bootood {

std::string to_string(ShellSpacing spacing) {
    return spacing == ShellSpacing::Uniform ? "uniform" : "cosine";
}

ShellSpacing shell_spacing_from_string(const std::string& token) {
    if (token == "uniform") return ShellSpacing::Uniform;
    if (token == "cosine") return ShellSpacing::Cosine;
    throw ConfigError("ConfigInvalid: unknown shell spacing '" + token + "'");
}

GeometryState make_geometry(std::size_t feature_dim, int num_shells,
                            ShellSpacing spacing, double beta_mu, double beta_r) {
    if (num_shells < 1) throw ConfigError("InvalidK: shell count must be >= 1");
    if (!(beta_mu > 0.0 && beta_mu <= 1.0) || !(beta_r > 0.0 && beta_r <= 1.0)) {
        throw ConfigError("ConfigInvalid: EMA coefficients must lie in (0, 1]");
    }
    GeometryState state;
    state.mu = Vector(feature_dim, 0.0);
    state.num_shells = num_shells;
    state.spacing = spacing;
    state.beta_mu = beta_mu;
    state.beta_r = beta_r;
    return state;
}

void update_mean(GeometryState& state, const Matrix& features) {
    if (features.rows() == 0) throw NumericError("EmptyBatch: update_mean");
    Vector batch_mean = row_means(features);
    if (batch_mean.size() != state.mu.size()) {
        throw NumericError("DimensionMismatch: geometry tracks dim " +
                           std::to_string(state.mu.size()) + ", batch has " +
                           std::to_string(batch_mean.size()));
    }
    if (!state.mu_initialized) {
        state.mu = std::move(batch_mean);
        state.mu_initialized = true;
        return;
    }
    for (std::size_t i = 0; i < state.mu.size(); ++i) {
        state.mu[i] = state.beta_mu * state.mu[i] + (1.0 - state.beta_mu) * batch_mean[i];
    }
}

void update_radius(GeometryState& state, const Matrix& features) {
    if (features.rows() == 0) throw NumericError("EmptyBatch: update_radius");
    if (!state.mu_initialized) {
        throw NumericError("DegenerateRadius: update_radius before the mean is initialized");
    }
    double mean_radius = 0.0;
    Vector diff(state.mu.size());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        auto row = features.row(r);
        for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = row[c] - state.mu[c];
        mean_radius += l2_norm(diff);
    }
    mean_radius /= static_cast<double>(features.rows());

    if (!state.r_initialized) {
        if (mean_radius <= 0.0) {
            throw NumericError("DegenerateRadius: first batch has zero mean radius");
        }
        state.r_ref = mean_radius;
        state.r_initialized = true;
    } else {
        state.r_ref = state.beta_r * state.r_ref + (1.0 - state.beta_r) * mean_radius;
    }
    refresh_shells(state);
}

Vector shell_radii(double r_ref, int num_shells, ShellSpacing spacing) {
    if (num_shells < 1) throw ConfigError("InvalidK: shell count must be >= 1");
    if (!(r_ref > 0.0)) throw NumericError("DegenerateRadius: shell_radii needs r_ref > 0");
    Vector rho(static_cast<std::size_t>(num_shells));
    const double kp1 = static_cast<double>(num_shells + 1);
    for (int k = 1; k <= num_shells; ++k) {
        if (spacing == ShellSpacing::Uniform) {
            rho[k - 1] = static_cast<double>(k) * r_ref / kp1;
        } else {
            rho[k - 1] = r_ref * (1.0 - std::cos(static_cast<double>(k) * std::numbers::pi /
                                                 (2.0 * kp1)));
        }
    }
    return rho;
}

void refresh_shells(GeometryState& state) {
    state.shells = shell_radii(state.r_ref, state.num_shells, state.spacing);
    check_shell_invariant(state);
}

void check_shell_invariant(const GeometryState& state) {
    double prev = 0.0;
    for (double rho : state.shells) {
        if (!(rho > prev)) {
            throw NumericError("ShellOrdering: radii must be strictly increasing from 0");
        }
        prev = rho;
    }
    if (!(prev < state.r_ref)) {
        throw NumericError("ShellOrdering: outermost shell must stay below r_ref");
    }
}

} // namespace bootood
