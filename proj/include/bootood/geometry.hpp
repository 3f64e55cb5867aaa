#pragma once

#include <string>

#include "bootood/numeric.hpp"

namespace bootood {

enum class ShellSpacing { Uniform, Cosine };

std::string to_string(ShellSpacing spacing);
ShellSpacing shell_spacing_from_string(const std::string& token);

// EMA summary of the ID feature geometry: global center mu, reference radius
// r_ref, and the K inner-shell target radii derived from r_ref. The shells
// are recomputed every time r_ref moves so that
// 0 < rho_1 < ... < rho_K < r_ref always holds.
struct GeometryState {
    Vector mu;
    double r_ref = 0.0;
    double beta_mu = 0.95;
    double beta_r = 0.95;
    int num_shells = 4;
    ShellSpacing spacing = ShellSpacing::Uniform;
    Vector shells;

    bool mu_initialized = false;
    bool r_initialized = false;
};

GeometryState make_geometry(std::size_t feature_dim, int num_shells,
                            ShellSpacing spacing, double beta_mu, double beta_r);

// mu <- beta_mu * mu + (1 - beta_mu) * batch_mean. The first call seeds mu
// with the batch mean instead of decaying from zero.
void update_mean(GeometryState& state, const Matrix& features);

// r_ref <- beta_r * r_ref + (1 - beta_r) * mean_i ||h_i - mu||. Requires mu
// to be initialized; the first call seeds r_ref with the batch mean radius.
// Recomputes the shells.
void update_radius(GeometryState& state, const Matrix& features);

// Inner-shell radii strictly inside (0, r_ref):
//   uniform: rho_k = k * r_ref / (K + 1)
//   cosine:  rho_k = r_ref * (1 - cos(k pi / (2 (K + 1))))
Vector shell_radii(double r_ref, int num_shells, ShellSpacing spacing);

void refresh_shells(GeometryState& state);

// Throws if the shell ordering invariant is violated.
void check_shell_invariant(const GeometryState& state);

} // namespace bootood
