#pragma once

#include <filesystem>

#include "bootood/geometry.hpp"
#include "bootood/model.hpp"

namespace bootood {

// Model + geometry checkpoint. Layout:
//   line  "BOOTOOD-CKPT v1"
//   line  "dims <input> <hidden_width> <hidden_layers> <feature> <classes> <shells>"
//   line  "geometry <r_ref> <beta_mu> <beta_r> <spacing> <mu_init> <r_init>"
//   line  "data"
//   raw little-endian doubles: every parameter array in declaration order
//   (backbone layer w then b, per layer; classifier w; radius head w, b),
//   then mu, then the shell radii.
// Binary doubles round-trip exactly, which the determinism checks rely on.
void save_checkpoint(const std::filesystem::path& path, const ModelState& model,
                     const GeometryState& geometry);

struct Checkpoint {
    ModelState model;
    GeometryState geometry;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace bootood
