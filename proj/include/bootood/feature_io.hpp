#pragma once

#include <filesystem>
#include <vector>

#include "bootood/numeric.hpp"

namespace bootood {

// Feature interchange file. Binary layout (little-endian):
//   magic   "BOFF"            4 bytes
//   version u32               currently 1
//   n       u64               row count
//   dim     u64               columns
//   labels  u8                1 if a label block follows the features
//   features n*dim f64
//   labels   n i32            only when the flag is set
// Declared sizes must match the payload exactly; short files are rejected.
// The CSV fallback carries one header line ("feature_0,...,label") and
// prints doubles with 17 significant digits so the round trip stays exact.
struct FeatureFile {
    Matrix features;
    std::vector<int> labels; // empty when absent

    bool has_labels() const { return !labels.empty(); }
};

inline constexpr std::uint32_t kFeatureFileVersion = 1;

void write_features(const std::filesystem::path& path, const FeatureFile& file);
FeatureFile read_features(const std::filesystem::path& path);

void write_features_csv(const std::filesystem::path& path, const FeatureFile& file);
FeatureFile read_features_csv(const std::filesystem::path& path);

} // namespace bootood
