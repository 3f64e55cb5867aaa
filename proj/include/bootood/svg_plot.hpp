#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bootood/nc_diagnostics.hpp"

namespace bootood {

struct HistogramSeries {
    std::string label;
    std::string color; // SVG color token
    Histogram histogram;
};

// Standalone SVG with overlaid step histograms (counts normalized to
// densities so differently sized series compare), axis ticks, and a legend.
void write_step_histogram_svg(const std::filesystem::path& path, const std::string& title,
                              const std::string& x_label,
                              const std::vector<HistogramSeries>& series);

// Companion CSV: bin_lo,bin_hi,<label...> counts per row.
void write_histogram_csv(const std::filesystem::path& path,
                         const std::vector<HistogramSeries>& series);

} // namespace bootood
