#pragma once

#include <filesystem>
#include <string>

#include "bootood/data_synth.hpp"
#include "bootood/trainer.hpp"

namespace bootood {

// Flat key = value run configuration. '#' starts a comment; unknown keys are
// rejected; every key has a default. The full key set is listed in the
// README and echoed (resolved) into the output directory by each command.
struct RunConfig {
    // dataset
    int data_classes = 4;
    std::size_t data_dim = 8;
    std::size_t data_train_per_class = 500;
    std::size_t data_val_per_class = 100;
    std::size_t data_test_per_class = 100;
    double data_separation = 6.0;
    double data_sigma = 1.0;
    std::uint64_t data_seed = 7;
    std::size_t near_n = 400;
    double near_jitter = 0.3;
    double near_lambda_lo = 0.1;
    double near_lambda_hi = 0.9;
    std::size_t far_n = 400;
    FarOODMode far_mode = FarOODMode::UniformBox;
    double far_scale_factor = 3.0; // times the blob extent (separation + 3 sigma)

    TrainConfig train;

    // evaluation
    std::string scorer = "auto"; // auto | all | one of the scorer ids
    double ebo_temperature = 1.0;
    double react_percentile = 90.0;
    std::size_t histogram_bins = 30;

    std::string out_dir = "out";

    double far_scale() const {
        return far_scale_factor * (data_separation + 3.0 * data_sigma);
    }
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Resolved key = value form, every key present, fixed order.
std::string serialize_config(const RunConfig& config);

} // namespace bootood
