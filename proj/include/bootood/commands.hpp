#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bootood/config.hpp"
#include "bootood/metrics.hpp"
#include "bootood/nc_diagnostics.hpp"
#include "bootood/scorers.hpp"
#include "bootood/trainer.hpp"

namespace bootood {

// Everything the synthetic task provides: ID splits plus the two OOD sets,
// all regenerated deterministically from the config seeds.
struct DatasetBundle {
    BlobTask task;
    Matrix near_ood;
    Matrix far_ood;
    double far_near_center_fraction = 0.0; // support-disjointness measure
};

DatasetBundle build_datasets(const RunConfig& config);

// train: writes checkpoint.bin, checkpoint_phase1.bin, train_log.csv and
// config_resolved.cfg under out_dir. Nothing is written if training throws.
TrainResult run_train_command(const RunConfig& config);

// Model snapshot evaluated against the config's OOD sets. scorer selection
// follows config.scorer: a fixed id, "all", or "auto" (validation-selected).
std::vector<EvalReport> evaluate_model(const ModelState& model, const GeometryState& geometry,
                                       const DatasetBundle& bundle, const RunConfig& config,
                                       std::string* selected_scorer = nullptr);

// eval: loads the checkpoint, writes results.csv plus the radius and
// max-cosine histogram SVG/CSV pairs under out_dir.
std::vector<EvalReport> run_eval_command(const RunConfig& config,
                                         const std::filesystem::path& checkpoint_path);

struct GridSpec {
    std::vector<std::string> variants; // full | no-warmup | no-radius | no-sep
    std::vector<int> shell_counts;
    std::vector<std::uint64_t> seeds;
};

// "variants=full,no-sep;k=1,4;seeds=1,2,3" (any subset; missing lists fall
// back to the config's values).
GridSpec parse_grid_spec(const std::string& spec, const RunConfig& config);

struct AblationCell {
    std::string variant;
    int shells = 0;
    std::size_t n_seeds = 0;
    double auroc_mean = 0.0, auroc_std = 0.0; // best-scorer near-OOD AUROC
    double fpr_mean = 0.0, fpr_std = 0.0;
    double delta_auroc = 0.0, delta_fpr = 0.0; // vs the full model cell
};

// Trains and evaluates every (variant, K) cell over the grid seeds;
// max_threads 0 reads BOOTOOD_THREADS (default: hardware concurrency).
std::vector<AblationCell> run_ablation(const RunConfig& config, const GridSpec& grid,
                                       std::size_t max_threads = 0);

void run_ablate_command(const RunConfig& config, const std::string& grid_spec);

// diagnose: prints the collapse report for the train split and writes the
// ID vs pseudo-OOD histogram artifacts.
NCReport run_diagnose_command(const RunConfig& config,
                              const std::filesystem::path& checkpoint_path);

// Applies a named ablation variant to a config copy.
TrainConfig apply_variant(TrainConfig base, const std::string& variant);

std::string ablation_csv_header();
std::string ablation_csv_row(const AblationCell& cell);

} // namespace bootood
