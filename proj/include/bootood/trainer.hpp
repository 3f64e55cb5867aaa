#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bootood/data_synth.hpp"
#include "bootood/geometry.hpp"
#include "bootood/losses.hpp"
#include "bootood/model.hpp"
#include "bootood/nc_diagnostics.hpp"
#include "bootood/pseudo_ood.hpp"

namespace bootood {

enum class Phase1Policy { Fixed, Diagnostic };

Phase1Policy phase1_policy_from_string(const std::string& token);
std::string to_string(Phase1Policy policy);

struct TrainConfig {
    // model
    std::size_t hidden_width = 64;
    std::size_t hidden_layers = 2;
    std::size_t feature_dim = 16;

    // optimizer
    std::size_t epochs = 40;
    std::size_t batch_size = 64;
    double lr = 0.01;
    double radius_lr_scale = 10.0; // radius-head group lr = scale * lr
    double momentum = 0.9;
    double weight_decay = 1e-4;
    double clip_norm = 10.0;

    // geometry and pseudo-OOD
    int num_shells = 4;
    ShellSpacing spacing = ShellSpacing::Uniform;
    double beta_mu = 0.95;
    double beta_r = 0.95;
    double mix_alpha = 1.0;
    std::size_t pseudo_per_batch = 0; // 0 means one per ID sample
    bool reg_on_raw = false;          // radius regression on raw mixtures vs normalized

    // objective
    double lambda_cls = 1.0;
    double lambda_reg = 1.0;
    double lambda_ood_max = 0.5;
    double lambda_sep_max = 0.1;
    double warmup_frac = 0.2; // ramp length as a fraction of total iterations

    // phase 1
    Phase1Policy phase1_policy = Phase1Policy::Diagnostic;
    std::size_t phase1_max_epochs = 25; // fixed budget / diagnostic fallback
    std::size_t phase1_min_epochs = 8;
    double nc1_threshold = 0.2;
    double cv_threshold = 0.2;

    // ablation switches
    bool disable_warmup = false;
    bool disable_radius = false;
    bool disable_sep = false;

    std::uint64_t seed = 1;
    std::size_t log_interval = 10;

    void validate() const;
};

struct TrainRecordRow {
    long iteration = 0;
    std::size_t epoch = 0;
    int phase = 1;
    LossBreakdown losses;
    double batch_accuracy = 0.0;
    double mu_norm = 0.0;
    double r_ref = 0.0;
    // latest epoch-end diagnostics; NaN before the first epoch completes
    double nc1 = 0.0;
    double norm_cv = 0.0;
    double etf_dev = 0.0;
    double train_error = 0.0;
};

struct TrainRecord {
    std::vector<TrainRecordRow> rows;
    std::vector<double> epoch_ce;          // mean CE per epoch
    std::vector<NCReport> epoch_diagnostics;
    long phase2_start_iteration = -1;      // -1 while still in phase 1
    std::size_t phase2_start_epoch = 0;    // 1-based epoch where phase 2 began
    double final_train_accuracy = 0.0;
    std::size_t degenerate_radius_rows = 0;
};

std::string train_record_csv_header();
std::string train_record_csv_row(const TrainRecordRow& row);

// Read-only view handed to the per-iteration observer.
struct TrainIterationView {
    long iteration;
    std::size_t epoch;
    int phase;
    const ModelState& model;
    const GeometryState& geometry;
    const LossBreakdown& losses;
};

struct TrainResult {
    ModelState model;
    GeometryState geometry;
    TrainRecord record;
    // Snapshot taken when phase 2 began; valid when has_phase1_snapshot.
    ModelState phase1_model;
    GeometryState phase1_geometry;
    bool has_phase1_snapshot = false;
};

// One training iteration's forward/backward on a fixed batch + mix plan with
// frozen geometry. Exposed so gradients can be checked against the
// finite-difference oracle through the complete objective.
struct StepLosses {
    LossBreakdown breakdown;
    double batch_accuracy = 0.0;
    std::size_t degenerate_rows = 0;
};

StepLosses compute_losses_and_grads(const ModelState& model, const Matrix& inputs,
                                    const std::vector<int>& labels, const MixPlan* plan,
                                    const GeometryState& geometry, const LossWeights& weights,
                                    long t, bool reg_on_raw, ModelState* grads);

// Runs the two-phase procedure: CE-only warm-up until the collapse gate
// fires (or the fixed budget elapses), then joint training with pseudo-OOD
// generation, EMA geometry updates, and the warm-up-scheduled objective.
TrainResult train(const TrainConfig& config, const LabeledDataset& data,
                  const std::function<void(const TrainIterationView&)>& observer = nullptr);

// True when phase 1 is done after `completed_epochs` epochs: fixed budget
// elapsed, or (train error 0, NC1 and norm CV under their gates) once the
// minimum epoch count has passed.
bool phase1_complete(const TrainRecord& record, const TrainConfig& config,
                     std::size_t completed_epochs);

} // namespace bootood
