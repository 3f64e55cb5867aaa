#include "bootood/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "bootood/metrics.hpp"

namespace bootood {

Phase1Policy phase1_policy_from_string(const std::string& token) {
    if (token == "fixed") return Phase1Policy::Fixed;
    if (token == "diagnostic") return Phase1Policy::Diagnostic;
    throw ConfigError("ConfigInvalid: unknown phase-1 policy '" + token + "'");
}

std::string to_string(Phase1Policy policy) {
    return policy == Phase1Policy::Fixed ? "fixed" : "diagnostic";
}

void TrainConfig::validate() const {
    if (batch_size < 2) throw ConfigError("ConfigInvalid: batch size must be >= 2");
    if (epochs < 1) throw ConfigError("ConfigInvalid: epochs must be >= 1");
    if (num_shells < 1) throw ConfigError("InvalidK: shell count must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("ConfigInvalid: learning rate must be > 0");
    if (!(mix_alpha > 0.0)) throw ConfigError("NonPositiveAlpha: mix alpha must be > 0");
    if (!(warmup_frac >= 0.0 && warmup_frac <= 1.0)) {
        throw ConfigError("ConfigInvalid: warmup fraction must lie in [0, 1]");
    }
    if (log_interval < 1) throw ConfigError("ConfigInvalid: log interval must be >= 1");
    if (lambda_cls < 0 || lambda_reg < 0 || lambda_ood_max < 0 || lambda_sep_max < 0) {
        throw ConfigError("ConfigInvalid: loss weights must be >= 0");
    }
}

std::string train_record_csv_header() {
    return "iteration,epoch,phase,ce,radius_cls,radius_reg,sep,total,w_ood,w_sep,"
           "batch_acc,mu_norm,r_ref,nc1,norm_cv,etf_dev,train_error";
}

std::string train_record_csv_row(const TrainRecordRow& row) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%ld,%zu,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g,%.17g",
                  row.iteration, row.epoch, row.phase, row.losses.ce, row.losses.radius_cls,
                  row.losses.radius_reg, row.losses.sep, row.losses.total, row.losses.w_ood,
                  row.losses.w_sep, row.batch_accuracy, row.mu_norm, row.r_ref, row.nc1,
                  row.norm_cv, row.etf_dev, row.train_error);
    return buf;
}

StepLosses compute_losses_and_grads(const ModelState& model, const Matrix& inputs,
                                    const std::vector<int>& labels, const MixPlan* plan,
                                    const GeometryState& geometry, const LossWeights& weights,
                                    long t, bool reg_on_raw, ModelState* grads) {
    TapeCache cache;
    const Matrix features = backbone_forward(model.backbone, inputs, &cache);
    const Matrix logits = classifier_forward(model.classifier, features);

    const CeLossResult ce = ce_loss(logits, labels);
    StepLosses step;
    step.batch_accuracy = id_accuracy(logits, labels);

    Matrix dfeatures(features.rows(), features.cols());
    if (grads) {
        classifier_backward(model.classifier, features, ce.dlogits, &grads->classifier,
                            &dfeatures);
    }

    double cls_value = 0.0, reg_value = 0.0, sep_value = 0.0;
    if (plan && plan->size() > 0) {
        const PseudoOODBatch pseudo = mix_features(features, *plan);
        const double w_ood = warmup_weight(t, weights.ood_warmup_start, weights.ood_warmup_end,
                                           weights.lambda_ood_max);
        const double w_sep = warmup_weight(t, weights.sep_warmup_start, weights.sep_warmup_end,
                                           weights.lambda_sep_max);

        Vector rho_targets(plan->size());
        for (std::size_t k = 0; k < plan->size(); ++k) {
            rho_targets[k] = geometry.shells[static_cast<std::size_t>(plan->shells[k])];
        }

        const Matrix shell_logits = radius_head_forward(model.radius_head, pseudo.normalized);
        const CeLossResult cls = radius_cls_loss(shell_logits, plan->shells);
        const RadiusRegResult reg = radius_reg_loss(reg_on_raw ? pseudo.raw : pseudo.normalized,
                                                    geometry.mu, rho_targets);
        const SeparationResult sep = separation_loss(pseudo.normalized, model.classifier);
        cls_value = cls.value;
        reg_value = reg.value;
        sep_value = sep.value;
        step.degenerate_rows = reg.degenerate_rows;

        if (grads) {
            // Zero-weight terms are skipped outright so a zeroed schedule is
            // bit-identical to never computing them.
            Matrix dnormalized(pseudo.normalized.rows(), pseudo.normalized.cols());
            Matrix draw(pseudo.raw.rows(), pseudo.raw.cols());
            bool normalized_path = false, raw_path = false;

            const double cls_w = w_ood * weights.lambda_cls;
            if (cls_w != 0.0) {
                Matrix scaled = cls_w * cls.dlogits;
                Matrix dht_cls;
                radius_head_backward(model.radius_head, pseudo.normalized, scaled,
                                     &grads->radius_head, &dht_cls);
                dnormalized = dnormalized + dht_cls;
                normalized_path = true;
            }
            const double reg_w = w_ood * weights.lambda_reg;
            if (reg_w != 0.0) {
                if (reg_on_raw) {
                    draw = draw + reg_w * reg.dfeatures;
                    raw_path = true;
                } else {
                    dnormalized = dnormalized + reg_w * reg.dfeatures;
                    normalized_path = true;
                }
            }
            if (w_sep != 0.0) {
                dnormalized = dnormalized + w_sep * sep.dfeatures;
                normalized_path = true;
            }
            if (normalized_path) {
                draw = draw + normalize_rows_backward(pseudo.raw, pseudo.normalized, dnormalized);
                raw_path = true;
            }
            if (raw_path) {
                scatter_mix_grad(*plan, draw, dfeatures);
            }
        }

        step.breakdown = total_loss(ce.value, cls_value, reg_value, sep_value, weights, t);
    } else {
        step.breakdown = total_loss(ce.value, 0.0, 0.0, 0.0, weights, t);
    }

    if (grads) {
        backbone_backward(model.backbone, cache, dfeatures, &grads->backbone);
    }
    return step;
}

bool phase1_complete(const TrainRecord& record, const TrainConfig& config,
                     std::size_t completed_epochs) {
    if (record.epoch_diagnostics.empty()) {
        throw NumericError("EmptyBatch: phase-1 gate needs at least one epoch of diagnostics");
    }
    if (completed_epochs >= config.phase1_max_epochs) return true;
    if (config.phase1_policy == Phase1Policy::Fixed) return false;
    if (completed_epochs < config.phase1_min_epochs) return false;
    const NCReport& diag = record.epoch_diagnostics.back();
    return diag.train_error == 0.0 && diag.nc1 < config.nc1_threshold &&
           diag.norm_cv < config.cv_threshold;
}

namespace {

NCReport epoch_diagnostics(const ModelState& model, const LabeledDataset& data) {
    const Matrix features = backbone_forward(model.backbone, data.inputs);
    const Matrix logits = classifier_forward(model.classifier, features);
    NCReport report = nc_metrics(features, data.labels);
    report.train_error = 1.0 - id_accuracy(logits, data.labels);
    return report;
}

} // namespace

TrainResult train(const TrainConfig& config, const LabeledDataset& data,
                  const std::function<void(const TrainIterationView&)>& observer) {
    config.validate();
    if (data.size() == 0) throw ConfigError("ConfigInvalid: empty training set");
    for (int label : data.labels) {
        if (label < 0 || label >= data.num_classes) {
            throw ConfigError("ConfigInvalid: label outside [0, classes)");
        }
    }

    SeededRng root(config.seed);
    SeededRng init_rng = root.stream(1);
    SeededRng shuffle_rng = root.stream(2);
    SeededRng pseudo_rng = root.stream(3);

    ModelDims dims;
    dims.input_dim = data.dim();
    dims.hidden_width = config.hidden_width;
    dims.hidden_layers = config.hidden_layers;
    dims.feature_dim = config.feature_dim;
    dims.num_classes = static_cast<std::size_t>(data.num_classes);
    dims.num_shells = static_cast<std::size_t>(config.num_shells);

    TrainResult result;
    result.model = init_model(dims, init_rng);
    result.geometry = make_geometry(config.feature_dim, config.num_shells, config.spacing,
                                    config.beta_mu, config.beta_r);
    ModelState velocity = zero_like(result.model);

    const std::size_t n = data.size();
    const std::size_t iters_per_epoch = (n + config.batch_size - 1) / config.batch_size;
    const long total_iters = static_cast<long>(config.epochs * iters_per_epoch);
    const long ramp_len =
        std::max<long>(1, static_cast<long>(config.warmup_frac * static_cast<double>(total_iters)));

    LossWeights weights;
    weights.lambda_cls = config.disable_radius ? 0.0 : config.lambda_cls;
    weights.lambda_reg = config.disable_radius ? 0.0 : config.lambda_reg;
    weights.lambda_ood_max = config.lambda_ood_max;
    weights.lambda_sep_max = config.disable_sep ? 0.0 : config.lambda_sep_max;
    // Anchored far in the future until phase 2 begins.
    const long far = std::numeric_limits<long>::max() / 2;
    weights.ood_warmup_start = weights.sep_warmup_start = far;
    weights.ood_warmup_end = weights.sep_warmup_end = far + 1;

    int phase = 1;
    auto enter_phase2 = [&](long at_iteration, std::size_t at_epoch) {
        phase = 2;
        result.record.phase2_start_iteration = at_iteration;
        result.record.phase2_start_epoch = at_epoch;
        weights.ood_warmup_start = weights.sep_warmup_start = at_iteration;
        weights.ood_warmup_end = weights.sep_warmup_end = at_iteration + ramp_len;
        result.phase1_model = result.model;
        result.phase1_geometry = result.geometry;
        result.has_phase1_snapshot = true;
    };
    if (config.disable_warmup) enter_phase2(0, 1);

    const SgdConfig main_group{config.lr, config.momentum, config.weight_decay};
    const SgdConfig head_group{config.lr * config.radius_lr_scale, config.momentum,
                               config.weight_decay};

    const double nan = std::numeric_limits<double>::quiet_NaN();
    double last_nc1 = nan, last_cv = nan, last_etf = nan, last_err = nan;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    long t = 0;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        // Fisher-Yates on the dedicated shuffle stream.
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = shuffle_rng.next_index(i + 1);
            std::swap(order[i], order[j]);
        }

        double epoch_ce_sum = 0.0;
        std::size_t epoch_batches = 0;

        for (std::size_t start = 0; start < n; start += config.batch_size, ++t) {
            const std::size_t size = std::min(config.batch_size, n - start);
            Matrix inputs(size, data.dim());
            std::vector<int> labels(size);
            for (std::size_t b = 0; b < size; ++b) {
                inputs.set_row(b, data.inputs.row(order[start + b]));
                labels[b] = data.labels[order[start + b]];
            }

            TapeCache cache;
            const Matrix features = backbone_forward(result.model.backbone, inputs, &cache);
            update_mean(result.geometry, features);
            update_radius(result.geometry, features);

            // The mixture sources are the current batch; a batch too small to
            // pair (a trailing singleton) skips the pseudo-OOD path.
            MixPlan plan;
            bool have_plan = false;
            const bool aux_active = phase == 2 && size >= 2 &&
                                    !(config.disable_radius && config.disable_sep);
            if (aux_active) {
                const std::size_t count =
                    config.pseudo_per_batch == 0 ? size : config.pseudo_per_batch;
                plan = sample_mix_plan(size, count, config.mix_alpha, config.num_shells,
                                       pseudo_rng);
                have_plan = true;
            }

            ModelState grads = zero_like(result.model);
            const StepLosses step =
                compute_losses_and_grads(result.model, inputs, labels, have_plan ? &plan : nullptr,
                                         result.geometry, weights, t, config.reg_on_raw, &grads);
            result.record.degenerate_radius_rows += step.degenerate_rows;

            if (!std::isfinite(step.breakdown.total)) {
                throw NumericError("NonFiniteLoss: aborting at iteration " + std::to_string(t));
            }

            if (config.clip_norm > 0.0) {
                const double norm = grad_global_norm(grads);
                if (norm > config.clip_norm) scale_grads(grads, config.clip_norm / norm);
            }
            sgd_step(result.model, grads, velocity, ParamGroup::BackboneClassifier, main_group);
            sgd_step(result.model, grads, velocity, ParamGroup::RadiusHead, head_group);

            epoch_ce_sum += step.breakdown.ce;
            ++epoch_batches;

            if (t % static_cast<long>(config.log_interval) == 0) {
                TrainRecordRow row;
                row.iteration = t;
                row.epoch = epoch;
                row.phase = phase;
                row.losses = step.breakdown;
                row.batch_accuracy = step.batch_accuracy;
                row.mu_norm = l2_norm(result.geometry.mu);
                row.r_ref = result.geometry.r_ref;
                row.nc1 = last_nc1;
                row.norm_cv = last_cv;
                row.etf_dev = last_etf;
                row.train_error = last_err;
                result.record.rows.push_back(row);
            }
            if (observer) {
                observer(TrainIterationView{t, epoch, phase, result.model, result.geometry,
                                            step.breakdown});
            }
        }

        result.record.epoch_ce.push_back(epoch_ce_sum / static_cast<double>(epoch_batches));
        const NCReport diag = epoch_diagnostics(result.model, data);
        result.record.epoch_diagnostics.push_back(diag);
        last_nc1 = diag.nc1;
        last_cv = diag.norm_cv;
        last_etf = diag.etf_deviation;
        last_err = diag.train_error;

        if (phase == 1 && phase1_complete(result.record, config, epoch)) {
            enter_phase2(t, epoch + 1);
        }
    }

    result.record.final_train_accuracy = 1.0 - result.record.epoch_diagnostics.back().train_error;
    return result;
}

} // namespace bootood
