#include "bootood/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "bootood/checkpoint.hpp"
#include "bootood/pseudo_ood.hpp"
#include "bootood/svg_plot.hpp"

namespace bootood {

namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("IOFailure: cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("IOFailure: short write to '" + path.string() + "'");
}

void echo_config(const RunConfig& config, const fs::path& out_dir) {
    write_text_file(out_dir / "config_resolved.cfg", serialize_config(config));
}

} // namespace

DatasetBundle build_datasets(const RunConfig& config) {
    DatasetBundle bundle;
    bundle.task = make_blob_task(config.data_classes, config.data_dim,
                                 config.data_train_per_class, config.data_val_per_class,
                                 config.data_test_per_class, config.data_separation,
                                 config.data_sigma, config.data_seed);
    SeededRng root(config.data_seed);
    bundle.near_ood = make_near_ood(bundle.task.train, config.near_n, config.near_jitter,
                                    root.stream(5).state(), config.near_lambda_lo,
                                    config.near_lambda_hi)
                          .points;
    bundle.far_ood = make_far_ood(config.data_dim, config.far_n, config.far_mode,
                                  config.far_scale(), root.stream(6).state());
    bundle.far_near_center_fraction = fraction_near_centers(
        bundle.far_ood, bundle.task.centers, 3.0 * config.data_sigma);
    return bundle;
}

TrainResult run_train_command(const RunConfig& config) {
    config.train.validate();
    const DatasetBundle bundle = build_datasets(config);
    TrainResult result = train(config.train, bundle.task.train);

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    echo_config(config, out_dir);

    std::ostringstream log;
    log << train_record_csv_header() << '\n';
    for (const auto& row : result.record.rows) log << train_record_csv_row(row) << '\n';
    write_text_file(out_dir / "train_log.csv", log.str());

    save_checkpoint(out_dir / "checkpoint.bin", result.model, result.geometry);
    if (result.has_phase1_snapshot) {
        save_checkpoint(out_dir / "checkpoint_phase1.bin", result.phase1_model,
                        result.phase1_geometry);
    }
    return result;
}

namespace {

struct ScoredSets {
    Vector id;
    Vector near;
    Vector far;
};

ScoredSets score_all_sets(std::string_view scorer, const ModelState& model,
                          const GeometryState& geometry, const Matrix& id_logits,
                          const Matrix& id_features, const Matrix& near_logits,
                          const Matrix& near_features, const Matrix& far_logits,
                          const Matrix& far_features, double react_clip, double temperature) {
    ScoredSets s;
    s.id = apply_scorer(scorer, id_logits, id_features, model.classifier, geometry.mu,
                        react_clip, temperature);
    s.near = apply_scorer(scorer, near_logits, near_features, model.classifier, geometry.mu,
                          react_clip, temperature);
    s.far = apply_scorer(scorer, far_logits, far_features, model.classifier, geometry.mu,
                         react_clip, temperature);
    return s;
}

} // namespace

std::vector<EvalReport> evaluate_model(const ModelState& model, const GeometryState& geometry,
                                       const DatasetBundle& bundle, const RunConfig& config,
                                       std::string* selected_scorer) {
    const Matrix id_features = backbone_forward(model.backbone, bundle.task.test.inputs);
    const Matrix id_logits = classifier_forward(model.classifier, id_features);
    const Matrix near_features = backbone_forward(model.backbone, bundle.near_ood);
    const Matrix near_logits = classifier_forward(model.classifier, near_features);
    const Matrix far_features = backbone_forward(model.backbone, bundle.far_ood);
    const Matrix far_logits = classifier_forward(model.classifier, far_features);

    const Matrix val_features = backbone_forward(model.backbone, bundle.task.val.inputs);
    const double react_clip = calibrate_react_clip(val_features, config.react_percentile);
    const double id_acc = id_accuracy(id_logits, bundle.task.test.labels);

    std::vector<std::string> scorers;
    if (config.scorer == "all") {
        for (auto id : kScorerIds) scorers.emplace_back(id);
    } else if (config.scorer == "auto") {
        ScorerSettings settings{config.ebo_temperature, config.react_percentile};
        scorers.push_back(select_scorer(model, geometry, val_features, settings,
                                        SeededRng(config.data_seed).stream(9).state(),
                                        config.train.mix_alpha));
    } else {
        scorers.push_back(config.scorer);
    }
    if (selected_scorer) *selected_scorer = scorers.front();

    std::vector<EvalReport> reports;
    for (const auto& scorer : scorers) {
        const ScoredSets s =
            score_all_sets(scorer, model, geometry, id_logits, id_features, near_logits,
                           near_features, far_logits, far_features, react_clip,
                           config.ebo_temperature);
        for (const auto& [name, ood] : {std::pair<std::string, const Vector*>{"near", &s.near},
                                        {"far", &s.far}}) {
            EvalReport report;
            report.scorer = scorer;
            report.ood_set = name;
            report.auroc_v = auroc(s.id, *ood);
            report.fpr95 = fpr_at_tpr(s.id, *ood, 0.95);
            report.aupr_in = aupr_in(s.id, *ood);
            report.aupr_out = aupr_out(s.id, *ood);
            report.id_acc = id_acc;
            report.n_id = s.id.size();
            report.n_ood = ood->size();
            reports.push_back(std::move(report));
        }
    }
    return reports;
}

namespace {

void write_diagnostic_histograms(const ModelState& model, const GeometryState& geometry,
                                 const DatasetBundle& bundle, const RunConfig& config,
                                 const fs::path& out_dir) {
    const Matrix id_features = backbone_forward(model.backbone, bundle.task.test.inputs);
    SeededRng rng(SeededRng(config.data_seed).stream(11).state());
    const PseudoOODBatch pseudo = generate_pseudo_ood(
        id_features, id_features.rows(), config.train.mix_alpha,
        std::max(1, geometry.num_shells), rng);

    const Vector id_radius = radius_values(id_features, geometry.mu);
    const Vector ood_radius = radius_values(pseudo.raw, geometry.mu);
    const Vector id_cos = max_cosine_values(id_features, model.classifier);
    const Vector ood_cos = max_cosine_values(pseudo.raw, model.classifier);

    auto shared_range = [](const Vector& a, const Vector& b) {
        auto [alo, ahi] = std::minmax_element(a.begin(), a.end());
        auto [blo, bhi] = std::minmax_element(b.begin(), b.end());
        return std::pair<double, double>{std::min(*alo, *blo), std::max(*ahi, *bhi)};
    };

    const auto [rlo, rhi] = shared_range(id_radius, ood_radius);
    std::vector<HistogramSeries> radius_series = {
        {"ID", "steelblue", histogram_from_values(id_radius, config.histogram_bins, rlo, rhi)},
        {"pseudo-OOD", "darkorange",
         histogram_from_values(ood_radius, config.histogram_bins, rlo, rhi)}};
    write_step_histogram_svg(out_dir / "radius_hist.svg", "Feature radius about the ID center",
                             "radius", radius_series);
    write_histogram_csv(out_dir / "radius_hist.csv", radius_series);

    const auto [clo, chi] = shared_range(id_cos, ood_cos);
    std::vector<HistogramSeries> cos_series = {
        {"ID", "steelblue", histogram_from_values(id_cos, config.histogram_bins, clo, chi)},
        {"pseudo-OOD", "darkorange",
         histogram_from_values(ood_cos, config.histogram_bins, clo, chi)}};
    write_step_histogram_svg(out_dir / "max_cosine_hist.svg",
                             "Max cosine to the classifier directions", "max cosine", cos_series);
    write_histogram_csv(out_dir / "max_cosine_hist.csv", cos_series);
}

} // namespace

std::vector<EvalReport> run_eval_command(const RunConfig& config,
                                         const fs::path& checkpoint_path) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const DatasetBundle bundle = build_datasets(config);

    std::string selected;
    std::vector<EvalReport> reports =
        evaluate_model(ckpt.model, ckpt.geometry, bundle, config, &selected);

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    echo_config(config, out_dir);

    std::ostringstream csv;
    csv << eval_report_csv_header() << '\n';
    for (const auto& report : reports) csv << eval_report_csv_row(report) << '\n';
    write_text_file(out_dir / "results.csv", csv.str());
    if (config.scorer == "auto") {
        write_text_file(out_dir / "selected_scorer.txt", selected + "\n");
    }
    write_diagnostic_histograms(ckpt.model, ckpt.geometry, bundle, config, out_dir);
    return reports;
}

GridSpec parse_grid_spec(const std::string& spec, const RunConfig& config) {
    GridSpec grid;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ';')) {
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("ConfigInvalid: grid part '" + part + "' is not name=list");
        }
        const std::string name = part.substr(0, eq);
        std::stringstream items(part.substr(eq + 1));
        std::string item;
        while (std::getline(items, item, ',')) {
            if (item.empty()) continue;
            if (name == "variants") {
                if (item != "full" && item != "no-warmup" && item != "no-radius" &&
                    item != "no-sep") {
                    throw ConfigError("ConfigInvalid: unknown ablation variant '" + item + "'");
                }
                grid.variants.push_back(item);
            } else if (name == "k") {
                grid.shell_counts.push_back(std::stoi(item));
            } else if (name == "seeds") {
                grid.seeds.push_back(static_cast<std::uint64_t>(std::stoull(item)));
            } else {
                throw ConfigError("ConfigInvalid: unknown grid list '" + name + "'");
            }
        }
    }
    if (grid.variants.empty()) grid.variants = {"full"};
    if (grid.shell_counts.empty()) grid.shell_counts = {config.train.num_shells};
    if (grid.seeds.empty()) grid.seeds = {config.train.seed};
    return grid;
}

TrainConfig apply_variant(TrainConfig base, const std::string& variant) {
    if (variant == "full") return base;
    if (variant == "no-warmup") {
        base.disable_warmup = true;
        return base;
    }
    if (variant == "no-radius") {
        base.disable_radius = true;
        return base;
    }
    if (variant == "no-sep") {
        base.disable_sep = true;
        return base;
    }
    throw ConfigError("ConfigInvalid: unknown ablation variant '" + variant + "'");
}

namespace {

// Best-scorer near-OOD metrics for one trained model.
std::pair<double, double> near_ood_best(const ModelState& model, const GeometryState& geometry,
                                        const DatasetBundle& bundle, const RunConfig& config) {
    RunConfig all = config;
    all.scorer = "all";
    const auto reports = evaluate_model(model, geometry, bundle, all);
    double best_auroc = -1.0, best_fpr = 1.0;
    for (const auto& report : reports) {
        if (report.ood_set != "near") continue;
        if (report.auroc_v > best_auroc) {
            best_auroc = report.auroc_v;
            best_fpr = report.fpr95;
        }
    }
    return {best_auroc, best_fpr};
}

struct CellAccumulator {
    std::vector<double> aurocs;
    std::vector<double> fprs;
};

std::pair<double, double> mean_std(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= n;
    return {mean, std::sqrt(var)};
}

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BOOTOOD_THREADS")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace

std::vector<AblationCell> run_ablation(const RunConfig& config, const GridSpec& grid,
                                       std::size_t max_threads) {
    const DatasetBundle bundle = build_datasets(config);

    struct Job {
        std::size_t cell;
        TrainConfig train_config;
    };
    std::vector<std::pair<std::string, int>> cells;
    std::vector<Job> jobs;
    for (const auto& variant : grid.variants) {
        for (int k : grid.shell_counts) {
            const std::size_t cell = cells.size();
            cells.emplace_back(variant, k);
            for (std::uint64_t seed : grid.seeds) {
                TrainConfig tc = apply_variant(config.train, variant);
                tc.num_shells = k;
                tc.seed = seed;
                jobs.push_back({cell, tc});
            }
        }
    }

    std::vector<CellAccumulator> acc(cells.size());
    std::vector<std::pair<double, double>> job_results(jobs.size());

    const std::size_t threads = std::min(resolve_threads(max_threads), jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            TrainResult result = train(jobs[j].train_config, bundle.task.train);
            job_results[j] = near_ood_best(result.model, result.geometry, bundle, config);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        acc[jobs[j].cell].aurocs.push_back(job_results[j].first);
        acc[jobs[j].cell].fprs.push_back(job_results[j].second);
    }

    std::vector<AblationCell> out(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out[i].variant = cells[i].first;
        out[i].shells = cells[i].second;
        out[i].n_seeds = acc[i].aurocs.size();
        std::tie(out[i].auroc_mean, out[i].auroc_std) = mean_std(acc[i].aurocs);
        std::tie(out[i].fpr_mean, out[i].fpr_std) = mean_std(acc[i].fprs);
    }

    // Deltas against the full model at the config's shell count (first full
    // cell otherwise).
    std::size_t base = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].variant == "full" && out[i].shells == config.train.num_shells) {
            base = i;
            break;
        }
        if (out[i].variant == "full" && out[base].variant != "full") base = i;
    }
    for (auto& cell : out) {
        cell.delta_auroc = cell.auroc_mean - out[base].auroc_mean;
        cell.delta_fpr = cell.fpr_mean - out[base].fpr_mean;
    }
    return out;
}

std::string ablation_csv_header() {
    return "variant,k,n_seeds,auroc_mean,auroc_std,fpr95_mean,fpr95_std,delta_auroc,delta_fpr95";
}

std::string ablation_csv_row(const AblationCell& cell) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%s,%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                  cell.variant.c_str(), cell.shells, cell.n_seeds, cell.auroc_mean,
                  cell.auroc_std, cell.fpr_mean, cell.fpr_std, cell.delta_auroc, cell.delta_fpr);
    return buf;
}

void run_ablate_command(const RunConfig& config, const std::string& grid_spec) {
    const GridSpec grid = parse_grid_spec(grid_spec, config);
    const std::vector<AblationCell> cells = run_ablation(config, grid);

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    echo_config(config, out_dir);

    std::ostringstream csv;
    csv << ablation_csv_header() << '\n';
    for (const auto& cell : cells) csv << ablation_csv_row(cell) << '\n';
    write_text_file(out_dir / "ablation.csv", csv.str());
}

NCReport run_diagnose_command(const RunConfig& config, const fs::path& checkpoint_path) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const DatasetBundle bundle = build_datasets(config);

    const Matrix train_features = backbone_forward(ckpt.model.backbone, bundle.task.train.inputs);
    const Matrix train_logits = classifier_forward(ckpt.model.classifier, train_features);
    NCReport report = nc_metrics(train_features, bundle.task.train.labels);
    report.train_error = 1.0 - id_accuracy(train_logits, bundle.task.train.labels);

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    echo_config(config, out_dir);
    write_diagnostic_histograms(ckpt.model, ckpt.geometry, bundle, config, out_dir);

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "nc1=%.6g norm_cv=%.6g etf_deviation=%.6g train_error=%.6g\n", report.nc1,
                  report.norm_cv, report.etf_deviation, report.train_error);
    std::cout << buf;
    return report;
}

} // namespace bootood
