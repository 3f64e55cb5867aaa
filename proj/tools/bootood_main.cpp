#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bootood/commands.hpp"

namespace {

using bootood::RunConfig;

RunConfig resolve_config(const std::string& config_path, const std::string& out_dir,
                         long long seed, const std::string& scorer) {
    RunConfig config;
    if (!config_path.empty()) config = bootood::load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed >= 0) config.train.seed = static_cast<std::uint64_t>(seed);
    if (!scorer.empty()) {
        if (scorer != "auto" && scorer != "all" && !bootood::is_scorer_id(scorer)) {
            throw bootood::ConfigError("ConfigInvalid: unknown scorer '" + scorer + "'");
        }
        config.scorer = scorer;
    }
    return config;
}

int run(int argc, char** argv) {
    CLI::App app{"BootOOD: radius-supervised OOD detection on synthetic tasks"};
    app.require_subcommand(1);

    std::string config_path, out_dir, checkpoint, scorer, grid;
    long long seed = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value config file");
        cmd->add_option("--out", out_dir, "output directory (overrides out.dir)");
        cmd->add_option("--seed", seed, "training seed (overrides train.seed)");
    };

    CLI::App* cmd_train = app.add_subcommand("train", "train a model, write checkpoint + log");
    add_common(cmd_train);

    CLI::App* cmd_eval = app.add_subcommand("eval", "score a checkpoint against the OOD sets");
    add_common(cmd_eval);
    cmd_eval->add_option("--checkpoint", checkpoint, "checkpoint to evaluate")->required();
    cmd_eval->add_option("--scorer", scorer, "msp|ebo|entropy|react|norm|auto|all");

    CLI::App* cmd_ablate = app.add_subcommand("ablate", "train/eval an ablation grid");
    add_common(cmd_ablate);
    cmd_ablate->add_option("--grid", grid,
                           "e.g. variants=full,no-sep;k=1,4;seeds=1,2,3");

    CLI::App* cmd_diagnose = app.add_subcommand("diagnose", "collapse report + histograms");
    add_common(cmd_diagnose);
    cmd_diagnose->add_option("--checkpoint", checkpoint, "checkpoint to inspect")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // flag misuse is a config error
    }

    const RunConfig config = resolve_config(config_path, out_dir, seed, scorer);

    if (cmd_train->parsed()) {
        const auto result = bootood::run_train_command(config);
        std::cout << "final_train_accuracy=" << result.record.final_train_accuracy
                  << " phase2_start_iteration=" << result.record.phase2_start_iteration << "\n";
        std::cout << "artifacts in " << config.out_dir << "\n";
    } else if (cmd_eval->parsed()) {
        const auto reports = bootood::run_eval_command(config, checkpoint);
        std::cout << bootood::eval_report_csv_header() << "\n";
        for (const auto& report : reports) {
            std::cout << bootood::eval_report_csv_row(report) << "\n";
        }
    } else if (cmd_ablate->parsed()) {
        bootood::run_ablate_command(config, grid);
        std::cout << "ablation table in " << config.out_dir << "/ablation.csv\n";
    } else if (cmd_diagnose->parsed()) {
        bootood::run_diagnose_command(config, checkpoint);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const bootood::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const bootood::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const bootood::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
