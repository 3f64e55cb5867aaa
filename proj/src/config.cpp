#include "bootood/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bootood/scorers.hpp"

namespace bootood {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("ConfigInvalid: key '" + key + "' expects a number, got '" + value +
                          "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("ConfigInvalid: key '" + key + "' expects an integer, got '" + value +
                          "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("ConfigInvalid: key '" + key + "' expects true/false, got '" + value + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& schema() {
    auto d = [](double RunConfig::*field) {
        return Setter([field](RunConfig& c, const std::string& k, const std::string& v) {
            c.*field = parse_double(k, v);
        });
    };
    auto td = [](double TrainConfig::*field) {
        return Setter([field](RunConfig& c, const std::string& k, const std::string& v) {
            c.train.*field = parse_double(k, v);
        });
    };
    auto tz = [](std::size_t TrainConfig::*field) {
        return Setter([field](RunConfig& c, const std::string& k, const std::string& v) {
            const long long value = parse_int(k, v);
            if (value < 0) throw ConfigError("ConfigInvalid: key '" + k + "' must be >= 0");
            c.train.*field = static_cast<std::size_t>(value);
        });
    };
    auto tb = [](bool TrainConfig::*field) {
        return Setter([field](RunConfig& c, const std::string& k, const std::string& v) {
            c.train.*field = parse_bool(k, v);
        });
    };
    auto z = [](std::size_t RunConfig::*field) {
        return Setter([field](RunConfig& c, const std::string& k, const std::string& v) {
            const long long value = parse_int(k, v);
            if (value < 0) throw ConfigError("ConfigInvalid: key '" + k + "' must be >= 0");
            c.*field = static_cast<std::size_t>(value);
        });
    };

    static const std::map<std::string, Setter> table = {
        {"data.classes",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.data_classes = static_cast<int>(parse_int(k, v));
         }},
        {"data.dim", z(&RunConfig::data_dim)},
        {"data.train_per_class", z(&RunConfig::data_train_per_class)},
        {"data.val_per_class", z(&RunConfig::data_val_per_class)},
        {"data.test_per_class", z(&RunConfig::data_test_per_class)},
        {"data.separation", d(&RunConfig::data_separation)},
        {"data.sigma", d(&RunConfig::data_sigma)},
        {"data.seed",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.data_seed = static_cast<std::uint64_t>(parse_int(k, v));
         }},
        {"data.near_n", z(&RunConfig::near_n)},
        {"data.near_jitter", d(&RunConfig::near_jitter)},
        {"data.near_lambda_lo", d(&RunConfig::near_lambda_lo)},
        {"data.near_lambda_hi", d(&RunConfig::near_lambda_hi)},
        {"data.far_n", z(&RunConfig::far_n)},
        {"data.far_mode",
         [](RunConfig& c, const std::string&, const std::string& v) {
             c.far_mode = far_ood_mode_from_string(v);
         }},
        {"data.far_scale_factor", d(&RunConfig::far_scale_factor)},

        {"model.hidden_width", tz(&TrainConfig::hidden_width)},
        {"model.hidden_layers", tz(&TrainConfig::hidden_layers)},
        {"model.feature_dim", tz(&TrainConfig::feature_dim)},

        {"train.epochs", tz(&TrainConfig::epochs)},
        {"train.batch_size", tz(&TrainConfig::batch_size)},
        {"train.lr", td(&TrainConfig::lr)},
        {"train.radius_lr_scale", td(&TrainConfig::radius_lr_scale)},
        {"train.momentum", td(&TrainConfig::momentum)},
        {"train.weight_decay", td(&TrainConfig::weight_decay)},
        {"train.clip_norm", td(&TrainConfig::clip_norm)},
        {"train.seed",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.train.seed = static_cast<std::uint64_t>(parse_int(k, v));
         }},
        {"train.log_interval", tz(&TrainConfig::log_interval)},

        {"ood.K",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.train.num_shells = static_cast<int>(parse_int(k, v));
         }},
        {"ood.alpha", td(&TrainConfig::mix_alpha)},
        {"ood.M", tz(&TrainConfig::pseudo_per_batch)},
        {"ood.spacing",
         [](RunConfig& c, const std::string&, const std::string& v) {
             c.train.spacing = shell_spacing_from_string(v);
         }},
        {"ood.beta_mu", td(&TrainConfig::beta_mu)},
        {"ood.beta_r", td(&TrainConfig::beta_r)},
        {"ood.lambda_cls", td(&TrainConfig::lambda_cls)},
        {"ood.lambda_reg", td(&TrainConfig::lambda_reg)},
        {"ood.lambda_ood_max", td(&TrainConfig::lambda_ood_max)},
        {"ood.lambda_sep_max", td(&TrainConfig::lambda_sep_max)},
        {"ood.warmup_frac", td(&TrainConfig::warmup_frac)},
        {"ood.reg_on_raw", tb(&TrainConfig::reg_on_raw)},

        {"phase1.policy",
         [](RunConfig& c, const std::string&, const std::string& v) {
             c.train.phase1_policy = phase1_policy_from_string(v);
         }},
        {"phase1.max_epochs", tz(&TrainConfig::phase1_max_epochs)},
        {"phase1.min_epochs", tz(&TrainConfig::phase1_min_epochs)},
        {"phase1.nc1_threshold", td(&TrainConfig::nc1_threshold)},
        {"phase1.cv_threshold", td(&TrainConfig::cv_threshold)},

        {"ablate.disable_warmup", tb(&TrainConfig::disable_warmup)},
        {"ablate.disable_radius", tb(&TrainConfig::disable_radius)},
        {"ablate.disable_sep", tb(&TrainConfig::disable_sep)},

        {"eval.scorer",
         [](RunConfig& c, const std::string&, const std::string& v) {
             if (v != "auto" && v != "all" && !is_scorer_id(v)) {
                 throw ConfigError("ConfigInvalid: unknown scorer '" + v + "'");
             }
             c.scorer = v;
         }},
        {"eval.ebo_temperature", d(&RunConfig::ebo_temperature)},
        {"eval.react_percentile", d(&RunConfig::react_percentile)},
        {"eval.histogram_bins", z(&RunConfig::histogram_bins)},

        {"out.dir",
         [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
    };
    return table;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("ConfigInvalid: line " + std::to_string(line_no) +
                              " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = schema().find(key);
        if (it == schema().end()) {
            throw ConfigError("ConfigInvalid: unknown key '" + key + "' on line " +
                              std::to_string(line_no));
        }
        it->second(config, key, value);
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("IOFailure: cannot open config '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "data.classes = " << c.data_classes << '\n';
    out << "data.dim = " << c.data_dim << '\n';
    out << "data.train_per_class = " << c.data_train_per_class << '\n';
    out << "data.val_per_class = " << c.data_val_per_class << '\n';
    out << "data.test_per_class = " << c.data_test_per_class << '\n';
    out << "data.separation = " << num(c.data_separation) << '\n';
    out << "data.sigma = " << num(c.data_sigma) << '\n';
    out << "data.seed = " << c.data_seed << '\n';
    out << "data.near_n = " << c.near_n << '\n';
    out << "data.near_jitter = " << num(c.near_jitter) << '\n';
    out << "data.near_lambda_lo = " << num(c.near_lambda_lo) << '\n';
    out << "data.near_lambda_hi = " << num(c.near_lambda_hi) << '\n';
    out << "data.far_n = " << c.far_n << '\n';
    out << "data.far_mode = " << to_string(c.far_mode) << '\n';
    out << "data.far_scale_factor = " << num(c.far_scale_factor) << '\n';
    out << "model.hidden_width = " << c.train.hidden_width << '\n';
    out << "model.hidden_layers = " << c.train.hidden_layers << '\n';
    out << "model.feature_dim = " << c.train.feature_dim << '\n';
    out << "train.epochs = " << c.train.epochs << '\n';
    out << "train.batch_size = " << c.train.batch_size << '\n';
    out << "train.lr = " << num(c.train.lr) << '\n';
    out << "train.radius_lr_scale = " << num(c.train.radius_lr_scale) << '\n';
    out << "train.momentum = " << num(c.train.momentum) << '\n';
    out << "train.weight_decay = " << num(c.train.weight_decay) << '\n';
    out << "train.clip_norm = " << num(c.train.clip_norm) << '\n';
    out << "train.seed = " << c.train.seed << '\n';
    out << "train.log_interval = " << c.train.log_interval << '\n';
    out << "ood.K = " << c.train.num_shells << '\n';
    out << "ood.alpha = " << num(c.train.mix_alpha) << '\n';
    out << "ood.M = " << c.train.pseudo_per_batch << '\n';
    out << "ood.spacing = " << to_string(c.train.spacing) << '\n';
    out << "ood.beta_mu = " << num(c.train.beta_mu) << '\n';
    out << "ood.beta_r = " << num(c.train.beta_r) << '\n';
    out << "ood.lambda_cls = " << num(c.train.lambda_cls) << '\n';
    out << "ood.lambda_reg = " << num(c.train.lambda_reg) << '\n';
    out << "ood.lambda_ood_max = " << num(c.train.lambda_ood_max) << '\n';
    out << "ood.lambda_sep_max = " << num(c.train.lambda_sep_max) << '\n';
    out << "ood.warmup_frac = " << num(c.train.warmup_frac) << '\n';
    out << "ood.reg_on_raw = " << (c.train.reg_on_raw ? "true" : "false") << '\n';
    out << "phase1.policy = " << to_string(c.train.phase1_policy) << '\n';
    out << "phase1.max_epochs = " << c.train.phase1_max_epochs << '\n';
    out << "phase1.min_epochs = " << c.train.phase1_min_epochs << '\n';
    out << "phase1.nc1_threshold = " << num(c.train.nc1_threshold) << '\n';
    out << "phase1.cv_threshold = " << num(c.train.cv_threshold) << '\n';
    out << "ablate.disable_warmup = " << (c.train.disable_warmup ? "true" : "false") << '\n';
    out << "ablate.disable_radius = " << (c.train.disable_radius ? "true" : "false") << '\n';
    out << "ablate.disable_sep = " << (c.train.disable_sep ? "true" : "false") << '\n';
    out << "eval.scorer = " << c.scorer << '\n';
    out << "eval.ebo_temperature = " << num(c.ebo_temperature) << '\n';
    out << "eval.react_percentile = " << num(c.react_percentile) << '\n';
    out << "eval.histogram_bins = " << c.histogram_bins << '\n';
    out << "out.dir = " << c.out_dir << '\n';
    return out.str();
}

} // namespace bootood
