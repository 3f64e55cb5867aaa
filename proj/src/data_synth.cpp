#include "bootood/data_synth.hpp"

#include <cmath>
#include <map>

namespace bootood {

namespace {

// C orthonormal directions in R^d via Gram-Schmidt over Gaussian draws.
Matrix random_orthonormal(std::size_t dim, int count, SeededRng& rng) {
    Matrix basis(static_cast<std::size_t>(count), dim);
    for (int c = 0; c < count; ++c) {
        auto row = basis.row(static_cast<std::size_t>(c));
        for (;;) {
            for (double& v : row) v = rng.next_normal();
            for (int p = 0; p < c; ++p) {
                auto prev = basis.row(static_cast<std::size_t>(p));
                const double proj = dot(row, prev);
                for (std::size_t k = 0; k < row.size(); ++k) row[k] -= proj * prev[k];
            }
            if (l2_norm(row) > 1e-6) break; // retry on a degenerate draw
        }
        l2_normalize_inplace(row);
    }
    return basis;
}

// Simplex frame: m_c = sqrt(C/(C-1)) * (e_c - mean(e)), unit norm, pairwise
// cosine -1/(C-1).
Matrix simplex_centers(std::size_t dim, int num_classes, double separation, SeededRng& rng) {
    const Matrix basis = random_orthonormal(dim, num_classes, rng);
    const double c = static_cast<double>(num_classes);
    Vector mean(dim, 0.0);
    for (int k = 0; k < num_classes; ++k) {
        auto row = basis.row(static_cast<std::size_t>(k));
        for (std::size_t j = 0; j < dim; ++j) mean[j] += row[j] / c;
    }
    Matrix centers(static_cast<std::size_t>(num_classes), dim);
    const double scale = separation * std::sqrt(c / (c - 1.0));
    for (int k = 0; k < num_classes; ++k) {
        auto src = basis.row(static_cast<std::size_t>(k));
        auto dst = centers.row(static_cast<std::size_t>(k));
        for (std::size_t j = 0; j < dim; ++j) dst[j] = scale * (src[j] - mean[j]);
    }
    return centers;
}

LabeledDataset sample_split(const Matrix& centers, std::size_t n_per_class, double sigma,
                            SeededRng& rng, std::string split, std::string provenance) {
    const std::size_t num_classes = centers.rows();
    const std::size_t dim = centers.cols();
    LabeledDataset ds;
    ds.inputs = Matrix(num_classes * n_per_class, dim);
    ds.labels.reserve(num_classes * n_per_class);
    ds.num_classes = static_cast<int>(num_classes);
    ds.split = std::move(split);
    ds.provenance = std::move(provenance);
    std::size_t row = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        auto center = centers.row(c);
        for (std::size_t s = 0; s < n_per_class; ++s, ++row) {
            auto out = ds.inputs.row(row);
            for (std::size_t j = 0; j < dim; ++j) out[j] = center[j] + sigma * rng.next_normal();
            ds.labels.push_back(static_cast<int>(c));
        }
    }
    return ds;
}

// One pool per class, partitioned by index into train/val/test so the splits
// are disjoint by construction.
void partition_pool(const Matrix& centers, std::size_t n_train, std::size_t n_val,
                    std::size_t n_test, double sigma, SeededRng& rng, const std::string& prov,
                    BlobTask& task) {
    const std::size_t per_class = n_train + n_val + n_test;
    const LabeledDataset pool =
        sample_split(centers, per_class, sigma, rng, "pool", prov);

    auto init = [&](LabeledDataset& ds, std::size_t count, const char* split) {
        ds.inputs = Matrix(centers.rows() * count, centers.cols());
        ds.labels.clear();
        ds.labels.reserve(centers.rows() * count);
        ds.num_classes = static_cast<int>(centers.rows());
        ds.split = split;
        ds.provenance = prov;
    };
    init(task.train, n_train, "train");
    init(task.val, n_val, "val");
    init(task.test, n_test, "test");

    std::size_t tr = 0, va = 0, te = 0;
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        const std::size_t base = c * per_class;
        for (std::size_t s = 0; s < per_class; ++s) {
            const std::size_t src = base + s;
            if (s < n_train) {
                task.train.inputs.set_row(tr++, pool.inputs.row(src));
                task.train.labels.push_back(pool.labels[src]);
            } else if (s < n_train + n_val) {
                task.val.inputs.set_row(va++, pool.inputs.row(src));
                task.val.labels.push_back(pool.labels[src]);
            } else {
                task.test.inputs.set_row(te++, pool.inputs.row(src));
                task.test.labels.push_back(pool.labels[src]);
            }
        }
    }
}

void validate_blob_config(int num_classes, std::size_t dim, std::size_t n_per_class,
                          double sigma) {
    if (num_classes < 2) throw ConfigError("InvalidConfig: blobs need >= 2 classes");
    if (dim < 2) throw ConfigError("InvalidConfig: blobs need dim >= 2");
    if (static_cast<std::size_t>(num_classes) > dim) {
        throw ConfigError("InvalidConfig: simplex frame needs dim >= classes");
    }
    if (!(sigma > 0.0)) throw ConfigError("InvalidConfig: blob sigma must be > 0");
    if (n_per_class < 2) throw ConfigError("InvalidConfig: need >= 2 samples per class");
}

} // namespace

LabeledDataset make_blobs(int num_classes, std::size_t dim, std::size_t n_per_class,
                          double separation, double sigma, std::uint64_t seed) {
    validate_blob_config(num_classes, dim, n_per_class, sigma);
    SeededRng rng(seed);
    SeededRng center_rng = rng.stream(1);
    SeededRng sample_rng = rng.stream(2);
    const Matrix centers = simplex_centers(dim, num_classes, separation, center_rng);
    return sample_split(centers, n_per_class, sigma, sample_rng, "train",
                        "blobs(seed=" + std::to_string(seed) + ")");
}

BlobTask make_blob_task(int num_classes, std::size_t dim, std::size_t n_train_per_class,
                        std::size_t n_val_per_class, std::size_t n_test_per_class,
                        double separation, double sigma, std::uint64_t seed) {
    validate_blob_config(num_classes, dim, n_train_per_class, sigma);
    SeededRng rng(seed);
    SeededRng center_rng = rng.stream(1);
    BlobTask task;
    task.centers = simplex_centers(dim, num_classes, separation, center_rng);
    const std::string prov = "blobs(seed=" + std::to_string(seed) + ")";
    SeededRng pool_rng = rng.stream(2);
    partition_pool(task.centers, n_train_per_class, n_val_per_class, n_test_per_class, sigma,
                   pool_rng, prov, task);
    return task;
}

NearOODSet make_near_ood(const LabeledDataset& dataset, std::size_t n, double jitter,
                         std::uint64_t seed, double lambda_lo, double lambda_hi) {
    if (dataset.num_classes < 2) {
        throw ConfigError("InvalidConfig: near-OOD needs >= 2 classes");
    }
    if (!(0.0 <= lambda_lo && lambda_lo < lambda_hi && lambda_hi <= 1.0)) {
        throw ConfigError("InvalidConfig: near-OOD lambda window must satisfy 0 <= lo < hi <= 1");
    }
    const std::size_t dim = dataset.dim();
    // Empirical class means stand in for the class centers.
    std::map<int, std::pair<Vector, std::size_t>> acc;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        auto& [sum, count] = acc.try_emplace(dataset.labels[r], Vector(dim, 0.0), 0).first->second;
        auto row = dataset.inputs.row(r);
        for (std::size_t j = 0; j < dim; ++j) sum[j] += row[j];
        ++count;
    }
    NearOODSet set;
    set.centers = Matrix(acc.size(), dim);
    std::size_t idx = 0;
    for (auto& [cls, entry] : acc) {
        auto row = set.centers.row(idx++);
        for (std::size_t j = 0; j < dim; ++j) {
            row[j] = entry.first[j] / static_cast<double>(entry.second);
        }
    }

    SeededRng rng(seed);
    set.points = Matrix(n, dim);
    set.center_a.reserve(n);
    set.center_b.reserve(n);
    set.lambdas.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t a = rng.next_index(set.centers.rows());
        std::size_t b = rng.next_index(set.centers.rows() - 1);
        if (b >= a) ++b;
        const double lam = rng.next_uniform(lambda_lo, lambda_hi);
        auto ca = set.centers.row(a);
        auto cb = set.centers.row(b);
        auto row = set.points.row(k);
        for (std::size_t j = 0; j < dim; ++j) {
            row[j] = lam * ca[j] + (1.0 - lam) * cb[j] + jitter * rng.next_normal();
        }
        set.center_a.push_back(a);
        set.center_b.push_back(b);
        set.lambdas.push_back(lam);
    }
    return set;
}

FarOODMode far_ood_mode_from_string(const std::string& token) {
    if (token == "uniform-box") return FarOODMode::UniformBox;
    if (token == "shifted-gaussian") return FarOODMode::ShiftedGaussian;
    throw ConfigError("InvalidConfig: unknown far-OOD mode '" + token + "'");
}

std::string to_string(FarOODMode mode) {
    return mode == FarOODMode::UniformBox ? "uniform-box" : "shifted-gaussian";
}

Matrix make_far_ood(std::size_t dim, std::size_t n, FarOODMode mode, double scale,
                    std::uint64_t seed) {
    if (!(scale > 0.0)) throw ConfigError("InvalidConfig: far-OOD scale must be > 0");
    SeededRng rng(seed);
    Matrix out(n, dim);
    if (mode == FarOODMode::UniformBox) {
        for (double& v : out.data()) v = rng.next_uniform(-scale, scale);
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        Vector dir(dim);
        for (double& v : dir) v = rng.next_normal();
        l2_normalize_inplace(dir);
        auto row = out.row(k);
        for (std::size_t j = 0; j < dim; ++j) row[j] = scale * dir[j] + rng.next_normal();
    }
    return out;
}

double fraction_near_centers(const Matrix& samples, const Matrix& centers, double radius) {
    if (samples.rows() == 0) return 0.0;
    std::size_t near = 0;
    Vector diff(samples.cols());
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        auto row = samples.row(r);
        bool close = false;
        for (std::size_t c = 0; c < centers.rows() && !close; ++c) {
            auto center = centers.row(c);
            for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = row[j] - center[j];
            close = l2_norm(diff) <= radius;
        }
        if (close) ++near;
    }
    return static_cast<double>(near) / static_cast<double>(samples.rows());
}

} // namespace bootood
