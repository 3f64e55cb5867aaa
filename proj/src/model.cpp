#include "bootood/model.hpp"

#include <cmath>
#include <string>

namespace bootood {

namespace {

void require_cols(const Matrix& x, std::size_t expected, const char* what) {
    if (x.cols() != expected) {
        throw NumericError(std::string("DimensionMismatch: ") + what + " expects " +
                           std::to_string(expected) + " columns, got " +
                           std::to_string(x.cols()));
    }
}

} // namespace

Matrix backbone_forward(const BackboneParams& params, const Matrix& x, TapeCache* cache) {
    if (params.layers.empty()) throw NumericError("DimensionMismatch: backbone has no layers");
    require_cols(x, params.input_dim(), "backbone_forward input");

    if (cache) {
        cache->input = x;
        cache->pre.clear();
        cache->act.clear();
    }

    Matrix cur = x;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const DenseLayer& layer = params.layers[l];
        Matrix pre = matmul_nt(cur, layer.w);
        for (std::size_t r = 0; r < pre.rows(); ++r) {
            for (std::size_t c = 0; c < pre.cols(); ++c) pre(r, c) += layer.b[c];
        }
        const bool last = (l + 1 == params.layers.size());
        Matrix act = pre;
        if (!last) {
            for (double& v : act.data()) v = std::tanh(v);
        }
        if (cache) {
            cache->pre.push_back(pre);
            cache->act.push_back(act);
        }
        cur = std::move(act);
    }
    require_finite(cur.data(), "backbone features");
    return cur;
}

void backbone_backward(const BackboneParams& params, const TapeCache& cache,
                       const Matrix& dfeatures, BackboneParams* grads, Matrix* dinput) {
    if (cache.act.size() != params.layers.size()) {
        throw NumericError("DimensionMismatch: tape cache does not match backbone depth");
    }
    Matrix dact = dfeatures; // gradient w.r.t. the activation output of layer l
    for (std::size_t li = params.layers.size(); li-- > 0;) {
        const DenseLayer& layer = params.layers[li];
        const bool last = (li + 1 == params.layers.size());
        Matrix dpre = std::move(dact);
        if (!last) {
            // tanh'(p) = 1 - tanh(p)^2, and act holds tanh(p).
            const Matrix& a = cache.act[li];
            for (std::size_t i = 0; i < dpre.data().size(); ++i) {
                dpre.data()[i] *= 1.0 - a.data()[i] * a.data()[i];
            }
        }
        const Matrix& below = (li == 0) ? cache.input : cache.act[li - 1];
        Matrix dw = matmul_tn(dpre, below); // out×in
        Vector db = column_sums(dpre);
        if (grads) {
            DenseLayer& g = grads->layers[li];
            for (std::size_t i = 0; i < dw.data().size(); ++i) g.w.data()[i] += dw.data()[i];
            for (std::size_t i = 0; i < db.size(); ++i) g.b[i] += db[i];
        }
        if (li > 0 || dinput) {
            dact = matmul_nn(dpre, layer.w);
        }
    }
    if (dinput) *dinput = std::move(dact);
}

Matrix classifier_forward(const ClassifierParams& params, const Matrix& features) {
    require_cols(features, params.feature_dim(), "classifier_forward features");
    return matmul_nt(features, params.w);
}

void classifier_backward(const ClassifierParams& params, const Matrix& features,
                         const Matrix& dlogits, ClassifierParams* grads, Matrix* dfeatures) {
    if (grads) {
        Matrix dw = matmul_tn(dlogits, features); // C×m
        for (std::size_t i = 0; i < dw.data().size(); ++i) grads->w.data()[i] += dw.data()[i];
    }
    if (dfeatures) *dfeatures = matmul_nn(dlogits, params.w);
}

Matrix radius_head_forward(const RadiusHeadParams& params, const Matrix& features) {
    require_cols(features, params.feature_dim(), "radius_head_forward features");
    Matrix logits = matmul_nt(features, params.w);
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        for (std::size_t c = 0; c < logits.cols(); ++c) logits(r, c) += params.b[c];
    }
    return logits;
}

void radius_head_backward(const RadiusHeadParams& params, const Matrix& features,
                          const Matrix& dlogits, RadiusHeadParams* grads, Matrix* dfeatures) {
    if (grads) {
        Matrix dw = matmul_tn(dlogits, features);
        Vector db = column_sums(dlogits);
        for (std::size_t i = 0; i < dw.data().size(); ++i) grads->w.data()[i] += dw.data()[i];
        for (std::size_t i = 0; i < db.size(); ++i) grads->b[i] += db[i];
    }
    if (dfeatures) *dfeatures = matmul_nn(dlogits, params.w);
}

namespace {

DenseLayer init_layer(std::size_t out, std::size_t in, SeededRng& rng) {
    DenseLayer layer{Matrix(out, in), Vector(out, 0.0)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& v : layer.w.data()) v = scale * rng.next_normal();
    return layer;
}

} // namespace

ModelState init_model(const ModelDims& dims, SeededRng& rng) {
    if (dims.num_classes < 2) throw ConfigError("ConfigInvalid: need at least 2 classes");
    if (dims.num_shells < 1) throw ConfigError("InvalidK: need at least 1 radius shell");
    ModelState model;
    std::size_t in = dims.input_dim;
    for (std::size_t l = 0; l < dims.hidden_layers; ++l) {
        model.backbone.layers.push_back(init_layer(dims.hidden_width, in, rng));
        in = dims.hidden_width;
    }
    model.backbone.layers.push_back(init_layer(dims.feature_dim, in, rng));
    model.classifier.w = init_layer(dims.num_classes, dims.feature_dim, rng).w;
    auto head = init_layer(dims.num_shells, dims.feature_dim, rng);
    model.radius_head.w = std::move(head.w);
    model.radius_head.b = std::move(head.b);
    return model;
}

ModelState zero_like(const ModelState& model) {
    ModelState z;
    for (const auto& layer : model.backbone.layers) {
        z.backbone.layers.push_back({Matrix(layer.w.rows(), layer.w.cols()),
                                     Vector(layer.b.size(), 0.0)});
    }
    z.classifier.w = Matrix(model.classifier.w.rows(), model.classifier.w.cols());
    z.radius_head.w = Matrix(model.radius_head.w.rows(), model.radius_head.w.cols());
    z.radius_head.b = Vector(model.radius_head.b.size(), 0.0);
    return z;
}

ModelDims dims_of(const ModelState& model) {
    ModelDims dims;
    dims.input_dim = model.backbone.input_dim();
    dims.hidden_layers = model.backbone.layers.size() - 1;
    dims.hidden_width = dims.hidden_layers > 0 ? model.backbone.layers.front().out_dim()
                                               : model.backbone.feature_dim();
    dims.feature_dim = model.backbone.feature_dim();
    dims.num_classes = model.classifier.num_classes();
    dims.num_shells = model.radius_head.num_shells();
    return dims;
}

std::size_t param_count(const ModelState& model) {
    std::size_t n = 0;
    for_each_param(model, [&](std::span<const double> p) { n += p.size(); });
    return n;
}

Vector flatten_params(const ModelState& model) {
    Vector flat;
    flat.reserve(param_count(model));
    for_each_param(model, [&](std::span<const double> p) {
        flat.insert(flat.end(), p.begin(), p.end());
    });
    return flat;
}

void unflatten_params(ModelState& model, const Vector& flat) {
    if (flat.size() != param_count(model)) {
        throw NumericError("ShapeMismatch: flat vector length " + std::to_string(flat.size()) +
                           " != parameter count " + std::to_string(param_count(model)));
    }
    std::size_t off = 0;
    for_each_param(model, [&](std::span<double> p) {
        std::copy(flat.begin() + off, flat.begin() + off + p.size(), p.begin());
        off += p.size();
    });
}

void sgd_step(std::span<double> params, std::span<const double> grads,
              std::span<double> velocity, const SgdConfig& cfg) {
    if (params.size() != grads.size() || params.size() != velocity.size()) {
        throw NumericError("ShapeMismatch: sgd_step arrays of lengths " +
                           std::to_string(params.size()) + "/" + std::to_string(grads.size()) +
                           "/" + std::to_string(velocity.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i] + cfg.weight_decay * params[i];
        velocity[i] = cfg.momentum * velocity[i] + g;
        params[i] -= cfg.lr * velocity[i];
    }
}

void sgd_step(ModelState& model, const ModelState& grads, ModelState& velocity,
              ParamGroup group, const SgdConfig& cfg) {
    std::vector<std::span<const double>> gspans;
    std::vector<std::span<double>> vspans;
    for_each_param(grads, group, [&](std::span<const double> g) { gspans.push_back(g); });
    for_each_param(velocity, group, [&](std::span<double> v) { vspans.push_back(v); });
    std::size_t idx = 0;
    for_each_param(model, group, [&](std::span<double> p) {
        sgd_step(p, gspans[idx], vspans[idx], cfg);
        ++idx;
    });
}

double grad_global_norm(const ModelState& grads) {
    double acc = 0.0;
    for_each_param(grads, [&](std::span<const double> g) {
        for (double v : g) acc += v * v;
    });
    return std::sqrt(acc);
}

void scale_grads(ModelState& grads, double factor) {
    for_each_param(grads, [&](std::span<double> g) {
        for (double& v : g) v *= factor;
    });
}

} // namespace bootood
