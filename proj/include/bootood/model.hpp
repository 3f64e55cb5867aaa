#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bootood/numeric.hpp"

namespace bootood {

// One affine layer; w is out×in, row-major.
struct DenseLayer {
    Matrix w;
    Vector b;

    std::size_t in_dim() const { return w.cols(); }
    std::size_t out_dim() const { return w.rows(); }
};

// Feed-forward backbone: tanh between layers, linear output. The output of
// the last layer is the penultimate feature the rest of the pipeline works on.
struct BackboneParams {
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t feature_dim() const { return layers.back().out_dim(); }
};

// Linear classifier, no bias: logits = h W^T.
struct ClassifierParams {
    Matrix w; // C×m

    std::size_t num_classes() const { return w.rows(); }
    std::size_t feature_dim() const { return w.cols(); }
};

// Radius head: single affine map m -> K over unit-normalized features.
struct RadiusHeadParams {
    Matrix w; // K×m
    Vector b; // K

    std::size_t num_shells() const { return w.rows(); }
    std::size_t feature_dim() const { return w.cols(); }
};

struct ModelState {
    BackboneParams backbone;
    ClassifierParams classifier;
    RadiusHeadParams radius_head;
};

// Pre-activations and activations retained from a forward pass, enough to
// backpropagate into every layer and into the input.
struct TapeCache {
    Matrix input;
    std::vector<Matrix> pre; // per layer, B×out
    std::vector<Matrix> act; // per layer, B×out; act.back() == pre.back()
};

Matrix backbone_forward(const BackboneParams& params, const Matrix& x,
                        TapeCache* cache = nullptr);

// Accumulates parameter gradients into *grads (which must be zero_like or
// already partially accumulated) given dL/dh. Optionally returns dL/dx.
void backbone_backward(const BackboneParams& params, const TapeCache& cache,
                       const Matrix& dfeatures, BackboneParams* grads,
                       Matrix* dinput = nullptr);

Matrix classifier_forward(const ClassifierParams& params, const Matrix& features);

void classifier_backward(const ClassifierParams& params, const Matrix& features,
                         const Matrix& dlogits, ClassifierParams* grads,
                         Matrix* dfeatures = nullptr);

Matrix radius_head_forward(const RadiusHeadParams& params, const Matrix& features);

void radius_head_backward(const RadiusHeadParams& params, const Matrix& features,
                          const Matrix& dlogits, RadiusHeadParams* grads,
                          Matrix* dfeatures = nullptr);

struct ModelDims {
    std::size_t input_dim = 8;
    std::size_t hidden_width = 64;
    std::size_t hidden_layers = 2;
    std::size_t feature_dim = 16;
    std::size_t num_classes = 4;
    std::size_t num_shells = 4;
};

// Weights ~ N(0, 1/fan_in), biases zero.
ModelState init_model(const ModelDims& dims, SeededRng& rng);

ModelState zero_like(const ModelState& model);

ModelDims dims_of(const ModelState& model);

// The two optimizer groups: the radius head trains at its own rate.
enum class ParamGroup { BackboneClassifier, RadiusHead };

// Visits every parameter array of the group in declaration order
// (backbone layer weights then bias, per layer; classifier; radius head).
template <typename Fn>
void for_each_param(ModelState& model, ParamGroup group, Fn&& fn) {
    if (group == ParamGroup::BackboneClassifier) {
        for (auto& layer : model.backbone.layers) {
            fn(std::span<double>(layer.w.data()));
            fn(std::span<double>(layer.b));
        }
        fn(std::span<double>(model.classifier.w.data()));
    } else {
        fn(std::span<double>(model.radius_head.w.data()));
        fn(std::span<double>(model.radius_head.b));
    }
}

template <typename Fn>
void for_each_param(const ModelState& model, ParamGroup group, Fn&& fn) {
    if (group == ParamGroup::BackboneClassifier) {
        for (const auto& layer : model.backbone.layers) {
            fn(std::span<const double>(layer.w.data()));
            fn(std::span<const double>(layer.b));
        }
        fn(std::span<const double>(model.classifier.w.data()));
    } else {
        fn(std::span<const double>(model.radius_head.w.data()));
        fn(std::span<const double>(model.radius_head.b));
    }
}

template <typename Fn>
void for_each_param(ModelState& model, Fn&& fn) {
    for_each_param(model, ParamGroup::BackboneClassifier, fn);
    for_each_param(model, ParamGroup::RadiusHead, fn);
}

template <typename Fn>
void for_each_param(const ModelState& model, Fn&& fn) {
    for_each_param(model, ParamGroup::BackboneClassifier, fn);
    for_each_param(model, ParamGroup::RadiusHead, fn);
}

std::size_t param_count(const ModelState& model);
Vector flatten_params(const ModelState& model);
void unflatten_params(ModelState& model, const Vector& flat);

struct SgdConfig {
    double lr = 0.05;
    double momentum = 0.9;
    double weight_decay = 0.0;
};

// Momentum SGD on one parameter array:
//   v <- momentum * v + (g + weight_decay * p);  p <- p - lr * v.
void sgd_step(std::span<double> params, std::span<const double> grads,
              std::span<double> velocity, const SgdConfig& cfg);

// Applies sgd_step to every array of the group; velocity has model shape.
void sgd_step(ModelState& model, const ModelState& grads, ModelState& velocity,
              ParamGroup group, const SgdConfig& cfg);

// Global L2 norm over every gradient array of both groups.
double grad_global_norm(const ModelState& grads);
void scale_grads(ModelState& grads, double factor);

} // namespace bootood
