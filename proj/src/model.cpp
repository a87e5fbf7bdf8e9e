#include "prunebound/model.hpp"

#include "prunebound/errors.hpp"
#include "prunebound/kernels.hpp"
#include "prunebound/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prunebound {

std::string to_string(Activation a) {
    return a == Activation::ReLU ? "relu" : "identity";
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::ReLU;
    if (s == "identity") return Activation::Identity;
    throw ValidationError("unknown activation '" + s + "'");
}

ModelStack::ModelStack(std::vector<LayerSpec> layers, std::size_t input_dim, std::size_t num_classes)
    : layers_(std::move(layers)), input_dim_(input_dim), num_classes_(num_classes) {
    if (layers_.empty()) throw ValidationError("ModelStack: at least one layer required");
    if (input_dim_ == 0 || num_classes_ == 0) throw ValidationError("ModelStack: dimensions must be positive");
    std::size_t prev = input_dim_;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (layer.weights.empty()) throw ValidationError("ModelStack: layer " + std::to_string(l) + " is empty");
        if (layer.in_dim() != prev) {
            throw DimensionError("ModelStack: layer " + std::to_string(l) + " expects input " +
                                 std::to_string(layer.in_dim()) + " but receives " + std::to_string(prev));
        }
        if (layer.lipschitz != 1.0) {
            throw ValidationError("ModelStack: ReLU and Identity layers are 1-Lipschitz (layer " +
                                  std::to_string(l) + ")");
        }
        prev = layer.out_dim();
    }
    if (prev != num_classes_) {
        throw DimensionError("ModelStack: final output " + std::to_string(prev) + " != num_classes " +
                             std::to_string(num_classes_));
    }
}

ModelStack ModelStack::with_weights(std::vector<Matrix> weights) const {
    if (weights.size() != layers_.size()) throw DimensionError("with_weights: layer count mismatch");
    auto layers = layers_;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (weights[l].rows() != layers[l].weights.rows() || weights[l].cols() != layers[l].weights.cols())
            throw DimensionError("with_weights: shape mismatch at layer " + std::to_string(l));
        layers[l].weights = std::move(weights[l]);
    }
    return ModelStack(std::move(layers), input_dim_, num_classes_);
}

bool ModelStack::operator==(const ModelStack& other) const {
    if (input_dim_ != other.input_dim_ || num_classes_ != other.num_classes_ || depth() != other.depth())
        return false;
    for (std::size_t l = 0; l < depth(); ++l) {
        const auto& a = layers_[l];
        const auto& b = other.layers_[l];
        if (a.activation != b.activation || a.lipschitz != b.lipschitz || !(a.weights == b.weights)) return false;
    }
    return true;
}

ModelStack make_mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t depth, std::size_t num_classes,
                    const RngHandle& rng) {
    if (depth == 0) throw ValidationError("make_mlp: depth must be positive");
    std::vector<LayerSpec> layers;
    std::size_t in = input_dim;
    for (std::size_t l = 0; l < depth; ++l) {
        const bool last = l + 1 == depth;
        const std::size_t out = last ? num_classes : hidden_dim;
        layers.push_back({gaussian_matrix(out, in, 2.0 / static_cast<double>(in), rng.derive(l)),
                          last ? Activation::Identity : Activation::ReLU, 1.0});
        in = out;
    }
    return ModelStack(std::move(layers), input_dim, num_classes);
}

void Dataset::validate(std::size_t num_classes) const {
    if (samples.rows() != labels.size())
        throw DimensionError("Dataset: " + std::to_string(samples.rows()) + " samples but " +
                             std::to_string(labels.size()) + " labels");
    for (auto y : labels)
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
            throw LabelRangeError("Dataset: label " + std::to_string(y) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
}

Dataset Dataset::head(std::size_t n) const {
    n = std::min(n, size());
    std::vector<double> data(samples.data().begin(), samples.data().begin() + static_cast<std::ptrdiff_t>(n * dim()));
    return Dataset{Matrix(n, dim(), std::move(data)), std::vector<std::int32_t>(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n))};
}

namespace {

void apply_activation(Activation a, std::span<double> v) {
    if (a == Activation::ReLU)
        for (auto& x : v) x = x > 0.0 ? x : 0.0;
}

}  // namespace

ForwardTrace forward_trace(const ModelStack& model, std::span<const double> x) {
    if (x.size() != model.input_dim())
        throw DimensionError("forward: input has length " + std::to_string(x.size()) + ", expected " +
                             std::to_string(model.input_dim()));
    ForwardTrace trace;
    std::vector<double> h(x.begin(), x.end());
    for (std::size_t l = 0; l < model.depth(); ++l) {
        const auto& layer = model.layer(l);
        auto out = multiply(layer.weights, h);
        trace.outputs.push_back(out);
        if (l + 1 < model.depth()) apply_activation(layer.activation, out);
        h = std::move(out);
    }
    return trace;
}

std::vector<double> forward(const ModelStack& model, std::span<const double> x) {
    return forward_trace(model, x).outputs.back();
}

Matrix forward_batch(const ModelStack& model, const Matrix& inputs) {
    if (inputs.cols() != model.input_dim())
        throw DimensionError("forward_batch: inputs have " + std::to_string(inputs.cols()) + " columns, expected " +
                             std::to_string(model.input_dim()));
    Matrix h = inputs;
    for (std::size_t l = 0; l < model.depth(); ++l) {
        const auto& layer = model.layer(l);
        h = kernels::gemm_nt(h, layer.weights);
        if (l + 1 < model.depth()) apply_activation(layer.activation, h.data());
    }
    return h;
}

std::vector<double> margins(const ModelStack& model, const Dataset& data) {
    data.validate(model.num_classes());
    if (model.num_classes() < 2) throw ValidationError("margins: need at least two classes");
    const Matrix logits = forward_batch(model, data.samples);
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = logits.row(i);
        const auto y = static_cast<std::size_t>(data.labels[i]);
        double best_other = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < row.size(); ++j)
            if (j != y) best_other = std::max(best_other, row[j]);
        out[i] = row[y] - best_other;
    }
    return out;
}

double margin_loss_from(std::span<const double> m, double gamma) {
    if (m.empty()) throw ValidationError("empirical_margin_loss: empty dataset");
    std::size_t bad = 0;
    for (double v : m)
        if (v < gamma) ++bad;
    return static_cast<double>(bad) / static_cast<double>(m.size());
}

double empirical_margin_loss(const ModelStack& model, const Dataset& data, double gamma) {
    if (data.size() == 0) throw ValidationError("empirical_margin_loss: empty dataset");
    return margin_loss_from(margins(model, data), gamma);
}

double accuracy(const ModelStack& model, const Dataset& data) {
    return 1.0 - empirical_margin_loss(model, data, 0.0);
}

}  // namespace prunebound
