#pragma once

#include "prunebound/matrix.hpp"
#include "prunebound/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace prunebound {

enum class Activation : std::uint8_t { Identity = 0, ReLU = 1 };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// One layer: weights are (out x in). The activation is applied to this
// layer's output when the layer is not the last one; M(x) applies no
// activation after the final matrix.
struct LayerSpec {
    Matrix weights;
    Activation activation = Activation::ReLU;
    double lipschitz = 1.0;

    std::size_t out_dim() const { return weights.rows(); }
    std::size_t in_dim() const { return weights.cols(); }
};

class ModelStack {
public:
    ModelStack() = default;
    // Validates shape composition and Lipschitz constants.
    ModelStack(std::vector<LayerSpec> layers, std::size_t input_dim, std::size_t num_classes);

    const std::vector<LayerSpec>& layers() const { return layers_; }
    const LayerSpec& layer(std::size_t l) const { return layers_.at(l); }
    std::size_t depth() const { return layers_.size(); }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t num_classes() const { return num_classes_; }

    // Same architecture with replaced weight matrices (shapes must match).
    ModelStack with_weights(std::vector<Matrix> weights) const;

    bool operator==(const ModelStack&) const;

private:
    std::vector<LayerSpec> layers_;
    std::size_t input_dim_ = 0;
    std::size_t num_classes_ = 0;
};

// Bias-free MLP input -> hidden x (depth-1) -> classes with ReLU hidden layers
// and He-normal initial weights.
ModelStack make_mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t depth,
                    std::size_t num_classes, const RngHandle& rng);

struct Dataset {
    Matrix samples;                  // n x input_dim
    std::vector<std::int32_t> labels;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return samples.cols(); }
    // Throws unless samples/labels agree and labels lie in [0, k).
    void validate(std::size_t num_classes) const;
    Dataset head(std::size_t n) const;
};

// Pre-activation outputs x^1..x^L (x^L are the logits).
struct ForwardTrace {
    std::vector<std::vector<double>> outputs;
    const std::vector<double>& logits() const { return outputs.back(); }
};

std::vector<double> forward(const ModelStack& model, std::span<const double> x);
ForwardTrace forward_trace(const ModelStack& model, std::span<const double> x);
// Logits for every row of `inputs` (n x input_dim), computed in batch.
Matrix forward_batch(const ModelStack& model, const Matrix& inputs);

// M(x)[y] - max_{j != y} M(x)[j] for each sample.
std::vector<double> margins(const ModelStack& model, const Dataset& data);
// Fraction of samples with margin < gamma.
double empirical_margin_loss(const ModelStack& model, const Dataset& data, double gamma);
double margin_loss_from(std::span<const double> margins, double gamma);
// Fraction with margin >= 0, so accuracy = 1 - empirical_margin_loss(.., 0).
double accuracy(const ModelStack& model, const Dataset& data);

}  // namespace prunebound
