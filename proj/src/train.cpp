#include "prunebound/train.hpp"

#include "prunebound/errors.hpp"
#include "prunebound/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prunebound {

namespace {

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::size_t step = 0;
};

// Softmax cross-entropy for a batch of logits; writes dL/dlogits (mean over batch).
double softmax_xent(const Matrix& logits, std::span<const std::int32_t> labels, Matrix* grad) {
    const std::size_t b = logits.rows();
    const std::size_t k = logits.cols();
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const auto row = logits.row(i);
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (double v : row) z += std::exp(v - mx);
        const double logz = mx + std::log(z);
        const auto y = static_cast<std::size_t>(labels[i]);
        loss += logz - row[y];
        if (grad) {
            auto g = grad->row(i);
            for (std::size_t j = 0; j < k; ++j) g[j] = std::exp(row[j] - logz) / static_cast<double>(b);
            g[y] -= 1.0 / static_cast<double>(b);
        }
    }
    return loss / static_cast<double>(b);
}

Matrix gather_rows(const Matrix& src, std::span<const std::size_t> idx) {
    Matrix out(idx.size(), src.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto s = src.row(idx[i]);
        std::copy(s.begin(), s.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace

double cross_entropy(const ModelStack& model, const Dataset& data) {
    data.validate(model.num_classes());
    const Matrix logits = forward_batch(model, data.samples);
    return softmax_xent(logits, data.labels, nullptr);
}

TrainResult train(const ModelStack& model, const Dataset& data, const TrainOptions& opts, const RngHandle& rng) {
    if (data.size() == 0) throw ValidationError("train: empty dataset");
    if (opts.batch_size == 0) throw ValidationError("train: batch_size must be positive");
    if (!(opts.lr > 0.0)) throw ValidationError("train: lr must be positive");
    data.validate(model.num_classes());
    if (data.dim() != model.input_dim()) throw DimensionError("train: data dimension does not match model input");

    const std::size_t depth = model.depth();
    std::vector<Matrix> w;
    for (const auto& layer : model.layers()) w.push_back(layer.weights);

    AdamState adam;
    for (const auto& m : w) {
        adam.m.emplace_back(m.rows(), m.cols());
        adam.v.emplace_back(m.rows(), m.cols());
    }

    TrainResult result;
    std::vector<std::size_t> order(data.size());
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        Rng shuffle(rng.derive(epoch));
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
            const std::size_t stop = std::min(order.size(), start + opts.batch_size);
            const std::span<const std::size_t> idx(order.data() + start, stop - start);
            std::vector<std::int32_t> labels(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = data.labels[idx[i]];

            // Forward, keeping layer inputs (post-activation) and pre-activations.
            std::vector<Matrix> inputs{gather_rows(data.samples, idx)};
            std::vector<Matrix> pre;
            for (std::size_t l = 0; l < depth; ++l) {
                Matrix z = kernels::gemm_nt(inputs.back(), w[l]);
                pre.push_back(z);
                if (l + 1 < depth) {
                    if (model.layer(l).activation == Activation::ReLU)
                        for (auto& x : z.data()) x = x > 0.0 ? x : 0.0;
                    inputs.push_back(std::move(z));
                }
            }

            Matrix delta(pre.back().rows(), pre.back().cols());
            const double loss = softmax_xent(pre.back(), labels, &delta);
            if (!std::isfinite(loss))
                throw DivergenceError("train: loss became non-finite in epoch " + std::to_string(epoch), epoch);
            epoch_loss += loss;
            ++batches;

            ++adam.step;
            const double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(adam.step));
            const double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(adam.step));
            for (std::size_t l = depth; l-- > 0;) {
                const Matrix grad = kernels::gemm_tn(delta, inputs[l]);
                if (l > 0) {
                    Matrix back = kernels::gemm_nn(delta, w[l]);
                    if (model.layer(l - 1).activation == Activation::ReLU) {
                        const auto z = pre[l - 1].data();
                        auto d = back.data();
                        for (std::size_t k = 0; k < d.size(); ++k)
                            if (z[k] <= 0.0) d[k] = 0.0;
                    }
                    delta = std::move(back);
                }
                auto wd = w[l].data();
                auto md = adam.m[l].data();
                auto vd = adam.v[l].data();
                const auto gd = grad.data();
                for (std::size_t k = 0; k < wd.size(); ++k) {
                    md[k] = opts.beta1 * md[k] + (1.0 - opts.beta1) * gd[k];
                    vd[k] = opts.beta2 * vd[k] + (1.0 - opts.beta2) * gd[k] * gd[k];
                    const double mhat = md[k] / bc1;
                    const double vhat = vd[k] / bc2;
                    wd[k] -= opts.lr * mhat / (std::sqrt(vhat) + opts.adam_eps);
                }
                if (!all_finite(wd))
                    throw DivergenceError("train: weights became non-finite in epoch " + std::to_string(epoch), epoch);
            }
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
    }
    result.model = model.with_weights(std::move(w));
    return result;
}

}  // namespace prunebound
