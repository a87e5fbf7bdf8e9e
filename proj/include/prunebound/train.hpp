#pragma once

#include "prunebound/model.hpp"
#include "prunebound/rng.hpp"

#include <cstddef>
#include <vector>

namespace prunebound {

struct TrainOptions {
    std::size_t epochs = 20;
    std::size_t batch_size = 256;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct TrainResult {
    ModelStack model;
    std::vector<double> epoch_loss;  // mean cross-entropy over each epoch's batches
};

// Mini-batch Adam on softmax cross-entropy over the logits. Batch order for
// epoch e is a Fisher-Yates shuffle drawn from rng.derive(e). Throws
// DivergenceError naming the epoch when the loss becomes non-finite.
TrainResult train(const ModelStack& model, const Dataset& data, const TrainOptions& opts, const RngHandle& rng);

// Mean softmax cross-entropy of the model over the data set.
double cross_entropy(const ModelStack& model, const Dataset& data);

}  // namespace prunebound
