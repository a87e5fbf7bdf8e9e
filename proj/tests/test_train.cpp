#include "prunebound/errors.hpp"
#include "prunebound/train.hpp"

#include <gtest/gtest.h>

using namespace prunebound;

namespace {

// 100 points in R^2 labelled by the side of the line x + 2y = 0.3, kept at
// least 0.05 away from it.
Dataset separable() {
    Dataset d;
    d.samples = Matrix(100, 2);
    Rng r(RngHandle{99, 0});
    std::size_t i = 0;
    while (i < 100) {
        const double x = 2.0 * r.uniform() - 1.0;
        const double y = 2.0 * r.uniform() - 1.0;
        const double s = x + 2.0 * y - 0.3;
        if (std::abs(s) < 0.05) continue;
        d.samples(i, 0) = x;
        d.samples(i, 1) = y;
        d.labels.push_back(s > 0 ? 1 : 0);
        ++i;
    }
    return d;
}

}  // namespace

TEST(Train, SeparableToySet) {
    const Dataset d = separable();
    const ModelStack init = make_mlp(2, 16, 2, 2, RngHandle{1, 0});
    TrainOptions o;
    o.epochs = 200;
    o.batch_size = 10;
    o.lr = 0.01;
    const TrainResult r = train(init, d, o, RngHandle{1, 1});
    EXPECT_GE(accuracy(r.model, d), 0.99);
    EXPECT_EQ(r.epoch_loss.size(), 200u);
    EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

TEST(Train, ZeroEpochsIsNoOp) {
    const ModelStack init = make_mlp(2, 4, 3, 2, RngHandle{2, 0});
    TrainOptions o;
    o.epochs = 0;
    const TrainResult r = train(init, separable(), o, RngHandle{2, 1});
    EXPECT_EQ(r.model, init);
    EXPECT_TRUE(r.epoch_loss.empty());
}

TEST(Train, Deterministic) {
    const ModelStack init = make_mlp(2, 8, 3, 2, RngHandle{3, 0});
    TrainOptions o;
    o.epochs = 5;
    o.batch_size = 7;
    const auto a = train(init, separable(), o, RngHandle{3, 1});
    const auto b = train(init, separable(), o, RngHandle{3, 1});
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(a.epoch_loss, b.epoch_loss);
}

TEST(Train, DivergenceNamesEpoch) {
    const ModelStack init = make_mlp(2, 8, 3, 2, RngHandle{4, 0});
    Dataset d = separable();
    d.samples = scale(d.samples, 1e300);
    TrainOptions o;
    o.epochs = 3;
    o.lr = 1e10;
    try {
        train(init, d, o, RngHandle{4, 1});
        FAIL() << "expected DivergenceError";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.epoch(), 0u);
    }
}

TEST(Train, RejectsBadOptions) {
    const ModelStack init = make_mlp(2, 4, 2, 2, RngHandle{5, 0});
    TrainOptions o;
    o.batch_size = 0;
    EXPECT_THROW(train(init, separable(), o, RngHandle{}), ValidationError);
    o.batch_size = 4;
    o.lr = -1;
    EXPECT_THROW(train(init, separable(), o, RngHandle{}), ValidationError);
}
