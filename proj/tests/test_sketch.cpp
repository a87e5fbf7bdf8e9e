#include "lp_oracle.hpp"

#include "prunebound/errors.hpp"
#include "prunebound/sketch.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace prunebound;

namespace {

BipartiteEnsemble identity_ensemble(std::size_t p) { return BipartiteEnsemble::from_adjacency(Matrix::identity(p), 1); }

}  // namespace

TEST(SketchDim, Examples) {
    EXPECT_EQ(sketch_dim(4, 64, 64, 64, 1.0), 64u);
    EXPECT_EQ(static_cast<std::size_t>(std::ceil(16.0 * std::log(64.0))), 67u);
    EXPECT_EQ(sketch_dim(1, 4, 4, 4, 1.0), 3u);
    // below the clamp, doubling c_m doubles the value up to the ceiling
    const std::size_t a = sketch_dim(1, 1000, 1000, 1000, 0.5);
    const std::size_t b = sketch_dim(1, 1000, 1000, 1000, 1.0);
    EXPECT_EQ(a, static_cast<std::size_t>(std::ceil(0.5 * std::sqrt(1000.0) * std::log(1000.0))));
    EXPECT_EQ(b, static_cast<std::size_t>(std::ceil(std::sqrt(1000.0) * std::log(1000.0))));
    EXPECT_LE(b, 2 * a);
    EXPECT_GE(b + 1, 2 * a);
    EXPECT_THROW(sketch_dim(1, 4, 8, 4, 1.0), ValidationError);
}

TEST(Ensemble, RowsHaveExactDegree) {
    const auto e = draw_ensemble(20, 50, 7, RngHandle{1, 2});
    for (std::size_t r = 0; r < 20; ++r) {
        double s = 0;
        for (double v : e.adjacency.row(r)) {
            EXPECT_TRUE(v == 0.0 || v == 1.0);
            s += v;
        }
        EXPECT_EQ(s, 7.0);
    }
    EXPECT_EQ(e.adjacency, draw_ensemble(20, 50, 7, RngHandle{1, 2}).adjacency);
    EXPECT_NE(e.adjacency, draw_ensemble(20, 50, 7, RngHandle{1, 3}).adjacency);
}

TEST(Ensemble, SaturatedAndInvalid) {
    const auto full = draw_ensemble(3, 5, 5, RngHandle{});
    EXPECT_EQ(full.adjacency, Matrix::filled(3, 5, 1.0));
    EXPECT_THROW(draw_ensemble(3, 5, 6, RngHandle{}), ValidationError);
    EXPECT_THROW(BipartiteEnsemble::from_adjacency(Matrix{{1, 1, 1}}, 2), ValidationError);
    EXPECT_THROW(BipartiteEnsemble::from_adjacency(Matrix{{1, 0.5}}, 2), ValidationError);
}

TEST(Sketch, IdentityAndZero) {
    const Matrix X = gaussian_matrix(5, 5, 1.0, RngHandle{3, 0});
    EXPECT_EQ(sketch(X, identity_ensemble(5), identity_ensemble(5)).Y, X);
    const auto A = draw_ensemble(3, 5, 2, RngHandle{3, 1});
    EXPECT_EQ(sketch(Matrix(5, 5), A, A).Y, Matrix(3, 3));
    EXPECT_THROW(sketch(Matrix(4, 5), A, A), DimensionError);
}

TEST(Sketch, HandFixture) {
    const Matrix X{{1, 0, 2}, {0, 3, 0}, {4, 0, 5}};
    const auto A = BipartiteEnsemble::from_adjacency(Matrix{{1, 1, 0}, {0, 1, 1}}, 2);
    const auto B = BipartiteEnsemble::from_adjacency(Matrix{{1, 0, 1}, {0, 1, 0}}, 2);
    // A X = [[1,3,2],[4,3,5]]; (A X) B^T = [[3,3],[9,3]]
    EXPECT_EQ(sketch(X, A, B).Y, (Matrix{{3, 3}, {9, 3}}));
}

TEST(Recover, IdentitySketchIsExact) {
    const Matrix X = random_distributed_sparse(6, 2, RngHandle{4, 0});
    const auto r = recover_detailed(sketch(X, identity_ensemble(6), identity_ensemble(6)));
    EXPECT_EQ(r.X, X);
    EXPECT_TRUE(r.certified);
}

TEST(Recover, InfeasibleSketchReportsResidual) {
    const Matrix X = random_distributed_sparse(8, 2, RngHandle{5, 0});
    // Two identical rows in A make A X B^T rank deficient along that pair.
    Matrix adj(3, 8);
    adj(0, 0) = adj(0, 1) = 1;
    adj(1, 0) = adj(1, 1) = 1;
    adj(2, 2) = adj(2, 3) = 1;
    const auto A = BipartiteEnsemble::from_adjacency(adj, 2);
    const auto B = draw_ensemble(4, 8, 3, RngHandle{5, 1});
    SketchPair pair = sketch(X, A, B);
    pair.Y(0, 0) += 1.0;
    try {
        recover(pair);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.residual(), 0.1);
    }
}

TEST(Recover, RandomDistributedSparseShape) {
    const Matrix X = random_distributed_sparse(30, 3, RngHandle{6, 0});
    for (std::size_t i = 0; i < 30; ++i) EXPECT_NE(X(i, i), 0.0);
    std::vector<int> rows(30, 0), cols(30, 0);
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 30; ++j)
            if (X(i, j) != 0.0) {
                ++rows[i];
                ++cols[j];
            }
    for (int c : rows) EXPECT_LE(c, 3);
    for (int c : cols) EXPECT_LE(c, 3);
}

// m = 6 leaves the l1 program underdetermined, so the minimizer is often not X
// and the comparison against the LP optimum is non-trivial.
TEST(Recover, P8MatchesLpOracle) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const RngHandle h{seed, 808};
        const Matrix X = random_distributed_sparse(8, 2, h.derive(0));
        const std::size_t m = sketch_dim(2, 8, 8, 8, 0.7);
        ASSERT_EQ(m, 6u);
        const auto A = draw_ensemble(m, 8, default_degree(8), h.derive(1));
        const auto B = draw_ensemble(m, 8, default_degree(8), h.derive(2));
        const SketchPair pair = sketch(X, A, B);
        const RecoverResult r = recover_detailed(pair);
        double lp_obj = 0.0;
        const auto lp = lp_oracle::basis_pursuit(A.adjacency, B.adjacency, pair.Y, &lp_obj);
        ASSERT_TRUE(lp) << seed;
        EXPECT_NEAR(l1_norm(r.X), lp_obj, 1e-8 * std::max(1.0, lp_obj)) << "seed " << seed;
        EXPECT_LE(r.residual, 1e-8 * std::max(1.0, frobenius_norm(pair.Y)));
        EXPECT_LE(l1_norm(r.X), l1_norm(X) + 1e-8);
    }
}

TEST(Recover, P8RecoversAtDefaultSketchDim) {
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const RngHandle h{seed, 809};
        const Matrix X = random_distributed_sparse(8, 2, h.derive(0));
        const std::size_t m = sketch_dim(2, 8, 8, 8, 1.0);
        const auto A = sketch_ensemble(m, 8, default_degree(8), h.derive(1));
        const auto B = sketch_ensemble(m, 8, default_degree(8), h.derive(2));
        const RecoverResult r = recover_detailed(sketch(X, A, B));
        if (max_abs(subtract(r.X, X)) <= 1e-6) ++recovered;
    }
    EXPECT_GE(recovered, 95);
}

TEST(SketchEnsemble, IdentityWhenClamped) {
    EXPECT_EQ(sketch_ensemble(8, 8, 3, RngHandle{1, 0}).adjacency, Matrix::identity(8));
    EXPECT_EQ(sketch_ensemble(5, 8, 3, RngHandle{1, 0}).adjacency, draw_ensemble(5, 8, 3, RngHandle{1, 0}).adjacency);
}

TEST(ParameterCount, Examples) {
    const auto A = draw_ensemble(3, 8, 2, RngHandle{7, 0});
    EXPECT_EQ(parameter_count(sketch(Matrix(8, 8), A, A)), 9u);
    const auto I = identity_ensemble(8);
    EXPECT_EQ(parameter_count(sketch(Matrix(8, 8), I, I)), 64u);
    EXPECT_EQ(sketch_dim(4, 64, 64, 64, 1.0) * sketch_dim(4, 64, 64, 64, 1.0), 64u * 64u);
}
