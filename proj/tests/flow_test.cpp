#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "nightbench/core/error.hpp"
#include "nightbench/core/rng.hpp"
#include "nightbench/flow/attention.hpp"
#include "nightbench/flow/flow.hpp"

using namespace nightbench;
using namespace nightbench::flow;

namespace {

Matrix gaussian(std::uint64_t seed, int rows, int cols, std::uint64_t entity = 0) {
    CounterRng rng(seed, Stream::test, entity);
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
    return m;
}

const ContextEmbedding kContext = ContextEmbedding::no_rain(4);

// Softmax attention written out directly from its definition.
Matrix reference_attention(const TokenSequence& seq, const AttentionMask& mask, const AttentionWeights& w) {
    const Eigen::Index n = seq.tokens.rows();
    Matrix x = seq.tokens;
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) += positional_embedding(seq.positions[i], static_cast<int>(x.cols())).transpose();
    const Matrix q = x * w.query;
    const Matrix k = x * w.key;
    const Matrix v = x * w.value;
    Matrix out = Matrix::Zero(n, v.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> logits(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            logits[j] = mask.blocked(i, j) ? -std::numeric_limits<double>::infinity() : q.row(i).dot(k.row(j)) / std::sqrt(double(q.cols()));
        }
        double denom = 0.0;
        for (double l : logits) denom += std::exp(l);
        for (Eigen::Index j = 0; j < n; ++j) out.row(i) += std::exp(logits[j]) / denom * v.row(j);
    }
    return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Interpolate, EndpointsAndMidpoint) {
    const Matrix x0 = gaussian(1, 3, 4);
    const Matrix x1 = gaussian(2, 3, 4);
    EXPECT_EQ(interpolate(x0, x1, 0.0), x0);
    EXPECT_EQ(interpolate(x0, x1, 1.0), x1);
    const Matrix v = gaussian(3, 3, 4);
    EXPECT_LE(max_abs(interpolate(Matrix::Zero(3, 4), 2.0 * v, 0.5) - v), 1e-15);
    EXPECT_THROW(interpolate(x0, gaussian(2, 3, 5), 0.5), ValidationError);
    EXPECT_THROW(interpolate(x0, x1, 1.5), ValidationError);
}

TEST(Interpolate, LinearityOnRandomTensors) {
    CounterRng rng(4, Stream::test);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix x0 = gaussian(5, 6, 3, trial);
        const Matrix x1 = gaussian(6, 6, 3, trial);
        const double t = rng.uniform();
        const FlowState s = FlowState::at(x0, x1, t);
        EXPECT_LE(max_abs(s.x_t - (t * x1 + (1 - t) * x0)), 1e-12);
        // x_t - x0 = t (x1 - x0)
        EXPECT_LE(max_abs((s.x_t - x0) - t * (x1 - x0)), 1e-12);
    }
}

TEST(VelocityTarget, ClosedFormsAndFiniteDifference) {
    const Matrix x1 = gaussian(7, 4, 4);
    EXPECT_EQ(velocity_target(Matrix::Zero(4, 4), x1), x1);
    EXPECT_EQ(velocity_target(x1, x1), Matrix::Zero(4, 4));
    const Matrix x0 = gaussian(8, 4, 4);
    const double h = 1e-6;
    for (double t : {0.0, 0.3, 0.7, 1.0 - h}) {
        const Matrix fd = (interpolate(x0, x1, t + h) - interpolate(x0, x1, t)) / h;
        EXPECT_LE((fd - velocity_target(x0, x1)).norm(), h * (x1 - x0).norm()) << t;
    }
    EXPECT_THROW(velocity_target(x0, gaussian(8, 4, 3)), ValidationError);
}

TEST(FmLoss, OracleIsZeroAndUnitOffsetIsOne) {
    const Matrix xc = gaussian(9, 5, 4);
    const Matrix x0 = gaussian(10, 5, 4);
    const Matrix x1 = gaussian(11, 5, 4);
    const OracleVelocity oracle(x0, x1);
    for (double t : {0.0, 0.25, 1.0}) EXPECT_EQ(fm_loss(oracle, xc, x0, x1, kContext, t), 0.0);
    const FunctionVelocity offset([&](const Matrix&, const Matrix& x, const ContextEmbedding&, double) {
        return Matrix(velocity_target(x0, x1) + Matrix::Constant(x.rows(), x.cols(), 1.0));
    });
    EXPECT_NEAR(fm_loss(offset, xc, x0, x1, kContext, 0.4), 1.0, 1e-12);
    const FunctionVelocity wrong_shape([](const Matrix&, const Matrix& x, const ContextEmbedding&, double) {
        return Matrix(Matrix::Zero(x.rows() + 1, x.cols()));
    });
    EXPECT_THROW(fm_loss(wrong_shape, xc, x0, x1, kContext, 0.4), ValidationError);
}

TEST(FmLoss, LinearModelMatchesBruteForce) {
    const auto batch = random_batch(12, 8, 5, 4);
    const LinearVelocity model = LinearVelocity::random(13, 4, 0.5);
    double total = 0.0;
    int count = 0;
    for (const auto& s : batch) {
        for (int r = 0; r < 5; ++r) {
            for (int i = 0; i < 4; ++i) {
                double v = model.b()(i);
                for (int j = 0; j < 4; ++j) v += model.a()(i, j) * (s.t * s.x1(r, j) + (1 - s.t) * s.x0(r, j));
                const double e = v - (s.x1(r, i) - s.x0(r, i));
                total += e * e;
                ++count;
            }
        }
    }
    EXPECT_NEAR(fm_loss(model, batch, kContext), total / count, 1e-10);
    EXPECT_NEAR(model.loss_and_gradient(batch).loss, total / count, 1e-10);
}

TEST(FmLoss, NonNegativeAndZeroOnlyAtTarget) {
    for (int trial = 0; trial < 20; ++trial) {
        const auto batch = random_batch(14 + trial, 3, 4, 4);
        EXPECT_GE(fm_loss(LinearVelocity::random(trial, 4), batch, kContext), 0.0);
        EXPECT_GT(fm_loss(ZeroVelocity{}, batch, kContext), 0.0);
    }
}

TEST(Euler, OracleIsExactForAnyStepCount) {
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix x0 = gaussian(15, 6, 4, trial);
        const Matrix x1 = gaussian(16, 6, 4, trial);
        const OracleVelocity oracle(x0, x1);
        for (int n : {1, 4, 50}) {
            const Matrix out = euler_integrate(oracle, Matrix(), x0, kContext, n);
            EXPECT_LE((out - x1).norm() / x1.norm(), 1e-6) << n;
        }
    }
}

TEST(Euler, ZeroModelAndExponentialDecay) {
    const Matrix x0 = gaussian(17, 3, 4);
    EXPECT_EQ(euler_integrate(ZeroVelocity{}, Matrix(), x0, kContext, 10), x0);
    const FunctionVelocity decay([](const Matrix&, const Matrix& x, const ContextEmbedding&, double) { return Matrix(-x); });
    const Matrix one = Matrix::Constant(1, 1, 1.0);
    EXPECT_NEAR(euler_integrate(decay, Matrix(), one, kContext, 1000)(0, 0), std::exp(-1.0), 1e-3);
    EXPECT_THROW(euler_integrate(decay, Matrix(), one, kContext, 0), ValidationError);
}

TEST(Mask, BlockedPairsByDefinition) {
    EXPECT_EQ(build_mask(1, 1).blocked_pairs(), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
    EXPECT_TRUE(build_mask(0, 5).blocked_pairs().empty());
    const AttentionMask m = build_mask(2, 3);
    std::size_t count = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            const bool expected = i < 2 && j >= 2;
            EXPECT_EQ(m.blocked(i, j), expected);
            count += expected;
        }
    }
    EXPECT_EQ(count, 6u);
    EXPECT_EQ(m.blocked_pairs().size(), 6u);
}

TEST(Tokens, ConcatSharesPositions) {
    const auto pos = grid_positions(4, 2, 2);
    const TokenSequence seq = concat_tokens(gaussian(18, 4, 3), gaussian(19, 4, 3), pos);
    EXPECT_EQ(seq.size(), 8u);
    EXPECT_EQ(seq.condition_count(), 4u);
    EXPECT_TRUE(seq.shares_positions());
    EXPECT_EQ(seq.positions[5], seq.positions[1]);
    EXPECT_THROW(concat_tokens(gaussian(18, 4, 3), gaussian(19, 4, 2), pos), ValidationError);
    EXPECT_THROW(concat_tokens(gaussian(18, 5, 3), gaussian(19, 4, 3), pos), ValidationError);
}

TEST(Tokens, ClipBlocksBecomeTokens) {
    std::vector<float> v(8 * 8 * 3);
    std::iota(v.begin(), v.end(), 0.0f);
    for (float& x : v) x /= static_cast<float>(v.size());
    const Clip clip({Frame(8, 8, v), Frame(8, 8, v)});
    const ClipTokens t = tokenize_clip(clip, 4);
    EXPECT_EQ(t.tokens.rows(), 8);
    EXPECT_EQ(t.tokens.cols(), 48);
    EXPECT_EQ(t.positions[5], (TokenPosition{1, 0, 1}));
    EXPECT_DOUBLE_EQ(t.tokens(1, 0), clip[0].at(0, 4, 0));
    EXPECT_THROW(tokenize_clip(clip, 3), ValidationError);
}

TEST(Attention, HandSizedCaseMatchesBruteForce) {
    TokenSequence seq = concat_tokens(Matrix{{0.3, -0.2}}, Matrix{{1.0, 0.5}}, grid_positions(1, 1, 1));
    AttentionWeights w{Matrix{{0.5, 0.1}, {-0.3, 0.8}}, Matrix{{0.2, -0.4}, {0.7, 0.3}}, Matrix{{1.0, 0.0}, {0.5, -1.0}}};
    const AttentionMask mask = build_mask(1, 1);
    const TokenSequence out = masked_attention(seq, mask, w);
    EXPECT_LE(max_abs(out.tokens - reference_attention(seq, mask, w)), 1e-10);
    // The single condition token can only see itself, so its output is its own value row.
    const Eigen::RowVectorXd x0 = seq.tokens.row(0) + positional_embedding(seq.positions[0], 2).transpose();
    EXPECT_LE(max_abs(out.tokens.row(0) - x0 * w.value), 1e-12);
}

TEST(Attention, RandomCasesMatchBruteForce) {
    CounterRng rng(20, Stream::test);
    for (int trial = 0; trial < 20; ++trial) {
        const int n_con = 1 + static_cast<int>(rng.below(6));
        const int n_gen = 1 + static_cast<int>(rng.below(6));
        const auto pos = grid_positions(std::max(n_con, n_gen), 2, 3);
        const TokenSequence seq = concat_tokens(gaussian(21, n_con, 6, trial), gaussian(22, n_gen, 6, trial), pos);
        const AttentionWeights w = AttentionWeights::random(trial, 6, 3, 5);
        const AttentionMask mask = build_mask(n_con, n_gen);
        EXPECT_LE(max_abs(masked_attention(seq, mask, w).tokens - reference_attention(seq, mask, w)), 1e-10);
    }
}

TEST(Attention, ConditionRowsIgnoreGenerationTokens) {
    CounterRng rng(23, Stream::test);
    for (int trial = 0; trial < 50; ++trial) {
        const int n_con = 1 + static_cast<int>(rng.below(8));
        const int n_gen = 1 + static_cast<int>(rng.below(8));
        const int dim = 2 + static_cast<int>(rng.below(6));
        const auto pos = grid_positions(std::max(n_con, n_gen), 3, 3);
        const Matrix con = gaussian(24, n_con, dim, trial);
        const AttentionWeights w = AttentionWeights::random(100 + trial, dim, 4, dim);
        const AttentionMask mask = build_mask(n_con, n_gen);
        const TokenSequence a = masked_attention(concat_tokens(con, gaussian(25, n_gen, dim, trial), pos), mask, w);
        const TokenSequence b = masked_attention(concat_tokens(con, 50.0 * gaussian(26, n_gen, dim, trial), pos), mask, w);
        EXPECT_EQ(a.tokens.topRows(n_con), b.tokens.topRows(n_con));
        EXPECT_NE(a.tokens.bottomRows(n_gen), b.tokens.bottomRows(n_gen));
    }
}

TEST(Attention, PermutingGenerationTokensPermutesOutputs) {
    const int n = 5;
    const int dim = 6;
    const auto pos = grid_positions(n, 2, 3);
    const Matrix con = gaussian(27, n, dim);
    const Matrix gen = gaussian(28, n, dim);
    const AttentionWeights w = AttentionWeights::random(29, dim, 4, dim);
    const TokenSequence base = concat_tokens(con, gen, pos);
    const TokenSequence out = masked_attention(base, build_mask(n, n), w);

    const std::vector<int> perm{3, 0, 4, 1, 2};
    TokenSequence shuffled = base;
    for (int k = 0; k < n; ++k) {
        shuffled.tokens.row(n + k) = base.tokens.row(n + perm[k]);
        shuffled.positions[n + k] = base.positions[n + perm[k]];
    }
    const TokenSequence out2 = masked_attention(shuffled, build_mask(n, n), w);
    EXPECT_LE(max_abs(out2.tokens.topRows(n) - out.tokens.topRows(n)), 0.0);
    for (int k = 0; k < n; ++k) EXPECT_LE(max_abs(out2.tokens.row(n + k) - out.tokens.row(n + perm[k])), 1e-12);
}

TEST(Attention, ValidatesDimensions) {
    const TokenSequence seq = concat_tokens(gaussian(30, 2, 4), gaussian(31, 2, 4), grid_positions(2, 1, 2));
    EXPECT_THROW(masked_attention(seq, build_mask(1, 3), AttentionWeights::random(1, 4, 2, 4)), ValidationError);
    EXPECT_THROW(masked_attention(seq, build_mask(2, 2), AttentionWeights::random(1, 3, 2, 4)), ValidationError);
    AttentionWeights bad = AttentionWeights::random(1, 4, 2, 4);
    bad.key = gaussian(32, 4, 3);
    EXPECT_THROW(masked_attention(seq, build_mask(2, 2), bad), ValidationError);
}

TEST(Attention, VelocityModelKeepsGenerationShape) {
    const auto pos = grid_positions(3, 1, 3);
    const AttentionVelocity model(AttentionWeights::random(33, 4, 4, 4), pos);
    const Matrix v = model.evaluate(gaussian(34, 3, 4), gaussian(35, 3, 4), kContext, 0.5);
    EXPECT_EQ(v.rows(), 3);
    EXPECT_EQ(v.cols(), 4);
    const auto batch = random_batch(36, 2, 3, 4);
    EXPECT_GE(fm_loss(model, batch, kContext), 0.0);
}

TEST(GradCheck, RandomBatchAgreesWithFiniteDifferences) {
    const auto batch = random_batch(37, 16, 6, 4);
    EXPECT_LT(grad_check(LinearVelocity::random(38, 4, 0.5), batch), 1e-4);
}

TEST(GradCheck, ZeroBatchHasZeroGradient) {
    std::vector<FlowSample> batch(4, FlowSample{Matrix::Zero(3, 4), Matrix::Zero(3, 4), Matrix::Zero(3, 4), 0.5});
    const LinearVelocity model(Matrix::Random(4, 4), Eigen::VectorXd::Zero(4));
    const auto g = model.loss_and_gradient(batch);
    EXPECT_EQ(g.loss, 0.0);
    EXPECT_EQ(g.flat().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(grad_check(model, batch), 0.0);
}

TEST(GradCheck, DescentIsMonotone) {
    const auto batch = random_batch(39, 16, 6, 4);
    LinearVelocity model = LinearVelocity::random(40, 4, 0.5);
    const auto history = train_linear(model, batch, 0.05, 100);
    ASSERT_EQ(history.size(), 101u);
    for (std::size_t i = 1; i < history.size(); ++i) EXPECT_LE(history[i], history[i - 1] + 1e-12);
    EXPECT_LT(history.back(), history.front());
}

TEST(Context, PromptEmbeddingIsFixedUnitVector) {
    const ContextEmbedding a = ContextEmbedding::no_rain(8);
    const ContextEmbedding b = ContextEmbedding::no_rain(8);
    EXPECT_EQ(a.vector, b.vector);
    EXPECT_NEAR(a.vector.norm(), 1.0, 1e-12);
    EXPECT_NE(ContextEmbedding::from_prompt("rain", 8).vector, a.vector);
}
