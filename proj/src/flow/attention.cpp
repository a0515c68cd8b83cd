#include "nightbench/flow/attention.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nightbench/core/error.hpp"
#include "nightbench/core/rng.hpp"

namespace nightbench::flow {

std::size_t TokenSequence::condition_count() const {
    std::size_t n = 0;
    while (n < roles.size() && roles[n] == TokenRole::condition) ++n;
    return n;
}

void TokenSequence::validate() const {
    if (tokens.cols() < 1) throw ValidationError("token dimension must be >= 1");
    if (static_cast<std::size_t>(tokens.rows()) != roles.size() || positions.size() != roles.size()) {
        throw ValidationError(fmt::format("token sequence lengths disagree: {} tokens, {} positions, {} roles", tokens.rows(),
                                          positions.size(), roles.size()));
    }
    for (std::size_t i = condition_count(); i < roles.size(); ++i) {
        if (roles[i] != TokenRole::generation) throw ValidationError("condition tokens must precede generation tokens");
    }
}

bool TokenSequence::shares_positions() const {
    const std::size_t n_con = condition_count();
    const std::size_t n_gen = size() - n_con;
    for (std::size_t k = 0; k < std::min(n_con, n_gen); ++k) {
        if (!(positions[k] == positions[n_con + k])) return false;
    }
    return true;
}

TokenSequence concat_tokens(const Matrix& x_con, const Matrix& x_gen, std::span<const TokenPosition> positions) {
    if (x_con.rows() > 0 && x_gen.rows() > 0 && x_con.cols() != x_gen.cols()) {
        throw ValidationError("condition and generation tokens differ in dimension");
    }
    const auto n_con = static_cast<std::size_t>(x_con.rows());
    const auto n_gen = static_cast<std::size_t>(x_gen.rows());
    if (positions.size() < std::max(n_con, n_gen)) throw ValidationError("not enough token positions for the sequence");

    TokenSequence seq;
    seq.tokens.resize(x_con.rows() + x_gen.rows(), x_con.rows() > 0 ? x_con.cols() : x_gen.cols());
    if (n_con > 0) seq.tokens.topRows(x_con.rows()) = x_con;
    if (n_gen > 0) seq.tokens.bottomRows(x_gen.rows()) = x_gen;
    for (std::size_t k = 0; k < n_con; ++k) {
        seq.positions.push_back(positions[k]);
        seq.roles.push_back(TokenRole::condition);
    }
    for (std::size_t k = 0; k < n_gen; ++k) {
        seq.positions.push_back(positions[k]);
        seq.roles.push_back(TokenRole::generation);
    }
    seq.validate();
    return seq;
}

std::vector<TokenPosition> grid_positions(int count, int rows, int cols) {
    if (count < 0 || rows < 1 || cols < 1) throw ValidationError("grid_positions needs count >= 0 and a non-empty grid");
    std::vector<TokenPosition> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back({i / (rows * cols), (i / cols) % rows, i % cols});
    }
    return out;
}

ClipTokens tokenize_clip(const Clip& clip, int block) {
    const Dims dims = clip.dims();
    if (block < 1 || dims.height % block != 0 || dims.width % block != 0) {
        throw ValidationError(fmt::format("frame {}x{} is not divisible into {}-pixel blocks", dims.width, dims.height, block));
    }
    const int rows = dims.height / block;
    const int cols = dims.width / block;
    const int dim = block * block * 3;
    ClipTokens out;
    out.block = block;
    out.tokens.resize(static_cast<Eigen::Index>(clip.size()) * rows * cols, dim);
    Eigen::Index token = 0;
    for (std::size_t f = 0; f < clip.size(); ++f) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c, ++token) {
                int k = 0;
                for (int y = 0; y < block; ++y) {
                    for (int x = 0; x < block; ++x) {
                        for (int ch = 0; ch < 3; ++ch) out.tokens(token, k++) = clip[f].at(r * block + y, c * block + x, ch);
                    }
                }
                out.positions.push_back({static_cast<int>(f), r, c});
            }
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> AttentionMask::blocked_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n_con; ++i) {
        for (std::size_t j = n_con; j < size(); ++j) out.emplace_back(i, j);
    }
    return out;
}

AttentionMask build_mask(std::size_t n_con, std::size_t n_gen) { return {n_con, n_gen}; }

Vector positional_embedding(const TokenPosition& pos, int dim) {
    if (dim < 1) throw ValidationError("embedding dimension must be >= 1");
    const int coords[3] = {pos.frame, pos.row, pos.col};
    Vector pe(dim);
    for (int k = 0; k < dim; ++k) {
        const int j = k / 3;
        const double freq = std::pow(10000.0, -2.0 * (j / 2) / dim);
        const double arg = coords[k % 3] * freq;
        pe(k) = (j % 2 == 0) ? std::sin(arg) : std::cos(arg);
    }
    return pe;
}

AttentionWeights AttentionWeights::random(std::uint64_t seed, int dim, int dk, int dv, double scale) {
    if (dim < 1 || dk < 1 || dv < 1) throw ValidationError("attention dimensions must be >= 1");
    CounterRng rng(seed, Stream::flow, 0, 2);
    auto draw = [&](int rows, int cols) {
        Matrix m(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) m(r, c) = scale * rng.normal();
        }
        return m;
    };
    AttentionWeights w;
    w.query = draw(dim, dk);
    w.key = draw(dim, dk);
    w.value = draw(dim, dv);
    return w;
}

namespace {

// Row-by-row projection with a fixed summation order, so each output row
// depends on its own input row only.
Matrix project(const Matrix& x, const Matrix& w) {
    Matrix out(x.rows(), w.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < x.cols(); ++k) acc += x(i, k) * w(k, c);
            out(i, c) = acc;
        }
    }
    return out;
}

}  // namespace

TokenSequence masked_attention(const TokenSequence& seq, const AttentionMask& mask, const AttentionWeights& weights) {
    seq.validate();
    const auto n = static_cast<Eigen::Index>(seq.size());
    const Eigen::Index dim = seq.tokens.cols();
    if (mask.size() != seq.size() || mask.n_con != seq.condition_count()) {
        throw ValidationError(fmt::format("mask ({} condition, {} generation) does not match sequence ({} condition, {} tokens)", mask.n_con,
                                          mask.n_gen, seq.condition_count(), seq.size()));
    }
    if (weights.query.rows() != dim || weights.key.rows() != dim || weights.value.rows() != dim) {
        throw ValidationError(fmt::format("projection input dimension must equal token dimension {}", dim));
    }
    if (weights.query.cols() != weights.key.cols() || weights.query.cols() < 1 || weights.value.cols() < 1) {
        throw ValidationError("query and key projections must share a non-zero output dimension");
    }

    Matrix x = seq.tokens;
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) += positional_embedding(seq.positions[static_cast<std::size_t>(i)], static_cast<int>(dim)).transpose();
    const Matrix q = project(x, weights.query);
    const Matrix k = project(x, weights.key);
    const Matrix v = project(x, weights.value);
    const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(weights.query.cols()));

    Matrix out = Matrix::Zero(n, weights.value.cols());
    std::vector<double> logits(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double peak = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (mask.blocked(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) continue;
            double s = 0.0;
            for (Eigen::Index c = 0; c < q.cols(); ++c) s += q(i, c) * k(j, c);
            logits[static_cast<std::size_t>(j)] = s * inv_sqrt_dk;
            peak = std::max(peak, logits[static_cast<std::size_t>(j)]);
        }
        double total = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (mask.blocked(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) continue;
            const double w = std::exp(logits[static_cast<std::size_t>(j)] - peak);
            total += w;
            for (Eigen::Index c = 0; c < v.cols(); ++c) out(i, c) += w * v(j, c);
        }
        out.row(i) /= total;
    }
    return {std::move(out), seq.positions, seq.roles};
}

AttentionVelocity::AttentionVelocity(AttentionWeights weights, std::vector<TokenPosition> positions)
    : weights_(std::move(weights)), positions_(std::move(positions)) {
    if (weights_.value.cols() != weights_.value.rows()) throw ValidationError("attention velocity needs a square value projection");
}

Matrix AttentionVelocity::evaluate(const Matrix& x_con, const Matrix& x_gen, const ContextEmbedding& context, double t) const {
    if (context.vector.size() != x_gen.cols()) throw ValidationError("context dimension must equal token dimension");
    Matrix shifted = x_gen;
    shifted.rowwise() += t * context.vector.transpose();
    const TokenSequence seq = concat_tokens(x_con, shifted, positions_);
    const TokenSequence out = masked_attention(seq, build_mask(static_cast<std::size_t>(x_con.rows()), static_cast<std::size_t>(x_gen.rows())), weights_);
    return out.tokens.bottomRows(x_gen.rows());
}

}  // namespace nightbench::flow
