#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "nightbench/flow/flow.hpp"
#include "nightbench/video/clip.hpp"

namespace nightbench::flow {

/// Spatio-temporal coordinate of a latent token.
struct TokenPosition {
    int frame = 0;
    int row = 0;
    int col = 0;

    friend bool operator==(const TokenPosition&, const TokenPosition&) = default;
};

enum class TokenRole { condition, generation };

/// Concatenated condition + generation tokens. Condition tokens come first.
struct TokenSequence {
    Matrix tokens;
    std::vector<TokenPosition> positions;
    std::vector<TokenRole> roles;

    std::size_t size() const { return roles.size(); }
    std::size_t condition_count() const;
    /// Lengths agree, dim >= 1, and all condition tokens precede generation tokens.
    void validate() const;
    /// Condition token k and generation token k carry the same position.
    bool shares_positions() const;
};

/// Builds [x_con; x_gen] where generation token k reuses the position of
/// condition token k, so both sets see identical positional embeddings.
TokenSequence concat_tokens(const Matrix& x_con, const Matrix& x_gen, std::span<const TokenPosition> positions);

/// Row-major (frame, row, col) positions for `count` tokens on a rows x cols grid.
std::vector<TokenPosition> grid_positions(int count, int rows, int cols);

/// Latent tokens of a clip: each non-overlapping block x block RGB patch is
/// flattened (row-major, interleaved channels) into one token.
struct ClipTokens {
    Matrix tokens;
    std::vector<TokenPosition> positions;
    int block = 0;
};

/// Frame dims must be divisible by block.
ClipTokens tokenize_clip(const Clip& clip, int block);

/// Condition rows may not attend to generation keys; everything else is allowed.
struct AttentionMask {
    std::size_t n_con = 0;
    std::size_t n_gen = 0;

    std::size_t size() const { return n_con + n_gen; }
    bool blocked(std::size_t query, std::size_t key) const { return query < n_con && key >= n_con && key < size(); }
    std::vector<std::pair<std::size_t, std::size_t>> blocked_pairs() const;
};

AttentionMask build_mask(std::size_t n_con, std::size_t n_gen);

/// Additive sinusoidal embedding of (frame, row, col). Dimension k encodes
/// axis k % 3; with j = k / 3 the value is sin(p * f) for even j and
/// cos(p * f) for odd j, where f = 10000^(-2 * (j / 2) / dim).
Vector positional_embedding(const TokenPosition& pos, int dim);

struct AttentionWeights {
    Matrix query;  // dim x dk
    Matrix key;    // dim x dk
    Matrix value;  // dim x dv

    static AttentionWeights random(std::uint64_t seed, int dim, int dk, int dv, double scale = 0.5);
};

/// Single-head scaled dot-product attention with positions added to the
/// tokens before projection and blocked logits removed from each row's
/// softmax. Every row sums over its allowed keys in ascending key order.
TokenSequence masked_attention(const TokenSequence& seq, const AttentionMask& mask, const AttentionWeights& weights);

/// Toy conditioned denoiser: one masked attention layer over [x_con; x_gen]
/// with a time/context shift, returning the generation rows.
class AttentionVelocity final : public VelocityModel {
public:
    AttentionVelocity(AttentionWeights weights, std::vector<TokenPosition> positions);
    Matrix evaluate(const Matrix& x_con, const Matrix& x_gen, const ContextEmbedding& context, double t) const override;

private:
    AttentionWeights weights_;
    std::vector<TokenPosition> positions_;
};

}  // namespace nightbench::flow
