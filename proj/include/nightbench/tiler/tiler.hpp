#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nightbench/video/clip.hpp"

namespace nightbench {

enum class TileMode { non_overlapping, overlapping };

/// How non-overlapping grids pad each axis.
///
/// next_multiple pads to ceil(dim / patch) * patch. add_remainder pads by
/// patch - dim % patch, so an axis that is already a multiple still gains one
/// full tile; some reference implementations pad this way (the RLP row of the
/// sliding-window table, 1280 -> 1536 at patch 256).
enum class PadRule { next_multiple, add_remainder };

/// Patch layout for sliding-window inference.
///
/// Non-overlapping grids zero-pad the bottom/right edges up to a multiple of
/// the patch size. Overlapping grids slide over the unpadded frame with the
/// given stride, which must divide (dim - patch) on both axes.
struct TileGrid {
    Dims source;
    Dims patch;
    Dims stride;
    Dims padded;
    int rows = 0;
    int cols = 0;
    TileMode mode = TileMode::non_overlapping;
    PadRule pad_rule = PadRule::next_multiple;

    std::size_t patch_count() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
    /// Top-left pixel of patch `index` in row-major order.
    std::pair<int, int> origin(std::size_t index) const;

    friend bool operator==(const TileGrid&, const TileGrid&) = default;
};

/// pad_rule only applies to non-overlapping grids.
TileGrid plan_grid(Dims frame, Dims patch, TileMode mode, std::optional<Dims> stride = std::nullopt,
                   PadRule pad_rule = PadRule::next_multiple);

/// Patches in row-major order; padding (non-overlapping mode) is exactly 0.
std::vector<Frame> extract(const Frame& frame, const TileGrid& grid);

/// Places patches back and crops to the source size. Overlapping patches are
/// blended by a per-pixel mean over every covering patch.
Frame stitch(std::span<const Frame> patches, const TileGrid& grid);

/// Transforms the clip of one patch position across a temporal window. Must
/// return as many patches as it receives, each with the patch dimensions.
using PatchClipOp = std::function<std::vector<Frame>(std::span<const Frame>)>;

/// Failure inside tile_apply's op, tagged with where it happened.
class TileApplyError : public std::runtime_error {
public:
    TileApplyError(std::size_t window, std::size_t patch, const std::string& what);
    std::size_t window_index() const { return window_; }
    std::size_t patch_index() const { return patch_; }

private:
    std::size_t window_;
    std::size_t patch_;
};

/// Splits the clip into consecutive non-overlapping temporal windows (the last
/// one may be short), runs `op` on every patch position of every window, and
/// stitches the results back. Patches may be processed in parallel; the output
/// does not depend on scheduling.
Clip tile_apply(const Clip& clip, const TileGrid& grid, std::size_t window, const PatchClipOp& op, unsigned workers = 0);

/// Number of temporal windows tile_apply uses for a clip of `frames` frames.
std::size_t temporal_window_count(std::size_t frames, std::size_t window);

}  // namespace nightbench
