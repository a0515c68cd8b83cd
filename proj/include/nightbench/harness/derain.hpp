#pragma once

#include <cstddef>
#include <string>

#include "nightbench/video/clip.hpp"

namespace nightbench::harness {

/// Null baseline: returns the input unchanged.
Clip derain_passthrough(const Clip& clip);

/// Per-pixel median over a centered temporal window (edge-clamped). The
/// window must be odd and >= 3.
Clip derain_temporal_median(const Clip& clip, std::size_t window = 5, unsigned workers = 0);

}  // namespace nightbench::harness
