#pragma once

#include "nightbench/video/image.hpp"

namespace nightbench {

/// Bicubic resize with the Catmull-Rom kernel (a = -0.5), pixel-center
/// aligned, edge-clamped. The result is clamped to [0, 1] since the kernel
/// overshoots at edges. Downscaling does not prefilter.
Frame resize_bicubic(const Frame& frame, int height, int width);

}  // namespace nightbench
