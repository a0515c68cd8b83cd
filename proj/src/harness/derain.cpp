#include "nightbench/harness/derain.hpp"

#include <algorithm>
#include <span>
#include <vector>

#include "nightbench/core/error.hpp"
#include "nightbench/core/parallel.hpp"

namespace nightbench::harness {

Clip derain_passthrough(const Clip& clip) { return clip; }

Clip derain_temporal_median(const Clip& clip, std::size_t window, unsigned workers) {
    if (window < 3 || window % 2 == 0) throw ValidationError("temporal median window must be odd and >= 3");
    const std::size_t n = clip.size();
    const auto half = static_cast<std::ptrdiff_t>(window / 2);
    std::vector<std::vector<float>> out(n);
    parallel_for(
        n,
        [&](std::size_t t) {
            std::vector<std::span<const float>> sources;
            for (std::ptrdiff_t k = -half; k <= half; ++k) {
                const auto idx = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(t) + k, 0, static_cast<std::ptrdiff_t>(n) - 1);
                sources.push_back(clip[static_cast<std::size_t>(idx)].samples());
            }
            std::vector<float> values(window);
            std::vector<float>& dst = out[t];
            dst.resize(sources.front().size());
            for (std::size_t i = 0; i < dst.size(); ++i) {
                for (std::size_t k = 0; k < window; ++k) values[k] = sources[k][i];
                std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(window / 2), values.end());
                dst[i] = values[window / 2];
            }
        },
        workers);
    std::vector<Frame> frames;
    frames.reserve(n);
    const Dims d = clip.dims();
    for (auto& samples : out) frames.emplace_back(d.height, d.width, std::move(samples));
    return Clip(std::move(frames), clip.fps());
}

}  // namespace nightbench::harness
