#include "nightbench/tiler/tiler.hpp"

#include <fmt/format.h>

#include "nightbench/core/error.hpp"
#include "nightbench/core/parallel.hpp"

namespace nightbench {

namespace {

constexpr int kMaxPatch = 4096;

int padded_size(int value, int multiple, PadRule rule) {
    if (rule == PadRule::add_remainder) return value + (multiple - value % multiple);
    return (value + multiple - 1) / multiple * multiple;
}

void check_source(const Frame& frame, const TileGrid& grid) {
    if (frame.dims() != grid.source) {
        throw ValidationError(fmt::format("frame is {}x{}, grid expects {}x{}", frame.height(), frame.width(), grid.source.height,
                                          grid.source.width));
    }
}

}  // namespace

std::pair<int, int> TileGrid::origin(std::size_t index) const {
    const int r = static_cast<int>(index / static_cast<std::size_t>(cols));
    const int c = static_cast<int>(index % static_cast<std::size_t>(cols));
    return {r * stride.height, c * stride.width};
}

TileGrid plan_grid(Dims frame, Dims patch, TileMode mode, std::optional<Dims> stride, PadRule pad_rule) {
    if (frame.height < 1 || frame.width < 1) throw ValidationError("frame dimensions must be >= 1");
    if (patch.height < 1 || patch.width < 1 || patch.height > kMaxPatch || patch.width > kMaxPatch) {
        throw ValidationError(fmt::format("patch size must lie in [1, {}] per axis", kMaxPatch));
    }

    TileGrid g;
    g.source = frame;
    g.patch = patch;
    g.mode = mode;
    if (mode == TileMode::non_overlapping) {
        if (stride && *stride != patch) throw ValidationError("non-overlapping grids use stride == patch");
        g.stride = patch;
        g.pad_rule = pad_rule;
        g.padded = Dims{padded_size(frame.height, patch.height, pad_rule), padded_size(frame.width, patch.width, pad_rule)};
        g.rows = g.padded.height / patch.height;
        g.cols = g.padded.width / patch.width;
        return g;
    }

    if (!stride) throw ValidationError("overlapping grids require a stride");
    if (stride->height < 1 || stride->width < 1 || stride->height > patch.height || stride->width > patch.width) {
        throw ValidationError("overlapping stride must lie in [1, patch] per axis");
    }
    if (patch.height > frame.height || patch.width > frame.width) throw ValidationError("overlapping patch exceeds frame");
    const int span_h = frame.height - patch.height;
    const int span_w = frame.width - patch.width;
    if (span_h % stride->height != 0 || span_w % stride->width != 0) {
        throw ValidationError(fmt::format("stride {}x{} does not divide (frame - patch) = {}x{}", stride->height, stride->width, span_h, span_w));
    }
    g.stride = *stride;
    g.padded = frame;
    g.rows = span_h / stride->height + 1;
    g.cols = span_w / stride->width + 1;
    return g;
}

std::vector<Frame> extract(const Frame& frame, const TileGrid& grid) {
    check_source(frame, grid);
    const int ph = grid.patch.height;
    const int pw = grid.patch.width;
    std::vector<Frame> patches;
    patches.reserve(grid.patch_count());
    for (std::size_t i = 0; i < grid.patch_count(); ++i) {
        const auto [oy, ox] = grid.origin(i);
        std::vector<float> samples(static_cast<std::size_t>(ph) * pw * 3, 0.0f);
        for (int y = 0; y < ph && oy + y < frame.height(); ++y) {
            for (int x = 0; x < pw && ox + x < frame.width(); ++x) {
                for (int c = 0; c < 3; ++c) samples[(static_cast<std::size_t>(y) * pw + x) * 3 + c] = frame.at(oy + y, ox + x, c);
            }
        }
        patches.emplace_back(ph, pw, std::move(samples));
    }
    return patches;
}

Frame stitch(std::span<const Frame> patches, const TileGrid& grid) {
    if (patches.size() != grid.patch_count()) {
        throw ValidationError(fmt::format("expected {} patches, got {}", grid.patch_count(), patches.size()));
    }
    for (const Frame& p : patches) {
        if (p.dims() != grid.patch) throw ValidationError("patch dimensions do not match grid");
    }
    const int h = grid.source.height;
    const int w = grid.source.width;
    const std::size_t n = static_cast<std::size_t>(h) * w;

    if (grid.mode == TileMode::non_overlapping) {
        std::vector<float> out(n * 3);
        for (std::size_t i = 0; i < patches.size(); ++i) {
            const auto [oy, ox] = grid.origin(i);
            for (int y = 0; y < grid.patch.height && oy + y < h; ++y) {
                for (int x = 0; x < grid.patch.width && ox + x < w; ++x) {
                    for (int c = 0; c < 3; ++c) out[(static_cast<std::size_t>(oy + y) * w + (ox + x)) * 3 + c] = patches[i].at(y, x, c);
                }
            }
        }
        return Frame(h, w, std::move(out));
    }

    // Sums of at most (patch/stride)^2 float values are exact in double, so a
    // uniform region averages back to its own value bit for bit.
    std::vector<double> sum(n * 3, 0.0);
    std::vector<int> count(n, 0);
    for (std::size_t i = 0; i < patches.size(); ++i) {
        const auto [oy, ox] = grid.origin(i);
        for (int y = 0; y < grid.patch.height; ++y) {
            for (int x = 0; x < grid.patch.width; ++x) {
                const std::size_t p = static_cast<std::size_t>(oy + y) * w + (ox + x);
                ++count[p];
                for (int c = 0; c < 3; ++c) sum[p * 3 + c] += patches[i].at(y, x, c);
            }
        }
    }
    std::vector<float> out(n * 3);
    for (std::size_t p = 0; p < n; ++p) {
        if (count[p] == 0) throw ValidationError("overlapping grid leaves a pixel uncovered");
        for (int c = 0; c < 3; ++c) out[p * 3 + c] = static_cast<float>(sum[p * 3 + c] / count[p]);
    }
    return Frame(h, w, std::move(out));
}

TileApplyError::TileApplyError(std::size_t window, std::size_t patch, const std::string& what)
    : std::runtime_error(fmt::format("window {} patch {}: {}", window, patch, what)), window_(window), patch_(patch) {}

std::size_t temporal_window_count(std::size_t frames, std::size_t window) {
    if (window == 0) throw ValidationError("temporal window must be >= 1");
    return (frames + window - 1) / window;
}

Clip tile_apply(const Clip& clip, const TileGrid& grid, std::size_t window, const PatchClipOp& op, unsigned workers) {
    const std::size_t n_windows = temporal_window_count(clip.size(), window);
    if (clip.dims() != grid.source) throw ValidationError("clip dimensions do not match grid");

    // patches[f][k]: patch k of frame f.
    std::vector<std::vector<Frame>> patches;
    patches.reserve(clip.size());
    for (const Frame& f : clip) patches.push_back(extract(f, grid));

    const std::size_t n_patches = grid.patch_count();
    std::vector<std::vector<Frame>> results(n_windows * n_patches);
    parallel_for(
        n_windows * n_patches,
        [&](std::size_t job) {
            const std::size_t w = job / n_patches;
            const std::size_t k = job % n_patches;
            const std::size_t begin = w * window;
            const std::size_t end = std::min(clip.size(), begin + window);
            std::vector<Frame> input;
            input.reserve(end - begin);
            for (std::size_t f = begin; f < end; ++f) input.push_back(patches[f][k]);
            std::vector<Frame> output;
            try {
                output = op(input);
            } catch (const std::exception& e) {
                throw TileApplyError(w, k, e.what());
            }
            if (output.size() != input.size()) throw TileApplyError(w, k, "op changed the number of frames");
            for (const Frame& p : output) {
                if (p.dims() != grid.patch) throw TileApplyError(w, k, "op changed the patch dimensions");
            }
            results[job] = std::move(output);
        },
        workers);

    std::vector<Frame> frames;
    frames.reserve(clip.size());
    std::vector<Frame> frame_patches;
    for (std::size_t f = 0; f < clip.size(); ++f) {
        const std::size_t w = f / window;
        const std::size_t offset = f - w * window;
        frame_patches.clear();
        for (std::size_t k = 0; k < n_patches; ++k) frame_patches.push_back(results[w * n_patches + k][offset]);
        frames.push_back(stitch(frame_patches, grid));
    }
    return Clip(std::move(frames), clip.fps());
}

}  // namespace nightbench
