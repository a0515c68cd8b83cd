#include "nightbench/video/split.hpp"

#include <fmt/format.h>

#include "nightbench/core/error.hpp"

namespace nightbench {

DatasetSplit make_split(std::size_t total, std::size_t test_len, std::size_t clip_len) {
    if (clip_len == 0) throw ValidationError("clip length must be >= 1");
    if (test_len == 0) throw ValidationError("test length must be >= 1");
    if (test_len > total) throw ValidationError(fmt::format("test length {} exceeds total {}", test_len, total));
    if (test_len % clip_len != 0) {
        throw ValidationError(fmt::format("test length {} is not divisible by clip length {}", test_len, clip_len));
    }

    DatasetSplit split;
    split.spec = SplitSpec{total, FrameRange{0, test_len}, clip_len};
    split.train = FrameRange{test_len, total};
    for (std::size_t b = 0; b < test_len; b += clip_len) split.test_clips.push_back(FrameRange{b, b + clip_len});
    return split;
}

void to_json(nlohmann::json& j, const SplitSpec& s) {
    j = nlohmann::json{{"total_frames", s.total_frames},
                       {"test_range", {s.test_range.begin, s.test_range.end}},
                       {"clip_length", s.clip_length}};
}

void from_json(const nlohmann::json& j, SplitSpec& s) {
    const auto range = j.at("test_range");
    if (!range.is_array() || range.size() != 2) throw ValidationError("split test_range must be [begin, end]");
    s.total_frames = j.at("total_frames").get<std::size_t>();
    s.test_range = FrameRange{range[0].get<std::size_t>(), range[1].get<std::size_t>()};
    s.clip_length = j.at("clip_length").get<std::size_t>();
    if (s.test_range.begin > s.test_range.end || s.test_range.end > s.total_frames) {
        throw ValidationError("split test_range must lie within [0, total_frames)");
    }
    if (s.clip_length == 0 || s.test_range.size() % s.clip_length != 0) {
        throw ValidationError("split test_range length must be divisible by clip_length");
    }
}

}  // namespace nightbench
