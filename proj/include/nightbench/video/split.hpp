#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace nightbench {

/// Half-open frame index interval [begin, end).
struct FrameRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

struct SplitSpec {
    std::size_t total_frames = 0;
    FrameRange test_range;
    std::size_t clip_length = 0;

    friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

struct DatasetSplit {
    SplitSpec spec;
    FrameRange train;
    std::vector<FrameRange> test_clips;
};

/// Test set is the leading [0, test_len) frames, cut into consecutive clips of
/// clip_len; everything after it is training data.
DatasetSplit make_split(std::size_t total, std::size_t test_len, std::size_t clip_len);

void to_json(nlohmann::json& j, const SplitSpec& s);
void from_json(const nlohmann::json& j, SplitSpec& s);

}  // namespace nightbench
