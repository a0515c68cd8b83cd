#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "nightbench/judge/manifest.hpp"

namespace nightbench::judge {

enum class Protocol { pairwise, multiway, temporal };
enum class ImageRole { input, candidate, diff_map };

const char* to_string(Protocol p);
const char* to_string(ImageRole r);
Protocol parse_protocol(const std::string& name);

/// Numbered frame inside a frame directory.
struct FrameRef {
    std::filesystem::path directory;
    std::size_t index = 0;
};

/// Amplified difference map between two frames of one directory.
struct DiffRef {
    std::filesystem::path directory;
    std::size_t first = 0;
    std::size_t second = 0;
    double gain = 10.0;
};

struct ImageRef {
    ImageRole role = ImageRole::input;
    std::variant<FrameRef, DiffRef> source;
    /// Anonymous letter for candidates, empty otherwise.
    std::string label;
};

struct EvaluationItem {
    Protocol protocol = Protocol::pairwise;
    std::string video_id;
    /// Judged frame; the first of the four frames for temporal items.
    std::size_t frame_index = 0;
    std::vector<ImageRef> images;
    /// Letter -> method key. Temporal items map "A" to the rated method.
    std::map<std::string, std::string> labels;
    /// Dataset of the rated method (temporal items only).
    std::string dataset;

    std::size_t image_count() const { return images.size(); }
    /// Checks the per-protocol image layout and the label bijection.
    void validate() const;
};

/// k-th of n evenly spaced frames: floor(frames * (k + 1) / (n + 1)).
/// For three frames this gives the quartile indices (22, 45, 67 at 90 frames).
std::vector<std::size_t> pairwise_frames(std::size_t frame_count, std::size_t frames_per_video);

/// Middle frame used by multi-way items.
std::size_t multiway_frame(std::size_t frame_count);

/// First of the four temporal frames: floor(n / 2) - 1 clamped to [0, n - 4].
std::size_t temporal_start(std::size_t clip_length);

/// Seeded permutation of `count` letters for item `item_index`.
std::vector<std::string> assign_letters(std::size_t count, std::uint64_t seed, std::size_t item_index);

/// One item per (video, selected frame), labels shuffled per item.
std::vector<EvaluationItem> build_pairwise(const std::vector<VideoEntry>& videos, const MethodEntry& first, const MethodEntry& second,
                                           std::uint64_t seed, std::size_t frames_per_video = 3);

/// One item per video at the middle frame with every method as a candidate.
std::vector<EvaluationItem> build_multiway(const std::vector<VideoEntry>& videos, const std::vector<MethodEntry>& methods,
                                           std::uint64_t seed);

/// One item per video: 4 input frames, 4 output frames and 3 gain-10
/// difference maps from the temporal midpoint. Videos must have at least
/// clip_length frames.
std::vector<EvaluationItem> build_temporal(const std::vector<VideoEntry>& videos, const MethodEntry& method, std::size_t clip_length);

/// build_temporal over every method, concatenated in method order.
std::vector<EvaluationItem> build_temporal(const std::vector<VideoEntry>& videos, const std::vector<MethodEntry>& methods,
                                           std::size_t clip_length);

nlohmann::json to_json(const EvaluationItem& item);

}  // namespace nightbench::judge
