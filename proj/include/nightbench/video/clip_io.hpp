#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nightbench/video/clip.hpp"
#include "nightbench/video/png_io.hpp"

namespace nightbench {

/// Zero-padded frame file name, e.g. 7 -> "00007.png".
std::string frame_filename(std::size_t index);

/// 8-bit quantization used by every PNG writer: round(v * 255).
std::uint8_t quantize8(float v);

Frame load_frame(const std::filesystem::path& path);
void save_frame(const std::filesystem::path& path, const Frame& frame);
void save_gray(const std::filesystem::path& path, const GrayImage& image);
PngImage to_png(const Frame& frame);
PngImage to_png(const GrayImage& image);

/// Loads every numbered PNG ("00000.png", ...) in ascending filename order.
/// With `expected_count`, exactly frames 0..expected_count-1 must be present.
Clip load_clip(const std::filesystem::path& directory, std::optional<std::size_t> expected_count = std::nullopt, double fps = 30.0);

/// Loads a single numbered frame from a frame directory.
Frame load_clip_frame(const std::filesystem::path& directory, std::size_t index);

/// Number of numbered PNG files in a frame directory.
std::size_t count_clip_frames(const std::filesystem::path& directory);

/// Writes frames as 8-bit sRGB PNGs, creating the directory if needed.
void save_clip(const Clip& clip, const std::filesystem::path& directory);

/// Depth in meters x 256, saturating to the 16-bit range, single channel.
void save_depth(const std::filesystem::path& path, const DepthMap& depth);
DepthMap load_depth(const std::filesystem::path& path);
void save_depth_sequence(const std::vector<DepthMap>& depth, const std::filesystem::path& directory);

}  // namespace nightbench
