#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace nightbench {

/// Decoded PNG samples, row-major, interleaved. Gray+alpha and RGBA inputs have
/// their alpha stripped; palette images are expanded to RGB.
struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;   // 1 or 3
    int bit_depth = 0;  // 8 or 16
    std::vector<std::uint16_t> samples;
};

PngImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const PngImage& image);
std::vector<unsigned char> encode_png(const PngImage& image);

}  // namespace nightbench
