#include "nightbench/video/clip_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <system_error>

#include "nightbench/core/error.hpp"

namespace fs = std::filesystem;

namespace nightbench {

namespace {

constexpr float kDepthScale = 256.0f;

bool is_frame_file(const fs::path& p) {
    if (p.extension() != ".png") return false;
    const std::string stem = p.stem().string();
    return !stem.empty() && std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

std::vector<fs::path> list_frame_files(const fs::path& directory) {
    std::error_code ec;
    if (!fs::is_directory(directory, ec)) throw IoError("not a frame directory: " + directory.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && is_frame_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

void ensure_directory(const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec || !fs::is_directory(directory)) throw IoError("cannot create directory " + directory.string());
}

}  // namespace

std::string frame_filename(std::size_t index) { return fmt::format("{:05d}.png", index); }

std::uint8_t quantize8(float v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)); }

PngImage to_png(const Frame& frame) {
    PngImage png{frame.width(), frame.height(), 3, 8, {}};
    png.samples.reserve(frame.samples().size());
    for (float v : frame.samples()) png.samples.push_back(quantize8(v));
    return png;
}

PngImage to_png(const GrayImage& image) {
    PngImage png{image.width(), image.height(), 1, 8, {}};
    png.samples.reserve(image.samples().size());
    for (float v : image.samples()) png.samples.push_back(quantize8(v));
    return png;
}

Frame load_frame(const fs::path& path) {
    const PngImage png = read_png(path);
    const float max = png.bit_depth == 16 ? 65535.0f : 255.0f;
    std::vector<float> rgb;
    rgb.reserve(static_cast<std::size_t>(png.width) * png.height * 3);
    for (std::size_t i = 0; i < png.samples.size(); ++i) {
        const float v = static_cast<float>(png.samples[i]) / max;
        if (png.channels == 1) {
            rgb.insert(rgb.end(), {v, v, v});
        } else {
            rgb.push_back(v);
        }
    }
    return Frame(png.height, png.width, std::move(rgb));
}

void save_frame(const fs::path& path, const Frame& frame) { write_png(path, to_png(frame)); }

void save_gray(const fs::path& path, const GrayImage& image) { write_png(path, to_png(image)); }

Clip load_clip(const fs::path& directory, std::optional<std::size_t> expected_count, double fps) {
    std::vector<fs::path> files;
    if (expected_count) {
        if (*expected_count == 0) throw ValidationError("expected frame count must be >= 1");
        std::error_code ec;
        if (!fs::is_directory(directory, ec)) throw IoError("not a frame directory: " + directory.string());
        for (std::size_t i = 0; i < *expected_count; ++i) {
            fs::path p = directory / frame_filename(i);
            if (!fs::is_regular_file(p, ec)) throw IoError("missing frame file " + p.string());
            files.push_back(std::move(p));
        }
    } else {
        files = list_frame_files(directory);
    }
    if (files.empty()) throw ValidationError("frame directory is empty: " + directory.string());

    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (const auto& f : files) {
        frames.push_back(load_frame(f));
        if (frames.back().dims() != frames.front().dims()) {
            throw ValidationError(fmt::format("dimension mismatch: {} is {}x{}, expected {}x{}", f.string(), frames.back().height(),
                                              frames.back().width(), frames.front().height(), frames.front().width()));
        }
    }
    return Clip(std::move(frames), fps);
}

Frame load_clip_frame(const fs::path& directory, std::size_t index) { return load_frame(directory / frame_filename(index)); }

std::size_t count_clip_frames(const fs::path& directory) { return list_frame_files(directory).size(); }

void save_clip(const Clip& clip, const fs::path& directory) {
    ensure_directory(directory);
    for (std::size_t i = 0; i < clip.size(); ++i) save_frame(directory / frame_filename(i), clip[i]);
}

void save_depth(const fs::path& path, const DepthMap& depth) {
    PngImage png{depth.width(), depth.height(), 1, 16, {}};
    png.samples.reserve(depth.meters().size());
    for (float m : depth.meters()) {
        const float scaled = std::round(m * kDepthScale);
        png.samples.push_back(static_cast<std::uint16_t>(std::clamp(scaled, 1.0f, 65535.0f)));
    }
    write_png(path, png);
}

DepthMap load_depth(const fs::path& path) {
    const PngImage png = read_png(path);
    if (png.channels != 1 || png.bit_depth != 16) throw IoError("depth map must be 16-bit single channel: " + path.string());
    std::vector<float> meters;
    meters.reserve(png.samples.size());
    for (std::uint16_t v : png.samples) meters.push_back(static_cast<float>(v) / kDepthScale);
    return DepthMap(png.height, png.width, std::move(meters));
}

void save_depth_sequence(const std::vector<DepthMap>& depth, const fs::path& directory) {
    ensure_directory(directory);
    for (std::size_t i = 0; i < depth.size(); ++i) save_depth(directory / frame_filename(i), depth[i]);
}

}  // namespace nightbench
