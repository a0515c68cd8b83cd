#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nightbench/core/error.hpp"

namespace nightbench {

struct Dims {
    int height = 0;
    int width = 0;

    friend bool operator==(const Dims&, const Dims&) = default;
};

/// Immutable row-major image with interleaved channels, values in [0, 1].
///
/// The value range is enforced on every construction path. Out-of-range input
/// is rejected by the regular constructor; `clamped` is the one named clamp
/// point for producers whose arithmetic may overshoot (compositing, resampling).
template <int Channels>
class Image {
public:
    static constexpr int channels = Channels;

    /// All-zero image.
    Image(int height, int width) : Image(height, width, std::vector<float>(sample_count(height, width), 0.0f)) {}

    Image(int height, int width, std::vector<float> samples) : height_(height), width_(width), samples_(std::move(samples)) {
        check_shape();
        for (float v : samples_) {
            // The negated comparison also rejects NaN.
            if (!(v >= 0.0f && v <= 1.0f)) throw ValidationError("image value outside [0,1]");
        }
    }

    static Image clamped(int height, int width, std::vector<float> samples) {
        for (float& v : samples) {
            v = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
        }
        return Image(height, width, std::move(samples));
    }

    static Image filled(int height, int width, float value) {
        return Image(height, width, std::vector<float>(sample_count(height, width), value));
    }

    int height() const { return height_; }
    int width() const { return width_; }
    Dims dims() const { return {height_, width_}; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_); }

    float at(int y, int x, int c = 0) const { return samples_[index(y, x, c)]; }
    std::size_t index(int y, int x, int c = 0) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * Channels + c;
    }

    std::span<const float> samples() const { return samples_; }
    /// Copy of the sample buffer, for building a modified image.
    std::vector<float> to_vector() const { return samples_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    static std::size_t sample_count(int height, int width) {
        if (height < 1 || width < 1) throw ValidationError("image dimensions must be >= 1");
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * Channels;
    }

    void check_shape() const {
        if (samples_.size() != sample_count(height_, width_)) throw ValidationError("image sample count does not match dimensions");
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<float> samples_;
};

/// sRGB-coded RGB frame. No gamma linearization is applied anywhere.
using Frame = Image<3>;
/// Single-channel image (difference maps, masks).
using GrayImage = Image<1>;

/// Replicates a gray image into three identical channels.
Frame gray_to_rgb(const GrayImage& gray);

/// Per-frame depth in meters along the camera axis; strictly positive.
class DepthMap {
public:
    DepthMap(int height, int width, std::vector<float> meters);

    int height() const { return height_; }
    int width() const { return width_; }
    Dims dims() const { return {height_, width_}; }
    float at(int y, int x) const { return meters_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)]; }
    std::span<const float> meters() const { return meters_; }

    friend bool operator==(const DepthMap&, const DepthMap&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<float> meters_;
};

}  // namespace nightbench
