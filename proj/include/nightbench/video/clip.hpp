#pragma once

#include <cstddef>
#include <vector>

#include "nightbench/video/image.hpp"

namespace nightbench {

/// Ordered, non-empty sequence of equally sized frames.
class Clip {
public:
    explicit Clip(std::vector<Frame> frames, double fps = 30.0);

    std::size_t size() const { return frames_.size(); }
    const Frame& operator[](std::size_t i) const { return frames_[i]; }
    const std::vector<Frame>& frames() const { return frames_; }
    auto begin() const { return frames_.begin(); }
    auto end() const { return frames_.end(); }

    Dims dims() const { return frames_.front().dims(); }
    double fps() const { return fps_; }

    friend bool operator==(const Clip& a, const Clip& b) { return a.frames_ == b.frames_; }

private:
    std::vector<Frame> frames_;
    double fps_;
};

/// Rainy/clean pair with identical length and dimensions.
struct PairedClip {
    PairedClip(Clip rainy_clip, Clip clean_clip);

    Clip rainy;
    Clip clean;
};

}  // namespace nightbench
