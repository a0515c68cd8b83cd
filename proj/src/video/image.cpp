#include "nightbench/video/image.hpp"

#include "nightbench/video/clip.hpp"

namespace nightbench {

Frame gray_to_rgb(const GrayImage& gray) {
    std::vector<float> rgb;
    rgb.reserve(gray.pixel_count() * 3);
    for (float v : gray.samples()) {
        rgb.insert(rgb.end(), {v, v, v});
    }
    return Frame(gray.height(), gray.width(), std::move(rgb));
}

DepthMap::DepthMap(int height, int width, std::vector<float> meters) : height_(height), width_(width), meters_(std::move(meters)) {
    if (height < 1 || width < 1) throw ValidationError("depth map dimensions must be >= 1");
    if (meters_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
        throw ValidationError("depth map sample count does not match dimensions");
    }
    for (float d : meters_) {
        if (!(d > 0.0f)) throw ValidationError("depth must be > 0 everywhere");
    }
}

Clip::Clip(std::vector<Frame> frames, double fps) : frames_(std::move(frames)), fps_(fps) {
    if (frames_.empty()) throw ValidationError("clip must contain at least one frame");
    const Dims d = frames_.front().dims();
    for (std::size_t i = 1; i < frames_.size(); ++i) {
        if (frames_[i].dims() != d) {
            throw ValidationError("clip frame " + std::to_string(i) + " has dimensions " + std::to_string(frames_[i].height()) + "x" +
                                  std::to_string(frames_[i].width()) + ", expected " + std::to_string(d.height) + "x" +
                                  std::to_string(d.width));
        }
    }
    if (!(fps_ > 0.0)) throw ValidationError("clip fps must be > 0");
}

PairedClip::PairedClip(Clip rainy_clip, Clip clean_clip) : rainy(std::move(rainy_clip)), clean(std::move(clean_clip)) {
    if (rainy.size() != clean.size()) throw ValidationError("paired clips differ in length");
    if (rainy.dims() != clean.dims()) throw ValidationError("paired clips differ in dimensions");
}

}  // namespace nightbench
