#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "nightbench/synth/rain.hpp"
#include "nightbench/synth/scene.hpp"

namespace nightbench::testing {

inline constexpr int kSize = 64;

// Flat gray backdrop at a fixed depth seen by a camera at the origin looking
// down +z, with one spot light.
inline SceneBundle crafted_scene(double backdrop_depth, LightSource light, std::size_t frames = 1, float gray = 0.1f) {
    std::vector<Frame> clean(frames, Frame::filled(kSize, kSize, gray));
    std::vector<DepthMap> depth(frames, DepthMap(kSize, kSize, std::vector<float>(kSize * kSize, static_cast<float>(backdrop_depth))));
    std::vector<CameraPose> poses(frames, CameraPose{});
    SceneBundle s{Clip(std::move(clean)), std::move(depth), {light}, std::move(poses), Intrinsics{64.0, 32.0, 32.0}};
    s.validate();
    return s;
}

// Overhead lamp shining straight down onto the point (0, 0, 8).
inline LightSource overhead_lamp(Vec3 color = {1.0, 1.0, 1.0}, double intensity = 4.0) {
    LightSource l;
    l.position = {0.0, 3.0, 8.0};
    l.color = color;
    l.intensity = intensity;
    l.cone_axis = {0.0, -1.0, 0.0};
    l.cone_half_angle = 0.8;
    l.beam_core_half_angle = 0.25;
    return l;
}

inline RainField single_particle(Vec3 at) {
    RainField f;
    f.volume = RainVolume{{-100.0, -100.0, -100.0}, {100.0, 100.0, 100.0}};
    f.particles.push_back(RainParticle{at, kTerminalVelocity, {}});
    return f;
}

inline RainParams calm_rain() {
    RainParams r;
    r.wind_speed = 0.0;
    r.gust_amount = 0.0;
    r.curtain_density = 0.0;
    return r;
}

inline double max_abs_change(const PairedClip& p) {
    double m = 0.0;
    for (std::size_t f = 0; f < p.rainy.size(); ++f) {
        const auto a = p.rainy[f].samples();
        const auto b = p.clean[f].samples();
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, static_cast<double>(std::abs(a[i] - b[i])));
    }
    return m;
}

inline double peak_added_luma(const PairedClip& p) {
    double m = 0.0;
    const Frame& r = p.rainy[0];
    const Frame& c = p.clean[0];
    for (int y = 0; y < r.height(); ++y) {
        for (int x = 0; x < r.width(); ++x) {
            double luma = 0.0;
            const double w[3] = {0.299, 0.587, 0.114};
            for (int ch = 0; ch < 3; ++ch) luma += w[ch] * (r.at(y, x, ch) - c.at(y, x, ch));
            m = std::max(m, luma);
        }
    }
    return m;
}

}  // namespace nightbench::testing
