#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nightbench/synth/params.hpp"
#include "nightbench/synth/scene.hpp"

namespace nightbench {

/// Added energy below half an 8-bit step counts as invisible.
inline constexpr double kVisibilityEpsilon = 1.0 / 512.0;
inline constexpr std::size_t kMaxParticles = 5000;
inline constexpr double kTerminalVelocity = 8.0;  // m/s
/// Distance at which the lens is focused for defocus blur.
inline constexpr double kFocusDistance = 8.0;     // m
/// Camera-space depths of the two curtain billboards.
inline constexpr double kCurtainDepths[2] = {6.0, 12.0};

/// Axis-aligned world box; particle positions wrap periodically inside it.
struct RainVolume {
    Vec3 lo;
    Vec3 hi;

    double volume() const { return (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z); }
    Vec3 wrap(const Vec3& p) const;
};

struct RainParticle {
    Vec3 origin;                            // world position at t = 0
    double fall_speed = kTerminalVelocity;  // m/s, downward
    Vec3 drift;                             // per-particle velocity jitter, m/s
};

struct RainField {
    RainVolume volume;
    std::vector<RainParticle> particles;
};

/// One particle's projected streak for one frame. Pixel coordinates are
/// continuous with pixel centers at (x + 0.5, y + 0.5).
struct Streak {
    double u0 = 0, v0 = 0, z0 = 0;
    double u1 = 0, v1 = 0, z1 = 0;
    double half_width = 0.5;
    Vec3 rgb;  // peak added color at full coverage
    bool glimmer = false;
};

/// World box covering the camera frusta (out to 20 m) of the first and last
/// frames, clipped to the ground.
RainVolume rain_volume(const SceneBundle& scene);

/// Uniform particles in the rain volume: round(intensity * volume), capped at
/// kMaxParticles. Deterministic in the seed.
RainField spawn_particles(const SceneBundle& scene, const RainParams& rain, RainSeed seed);

/// Unwrapped world position of a particle at time t: gravity, per-particle
/// drift, and gusting wind w(t) = wind_speed * (1 + gust * sin t).
Vec3 particle_position(const RainParticle& p, const RainParams& rain, double t);

/// Visible streaks of a frame: each particle drawn as the segment it sweeps
/// during the exposure 1 / (2 fps). Unlit and behind-camera particles are
/// dropped. Output order follows particle order.
std::vector<Streak> compute_streaks(const SceneBundle& scene, const RainField& field, const RainParams& rain,
                                    const CameraParams& cam, std::size_t frame);

struct RenderOptions {
    unsigned workers = 0;  // 0 = hardware concurrency
    bool curtains = true;
};

/// Composites streaks and curtains into the clean frames. The clean half of
/// the result equals scene.clean exactly. Output is independent of worker
/// count: every pixel accumulates contributions in particle order.
PairedClip render_rain(const SceneBundle& scene, const RainField& field, const RainParams& rain, const CameraParams& cam,
                       RainSeed seed, const RenderOptions& options = {});

/// spawn_particles + render_rain.
PairedClip simulate_rain(const SceneBundle& scene, const RainParams& rain, const CameraParams& cam, RainSeed seed,
                         const RenderOptions& options = {});

/// Applies the Kelvin gain identically to both halves (clamped), keeping the
/// pair consistent.
PairedClip apply_white_balance(const PairedClip& pair, double kelvin);

}  // namespace nightbench
