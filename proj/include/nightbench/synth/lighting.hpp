#pragma once

#include <span>

#include "nightbench/synth/scene.hpp"

namespace nightbench {

/// Light received by a point in the rain volume.
struct Irradiance {
    Vec3 rgb;              // sum of intensity * cone falloff * color / d^2
    bool in_beam_core = false;
};

/// Cone falloff: cos^2(pi/2 * theta / half_angle) inside the cone, 0 outside.
double cone_falloff(const LightSource& light, const Vec3& point);

/// Illumination model shared by streaks and curtains. A light of zero
/// intensity contributes exactly zero and never triggers glimmer.
Irradiance irradiance_at(std::span<const LightSource> lights, const Vec3& point);

/// Per-channel camera gains for a white-balance setting in Kelvin, normalized
/// so the green gain is 1. 6500 K is neutral.
Vec3 white_balance_gains(double kelvin);

}  // namespace nightbench
