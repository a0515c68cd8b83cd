#include "nightbench/synth/lighting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nightbench {

namespace {

// Guards the inverse-square law for particles passing through a lamp head.
constexpr double kMinDistanceSq = 0.01;

double angle_to_axis(const LightSource& light, const Vec3& point, double& dist_sq) {
    const Vec3 d = point - light.position;
    dist_sq = dot(d, d);
    if (dist_sq <= 0.0) return 0.0;
    const double c = std::clamp(dot(d, light.cone_axis) / std::sqrt(dist_sq), -1.0, 1.0);
    return std::acos(c);
}

// Blackbody color approximation (Helland), in [0, 1] per channel.
Vec3 kelvin_to_rgb(double kelvin) {
    const double t = kelvin / 100.0;
    double r;
    double g;
    double b;
    if (t <= 66.0) {
        r = 255.0;
        g = 99.4708025861 * std::log(t) - 161.1195681661;
    } else {
        r = 329.698727446 * std::pow(t - 60.0, -0.1332047592);
        g = 288.1221695283 * std::pow(t - 60.0, -0.0755148492);
    }
    if (t >= 66.0) {
        b = 255.0;
    } else if (t <= 19.0) {
        b = 0.0;
    } else {
        b = 138.5177312231 * std::log(t - 10.0) - 305.0447927307;
    }
    auto unit = [](double v) { return std::clamp(v, 1.0, 255.0) / 255.0; };
    return {unit(r), unit(g), unit(b)};
}

}  // namespace

double cone_falloff(const LightSource& light, const Vec3& point) {
    double dist_sq = 0.0;
    const double theta = angle_to_axis(light, point, dist_sq);
    if (dist_sq <= 0.0 || theta > light.cone_half_angle) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * theta / light.cone_half_angle);
    return c * c;
}

Irradiance irradiance_at(std::span<const LightSource> lights, const Vec3& point) {
    Irradiance out;
    for (const LightSource& light : lights) {
        if (light.intensity <= 0.0) continue;
        double dist_sq = 0.0;
        const double theta = angle_to_axis(light, point, dist_sq);
        if (theta > light.cone_half_angle) continue;
        const double c = std::cos(0.5 * std::numbers::pi * theta / light.cone_half_angle);
        const double weight = light.intensity * c * c / std::max(dist_sq, kMinDistanceSq);
        out.rgb += light.color * weight;
        if (theta <= light.beam_core_half_angle) out.in_beam_core = true;
    }
    return out;
}

Vec3 white_balance_gains(double kelvin) {
    const Vec3 neutral = kelvin_to_rgb(6500.0);
    const Vec3 illum = kelvin_to_rgb(kelvin);
    Vec3 g{neutral.x / illum.x, neutral.y / illum.y, neutral.z / illum.z};
    return g * (1.0 / g.y);
}

}  // namespace nightbench
