#include "nightbench/synth/rain.hpp"

#include <algorithm>
#include <cmath>

#include "nightbench/core/error.hpp"
#include "nightbench/core/parallel.hpp"
#include "nightbench/core/rng.hpp"
#include "nightbench/synth/lighting.hpp"
#include "noise.hpp"

namespace nightbench {

namespace {

constexpr double kNearPlane = 0.1;
constexpr double kRainReach = 20.0;
constexpr double kDropReflectance = 0.35;
constexpr double kBaseHalfWidth = 0.6;
constexpr double kBlurHalfWidth = 1.5;
constexpr double kMaxCocRadius = 4.0;
constexpr double kGlimmerGain = 10.0;
constexpr double kCurtainOpacity = 0.25;
constexpr double kCurtainReflectance = 0.4;
constexpr std::int64_t kCurtainPeriod = 64;
constexpr int kBandRows = 8;

double wrap_axis(double v, double lo, double hi) {
    const double span = hi - lo;
    double r = std::fmod(v - lo, span);
    if (r < 0.0) r += span;
    return lo + r;
}

Vec3 wind_unit(const RainParams& rain) { return Vec3{std::cos(rain.wind_direction), 0.0, std::sin(rain.wind_direction)}; }

// Integral of wind_speed * (1 + gust * sin s) ds over [0, t].
double wind_travel(const RainParams& rain, double t) { return rain.wind_speed * (t + rain.gust_amount * (1.0 - std::cos(t))); }

// Thin-lens circle of confusion radius in pixels.
double coc_radius_px(const CameraParams& cam, const SceneBundle& scene, double depth_m) {
    const double f = cam.focal_length;  // mm
    const double s = kFocusDistance * 1000.0;
    const double z = depth_m * 1000.0;
    const double diameter_mm = f * f / (cam.aperture * (s - f)) * std::abs(z - s) / z;
    const double px = 0.5 * diameter_mm / kSensorWidthMm * scene.dims().width;
    return std::min(px, kMaxCocRadius);
}

void validate_inputs(const SceneBundle& scene, const RainParams& rain, const CameraParams& cam) {
    scene.validate();
    rain.validate();
    cam.validate();
}

// Adds one streak's coverage to rows [row_begin, row_end) of the accumulator.
void rasterize(const Streak& s, const DepthMap& depth, int row_begin, int row_end, std::vector<double>& acc) {
    const int width = depth.width();
    const double hw = s.half_width;
    const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(s.u0, s.u1) - hw - 0.5)));
    const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(std::max(s.u0, s.u1) + hw)));
    const int y_lo = std::max(row_begin, static_cast<int>(std::floor(std::min(s.v0, s.v1) - hw - 0.5)));
    const int y_hi = std::min(row_end - 1, static_cast<int>(std::ceil(std::max(s.v0, s.v1) + hw)));
    const double dx = s.u1 - s.u0;
    const double dy = s.v1 - s.v0;
    const double len_sq = dx * dx + dy * dy;
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double px = x + 0.5;
            const double py = y + 0.5;
            double t = 0.0;
            if (len_sq > 0.0) t = std::clamp(((px - s.u0) * dx + (py - s.v0) * dy) / len_sq, 0.0, 1.0);
            const double ex = px - (s.u0 + t * dx);
            const double ey = py - (s.v0 + t * dy);
            const double coverage = 1.0 - std::sqrt(ex * ex + ey * ey) / hw;
            if (coverage <= 0.0) continue;
            const double z = s.z0 + t * (s.z1 - s.z0);
            if (z > depth.at(y, x)) continue;
            const std::size_t p = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
            acc[p] += coverage * s.rgb.x;
            acc[p + 1] += coverage * s.rgb.y;
            acc[p + 2] += coverage * s.rgb.z;
        }
    }
}

double smoothstep(double e0, double e1, double x) {
    const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

void add_curtains(const SceneBundle& scene, const RainParams& rain, std::uint64_t noise_seed, std::size_t frame, int row_begin,
                  int row_end, std::vector<double>& acc) {
    const DepthMap& depth = scene.depth[frame];
    const CameraPose& pose = scene.poses[frame];
    const Intrinsics& K = scene.intrinsics;
    const double t = static_cast<double>(frame) / scene.clean.fps();
    const double travel = wind_travel(rain, t);
    const double c = std::cos(rain.wind_direction);
    const double s = std::sin(rain.wind_direction);
    for (int layer = 0; layer < 2; ++layer) {
        const double zb = kCurtainDepths[layer];
        const std::uint64_t layer_seed = noise_seed + static_cast<std::uint64_t>(layer) * 7919;
        for (int y = row_begin; y < row_end; ++y) {
            for (int x = 0; x < depth.width(); ++x) {
                if (depth.at(y, x) < zb) continue;
                const Vec3 cam_point{(x + 0.5 - K.cx) / K.focal_px * zb, -(y + 0.5 - K.cy) / K.focal_px * zb, zb};
                const Vec3 world = pose.to_world(cam_point);
                const double along = world.x * c + world.z * s;
                const double across = -world.x * s + world.z * c;
                const double n = detail::value_noise(layer_seed, 0.35 * (along - travel) + 0.2 * across,
                                                     0.08 * (world.y + 0.25 * kTerminalVelocity * t), kCurtainPeriod);
                const double alpha = rain.curtain_density * kCurtainOpacity * smoothstep(0.45, 0.85, n);
                if (alpha <= 0.0) continue;
                const Irradiance irr = irradiance_at(scene.lights, world);
                const std::size_t p = (static_cast<std::size_t>(y) * static_cast<std::size_t>(depth.width()) + static_cast<std::size_t>(x)) * 3;
                acc[p] += kCurtainReflectance * alpha * irr.rgb.x;
                acc[p + 1] += kCurtainReflectance * alpha * irr.rgb.y;
                acc[p + 2] += kCurtainReflectance * alpha * irr.rgb.z;
            }
        }
    }
}

}  // namespace

Vec3 RainVolume::wrap(const Vec3& p) const {
    return Vec3{wrap_axis(p.x, lo.x, hi.x), wrap_axis(p.y, lo.y, hi.y), wrap_axis(p.z, lo.z, hi.z)};
}

RainVolume rain_volume(const SceneBundle& scene) {
    const Intrinsics& K = scene.intrinsics;
    const Dims d = scene.dims();
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};
    for (const CameraPose* pose : {&scene.poses.front(), &scene.poses.back()}) {
        for (double z : {kNearPlane, kRainReach}) {
            for (double sx : {-1.0, 1.0}) {
                for (double sy : {-1.0, 1.0}) {
                    const Vec3 w = pose->to_world(Vec3{sx * z * d.width / 2.0 / K.focal_px, sy * z * d.height / 2.0 / K.focal_px, z});
                    lo = Vec3{std::min(lo.x, w.x), std::min(lo.y, w.y), std::min(lo.z, w.z)};
                    hi = Vec3{std::max(hi.x, w.x), std::max(hi.y, w.y), std::max(hi.z, w.z)};
                }
            }
        }
    }
    lo.y = std::max(lo.y, 0.0);
    hi.y = std::max(hi.y, lo.y + 1.0);
    return RainVolume{lo, hi};
}

RainField spawn_particles(const SceneBundle& scene, const RainParams& rain, RainSeed seed) {
    rain.validate();
    RainField field;
    field.volume = rain_volume(scene);
    const double expected = rain.rain_intensity * field.volume.volume();
    const auto count = static_cast<std::size_t>(std::min<double>(static_cast<double>(kMaxParticles), std::round(expected)));
    field.particles.resize(count);
    const Vec3 lo = field.volume.lo;
    const Vec3 hi = field.volume.hi;
    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng(seed.value, Stream::particles, i);
        RainParticle& p = field.particles[i];
        p.origin = Vec3{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), rng.uniform(lo.z, hi.z)};
        p.fall_speed = kTerminalVelocity * rng.uniform(0.9, 1.1);
        p.drift = Vec3{rng.uniform(-0.3, 0.3), 0.0, rng.uniform(-0.3, 0.3)};
    }
    return field;
}

Vec3 particle_position(const RainParticle& p, const RainParams& rain, double t) {
    return p.origin + Vec3{p.drift.x, -p.fall_speed, p.drift.z} * t + wind_unit(rain) * wind_travel(rain, t);
}

std::vector<Streak> compute_streaks(const SceneBundle& scene, const RainField& field, const RainParams& rain, const CameraParams& cam,
                                    std::size_t frame) {
    if (frame >= scene.frame_count()) throw ValidationError("frame index out of range");
    const double fps = scene.clean.fps();
    const double t = static_cast<double>(frame) / fps;
    const double exposure = 1.0 / (2.0 * fps);
    const CameraPose& pose = scene.poses[frame];
    const Intrinsics& K = scene.intrinsics;
    const Dims d = scene.dims();

    std::vector<Streak> out;
    for (const RainParticle& p : field.particles) {
        const Vec3 raw0 = particle_position(p, rain, t);
        const Vec3 raw1 = particle_position(p, rain, t + exposure);
        const Vec3 start = field.volume.wrap(raw0);
        const Vec3 end = start + (raw1 - raw0);
        const Vec3 c0 = pose.to_camera(start);
        const Vec3 c1 = pose.to_camera(end);
        if (c0.z < kNearPlane || c1.z < kNearPlane) continue;

        Streak s;
        s.u0 = K.cx + K.focal_px * c0.x / c0.z;
        s.v0 = K.cy - K.focal_px * c0.y / c0.z;
        s.u1 = K.cx + K.focal_px * c1.x / c1.z;
        s.v1 = K.cy - K.focal_px * c1.y / c1.z;
        s.z0 = c0.z;
        s.z1 = c1.z;
        s.half_width = kBaseHalfWidth + kBlurHalfWidth * rain.motion_blur + coc_radius_px(cam, scene, 0.5 * (c0.z + c1.z));
        if (std::max(s.u0, s.u1) + s.half_width < 0.0 || std::min(s.u0, s.u1) - s.half_width > d.width ||
            std::max(s.v0, s.v1) + s.half_width < 0.0 || std::min(s.v0, s.v1) - s.half_width > d.height) {
            continue;
        }

        const Irradiance irr = irradiance_at(scene.lights, (start + end) * 0.5);
        if (irr.rgb.x <= 0.0 && irr.rgb.y <= 0.0 && irr.rgb.z <= 0.0) continue;
        const double glimmer = irr.in_beam_core ? 1.0 + kGlimmerGain * rain.glimmer_intensity : 1.0;
        // Wider streaks spread the same energy across the width.
        s.rgb = irr.rgb * (kDropReflectance * glimmer * kBaseHalfWidth / s.half_width);
        s.glimmer = irr.in_beam_core;
        out.push_back(s);
    }
    return out;
}

PairedClip render_rain(const SceneBundle& scene, const RainField& field, const RainParams& rain, const CameraParams& cam, RainSeed seed,
                       const RenderOptions& options) {
    validate_inputs(scene, rain, cam);
    const Dims d = scene.dims();
    const std::size_t n_frames = scene.frame_count();
    const std::size_t n_bands = static_cast<std::size_t>((d.height + kBandRows - 1) / kBandRows);
    const bool curtains = options.curtains && rain.curtain_density > 0.0;
    const std::uint64_t noise_seed = CounterRng(seed.value, Stream::curtain).next_u64();

    std::vector<std::vector<Streak>> streaks(n_frames);
    parallel_for(n_frames, [&](std::size_t f) { streaks[f] = compute_streaks(scene, field, rain, cam, f); }, options.workers);

    std::vector<std::vector<double>> acc(n_frames, std::vector<double>(static_cast<std::size_t>(d.height) * d.width * 3, 0.0));
    parallel_for(
        n_frames * n_bands,
        [&](std::size_t job) {
            const std::size_t f = job / n_bands;
            const int row_begin = static_cast<int>(job % n_bands) * kBandRows;
            const int row_end = std::min(d.height, row_begin + kBandRows);
            for (const Streak& s : streaks[f]) rasterize(s, scene.depth[f], row_begin, row_end, acc[f]);
            if (curtains) add_curtains(scene, rain, noise_seed, f, row_begin, row_end, acc[f]);
        },
        options.workers);

    std::vector<Frame> rainy;
    rainy.reserve(n_frames);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const auto clean = scene.clean[f].samples();
        std::vector<float> out(clean.size());
        for (std::size_t i = 0; i < clean.size(); ++i) out[i] = static_cast<float>(clean[i] + acc[f][i]);
        rainy.push_back(Frame::clamped(d.height, d.width, std::move(out)));
    }
    return PairedClip(Clip(std::move(rainy), scene.clean.fps()), scene.clean);
}

PairedClip simulate_rain(const SceneBundle& scene, const RainParams& rain, const CameraParams& cam, RainSeed seed,
                         const RenderOptions& options) {
    return render_rain(scene, spawn_particles(scene, rain, seed), rain, cam, seed, options);
}

PairedClip apply_white_balance(const PairedClip& pair, double kelvin) {
    if (!(kelvin >= 1000.0 && kelvin <= 40000.0)) throw ValidationError("white balance must lie in [1000, 40000] K");
    const Vec3 g = white_balance_gains(kelvin);
    const float gains[3] = {static_cast<float>(g.x), static_cast<float>(g.y), static_cast<float>(g.z)};
    auto apply = [&](const Clip& clip) {
        std::vector<Frame> frames;
        frames.reserve(clip.size());
        for (const Frame& f : clip) {
            std::vector<float> v = f.to_vector();
            for (std::size_t i = 0; i < v.size(); ++i) v[i] *= gains[i % 3];
            frames.push_back(Frame::clamped(f.height(), f.width(), std::move(v)));
        }
        return Clip(std::move(frames), clip.fps());
    };
    return PairedClip(apply(pair.rainy), apply(pair.clean));
}

}  // namespace nightbench
