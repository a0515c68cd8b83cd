#include "nightbench/synth/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "nightbench/core/error.hpp"
#include "nightbench/core/parallel.hpp"
#include "nightbench/core/rng.hpp"
#include "nightbench/synth/lighting.hpp"
#include "noise.hpp"

namespace nightbench {

namespace {

using detail::hash01;
using detail::value_noise;

constexpr double kCameraHeight = 1.6;
constexpr double kLampRadius = 0.18;
constexpr double kSkyDistance = 90.0;
const Vec3 kAmbient{0.025, 0.025, 0.035};
const Vec3 kSkyColor{0.015, 0.02, 0.045};

struct Box {
    Vec3 lo;
    Vec3 hi;
    Vec3 albedo;
};

struct Geometry {
    SceneKind kind = SceneKind::street;
    double half_width = 7.0;
    double far_z = 100.0;
    std::uint64_t texture_seed = 0;
    std::array<Vec3, 2> wall_tint{};
    std::vector<Box> boxes;
    std::vector<LightSource> lights;
};

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    Vec3 point;
    Vec3 normal;
    Vec3 albedo;
    Vec3 emissive;
};

double building_height(const Geometry& g, int side, double z) {
    const auto block = static_cast<std::int64_t>(std::floor(z / 12.0));
    return 7.0 + 14.0 * hash01(g.texture_seed, 1000 + side, block);
}

void facade_material(const Geometry& g, int side, double z, double y, Hit& hit) {
    const Vec3 tint = g.wall_tint[static_cast<std::size_t>(side)];
    const double grain = 0.75 + 0.5 * value_noise(g.texture_seed + 7, z * 1.7, y * 1.7);
    hit.albedo = tint * grain;

    // Window grid: 2.5 m bays, 3 m storeys, ground floor left plain.
    const double bay = z / 2.5;
    const double storey = y / 3.0;
    const double fb = bay - std::floor(bay);
    const double fs = storey - std::floor(storey);
    if (y > 3.0 && fb > 0.2 && fb < 0.8 && fs > 0.3 && fs < 0.8) {
        const double lit = hash01(g.texture_seed, side, static_cast<std::int64_t>(std::floor(bay)), static_cast<std::int64_t>(std::floor(storey)));
        hit.albedo = Vec3{0.04, 0.04, 0.05};
        if (lit < 0.3) {
            const double warm = 0.2 + 0.35 * (lit / 0.3);
            hit.emissive = Vec3{warm, warm * 0.8, warm * 0.55};
        }
    }
}

void consider_box(const Box& box, const Vec3& o, const Vec3& d, Hit& best) {
    double t0 = 0.0;
    double t1 = best.t;
    int axis = -1;
    double sign = 0.0;
    const double oc[3] = {o.x, o.y, o.z};
    const double dc[3] = {d.x, d.y, d.z};
    const double lo[3] = {box.lo.x, box.lo.y, box.lo.z};
    const double hi[3] = {box.hi.x, box.hi.y, box.hi.z};
    for (int a = 0; a < 3; ++a) {
        if (std::abs(dc[a]) < 1e-12) {
            if (oc[a] < lo[a] || oc[a] > hi[a]) return;
            continue;
        }
        double ta = (lo[a] - oc[a]) / dc[a];
        double tb = (hi[a] - oc[a]) / dc[a];
        double s = -1.0;
        if (ta > tb) {
            std::swap(ta, tb);
            s = 1.0;
        }
        if (ta > t0) {
            t0 = ta;
            axis = a;
            sign = s;
        }
        t1 = std::min(t1, tb);
        if (t0 > t1) return;
    }
    if (axis < 0 || t0 <= 1e-6 || t0 >= best.t) return;
    best = Hit{};
    best.t = t0;
    best.point = o + d * t0;
    best.normal = Vec3{axis == 0 ? sign : 0.0, axis == 1 ? sign : 0.0, axis == 2 ? sign : 0.0};
    best.albedo = box.albedo;
}

Hit trace(const Geometry& g, const Vec3& o, const Vec3& d) {
    Hit best;
    best.t = std::numeric_limits<double>::infinity();

    // Far backdrop: distant skyline against the night sky.
    if (d.z > 0.0) {
        const double t = (g.far_z - o.z) / d.z;
        if (t > 0.0) {
            best.t = t;
            best.point = o + d * t;
            best.normal = Vec3{0, 0, -1};
            const double skyline = 12.0 + 10.0 * value_noise(g.texture_seed + 3, best.point.x * 0.15, 0.0);
            if (best.point.y > skyline) {
                best.emissive = kSkyColor * (1.0 + 0.4 * value_noise(g.texture_seed + 5, best.point.x * 0.05, best.point.y * 0.05));
            } else {
                best.albedo = Vec3{0.05, 0.05, 0.06};
            }
        }
    }

    if (d.y < 0.0) {
        const double t = -o.y / d.y;
        if (t > 0.0 && t < best.t) {
            best = Hit{};
            best.t = t;
            best.point = o + d * t;
            best.normal = Vec3{0, 1, 0};
            const double n = value_noise(g.texture_seed + 11, best.point.x * 2.0, best.point.z * 2.0);
            best.albedo = Vec3{0.10, 0.10, 0.11} * (0.8 + 0.4 * n);
            const double dash = best.point.z / 3.0 - std::floor(best.point.z / 3.0);
            if (g.kind == SceneKind::street && std::abs(best.point.x) < 0.08 && dash < 0.5) best.albedo = Vec3{0.45, 0.42, 0.3};
        }
    }

    for (int side = 0; side < 2; ++side) {
        const double wx = side == 0 ? -g.half_width : g.half_width;
        if ((side == 0 && d.x >= 0.0) || (side == 1 && d.x <= 0.0)) continue;
        const double t = (wx - o.x) / d.x;
        if (t <= 0.0 || t >= best.t) continue;
        const Vec3 p = o + d * t;
        if (p.y < 0.0 || p.y > building_height(g, side, p.z)) continue;
        best = Hit{};
        best.t = t;
        best.point = p;
        best.normal = Vec3{side == 0 ? 1.0 : -1.0, 0, 0};
        facade_material(g, side, p.z, p.y, best);
    }

    for (const Box& box : g.boxes) consider_box(box, o, d, best);

    for (const LightSource& light : g.lights) {
        const Vec3 oc = o - light.position;
        const double b = dot(oc, d);
        const double c = dot(oc, oc) - kLampRadius * kLampRadius;
        const double a = dot(d, d);
        const double disc = b * b - a * c;
        if (disc < 0.0) continue;
        const double t = (-b - std::sqrt(disc)) / a;
        if (t <= 0.0 || t >= best.t) continue;
        best = Hit{};
        best.t = t;
        best.point = o + d * t;
        best.normal = normalized(best.point - light.position);
        best.emissive = light.color * std::min(1.0, 0.55 + light.intensity / 40.0);
    }
    return best;
}

Vec3 shade(const Geometry& g, const Hit& hit) {
    Vec3 received = kAmbient;
    for (const LightSource& light : g.lights) {
        if (light.intensity <= 0.0) continue;
        const Vec3 to_light = light.position - hit.point;
        const double dist_sq = std::max(dot(to_light, to_light), 0.01);
        const double lambert = std::max(0.0, dot(hit.normal, to_light) / std::sqrt(dist_sq));
        if (lambert <= 0.0) continue;
        const double falloff = cone_falloff(light, hit.point);
        received += light.color * (light.intensity * falloff * lambert / dist_sq);
    }
    return hit.emissive + hadamard(hit.albedo, received);
}

Vec3 pick_color(CounterRng& rng, SceneKind kind) {
    static const std::array<Vec3, 4> street = {Vec3{1.0, 0.62, 0.25}, Vec3{1.0, 0.85, 0.62}, Vec3{0.72, 0.86, 1.0},
                                               Vec3{1.0, 0.75, 0.45}};
    static const std::array<Vec3, 6> neon = {Vec3{1.0, 0.1, 0.15}, Vec3{0.1, 1.0, 0.35}, Vec3{0.2, 0.35, 1.0},
                                             Vec3{1.0, 0.2, 0.9},  Vec3{0.1, 0.9, 1.0},  Vec3{1.0, 0.7, 0.1}};
    if (kind == SceneKind::street) return street[rng.below(street.size())];
    return neon[rng.below(neon.size())];
}

Geometry build_geometry(SceneKind kind, double z_end, RainSeed seed) {
    CounterRng rng(seed.value, Stream::scene);
    Geometry g;
    g.kind = kind;
    g.texture_seed = rng.next_u64();
    g.half_width = kind == SceneKind::street ? rng.uniform(6.0, 9.0) : rng.uniform(2.2, 3.2);
    g.far_z = z_end + kSkyDistance;
    for (auto& tint : g.wall_tint) {
        const double base = rng.uniform(0.18, 0.38);
        tint = Vec3{base * rng.uniform(0.85, 1.15), base, base * rng.uniform(0.85, 1.15)};
    }

    if (kind == SceneKind::street) {
        const int n_boxes = 2 + static_cast<int>(rng.below(3));
        for (int i = 0; i < n_boxes; ++i) {
            const double side = (i % 2 == 0) ? -1.0 : 1.0;
            const double cx = side * (g.half_width - 1.6);
            const double cz = rng.uniform(4.0, z_end + 30.0);
            const Vec3 color{rng.uniform(0.05, 0.6), rng.uniform(0.05, 0.6), rng.uniform(0.05, 0.6)};
            g.boxes.push_back(Box{Vec3{cx - 0.9, 0.0, cz - 2.1}, Vec3{cx + 0.9, 1.4, cz + 2.1}, color});
        }
    } else {
        const int n_boxes = 1 + static_cast<int>(rng.below(3));
        for (int i = 0; i < n_boxes; ++i) {
            const double side = (i % 2 == 0) ? -1.0 : 1.0;
            const double cx = side * (g.half_width - 0.45);
            const double cz = rng.uniform(3.0, z_end + 20.0);
            const double s = rng.uniform(0.5, 0.9);
            g.boxes.push_back(Box{Vec3{cx - s / 2, 0.0, cz - s / 2}, Vec3{cx + s / 2, s * 1.2, cz + s / 2}, Vec3{0.25, 0.2, 0.15}});
        }
    }

    CounterRng lrng(seed.value, Stream::lights);
    const double spacing = kind == SceneKind::street ? lrng.uniform(7.0, 10.0) : lrng.uniform(3.5, 5.5);
    int index = 0;
    for (double z = lrng.uniform(1.0, 3.0); z < z_end + 45.0; z += spacing, ++index) {
        const double side = (index % 2 == 0) ? -1.0 : 1.0;
        LightSource light;
        light.color = pick_color(lrng, kind);
        if (kind == SceneKind::street) {
            light.position = Vec3{side * (g.half_width - 0.9), lrng.uniform(4.5, 6.0), z + lrng.uniform(-1.0, 1.0)};
            light.cone_axis = normalized(Vec3{-side * lrng.uniform(0.1, 0.4), -1.0, 0.0});
            light.cone_half_angle = lrng.uniform(0.5, 0.8);
            light.intensity = lrng.uniform(8.0, 20.0);
        } else {
            light.position = Vec3{side * (g.half_width - 0.3), lrng.uniform(2.4, 4.0), z + lrng.uniform(-0.8, 0.8)};
            light.cone_axis = normalized(Vec3{-side, -lrng.uniform(0.4, 0.9), lrng.uniform(-0.2, 0.2)});
            light.cone_half_angle = lrng.uniform(0.7, 1.1);
            light.intensity = lrng.uniform(4.0, 10.0);
        }
        light.beam_core_half_angle = light.cone_half_angle * lrng.uniform(0.2, 0.35);
        g.lights.push_back(light);
    }
    return g;
}

}  // namespace

void LightSource::validate() const {
    if (std::abs(norm(cone_axis) - 1.0) > 1e-6) throw ValidationError("light cone_axis must be a unit vector");
    if (!(cone_half_angle > 0.0 && cone_half_angle <= std::numbers::pi)) throw ValidationError("cone_half_angle must lie in (0, pi]");
    if (!(beam_core_half_angle > 0.0 && beam_core_half_angle <= cone_half_angle)) {
        throw ValidationError("beam_core_half_angle must lie in (0, cone_half_angle]");
    }
    if (!(intensity >= 0.0)) throw ValidationError("light intensity must be >= 0");
    for (double c : {color.x, color.y, color.z}) {
        if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("light color must lie in [0,1]");
    }
}

void SceneBundle::validate() const {
    if (depth.size() != clean.size()) throw ValidationError("scene needs one depth map per frame");
    if (poses.size() != clean.size()) throw ValidationError("scene needs one camera pose per frame");
    for (const DepthMap& d : depth) {
        if (d.dims() != clean.dims()) throw ValidationError("depth map dimensions differ from clean frames");
    }
    for (const LightSource& l : lights) l.validate();
    if (!(intrinsics.focal_px > 0.0)) throw ValidationError("focal length in pixels must be > 0");
}

SceneKind parse_scene_kind(const std::string& name) {
    if (name == "street") return SceneKind::street;
    if (name == "alley") return SceneKind::alley;
    throw ValidationError("unknown scene kind '" + name + "' (expected street or alley)");
}

const char* to_string(SceneKind kind) { return kind == SceneKind::street ? "street" : "alley"; }

Intrinsics intrinsics_for(Dims dims, double focal_length_mm) {
    if (!(focal_length_mm > 0.0)) throw ValidationError("focal length must be > 0");
    return Intrinsics{focal_length_mm / kSensorWidthMm * dims.width, dims.width / 2.0, dims.height / 2.0};
}

SceneBundle generate_scene(SceneKind kind, std::size_t n_frames, Dims dims, RainSeed seed, double fps, double focal_length_mm) {
    if (n_frames < 1) throw ValidationError("scene needs at least one frame");
    if (dims.height < 16 || dims.width < 16) throw ValidationError("scene dimensions must be at least 16x16");
    if (!(fps > 0.0)) throw ValidationError("fps must be > 0");

    CounterRng rng(seed.value, Stream::scene, 1);
    const double speed = kind == SceneKind::street ? rng.uniform(0.8, 1.6) : rng.uniform(0.5, 1.0);
    const double yaw = rng.uniform(-0.12, 0.12);
    const double x0 = kind == SceneKind::street ? rng.uniform(-1.0, 1.0) : rng.uniform(-0.4, 0.4);
    const double duration = static_cast<double>(n_frames) / fps;
    const Geometry geo = build_geometry(kind, speed * duration, seed);
    const Intrinsics K = intrinsics_for(dims, focal_length_mm);

    std::vector<CameraPose> poses(n_frames);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const double t = static_cast<double>(f) / fps;
        poses[f] = CameraPose{Vec3{x0, kCameraHeight, speed * t}, Mat3::yaw(yaw)};
    }

    const std::size_t npix = static_cast<std::size_t>(dims.height) * static_cast<std::size_t>(dims.width);
    std::vector<std::vector<float>> rgb(n_frames, std::vector<float>(npix * 3));
    std::vector<std::vector<float>> depth(n_frames, std::vector<float>(npix));
    parallel_for(n_frames * static_cast<std::size_t>(dims.height), [&](std::size_t job) {
        const std::size_t f = job / static_cast<std::size_t>(dims.height);
        const int y = static_cast<int>(job % static_cast<std::size_t>(dims.height));
        const CameraPose& pose = poses[f];
        for (int x = 0; x < dims.width; ++x) {
            const Vec3 cam_dir{(x + 0.5 - K.cx) / K.focal_px, -(y + 0.5 - K.cy) / K.focal_px, 1.0};
            const Hit hit = trace(geo, pose.position, pose.rotation * cam_dir);
            const Vec3 c = shade(geo, hit);
            const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(dims.width) + static_cast<std::size_t>(x);
            rgb[f][3 * p] = static_cast<float>(c.x);
            rgb[f][3 * p + 1] = static_cast<float>(c.y);
            rgb[f][3 * p + 2] = static_cast<float>(c.z);
            // Camera-space depth equals the ray parameter since cam_dir.z == 1.
            depth[f][p] = static_cast<float>(hit.t);
        }
    });

    std::vector<Frame> frames;
    std::vector<DepthMap> depth_maps;
    frames.reserve(n_frames);
    depth_maps.reserve(n_frames);
    for (std::size_t f = 0; f < n_frames; ++f) {
        frames.push_back(Frame::clamped(dims.height, dims.width, std::move(rgb[f])));
        depth_maps.emplace_back(dims.height, dims.width, std::move(depth[f]));
    }

    SceneBundle bundle{Clip(std::move(frames), fps), std::move(depth_maps), geo.lights, std::move(poses), K};
    bundle.validate();
    return bundle;
}

}  // namespace nightbench
