#pragma once

#include <optional>
#include <vector>

#include "nightbench/synth/params.hpp"
#include "nightbench/synth/vec3.hpp"
#include "nightbench/video/clip.hpp"

namespace nightbench {

/// Spot light. Particles inside the cone receive light; particles inside the
/// narrower beam core additionally glimmer.
struct LightSource {
    Vec3 position;                     // meters
    Vec3 color{1.0, 1.0, 1.0};         // RGB in [0, 1]
    double intensity = 10.0;           // >= 0
    Vec3 cone_axis{0.0, -1.0, 0.0};    // unit vector
    double cone_half_angle = 0.7;      // (0, pi]
    double beam_core_half_angle = 0.2; // (0, cone_half_angle]

    void validate() const;
};

/// Pinhole intrinsics in pixels; the principal point is the image center.
struct Intrinsics {
    double focal_px = 100.0;
    double cx = 64.0;
    double cy = 64.0;

    friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

struct CameraPose {
    Vec3 position;
    Mat3 rotation;  // camera-to-world

    Vec3 to_camera(const Vec3& world) const { return rotation.transposed() * (world - position); }
    Vec3 to_world(const Vec3& cam) const { return position + rotation * cam; }

    friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

struct SceneBundle {
    Clip clean;
    std::vector<DepthMap> depth;
    std::vector<LightSource> lights;
    std::vector<CameraPose> poses;
    Intrinsics intrinsics;

    std::size_t frame_count() const { return clean.size(); }
    Dims dims() const { return clean.dims(); }
    /// Checks the bundle invariants (per-frame depth/pose, matching dims, lights).
    void validate() const;
};

enum class SceneKind { street, alley };

SceneKind parse_scene_kind(const std::string& name);
const char* to_string(SceneKind kind);

/// Sensor width used to convert a focal length in mm into pixels.
inline constexpr double kSensorWidthMm = 36.0;
inline constexpr double kDefaultFocalLengthMm = 24.0;

Intrinsics intrinsics_for(Dims dims, double focal_length_mm);

/// Procedural night street or alley: textured facades, ground, parked boxes
/// and a row of colored spot lights, seen from a camera moving forward.
/// Deterministic in the seed. Requires n_frames >= 1 and dims >= 16x16.
SceneBundle generate_scene(SceneKind kind, std::size_t n_frames, Dims dims, RainSeed seed, double fps = 30.0,
                           double focal_length_mm = kDefaultFocalLengthMm);

}  // namespace nightbench
