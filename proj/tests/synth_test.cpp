#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nightbench/core/error.hpp"
#include "nightbench/synth/lighting.hpp"
#include "nightbench/synth/rain.hpp"
#include "synth_scenes.hpp"

using namespace nightbench;
using namespace nightbench::testing;

namespace {

SceneBundle small_street(std::size_t frames = 3) { return generate_scene(SceneKind::street, frames, {kSize, kSize}, RainSeed{5}); }

}  // namespace

TEST(Params, ValidationRejectsOutOfRange) {
    RainParams r;
    r.rain_intensity = -1.0;
    EXPECT_THROW(r.validate(), ValidationError);
    r = {};
    r.curtain_density = 1.5;
    EXPECT_THROW(r.validate(), ValidationError);
    CameraParams c;
    c.aperture = 2.0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.white_balance = 7000.0;
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Params, SampledValuesStayInDeclaredRanges) {
    for (std::uint64_t s = 0; s < 500; ++s) {
        const auto [rain, cam] = sample_params(RainSeed{s});
        EXPECT_NO_THROW(rain.validate());
        EXPECT_NO_THROW(cam.validate());
        EXPECT_GE(cam.aperture, 2.8);
        EXPECT_LE(cam.aperture, 5.6);
        EXPECT_GE(cam.white_balance, 3500.0);
        EXPECT_LE(cam.white_balance, 6000.0);
        EXPECT_GE(cam.focal_length, 8.0);
        EXPECT_LE(cam.focal_length, 120.0);
        EXPECT_GE(rain.rain_intensity, ParamRanges::rain_intensity_min);
        EXPECT_LE(rain.rain_intensity, ParamRanges::rain_intensity_max);
        EXPECT_LE(rain.wind_speed, ParamRanges::wind_speed_max);
    }
}

TEST(Params, SamplingIsDeterministic) {
    const auto a = sample_params(RainSeed{77});
    const auto b = sample_params(RainSeed{77});
    EXPECT_EQ(nlohmann::json(a.first), nlohmann::json(b.first));
    EXPECT_EQ(nlohmann::json(a.second), nlohmann::json(b.second));
    EXPECT_NE(nlohmann::json(a.first), nlohmann::json(sample_params(RainSeed{78}).first));
}

TEST(Params, JsonRoundTrip) {
    const auto [rain, cam] = sample_params(RainSeed{3});
    EXPECT_EQ(nlohmann::json(nlohmann::json(rain).get<RainParams>()), nlohmann::json(rain));
    EXPECT_EQ(nlohmann::json(nlohmann::json(cam).get<CameraParams>()), nlohmann::json(cam));
}

TEST(Scene, GenerationIsDeterministicAndValid) {
    const SceneBundle a = small_street();
    const SceneBundle b = small_street();
    EXPECT_NO_THROW(a.validate());
    EXPECT_EQ(a.clean, b.clean);
    EXPECT_EQ(a.depth, b.depth);
    EXPECT_EQ(a.frame_count(), 3u);
    EXPECT_FALSE(a.lights.empty());
    for (const DepthMap& d : a.depth) {
        for (float m : d.meters()) EXPECT_GT(m, 0.0f);
    }
    const SceneBundle alley = generate_scene(SceneKind::alley, 2, {kSize, kSize}, RainSeed{5});
    EXPECT_NE(alley.clean[0], a.clean[0]);
}

TEST(Scene, RejectsTinyFramesAndBadKinds) {
    EXPECT_THROW(generate_scene(SceneKind::street, 1, {8, 8}, RainSeed{1}), ValidationError);
    EXPECT_THROW(generate_scene(SceneKind::street, 0, {32, 32}, RainSeed{1}), ValidationError);
    EXPECT_THROW(parse_scene_kind("beach"), ValidationError);
}

TEST(Scene, FocalLengthSetsIntrinsics) {
    EXPECT_DOUBLE_EQ(intrinsics_for({720, 1280}, 36.0).focal_px, 1280.0);
    EXPECT_DOUBLE_EQ(intrinsics_for({720, 1280}, 18.0).focal_px, 640.0);
    EXPECT_DOUBLE_EQ(intrinsics_for({720, 1280}, 18.0).cy, 360.0);
}

TEST(Lighting, ZeroIntensityContributesNothing) {
    LightSource l = overhead_lamp({1, 1, 1}, 0.0);
    const Irradiance irr = irradiance_at(std::span(&l, 1), {0.0, 1.0, 8.0});
    EXPECT_EQ(irr.rgb, (Vec3{}));
    EXPECT_FALSE(irr.in_beam_core);
}

TEST(Lighting, ConeFalloffIsOneOnAxisAndZeroOutside) {
    const LightSource l = overhead_lamp();
    EXPECT_DOUBLE_EQ(cone_falloff(l, {0.0, 0.0, 8.0}), 1.0);
    EXPECT_EQ(cone_falloff(l, {0.0, 5.0, 8.0}), 0.0);
    EXPECT_EQ(cone_falloff(l, {10.0, 2.9, 8.0}), 0.0);
}

TEST(Lighting, WhiteBalanceIsNeutralAt6500) {
    const Vec3 g = white_balance_gains(6500.0);
    EXPECT_NEAR(g.x, 1.0, 1e-12);
    EXPECT_NEAR(g.z, 1.0, 1e-12);
    const Vec3 warm = white_balance_gains(3500.0);
    EXPECT_LT(warm.x, warm.z);  // compensating a warm illuminant boosts blue
}

TEST(Rain, ParticleCountFollowsIntensityAndCap) {
    const SceneBundle scene = small_street(1);
    RainParams r;
    r.rain_intensity = 0.1;
    const RainField f = spawn_particles(scene, r, RainSeed{1});
    EXPECT_EQ(f.particles.size(), static_cast<std::size_t>(std::min(5000.0, std::round(0.1 * f.volume.volume()))));
    r.rain_intensity = 1000.0;
    EXPECT_EQ(spawn_particles(scene, r, RainSeed{1}).particles.size(), kMaxParticles);
    r.rain_intensity = 0.0;
    EXPECT_TRUE(spawn_particles(scene, r, RainSeed{1}).particles.empty());
}

TEST(Rain, ZeroRainIsBitExactIdentity) {
    const SceneBundle scene = small_street();
    RainParams r;
    r.rain_intensity = 0.0;
    r.curtain_density = 0.0;
    const PairedClip p = simulate_rain(scene, r, CameraParams{}, RainSeed{9});
    EXPECT_EQ(p.rainy, scene.clean);
    EXPECT_EQ(p.clean, scene.clean);
}

TEST(Rain, CleanHalfIsTheSceneAndRainIsVisible) {
    const SceneBundle scene = small_street();
    const PairedClip p = simulate_rain(scene, RainParams{}, CameraParams{}, RainSeed{9});
    EXPECT_EQ(p.clean, scene.clean);
    EXPECT_GT(max_abs_change(p), kVisibilityEpsilon);
}

TEST(Rain, SameSeedIsBitIdenticalAndSeedsDiffer) {
    const SceneBundle scene = small_street();
    const PairedClip a = simulate_rain(scene, RainParams{}, CameraParams{}, RainSeed{21});
    const PairedClip b = simulate_rain(scene, RainParams{}, CameraParams{}, RainSeed{21});
    const PairedClip c = simulate_rain(scene, RainParams{}, CameraParams{}, RainSeed{22});
    EXPECT_EQ(a.rainy, b.rainy);
    EXPECT_NE(a.rainy, c.rainy);
}

TEST(Rain, SerialAndParallelRenderingAgree) {
    const SceneBundle scene = small_street();
    RainParams r;
    r.rain_intensity = 0.35;
    const PairedClip serial = simulate_rain(scene, r, CameraParams{}, RainSeed{4}, RenderOptions{1, true});
    const PairedClip parallel = simulate_rain(scene, r, CameraParams{}, RainSeed{4}, RenderOptions{4, true});
    EXPECT_EQ(serial.rainy, parallel.rainy);
}

TEST(Rain, UnlitSceneShowsNoRain) {
    SceneBundle scene = small_street();
    for (LightSource& l : scene.lights) l.intensity = 0.0;
    RainParams r;
    r.rain_intensity = 0.35;
    r.curtain_density = 1.0;
    r.glimmer_intensity = 1.0;
    EXPECT_EQ(max_abs_change(simulate_rain(scene, r, CameraParams{}, RainSeed{2})), 0.0);
}

TEST(Rain, ParticlesOutsideTheConeAreInvisible) {
    LightSource up = overhead_lamp();
    up.position = {0.0, 30.0, 8.0};
    up.cone_axis = {0.0, 1.0, 0.0};
    const SceneBundle scene = crafted_scene(40.0, up, 2);
    RainParams r;
    r.rain_intensity = 0.35;
    r.curtain_density = 1.0;
    const RainField field = spawn_particles(scene, r, RainSeed{3});
    ASSERT_FALSE(field.particles.empty());
    for (const RainParticle& p : field.particles) ASSERT_LT(p.origin.y, up.position.y);
    const PairedClip out = render_rain(scene, field, r, CameraParams{}, RainSeed{3});
    EXPECT_LT(max_abs_change(out), kVisibilityEpsilon);
}

TEST(Rain, RedLightGivesRedRain) {
    LightSource red = overhead_lamp({1.0, 0.0, 0.0}, 20.0);
    red.position = {0.0, 6.0, 9.0};
    red.cone_half_angle = 1.2;
    red.beam_core_half_angle = 0.3;
    const SceneBundle scene = crafted_scene(30.0, red, 2, 0.2f);
    RainParams r;
    r.rain_intensity = 0.35;
    r.curtain_density = 1.0;
    const PairedClip p = simulate_rain(scene, r, CameraParams{}, RainSeed{8});
    std::size_t modified = 0;
    for (std::size_t f = 0; f < p.rainy.size(); ++f) {
        for (int y = 0; y < kSize; ++y) {
            for (int x = 0; x < kSize; ++x) {
                const double dr = p.rainy[f].at(y, x, 0) - p.clean[f].at(y, x, 0);
                const double dg = p.rainy[f].at(y, x, 1) - p.clean[f].at(y, x, 1);
                const double db = p.rainy[f].at(y, x, 2) - p.clean[f].at(y, x, 2);
                if (dr == 0.0 && dg == 0.0 && db == 0.0) continue;
                ++modified;
                EXPECT_GE(dr, dg);
                EXPECT_GE(dr, db);
            }
        }
    }
    EXPECT_GT(modified, 0u);
}

TEST(Rain, OccludedParticleContributesNothing) {
    const RainParams r = calm_rain();
    const RainField field = single_particle({0.0, 0.5, 8.0});
    const SceneBundle behind_wall = crafted_scene(5.0, overhead_lamp());
    EXPECT_EQ(max_abs_change(render_rain(behind_wall, field, r, CameraParams{}, RainSeed{1})), 0.0);
    const SceneBundle open = crafted_scene(50.0, overhead_lamp());
    EXPECT_GT(max_abs_change(render_rain(open, field, r, CameraParams{}, RainSeed{1})), kVisibilityEpsilon);
}

TEST(Rain, GlimmerIsMonotone) {
    const SceneBundle scene = crafted_scene(50.0, overhead_lamp({1, 1, 1}, 1.0), 1, 0.0f);
    const RainField field = single_particle({0.0, 0.5, 8.0});
    RainParams r = calm_rain();
    const auto streaks = compute_streaks(scene, field, r, CameraParams{}, 0);
    ASSERT_EQ(streaks.size(), 1u);
    ASSERT_TRUE(streaks[0].glimmer);
    double previous = -1.0;
    double first = 0.0;
    for (double g : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
        r.glimmer_intensity = g;
        const double peak = peak_added_luma(render_rain(scene, field, r, CameraParams{}, RainSeed{1}));
        EXPECT_GE(peak, previous);
        if (g == 0.0) first = peak;
        previous = peak;
    }
    EXPECT_GT(previous, first);
}

TEST(Rain, StreaksFollowTheWind) {
    LightSource wide = overhead_lamp({1, 1, 1}, 50.0);
    wide.position = {0.0, 12.0, 8.0};
    wide.cone_half_angle = 1.5;
    const SceneBundle scene = crafted_scene(60.0, wide);
    RainParams r = calm_rain();
    r.wind_speed = 8.0;
    r.wind_direction = 0.0;
    r.rain_intensity = 0.3;
    const RainField field = spawn_particles(scene, r, RainSeed{12});
    const auto streaks = compute_streaks(scene, field, r, CameraParams{}, 0);
    ASSERT_GT(streaks.size(), 50u);

    // Expected screen direction: the projection of the wind + gravity
    // displacement at each streak's start.
    const double exposure = 1.0 / (2.0 * scene.clean.fps());
    double su = 0, sv = 0, eu = 0, ev = 0;
    const Intrinsics& K = scene.intrinsics;
    for (const Streak& s : streaks) {
        const double du = s.u1 - s.u0;
        const double dv = s.v1 - s.v0;
        const double len = std::hypot(du, dv);
        if (len == 0.0) continue;
        su += du / len;
        sv += dv / len;
        const Vec3 p0{(s.u0 - K.cx) * s.z0 / K.focal_px, -(s.v0 - K.cy) * s.z0 / K.focal_px, s.z0};
        const Vec3 p1 = p0 + Vec3{r.wind_speed, -kTerminalVelocity, 0.0} * exposure;
        const double pu = K.cx + K.focal_px * p1.x / p1.z - s.u0;
        const double pv = K.cy - K.focal_px * p1.y / p1.z - s.v0;
        const double plen = std::hypot(pu, pv);
        eu += pu / plen;
        ev += pv / plen;
    }
    const double angle = std::acos(std::clamp((su * eu + sv * ev) / (std::hypot(su, sv) * std::hypot(eu, ev)), -1.0, 1.0));
    EXPECT_LE(angle * 180.0 / std::numbers::pi, 15.0);
    EXPECT_GT(su, 0.0);  // wind along +x pushes streaks to the right
}

TEST(Rain, WhiteBalanceTreatsBothHalvesAlike) {
    const SceneBundle scene = small_street(2);
    RainParams r;
    r.rain_intensity = 0.0;
    r.curtain_density = 0.0;
    const PairedClip p = apply_white_balance(simulate_rain(scene, r, CameraParams{}, RainSeed{1}), 4000.0);
    EXPECT_EQ(p.rainy, p.clean);
    EXPECT_NE(p.clean, scene.clean);
    const PairedClip neutral = apply_white_balance(PairedClip(scene.clean, scene.clean), 6500.0);
    for (std::size_t i = 0; i < scene.clean[0].samples().size(); ++i) {
        EXPECT_NEAR(neutral.clean[0].samples()[i], scene.clean[0].samples()[i], 1e-6);
    }
}

TEST(Rain, RejectsInvalidInputs) {
    const SceneBundle scene = small_street(1);
    RainParams r;
    r.motion_blur = 2.0;
    EXPECT_THROW(simulate_rain(scene, r, CameraParams{}, RainSeed{1}), ValidationError);
    CameraParams c;
    c.focal_length = 200.0;
    EXPECT_THROW(simulate_rain(scene, RainParams{}, c, RainSeed{1}), ValidationError);
}
