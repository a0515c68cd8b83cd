#include "nightbench/synth/params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nightbench/core/error.hpp"
#include "nightbench/core/rng.hpp"

namespace nightbench {

namespace {

void require_range(double v, double lo, double hi, const char* name) {
    if (!(v >= lo && v <= hi)) {
        throw ValidationError(std::string(name) + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite and >= 0");
}

}  // namespace

void RainParams::validate() const {
    require_nonnegative(rain_intensity, "rain_intensity");
    require_range(curtain_density, 0.0, 1.0, "curtain_density");
    require_range(gust_amount, 0.0, 1.0, "gust_amount");
    require_nonnegative(wind_speed, "wind_speed");
    if (!std::isfinite(wind_direction)) throw ValidationError("wind_direction must be finite");
    require_range(motion_blur, 0.0, 1.0, "motion_blur");
    require_range(glimmer_intensity, 0.0, 1.0, "glimmer_intensity");
}

void CameraParams::validate() const {
    require_range(aperture, ParamRanges::aperture_min, ParamRanges::aperture_max, "aperture");
    require_range(focal_length, ParamRanges::focal_min, ParamRanges::focal_max, "focal_length");
    require_range(white_balance, ParamRanges::kelvin_min, ParamRanges::kelvin_max, "white_balance");
}

std::pair<RainParams, CameraParams> sample_params(RainSeed seed) {
    CounterRng rng(seed.value, Stream::params);
    RainParams rain;
    rain.rain_intensity = rng.uniform(ParamRanges::rain_intensity_min, ParamRanges::rain_intensity_max);
    rain.curtain_density = rng.uniform();
    rain.gust_amount = rng.uniform();
    rain.wind_speed = rng.uniform(0.0, ParamRanges::wind_speed_max);
    rain.wind_direction = rng.uniform(0.0, 2.0 * std::numbers::pi);
    rain.motion_blur = rng.uniform();
    rain.glimmer_intensity = rng.uniform();

    CameraParams cam;
    cam.aperture = rng.uniform(ParamRanges::aperture_min, ParamRanges::aperture_max);
    cam.focal_length = rng.uniform(ParamRanges::focal_min, ParamRanges::focal_max);
    cam.white_balance = rng.uniform(ParamRanges::kelvin_min, ParamRanges::kelvin_max);
    return {rain, cam};
}

void to_json(nlohmann::json& j, const RainParams& p) {
    j = {{"rain_intensity", p.rain_intensity}, {"curtain_density", p.curtain_density}, {"gust_amount", p.gust_amount},
         {"wind_speed", p.wind_speed},         {"wind_direction", p.wind_direction},   {"motion_blur", p.motion_blur},
         {"glimmer_intensity", p.glimmer_intensity}};
}

void from_json(const nlohmann::json& j, RainParams& p) {
    p.rain_intensity = j.value("rain_intensity", p.rain_intensity);
    p.curtain_density = j.value("curtain_density", p.curtain_density);
    p.gust_amount = j.value("gust_amount", p.gust_amount);
    p.wind_speed = j.value("wind_speed", p.wind_speed);
    p.wind_direction = j.value("wind_direction", p.wind_direction);
    p.motion_blur = j.value("motion_blur", p.motion_blur);
    p.glimmer_intensity = j.value("glimmer_intensity", p.glimmer_intensity);
    p.validate();
}

void to_json(nlohmann::json& j, const CameraParams& p) {
    j = {{"aperture", p.aperture}, {"focal_length", p.focal_length}, {"white_balance", p.white_balance}};
}

void from_json(const nlohmann::json& j, CameraParams& p) {
    p.aperture = j.value("aperture", p.aperture);
    p.focal_length = j.value("focal_length", p.focal_length);
    p.white_balance = j.value("white_balance", p.white_balance);
    p.validate();
}

}  // namespace nightbench
