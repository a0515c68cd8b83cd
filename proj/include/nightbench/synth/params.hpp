#pragma once

#include <cstdint>
#include <utility>

#include "json.hpp"

namespace nightbench {

struct RainSeed {
    std::uint64_t value = 0;
};

/// Weather dynamics and streak optics.
struct RainParams {
    double rain_intensity = 0.2;     // particles per cubic meter, >= 0
    double curtain_density = 0.5;    // [0, 1]
    double gust_amount = 0.3;        // [0, 1]
    double wind_speed = 3.0;         // m/s, >= 0
    double wind_direction = 0.0;     // azimuth in radians, 0 = +x
    double motion_blur = 0.3;        // [0, 1]
    double glimmer_intensity = 0.5;  // [0, 1]

    void validate() const;
};

/// Cinematography knobs.
struct CameraParams {
    double aperture = 4.0;          // f-number in [2.8, 5.6]
    double focal_length = 24.0;     // mm in [8, 120]
    double white_balance = 5000.0;  // Kelvin in [3500, 6000]

    void validate() const;
};

/// Ranges used by sample_params. Fields with an open-ended contract
/// (intensity, wind speed) are sampled from these declared desk-scale bounds.
struct ParamRanges {
    static constexpr double rain_intensity_min = 0.05;
    static constexpr double rain_intensity_max = 0.35;
    static constexpr double wind_speed_max = 10.0;
    static constexpr double aperture_min = 2.8;
    static constexpr double aperture_max = 5.6;
    static constexpr double focal_min = 8.0;
    static constexpr double focal_max = 120.0;
    static constexpr double kelvin_min = 3500.0;
    static constexpr double kelvin_max = 6000.0;
};

std::pair<RainParams, CameraParams> sample_params(RainSeed seed);

void to_json(nlohmann::json& j, const RainParams& p);
void from_json(const nlohmann::json& j, RainParams& p);
void to_json(nlohmann::json& j, const CameraParams& p);
void from_json(const nlohmann::json& j, CameraParams& p);

}  // namespace nightbench
