#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "nightbench/metrics/metrics.hpp"

namespace nightbench {

/// PSNR values above this are clamped when averaged across clips/methods.
inline constexpr double kPsnrAggregateCap = 100.0;

struct FrameMetrics {
    std::size_t index = 0;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

struct MetricReport {
    double psnr_db = 0.0;  // may be +infinity
    double ssim = 0.0;
    std::optional<double> afd;  // x100, of the prediction clip
    std::vector<FrameMetrics> per_frame;
};

struct MetricOptions {
    bool per_frame = false;
    std::optional<PerceptualBackend> afd_backend;
    unsigned workers = 0;
};

MetricReport evaluate_clip(const Clip& pred, const Clip& gt, const MetricOptions& options = {});

/// Decibel value as JSON: a number, or the string "inf" for +infinity.
nlohmann::json db_to_json(double db);
double db_from_json(const nlohmann::json& j);
double cap_db(double db);

void to_json(nlohmann::json& j, const MetricReport& r);

}  // namespace nightbench
