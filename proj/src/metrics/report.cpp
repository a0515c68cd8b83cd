#include "nightbench/metrics/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nightbench/core/error.hpp"
#include "nightbench/core/parallel.hpp"

namespace nightbench {

MetricReport evaluate_clip(const Clip& pred, const Clip& gt, const MetricOptions& options) {
    MetricReport report;
    report.psnr_db = psnr(pred, gt, options.workers);
    report.ssim = ssim(pred, gt, options.workers);
    if (options.afd_backend && pred.size() >= 2) report.afd = afd(pred, *options.afd_backend, options.workers);
    if (options.per_frame) {
        report.per_frame.resize(pred.size());
        parallel_for(
            pred.size(),
            [&](std::size_t i) {
                report.per_frame[i] = FrameMetrics{i, psnr(pred[i], gt[i]), ssim(pred[i], gt[i])};
            },
            options.workers);
    }
    return report;
}

nlohmann::json db_to_json(double db) {
    if (std::isinf(db) && db > 0) return "inf";
    return db;
}

double db_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw ValidationError("decibel value must be a number or \"inf\"");
    }
    return j.get<double>();
}

double cap_db(double db) { return std::min(db, kPsnrAggregateCap); }

void to_json(nlohmann::json& j, const MetricReport& r) {
    j = nlohmann::json{{"psnr_db", db_to_json(r.psnr_db)}, {"ssim", r.ssim}};
    j["afd"] = r.afd ? nlohmann::json(*r.afd) : nlohmann::json(nullptr);
    if (!r.per_frame.empty()) {
        nlohmann::json frames = nlohmann::json::array();
        for (const auto& f : r.per_frame) frames.push_back({{"index", f.index}, {"psnr_db", db_to_json(f.psnr_db)}, {"ssim", f.ssim}});
        j["per_frame"] = std::move(frames);
    }
}

}  // namespace nightbench
