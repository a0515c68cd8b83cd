#include "nightbench/harness/iterations.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "nightbench/core/error.hpp"

namespace nightbench::harness {

std::uint64_t match_iterations(const TrainingSchedule& s) {
    if (s.fixed_iterations) return *s.fixed_iterations;
    if (s.batch == 0) throw ValidationError(fmt::format("{}: batch must be >= 1", s.method));
    if (s.size_per_epoch == 0 || s.epochs == 0) throw ValidationError(fmt::format("{}: size per epoch and epochs must be positive", s.method));
    if (s.epochs > std::numeric_limits<std::uint64_t>::max() / s.size_per_epoch) {
        throw ValidationError(fmt::format("{}: sample count overflows", s.method));
    }
    return s.size_per_epoch * s.epochs / s.batch;
}

std::string format_iterations(std::uint64_t n) {
    if (n < 1000) return std::to_string(n);
    const bool mega = n >= 999500;
    const double scaled = static_cast<double>(n) / (mega ? 1e6 : 1e3);
    const char* suffix = mega ? "M" : "K";
    const int digits = static_cast<int>(std::floor(std::log10(scaled))) + 1;
    const int decimals = std::max(0, 3 - digits);
    std::string text = fmt::format("{:.{}f}", scaled, decimals);
    // Rounding can carry into a new digit, e.g. 99.96 -> "100.0".
    if (text.find('.') != std::string::npos && text.size() > 4) text = fmt::format("{:.{}f}", scaled, decimals - 1);
    return text + suffix;
}

std::vector<TrainingSchedule> benchmark_schedules() {
    return {
        {"ESTINet", 99640, 4, 5, std::nullopt},
        {"RDD-Net", 71171, 36, 8, std::nullopt},
        {"RLP", 498201, 3, 20, std::nullopt},
        {"Turtle", 99640, 0, 1, 200000},
        {"UConNet", 40000, 150, 16, std::nullopt},
        // The published count divides by the per-step batch of 5, not the
        // 80 effective samples.
        {"WeatherDiff", 498201, 7, 5, std::nullopt},
        {"NightRain", 100000, 0, 8, 200000},
    };
}

}  // namespace nightbench::harness
