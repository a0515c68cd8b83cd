#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nightbench::harness {

/// One method's training schedule on the benchmark dataset.
struct TrainingSchedule {
    std::string method;
    std::uint64_t size_per_epoch = 0;  // samples
    std::uint64_t epochs = 0;
    std::uint64_t batch = 1;  // samples per gradient step
    /// Iteration-based schedules skip the formula.
    std::optional<std::uint64_t> fixed_iterations;
};

/// floor(size_per_epoch * epochs / batch), or the fixed count.
std::uint64_t match_iterations(const TrainingSchedule& schedule);

/// Three significant figures with a K/M suffix: 79712 -> "79.7K", 375000 -> "375K".
std::string format_iterations(std::uint64_t iterations);

/// Schedules of the compared methods on the 600K-frame dataset.
std::vector<TrainingSchedule> benchmark_schedules();

}  // namespace nightbench::harness
