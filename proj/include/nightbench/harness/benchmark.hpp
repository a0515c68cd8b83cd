#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nightbench/judge/cost.hpp"
#include "nightbench/judge/items.hpp"
#include "nightbench/video/image.hpp"
#include "nightbench/video/split.hpp"

namespace nightbench::harness {

/// A derainer under evaluation: one of the built-in reference derainers, or a
/// directory of precomputed predictions with one subdirectory per clip.
struct DerainerSpec {
    enum class Kind { passthrough, temporal_median, predictions };
    std::string name;
    Kind kind = Kind::passthrough;
    std::size_t window = 5;
    std::filesystem::path predictions;
};

struct MetricToggles {
    bool psnr = true;
    bool ssim = true;
    bool afd = true;
};

/// Optional judge run over a separate manifest (the real-video track).
struct JudgeStage {
    std::filesystem::path manifest;
    judge::Protocol protocol = judge::Protocol::pairwise;
    /// Method keys from the manifest; empty selects all.
    std::vector<std::string> methods;
    std::string backend = "mock";
    std::string mock_policy = "reference-psnr";
    std::string url;
    std::string model;
    std::size_t clip_length = 90;
    std::size_t batch_size = 4;
    std::size_t workers = 4;
    judge::CostModel cost;
};

struct BenchmarkConfig {
    /// One subdirectory of numbered frames per sequence.
    std::filesystem::path rainy;
    /// Matching clean sequences; without them only AFD is reported.
    std::optional<std::filesystem::path> clean;
    /// Restricts evaluation to the test clips of every sequence.
    std::optional<SplitSpec> split;
    std::vector<DerainerSpec> methods;
    MetricToggles metrics;
    std::optional<JudgeStage> judge;
    std::uint64_t seed = 0;
    std::filesystem::path output;
    unsigned workers = 0;

    /// Checks that every referenced input path exists. Prediction
    /// directories are exempt: a missing one is reported as a failure.
    void validate() const;
};

/// Relative paths resolve against `base`.
BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
BenchmarkConfig load_benchmark_config(const std::filesystem::path& path);
nlohmann::json to_json(const BenchmarkConfig& config);

/// Keys whose values change between identical runs.
inline constexpr const char* kVolatileKeys[] = {"timestamp", "timing"};

/// Evaluates every method on every clip. The report holds the config echo,
/// dataset stats, per-method per-clip rows and aggregates (methods by name,
/// clips in order), failures, the judge stage and its cost estimate, a
/// timestamp and per-method seconds per frame under "timing".
nlohmann::json run_benchmark(const BenchmarkConfig& config);

/// run_benchmark, then writes the report to config.output (if set).
nlohmann::json run_benchmark_to_file(const BenchmarkConfig& config);

/// Method x {PSNR, SSIM, AFD} text table from a report.
std::string render_benchmark_table(const nlohmann::json& report);

struct SyntheticDatasetOptions {
    std::size_t clips = 3;
    std::size_t frames = 12;
    Dims dims{96, 160};
    std::uint64_t seed = 0;
};

/// Writes seeded rain-synth sequences to root/rainy/<id> and root/clean/<id>,
/// with the sampled parameters in root/params.json. Returns the clip ids.
std::vector<std::string> write_synthetic_dataset(const std::filesystem::path& root, const SyntheticDatasetOptions& options);

}  // namespace nightbench::harness
