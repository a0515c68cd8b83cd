#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nightbench/judge/backend.hpp"
#include "nightbench/judge/prompts.hpp"

namespace nightbench::judge {

struct Verdict {
    std::size_t item_index = 0;
    Protocol protocol = Protocol::pairwise;
    std::string video_id;
    std::size_t frame_index = 0;
    /// Letter, "tie", or the rating as text.
    std::string choice;
    std::optional<int> rating;
    std::string justification;
    /// Method key behind the chosen letter (the rated method for temporal
    /// items); empty for ties.
    std::string resolved_method;
    std::string dataset;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct DispatchFailure {
    enum class Kind { transport, parse, image };
    std::size_t item_index = 0;
    Kind kind = Kind::transport;
    std::string message;
};

const char* to_string(DispatchFailure::Kind k);

struct DispatchOptions {
    std::size_t batch_size = 4;
    std::size_t workers = 4;
    std::uint64_t seed = 0;
    std::chrono::milliseconds retry_backoff{1000};
    PromptSet prompts;
};

struct DispatchResult {
    /// Sorted by item index.
    std::vector<Verdict> verdicts;
    std::vector<DispatchFailure> failures;
    /// Items per batch in submission order.
    std::vector<std::vector<std::size_t>> batches;
    /// Images sent in each batch's first attempt.
    std::vector<std::size_t> batch_images;
};

/// Cap on concurrent batches regardless of configuration.
inline constexpr std::size_t kMaxWorkers = 4;

/// Shuffled fixed-size batches of item indices, deterministic in the seed.
std::vector<std::vector<std::size_t>> plan_batches(std::size_t item_count, std::size_t batch_size, std::uint64_t seed);

/// Parses a wire-contract response for the given batch. Entries that are
/// missing or invalid for their protocol are returned as error strings.
struct ParsedBatch {
    std::vector<Verdict> verdicts;
    std::vector<std::pair<std::size_t, std::string>> errors;
};
ParsedBatch parse_response(const std::string& raw, const std::vector<BatchEntry>& batch);

/// Loads an item's images (frames from disk, difference maps computed).
std::vector<LoadedImage> load_images(const EvaluationItem& item);

/// Evaluates every item once: items are shuffled into batches, batches run on
/// min(workers, backend concurrency, 4) threads, and items that fail are
/// retried once after the backoff before being recorded as failures.
DispatchResult dispatch(const std::vector<EvaluationItem>& items, const JudgeBackend& backend, const DispatchOptions& options = {});

nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const DispatchFailure& f);

}  // namespace nightbench::judge
