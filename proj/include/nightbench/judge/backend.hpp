#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nightbench/judge/items.hpp"
#include "nightbench/video/image.hpp"

namespace nightbench::judge {

/// Network or service failure while submitting a batch.
class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

struct LoadedImage {
    ImageRole role = ImageRole::input;
    std::string label;
    std::variant<Frame, GrayImage> pixels;
};

/// One item inside a submitted batch, with its images already loaded.
struct BatchEntry {
    std::size_t item_index = 0;
    const EvaluationItem* item = nullptr;
    std::vector<LoadedImage> images;
};

/// A judging service. submit may be called concurrently from several
/// workers and returns the raw response text.
class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    virtual std::string name() const = 0;
    virtual std::size_t max_concurrency() const = 0;
    /// Throws TransportError when the service cannot be reached.
    virtual std::string submit(const std::string& prompt, const std::vector<BatchEntry>& batch) const = 0;
};

enum class MockPolicy {
    /// Always answers the first letter (rating 3 for temporal items).
    always_first,
    /// Highest PSNR against the video's reference frame wins; equal PSNR is
    /// a tie in pairwise items. Falls back to the first letter without a
    /// reference. Temporal rating = 5 - floor(4 * min(1, AFD / 25)).
    reference_psnr,
};

MockPolicy parse_mock_policy(const std::string& name);

/// Returns the reference frame for (video id, frame index), if any.
using ReferenceLookup = std::function<std::optional<Frame>(const std::string&, std::size_t)>;

/// Reference lookup over the manifest's reference directories.
ReferenceLookup manifest_references(const Manifest& manifest);

/// Deterministic offline judge answering with the wire-contract JSON.
class MockBackend final : public JudgeBackend {
public:
    explicit MockBackend(MockPolicy policy, ReferenceLookup references = {}, std::size_t concurrency = 4);

    std::string name() const override { return "mock"; }
    std::size_t max_concurrency() const override { return concurrency_; }
    std::string submit(const std::string& prompt, const std::vector<BatchEntry>& batch) const override;

private:
    MockPolicy policy_;
    ReferenceLookup references_;
    std::size_t concurrency_;
};

/// Environment variable holding the bearer token for HttpBackend.
inline constexpr const char* kApiKeyEnv = "NIGHTBENCH_JUDGE_API_KEY";

struct HttpOptions {
    std::string url;  // e.g. "https://judge.example.com/v1/evaluate"
    std::string model;
    std::chrono::seconds timeout{120};
    std::size_t concurrency = 4;
};

/// POSTs {model, prompt, images: [{item_index, role, label, png_base64}]}
/// and returns the response body. Non-2xx statuses are TransportErrors.
class HttpBackend final : public JudgeBackend {
public:
    explicit HttpBackend(HttpOptions options);

    std::string name() const override { return "http"; }
    std::size_t max_concurrency() const override { return options_.concurrency; }
    std::string submit(const std::string& prompt, const std::vector<BatchEntry>& batch) const override;

    /// Request body for a batch, exposed for inspection.
    static std::string request_body(const std::string& model, const std::string& prompt, const std::vector<BatchEntry>& batch);

private:
    HttpOptions options_;
    std::string api_key_;
};

std::string base64_encode(const std::vector<unsigned char>& bytes);

}  // namespace nightbench::judge
