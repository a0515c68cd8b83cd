#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <openssl/evp.h>
#include <fmt/format.h>

#include <cmath>
#include <cstdlib>

#include "nightbench/core/error.hpp"
#include "nightbench/judge/backend.hpp"
#include "nightbench/judge/manifest.hpp"
#include "nightbench/metrics/metrics.hpp"
#include "nightbench/video/clip.hpp"
#include "nightbench/video/clip_io.hpp"
#include "json.hpp"

namespace nightbench::judge {

namespace {

constexpr int kMinAfdSide = 44;

const Frame& frame_of(const LoadedImage& img) { return std::get<Frame>(img.pixels); }

// Frames too small for the perceptual pyramid fall back to the mean
// difference-map energy, which already lies in [0, 1].
double normalized_flicker(const std::vector<Frame>& outputs) {
    const Frame& f = outputs.front();
    if (f.height() >= kMinAfdSide && f.width() >= kMinAfdSide) {
        return std::min(1.0, afd(Clip(outputs), default_perceptual(), 1) / 25.0);
    }
    double energy = 0.0;
    for (std::size_t i = 0; i + 1 < outputs.size(); ++i) {
        const GrayImage d = diff_map(outputs[i], outputs[i + 1]);
        double sum = 0.0;
        for (float v : d.samples()) sum += v;
        energy += sum / static_cast<double>(d.pixel_count());
    }
    return std::min(1.0, energy / static_cast<double>(outputs.size() - 1));
}

nlohmann::json mock_entry(MockPolicy policy, const ReferenceLookup& references, const BatchEntry& entry) {
    const EvaluationItem& item = *entry.item;
    nlohmann::json out{{"item_index", entry.item_index}};
    if (item.protocol == Protocol::temporal) {
        int rating = 3;
        if (policy == MockPolicy::reference_psnr) {
            std::vector<Frame> outputs;
            for (const LoadedImage& img : entry.images) {
                if (img.role == ImageRole::candidate) outputs.push_back(frame_of(img));
            }
            rating = 5 - static_cast<int>(std::floor(4.0 * normalized_flicker(outputs)));
        }
        out["justification"] = fmt::format("Mock rating {} from inter-frame differences.", rating);
        out["choice"] = rating;
        return out;
    }

    std::string first_letter;
    for (const LoadedImage& img : entry.images) {
        if (img.role == ImageRole::candidate && (first_letter.empty() || img.label < first_letter)) first_letter = img.label;
    }
    std::optional<Frame> reference;
    if (policy == MockPolicy::reference_psnr && references) reference = references(item.video_id, item.frame_index);
    if (!reference) {
        out["justification"] = "Mock judge picks the first candidate.";
        out["choice"] = first_letter;
        return out;
    }
    std::string best;
    double best_psnr = -INFINITY;
    bool tied = false;
    for (const LoadedImage& img : entry.images) {
        if (img.role != ImageRole::candidate) continue;
        const double p = psnr(frame_of(img), *reference);
        if (p > best_psnr || best.empty()) {
            best_psnr = p;
            best = img.label;
            tied = false;
        } else if (p == best_psnr) {
            tied = true;
        }
    }
    if (tied && item.protocol == Protocol::pairwise) {
        out["justification"] = "Both candidates match the reference equally.";
        out["choice"] = "tie";
    } else {
        out["justification"] = fmt::format("Candidate {} is closest to the reference.", best);
        out["choice"] = best;
    }
    return out;
}

void split_url(const std::string& url, std::string& origin, std::string& path) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ValidationError("judge URL '" + url + "' needs an http:// or https:// scheme");
    const auto slash = url.find('/', scheme + 3);
    origin = slash == std::string::npos ? url : url.substr(0, slash);
    path = slash == std::string::npos ? "/" : url.substr(slash);
}

}  // namespace

MockPolicy parse_mock_policy(const std::string& name) {
    if (name == "always-first" || name == "always_first") return MockPolicy::always_first;
    if (name == "reference-psnr" || name == "reference_psnr") return MockPolicy::reference_psnr;
    throw ValidationError("unknown mock policy '" + name + "' (expected always-first or reference-psnr)");
}

ReferenceLookup manifest_references(const Manifest& manifest) {
    std::map<std::string, std::filesystem::path> dirs;
    for (const VideoEntry& v : manifest.videos) {
        if (v.reference_dir) dirs[v.id] = *v.reference_dir;
    }
    return [dirs](const std::string& video, std::size_t index) -> std::optional<Frame> {
        auto it = dirs.find(video);
        if (it == dirs.end()) return std::nullopt;
        return load_clip_frame(it->second, index);
    };
}

MockBackend::MockBackend(MockPolicy policy, ReferenceLookup references, std::size_t concurrency)
    : policy_(policy), references_(std::move(references)), concurrency_(concurrency) {
    if (concurrency_ == 0) throw ValidationError("mock concurrency must be >= 1");
}

std::string MockBackend::submit(const std::string&, const std::vector<BatchEntry>& batch) const {
    nlohmann::json out = nlohmann::json::array();
    for (const BatchEntry& entry : batch) out.push_back(mock_entry(policy_, references_, entry));
    return out.dump();
}

std::string base64_encode(const std::vector<unsigned char>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

HttpBackend::HttpBackend(HttpOptions options) : options_(std::move(options)) {
    if (options_.url.empty()) throw ValidationError("HTTP judge needs a URL");
    if (options_.concurrency == 0) throw ValidationError("HTTP concurrency must be >= 1");
    const char* key = std::getenv(kApiKeyEnv);
    if (key == nullptr || *key == '\0') throw ValidationError(fmt::format("environment variable {} is not set", kApiKeyEnv));
    api_key_ = key;
    std::string origin, path;
    split_url(options_.url, origin, path);
}

std::string HttpBackend::request_body(const std::string& model, const std::string& prompt, const std::vector<BatchEntry>& batch) {
    nlohmann::json images = nlohmann::json::array();
    for (const BatchEntry& entry : batch) {
        for (const LoadedImage& img : entry.images) {
            const PngImage png = std::visit([](const auto& px) { return to_png(px); }, img.pixels);
            nlohmann::json e{{"item_index", entry.item_index}, {"role", to_string(img.role)}, {"png_base64", base64_encode(encode_png(png))}};
            if (!img.label.empty()) e["label"] = img.label;
            images.push_back(std::move(e));
        }
    }
    return nlohmann::json{{"model", model}, {"prompt", prompt}, {"images", images}}.dump();
}

std::string HttpBackend::submit(const std::string& prompt, const std::vector<BatchEntry>& batch) const {
    std::string origin, path;
    split_url(options_.url, origin, path);
    httplib::Client client(origin);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    client.set_bearer_token_auth(api_key_);
    auto res = client.Post(path, request_body(options_.model, prompt, batch), "application/json");
    if (!res) throw TransportError(fmt::format("request to {} failed: {}", options_.url, httplib::to_string(res.error())));
    if (res->status < 200 || res->status >= 300) {
        throw TransportError(fmt::format("judge service returned HTTP {}: {}", res->status, res->body.substr(0, 200)));
    }
    return res->body;
}

}  // namespace nightbench::judge
