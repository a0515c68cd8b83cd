#include "nightbench/judge/dispatch.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <map>
#include <numeric>
#include <thread>

#include "nightbench/core/error.hpp"
#include "nightbench/core/parallel.hpp"
#include "nightbench/core/rng.hpp"
#include "nightbench/metrics/metrics.hpp"
#include "nightbench/video/clip_io.hpp"

namespace nightbench::judge {

namespace {

using Pending = std::vector<std::size_t>;

// A numeric rating may arrive as an int, an integral double or a string.
std::optional<int> parse_rating(const nlohmann::json& v) {
    long value = 0;
    if (v.is_number_integer()) {
        value = v.get<long>();
    } else if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d != static_cast<double>(static_cast<long>(d))) return std::nullopt;
        value = static_cast<long>(d);
    } else if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.empty()) return std::nullopt;
        char* end = nullptr;
        errno = 0;
        value = std::strtol(s.c_str(), &end, 10);
        if (errno != 0 || *end != '\0') return std::nullopt;
    } else {
        return std::nullopt;
    }
    if (value < 1 || value > 5) return std::nullopt;
    return static_cast<int>(value);
}

// Tolerates prose or code fences around the array.
nlohmann::json extract_array(const std::string& raw) {
    const auto open = raw.find('[');
    const auto close = raw.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) throw ValidationError("response holds no JSON array");
    return nlohmann::json::parse(raw.substr(open, close - open + 1));
}

std::string entry_error(const nlohmann::json& e, const EvaluationItem& item, Verdict& v) {
    if (!e.contains("choice")) return "missing choice";
    const nlohmann::json& choice = e["choice"];
    if (e.contains("justification") && e["justification"].is_string()) v.justification = e["justification"].get<std::string>();
    if (item.protocol == Protocol::temporal) {
        const auto rating = parse_rating(choice);
        if (!rating) return fmt::format("rating {} is not an integer in 1..5", choice.dump());
        v.rating = rating;
        v.choice = std::to_string(*rating);
        v.resolved_method = item.labels.begin()->second;
        return {};
    }
    if (!choice.is_string()) return fmt::format("choice {} is not a label", choice.dump());
    std::string c = choice.get<std::string>();
    if (item.protocol == Protocol::pairwise) {
        std::string lower = c;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        if (lower == "tie") {
            v.choice = "tie";
            return {};
        }
    }
    if (c.size() == 1) c[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(c[0])));
    auto it = item.labels.find(c);
    if (it == item.labels.end()) return fmt::format("choice '{}' is not a candidate label", choice.get<std::string>());
    v.choice = c;
    v.resolved_method = it->second;
    return {};
}

struct BatchOutcome {
    std::vector<Verdict> verdicts;
    std::vector<DispatchFailure> failures;
    std::size_t first_images = 0;
};

}  // namespace

const char* to_string(DispatchFailure::Kind k) {
    switch (k) {
        case DispatchFailure::Kind::transport: return "transport";
        case DispatchFailure::Kind::parse: return "parse";
        case DispatchFailure::Kind::image: return "image";
    }
    return "?";
}

std::vector<std::vector<std::size_t>> plan_batches(std::size_t item_count, std::size_t batch_size, std::uint64_t seed) {
    if (batch_size == 0) throw ValidationError("batch size must be >= 1");
    std::vector<std::size_t> order(item_count);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(seed, Stream::batches, 0);
    for (std::size_t i = item_count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t i = 0; i < item_count; i += batch_size) {
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                             order.begin() + static_cast<std::ptrdiff_t>(std::min(item_count, i + batch_size)));
    }
    return batches;
}

std::vector<LoadedImage> load_images(const EvaluationItem& item) {
    std::vector<LoadedImage> out;
    out.reserve(item.images.size());
    for (const ImageRef& ref : item.images) {
        if (const auto* f = std::get_if<FrameRef>(&ref.source)) {
            out.push_back(LoadedImage{ref.role, ref.label, load_clip_frame(f->directory, f->index)});
        } else {
            const auto& d = std::get<DiffRef>(ref.source);
            out.push_back(LoadedImage{ref.role, ref.label,
                                      diff_map(load_clip_frame(d.directory, d.first), load_clip_frame(d.directory, d.second), d.gain)});
        }
    }
    return out;
}

ParsedBatch parse_response(const std::string& raw, const std::vector<BatchEntry>& batch) {
    ParsedBatch out;
    nlohmann::json array;
    try {
        array = extract_array(raw);
    } catch (const std::exception& e) {
        for (const BatchEntry& b : batch) out.errors.emplace_back(b.item_index, fmt::format("unparseable response: {}", e.what()));
        return out;
    }
    std::map<std::size_t, const nlohmann::json*> by_index;
    for (const nlohmann::json& e : array) {
        if (!e.is_object() || !e.contains("item_index") || !e["item_index"].is_number_integer()) continue;
        const auto idx = e["item_index"].get<long long>();
        if (idx < 0) continue;
        by_index.emplace(static_cast<std::size_t>(idx), &e);
    }
    for (const BatchEntry& b : batch) {
        auto it = by_index.find(b.item_index);
        if (it == by_index.end()) {
            out.errors.emplace_back(b.item_index, "no entry for item");
            continue;
        }
        const EvaluationItem& item = *b.item;
        Verdict v;
        v.item_index = b.item_index;
        v.protocol = item.protocol;
        v.video_id = item.video_id;
        v.frame_index = item.frame_index;
        v.dataset = item.dataset;
        const std::string err = entry_error(*it->second, item, v);
        if (!err.empty()) {
            out.errors.emplace_back(b.item_index, err);
        } else {
            out.verdicts.push_back(std::move(v));
        }
    }
    return out;
}

DispatchResult dispatch(const std::vector<EvaluationItem>& items, const JudgeBackend& backend, const DispatchOptions& options) {
    DispatchResult result;
    if (items.empty()) return result;
    const Protocol protocol = items.front().protocol;
    for (const EvaluationItem& item : items) {
        if (item.protocol != protocol) throw ValidationError("one dispatch run takes items of a single protocol");
        item.validate();
    }
    if (options.workers == 0) throw ValidationError("workers must be >= 1");
    const std::string prompt = render_prompt(options.prompts.for_protocol(protocol), protocol, protocol == Protocol::pairwise);

    result.batches = plan_batches(items.size(), options.batch_size, options.seed);
    std::vector<BatchOutcome> outcomes(result.batches.size());
    const std::size_t workers = std::min({options.workers, std::max<std::size_t>(1, backend.max_concurrency()), kMaxWorkers});

    parallel_for(
        result.batches.size(),
        [&](std::size_t b) {
            BatchOutcome& out = outcomes[b];
            std::vector<BatchEntry> entries;
            for (std::size_t idx : result.batches[b]) {
                try {
                    entries.push_back(BatchEntry{idx, &items[idx], load_images(items[idx])});
                    out.first_images += entries.back().images.size();
                } catch (const std::exception& e) {
                    out.failures.push_back({idx, DispatchFailure::Kind::image, e.what()});
                }
            }
            for (int attempt = 0; attempt < 2 && !entries.empty(); ++attempt) {
                if (attempt > 0) std::this_thread::sleep_for(options.retry_backoff);
                std::map<std::size_t, DispatchFailure> failed;
                try {
                    const ParsedBatch parsed = parse_response(backend.submit(prompt, entries), entries);
                    out.verdicts.insert(out.verdicts.end(), parsed.verdicts.begin(), parsed.verdicts.end());
                    for (const auto& [idx, msg] : parsed.errors) failed[idx] = {idx, DispatchFailure::Kind::parse, msg};
                } catch (const std::exception& e) {
                    for (const BatchEntry& en : entries) failed[en.item_index] = {en.item_index, DispatchFailure::Kind::transport, e.what()};
                }
                std::vector<BatchEntry> retry;
                for (BatchEntry& en : entries) {
                    if (failed.count(en.item_index)) retry.push_back(std::move(en));
                }
                entries = std::move(retry);
                if (attempt == 1) {
                    for (auto& [idx, f] : failed) out.failures.push_back(std::move(f));
                }
            }
        },
        static_cast<unsigned>(workers));

    for (BatchOutcome& o : outcomes) {
        result.batch_images.push_back(o.first_images);
        result.verdicts.insert(result.verdicts.end(), o.verdicts.begin(), o.verdicts.end());
        result.failures.insert(result.failures.end(), o.failures.begin(), o.failures.end());
    }
    std::sort(result.verdicts.begin(), result.verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.item_index < b.item_index; });
    std::sort(result.failures.begin(), result.failures.end(),
              [](const DispatchFailure& a, const DispatchFailure& b) { return a.item_index < b.item_index; });
    return result;
}

nlohmann::json to_json(const Verdict& v) {
    nlohmann::json j{{"item_index", v.item_index},         {"protocol", to_string(v.protocol)}, {"video_id", v.video_id},
                     {"frame_index", v.frame_index},       {"choice", v.choice},                {"justification", v.justification},
                     {"resolved_method", v.resolved_method}};
    if (v.rating) j["rating"] = *v.rating;
    if (!v.dataset.empty()) j["dataset"] = v.dataset;
    return j;
}

nlohmann::json to_json(const DispatchFailure& f) {
    return {{"item_index", f.item_index}, {"kind", to_string(f.kind)}, {"message", f.message}};
}

}  // namespace nightbench::judge
