#include "nightbench/judge/items.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "nightbench/core/error.hpp"
#include "nightbench/core/rng.hpp"

namespace nightbench::judge {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kTemporalFrames = 4;

void require_output(const VideoEntry& video, const MethodEntry& method) {
    std::error_code ec;
    if (!fs::is_directory(method.output_dir(video.id), ec)) {
        throw ValidationError(fmt::format("missing output of method '{}' for video '{}' (expected {})", method.key(), video.id,
                                          method.output_dir(video.id).string()));
    }
}

ImageRef frame_image(ImageRole role, const fs::path& dir, std::size_t index, std::string label = {}) {
    return ImageRef{role, FrameRef{dir, index}, std::move(label)};
}

// Candidates are listed in letter order so image position never reveals the method.
void add_candidates(EvaluationItem& item, const VideoEntry& video, const std::vector<const MethodEntry*>& methods,
                    const std::vector<std::string>& letters) {
    std::vector<std::size_t> order(methods.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return letters[a] < letters[b]; });
    for (std::size_t m : order) {
        item.images.push_back(frame_image(ImageRole::candidate, methods[m]->output_dir(video.id), item.frame_index, letters[m]));
        item.labels[letters[m]] = methods[m]->key();
    }
}

}  // namespace

const char* to_string(Protocol p) {
    switch (p) {
        case Protocol::pairwise: return "pairwise";
        case Protocol::multiway: return "multiway";
        case Protocol::temporal: return "temporal";
    }
    return "?";
}

const char* to_string(ImageRole r) {
    switch (r) {
        case ImageRole::input: return "input";
        case ImageRole::candidate: return "candidate";
        case ImageRole::diff_map: return "diff_map";
    }
    return "?";
}

Protocol parse_protocol(const std::string& name) {
    if (name == "pairwise") return Protocol::pairwise;
    if (name == "multiway") return Protocol::multiway;
    if (name == "temporal") return Protocol::temporal;
    throw ValidationError("unknown protocol '" + name + "' (expected pairwise, multiway or temporal)");
}

void EvaluationItem::validate() const {
    std::size_t inputs = 0, candidates = 0, diffs = 0;
    std::set<std::string> seen;
    for (const ImageRef& img : images) {
        switch (img.role) {
            case ImageRole::input: ++inputs; break;
            case ImageRole::candidate:
                ++candidates;
                if (!labels.count(img.label)) throw ValidationError(fmt::format("candidate label '{}' has no method", img.label));
                if (protocol != Protocol::temporal && !seen.insert(img.label).second) throw ValidationError(fmt::format("duplicate candidate label '{}'", img.label));
                break;
            case ImageRole::diff_map: ++diffs; break;
        }
    }
    std::set<std::string> methods;
    for (const auto& [letter, method] : labels) {
        if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'Z') throw ValidationError(fmt::format("invalid label '{}'", letter));
        if (!methods.insert(method).second) throw ValidationError(fmt::format("method '{}' has two labels", method));
    }
    switch (protocol) {
        case Protocol::pairwise:
            if (inputs != 1 || candidates != 2 || diffs != 0) throw ValidationError("pairwise items need 1 input and 2 candidates");
            break;
        case Protocol::multiway:
            if (inputs != 1 || candidates < 2 || diffs != 0) throw ValidationError("multi-way items need 1 input and >= 2 candidates");
            break;
        case Protocol::temporal:
            if (inputs != 4 || candidates != 4 || diffs != 3 || labels.size() != 1) {
                throw ValidationError("temporal items need 4 inputs, 4 outputs, 3 difference maps and one rated method");
            }
            break;
    }
    if (protocol != Protocol::temporal && labels.size() != candidates) throw ValidationError("every label must name one candidate");
}

std::vector<std::size_t> pairwise_frames(std::size_t frame_count, std::size_t frames_per_video) {
    if (frames_per_video == 0) throw ValidationError("frames_per_video must be >= 1");
    if (frame_count < frames_per_video) {
        throw ValidationError(fmt::format("video of {} frames cannot supply {} distinct frames", frame_count, frames_per_video));
    }
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k <= frames_per_video; ++k) out.push_back(frame_count * k / (frames_per_video + 1));
    return out;
}

std::size_t multiway_frame(std::size_t frame_count) {
    if (frame_count == 0) throw ValidationError("video has no frames");
    return frame_count / 2;
}

std::size_t temporal_start(std::size_t clip_length) {
    if (clip_length < kTemporalFrames) throw ValidationError(fmt::format("temporal items need clips of >= 4 frames, got {}", clip_length));
    const std::size_t half = clip_length / 2;
    const std::size_t start = half == 0 ? 0 : half - 1;
    return std::min(start, clip_length - kTemporalFrames);
}

std::vector<std::string> assign_letters(std::size_t count, std::uint64_t seed, std::size_t item_index) {
    if (count == 0 || count > 26) throw ValidationError("between 1 and 26 candidates can be labelled");
    std::vector<std::string> letters;
    for (std::size_t i = 0; i < count; ++i) letters.emplace_back(1, static_cast<char>('A' + i));
    CounterRng rng(seed, Stream::labels, item_index);
    for (std::size_t i = count - 1; i > 0; --i) std::swap(letters[i], letters[rng.below(i + 1)]);
    return letters;
}

std::vector<EvaluationItem> build_pairwise(const std::vector<VideoEntry>& videos, const MethodEntry& first, const MethodEntry& second,
                                           std::uint64_t seed, std::size_t frames_per_video) {
    if (first.key() == second.key()) throw ValidationError("pairwise comparison needs two different methods");
    std::vector<EvaluationItem> items;
    for (const VideoEntry& video : videos) {
        require_output(video, first);
        require_output(video, second);
        for (std::size_t frame : pairwise_frames(video.frame_count, frames_per_video)) {
            EvaluationItem item;
            item.protocol = Protocol::pairwise;
            item.video_id = video.id;
            item.frame_index = frame;
            item.images.push_back(frame_image(ImageRole::input, video.input_dir, frame));
            add_candidates(item, video, {&first, &second}, assign_letters(2, seed, items.size()));
            items.push_back(std::move(item));
        }
    }
    return items;
}

std::vector<EvaluationItem> build_multiway(const std::vector<VideoEntry>& videos, const std::vector<MethodEntry>& methods,
                                           std::uint64_t seed) {
    if (methods.size() < 2) throw ValidationError("multi-way comparison needs at least two methods");
    std::vector<const MethodEntry*> ptrs;
    std::set<std::string> keys;
    for (const MethodEntry& m : methods) {
        if (!keys.insert(m.key()).second) throw ValidationError(fmt::format("method '{}' listed twice", m.key()));
        ptrs.push_back(&m);
    }
    std::vector<EvaluationItem> items;
    for (const VideoEntry& video : videos) {
        for (const MethodEntry& m : methods) require_output(video, m);
        EvaluationItem item;
        item.protocol = Protocol::multiway;
        item.video_id = video.id;
        item.frame_index = multiway_frame(video.frame_count);
        item.images.push_back(frame_image(ImageRole::input, video.input_dir, item.frame_index));
        add_candidates(item, video, ptrs, assign_letters(methods.size(), seed, items.size()));
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<EvaluationItem> build_temporal(const std::vector<VideoEntry>& videos, const MethodEntry& method, std::size_t clip_length) {
    const std::size_t start = temporal_start(clip_length);
    std::vector<EvaluationItem> items;
    for (const VideoEntry& video : videos) {
        if (video.frame_count < clip_length) {
            throw ValidationError(fmt::format("video '{}' has {} frames, shorter than the clip length {}", video.id, video.frame_count,
                                              clip_length));
        }
        require_output(video, method);
        const fs::path out = method.output_dir(video.id);
        EvaluationItem item;
        item.protocol = Protocol::temporal;
        item.video_id = video.id;
        item.frame_index = start;
        item.dataset = method.dataset;
        for (std::size_t k = 0; k < kTemporalFrames; ++k) item.images.push_back(frame_image(ImageRole::input, video.input_dir, start + k));
        for (std::size_t k = 0; k < kTemporalFrames; ++k) item.images.push_back(frame_image(ImageRole::candidate, out, start + k, "A"));
        for (std::size_t k = 0; k + 1 < kTemporalFrames; ++k) {
            item.images.push_back(ImageRef{ImageRole::diff_map, DiffRef{out, start + k, start + k + 1, 10.0}, {}});
        }
        item.labels["A"] = method.key();
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<EvaluationItem> build_temporal(const std::vector<VideoEntry>& videos, const std::vector<MethodEntry>& methods,
                                           std::size_t clip_length) {
    std::vector<EvaluationItem> items;
    for (const MethodEntry& m : methods) {
        auto part = build_temporal(videos, m, clip_length);
        items.insert(items.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return items;
}

nlohmann::json to_json(const EvaluationItem& item) {
    nlohmann::json images = nlohmann::json::array();
    for (const ImageRef& img : item.images) {
        nlohmann::json e{{"role", to_string(img.role)}};
        if (!img.label.empty()) e["label"] = img.label;
        if (const auto* f = std::get_if<FrameRef>(&img.source)) {
            e["frame"] = {{"dir", f->directory.string()}, {"index", f->index}};
        } else {
            const auto& d = std::get<DiffRef>(img.source);
            e["diff"] = {{"dir", d.directory.string()}, {"first", d.first}, {"second", d.second}, {"gain", d.gain}};
        }
        images.push_back(std::move(e));
    }
    nlohmann::json j{{"protocol", to_string(item.protocol)}, {"video_id", item.video_id}, {"frame_index", item.frame_index},
                     {"labels", item.labels}, {"images", images}};
    if (!item.dataset.empty()) j["dataset"] = item.dataset;
    return j;
}

}  // namespace nightbench::judge
