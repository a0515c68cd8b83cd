#include "nightbench/harness/benchmark.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <numeric>

#include "nightbench/core/error.hpp"
#include "nightbench/core/parallel.hpp"
#include "nightbench/core/rng.hpp"
#include "nightbench/harness/derain.hpp"
#include "nightbench/judge/backend.hpp"
#include "nightbench/judge/dispatch.hpp"
#include "nightbench/judge/manifest.hpp"
#include "nightbench/judge/report.hpp"
#include "nightbench/metrics/report.hpp"
#include "nightbench/synth/params.hpp"
#include "nightbench/synth/rain.hpp"
#include "nightbench/synth/scene.hpp"
#include "nightbench/video/clip_io.hpp"

namespace nightbench::harness {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_absolute() || base.empty() ? p : base / p; }

const char* to_string(DerainerSpec::Kind k) {
    switch (k) {
        case DerainerSpec::Kind::passthrough: return "passthrough";
        case DerainerSpec::Kind::temporal_median: return "temporal_median";
        case DerainerSpec::Kind::predictions: return "predictions";
    }
    return "?";
}

DerainerSpec::Kind parse_kind(const std::string& s) {
    if (s == "passthrough") return DerainerSpec::Kind::passthrough;
    if (s == "temporal_median" || s == "temporal-median") return DerainerSpec::Kind::temporal_median;
    if (s == "predictions") return DerainerSpec::Kind::predictions;
    throw ValidationError("unknown method kind '" + s + "' (expected passthrough, temporal_median or predictions)");
}

void require_directory(const fs::path& p, const std::string& what) {
    std::error_code ec;
    if (!fs::is_directory(p, ec)) throw ValidationError(fmt::format("{} {} does not exist", what, p.string()));
}

std::vector<std::string> sequence_ids(const fs::path& rainy) {
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(rainy)) {
        if (entry.is_directory()) ids.push_back(entry.path().filename().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

Clip sub_clip(const Clip& clip, FrameRange r) {
    std::vector<Frame> frames(clip.frames().begin() + static_cast<std::ptrdiff_t>(r.begin),
                              clip.frames().begin() + static_cast<std::ptrdiff_t>(r.end));
    return Clip(std::move(frames), clip.fps());
}

struct EvalClip {
    std::string id;        // sequence id, or "seq/begin-end" under a split
    std::string sequence;
    FrameRange range;
    Clip rainy;
    std::optional<Clip> clean;
};

struct ClipResult {
    bool ok = false;
    std::string error;
    MetricReport metrics;
    double seconds = 0.0;
};

std::vector<EvalClip> load_dataset(const BenchmarkConfig& c) {
    std::vector<EvalClip> clips;
    for (const std::string& seq : sequence_ids(c.rainy)) {
        const Clip rainy = load_clip(c.rainy / seq);
        std::optional<Clip> clean;
        if (c.clean) {
            clean = load_clip(*c.clean / seq, rainy.size());
            if (clean->dims() != rainy.dims()) throw ValidationError(fmt::format("sequence '{}': clean and rainy sizes differ", seq));
        }
        std::vector<FrameRange> ranges;
        if (c.split) {
            if (rainy.size() != c.split->total_frames) {
                throw ValidationError(
                    fmt::format("sequence '{}' has {} frames but the split expects {}", seq, rainy.size(), c.split->total_frames));
            }
            for (std::size_t b = c.split->test_range.begin; b + c.split->clip_length <= c.split->test_range.end; b += c.split->clip_length) {
                ranges.push_back({b, b + c.split->clip_length});
            }
        } else {
            ranges.push_back({0, rainy.size()});
        }
        for (FrameRange r : ranges) {
            clips.push_back(EvalClip{c.split ? fmt::format("{}/{}-{}", seq, r.begin, r.end) : seq, seq, r, sub_clip(rainy, r),
                                     clean ? std::optional<Clip>(sub_clip(*clean, r)) : std::nullopt});
        }
    }
    return clips;
}

Clip run_method(const DerainerSpec& m, const EvalClip& clip) {
    switch (m.kind) {
        case DerainerSpec::Kind::passthrough: return derain_passthrough(clip.rainy);
        case DerainerSpec::Kind::temporal_median: return derain_temporal_median(clip.rainy, m.window, 1);
        case DerainerSpec::Kind::predictions: {
            const fs::path dir = m.predictions / clip.sequence;
            require_directory(dir, fmt::format("predictions of '{}' for sequence '{}':", m.name, clip.sequence));
            const Clip full = load_clip(dir);
            if (full.size() < clip.range.end) {
                throw ValidationError(fmt::format("predictions of '{}' for '{}' have {} frames, need {}", m.name, clip.sequence, full.size(),
                                                  clip.range.end));
            }
            Clip pred = sub_clip(full, clip.range);
            if (pred.dims() != clip.rainy.dims()) throw ValidationError(fmt::format("predictions of '{}' for '{}' have the wrong size", m.name, clip.id));
            return pred;
        }
    }
    throw ValidationError("unknown method kind");
}

ClipResult evaluate(const BenchmarkConfig& c, const DerainerSpec& m, const EvalClip& clip) {
    ClipResult r;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Clip pred = run_method(m, clip);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        MetricOptions opts;
        opts.workers = 1;
        if (c.metrics.afd) opts.afd_backend = default_perceptual();
        if (clip.clean && (c.metrics.psnr || c.metrics.ssim)) {
            r.metrics = evaluate_clip(pred, *clip.clean, opts);
        } else if (c.metrics.afd) {
            r.metrics.afd = afd(pred, *opts.afd_backend, 1);
        }
        r.ok = true;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

double mean(const std::vector<double>& v) { return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json run_judge_stage(const JudgeStage& s, std::uint64_t seed) {
    const judge::Manifest manifest = judge::load_manifest(s.manifest);
    const std::vector<judge::MethodEntry> methods = s.methods.empty() ? manifest.methods : manifest.select(s.methods);
    const std::uint64_t judge_seed = derive_seed(seed, "judge");
    std::vector<judge::EvaluationItem> items;
    switch (s.protocol) {
        case judge::Protocol::pairwise:
            if (methods.size() != 2) throw ValidationError("pairwise judging needs exactly two methods");
            items = judge::build_pairwise(manifest.videos, methods[0], methods[1], judge_seed);
            break;
        case judge::Protocol::multiway: items = judge::build_multiway(manifest.videos, methods, judge_seed); break;
        case judge::Protocol::temporal: items = judge::build_temporal(manifest.videos, methods, s.clip_length); break;
    }
    std::unique_ptr<judge::JudgeBackend> backend;
    if (s.backend == "mock") {
        backend = std::make_unique<judge::MockBackend>(judge::parse_mock_policy(s.mock_policy), judge::manifest_references(manifest));
    } else if (s.backend == "http") {
        backend = std::make_unique<judge::HttpBackend>(judge::HttpOptions{s.url, s.model, std::chrono::seconds(120), s.workers});
    } else {
        throw ValidationError("unknown judge backend '" + s.backend + "' (expected mock or http)");
    }
    judge::DispatchOptions opts;
    opts.batch_size = s.batch_size;
    opts.workers = s.workers;
    opts.seed = judge_seed;
    const judge::DispatchResult result = judge::dispatch(items, *backend, opts);
    return judge::judge_report(s.protocol, judge_seed, backend->name(), items, result, s.cost);
}

}  // namespace

void BenchmarkConfig::validate() const {
    require_directory(rainy, "rainy directory");
    if (clean) require_directory(*clean, "clean directory");
    if (judge) {
        std::error_code ec;
        if (!fs::is_regular_file(judge->manifest, ec)) throw ValidationError("judge manifest " + judge->manifest.string() + " does not exist");
    }
    std::vector<std::string> names;
    for (const DerainerSpec& m : methods) {
        if (m.name.empty()) throw ValidationError("method name must not be empty");
        if (m.kind == DerainerSpec::Kind::temporal_median && (m.window < 3 || m.window % 2 == 0)) {
            throw ValidationError(fmt::format("method '{}': temporal median window must be odd and >= 3", m.name));
        }
        names.push_back(m.name);
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) throw ValidationError("method names must be unique");
}

BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j, const fs::path& base) {
    BenchmarkConfig c;
    try {
        const auto& data = j.at("dataset");
        c.rainy = resolve(data.at("rainy").get<std::string>(), base);
        if (data.contains("clean") && !data["clean"].is_null()) c.clean = resolve(data["clean"].get<std::string>(), base);
        if (j.contains("split") && !j["split"].is_null()) c.split = j["split"].get<SplitSpec>();
        for (const auto& m : j.value("methods", nlohmann::json::array())) {
            DerainerSpec d;
            d.name = m.at("name").get<std::string>();
            if (m.contains("kind")) {
                d.kind = parse_kind(m["kind"].get<std::string>());
            } else if (m.contains("predictions")) {
                d.kind = DerainerSpec::Kind::predictions;
            } else {
                d.kind = parse_kind(d.name);
            }
            d.window = m.value("window", std::size_t{5});
            if (d.kind == DerainerSpec::Kind::predictions) d.predictions = resolve(m.at("predictions").get<std::string>(), base);
            c.methods.push_back(std::move(d));
        }
        if (j.contains("metrics")) {
            const auto& t = j["metrics"];
            c.metrics.psnr = t.value("psnr", true);
            c.metrics.ssim = t.value("ssim", true);
            c.metrics.afd = t.value("afd", true);
        }
        if (j.contains("judge") && !j["judge"].is_null()) {
            const auto& s = j["judge"];
            JudgeStage js;
            js.manifest = resolve(s.at("manifest").get<std::string>(), base);
            js.protocol = judge::parse_protocol(s.value("protocol", std::string("pairwise")));
            js.methods = s.value("methods", std::vector<std::string>{});
            js.backend = s.value("backend", js.backend);
            js.mock_policy = s.value("mock_policy", js.mock_policy);
            js.url = s.value("url", std::string{});
            js.model = s.value("model", std::string{});
            js.clip_length = s.value("clip_length", js.clip_length);
            js.batch_size = s.value("batch_size", js.batch_size);
            js.workers = s.value("workers", js.workers);
            if (s.contains("cost")) js.cost = s["cost"].get<judge::CostModel>();
            c.judge = std::move(js);
        }
        c.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("output")) c.output = resolve(j["output"].get<std::string>(), base);
        c.workers = j.value("workers", 0u);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(fmt::format("malformed benchmark config: {}", e.what()));
    }
    return c;
}

BenchmarkConfig load_benchmark_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open benchmark config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(fmt::format("benchmark config {} is not valid JSON: {}", path.string(), e.what()));
    }
    return benchmark_config_from_json(j, path.parent_path());
}

nlohmann::json to_json(const BenchmarkConfig& c) {
    nlohmann::json methods = nlohmann::json::array();
    for (const DerainerSpec& m : c.methods) {
        nlohmann::json e{{"name", m.name}, {"kind", to_string(m.kind)}};
        if (m.kind == DerainerSpec::Kind::temporal_median) e["window"] = m.window;
        if (m.kind == DerainerSpec::Kind::predictions) e["predictions"] = m.predictions.string();
        methods.push_back(std::move(e));
    }
    nlohmann::json j{{"dataset", {{"rainy", c.rainy.string()}, {"clean", c.clean ? nlohmann::json(c.clean->string()) : nlohmann::json()}}},
                     {"methods", methods},
                     {"metrics", {{"psnr", c.metrics.psnr}, {"ssim", c.metrics.ssim}, {"afd", c.metrics.afd}}},
                     {"seed", c.seed},
                     {"output", c.output.string()}};
    j["split"] = c.split ? nlohmann::json(*c.split) : nlohmann::json();
    if (c.judge) {
        nlohmann::json cost;
        judge::to_json(cost, c.judge->cost);
        j["judge"] = {{"manifest", c.judge->manifest.string()}, {"protocol", judge::to_string(c.judge->protocol)},
                      {"methods", c.judge->methods},            {"backend", c.judge->backend},
                      {"mock_policy", c.judge->mock_policy},    {"clip_length", c.judge->clip_length},
                      {"batch_size", c.judge->batch_size},      {"workers", c.judge->workers},
                      {"cost", cost}};
    } else {
        j["judge"] = nullptr;
    }
    return j;
}

nlohmann::json run_benchmark(const BenchmarkConfig& config) {
    config.validate();
    const std::vector<EvalClip> clips = load_dataset(config);

    std::vector<const DerainerSpec*> methods;
    for (const DerainerSpec& m : config.methods) methods.push_back(&m);
    std::sort(methods.begin(), methods.end(), [](const DerainerSpec* a, const DerainerSpec* b) { return a->name < b->name; });

    nlohmann::json failures = nlohmann::json::array();
    std::vector<bool> runnable(methods.size(), true);
    for (std::size_t m = 0; m < methods.size(); ++m) {
        std::error_code ec;
        if (methods[m]->kind == DerainerSpec::Kind::predictions && !fs::is_directory(methods[m]->predictions, ec)) {
            runnable[m] = false;
            failures.push_back({{"method", methods[m]->name},
                                {"clip", nullptr},
                                {"message", fmt::format("prediction directory {} does not exist", methods[m]->predictions.string())}});
        }
    }

    const std::size_t n_clips = clips.size();
    std::vector<ClipResult> results(methods.size() * n_clips);
    parallel_for(
        results.size(),
        [&](std::size_t task) {
            const std::size_t m = task / n_clips;
            if (runnable[m]) results[task] = evaluate(config, *methods[m], clips[task % n_clips]);
        },
        config.workers);

    nlohmann::json per_method = nlohmann::json::object();
    nlohmann::json timing = nlohmann::json::object();
    std::size_t total_frames = 0;
    for (const EvalClip& c : clips) total_frames += c.rainy.size();
    for (std::size_t m = 0; m < methods.size(); ++m) {
        if (!runnable[m]) continue;
        nlohmann::json rows = nlohmann::json::array();
        std::vector<double> psnrs, ssims, afds;
        double seconds = 0.0;
        std::size_t frames = 0;
        for (std::size_t k = 0; k < n_clips; ++k) {
            const ClipResult& r = results[m * n_clips + k];
            if (!r.ok) {
                failures.push_back({{"method", methods[m]->name}, {"clip", clips[k].id}, {"message", r.error}});
                continue;
            }
            nlohmann::json row{{"clip", clips[k].id}, {"frames", clips[k].rainy.size()}};
            if (clips[k].clean && config.metrics.psnr) {
                row["psnr"] = db_to_json(r.metrics.psnr_db);
                psnrs.push_back(cap_db(r.metrics.psnr_db));
            }
            if (clips[k].clean && config.metrics.ssim) {
                row["ssim"] = r.metrics.ssim;
                ssims.push_back(r.metrics.ssim);
            }
            if (r.metrics.afd) {
                row["afd"] = *r.metrics.afd;
                afds.push_back(*r.metrics.afd);
            }
            seconds += r.seconds;
            frames += clips[k].rainy.size();
            rows.push_back(std::move(row));
        }
        nlohmann::json aggregate{{"clips", rows.size()}};
        if (!psnrs.empty()) aggregate["psnr"] = mean(psnrs);
        if (!ssims.empty()) aggregate["ssim"] = mean(ssims);
        if (!afds.empty()) aggregate["afd"] = mean(afds);
        per_method[methods[m]->name] = {{"kind", to_string(methods[m]->kind)}, {"per_clip", rows}, {"aggregate", aggregate}};
        timing[methods[m]->name] = {{"seconds_per_frame", frames == 0 ? 0.0 : seconds / static_cast<double>(frames)}};
    }

    nlohmann::json report{{"config", to_json(config)},
                          {"seed", config.seed},
                          {"dataset",
                           {{"track", config.clean ? "synthetic" : "real"},
                            {"sequences", sequence_ids(config.rainy).size()},
                            {"clips", n_clips},
                            {"frames", total_frames},
                            {"height", clips.empty() ? 0 : clips.front().rainy.dims().height},
                            {"width", clips.empty() ? 0 : clips.front().rainy.dims().width}}},
                          {"per_method", per_method},
                          {"failures", failures},
                          {"judge", nullptr},
                          {"cost_estimate", nullptr},
                          {"timing", timing},
                          {"timestamp", utc_timestamp()}};
    if (config.judge) {
        report["judge"] = run_judge_stage(*config.judge, config.seed);
        report["cost_estimate"] = report["judge"]["cost"];
    }
    return report;
}

nlohmann::json run_benchmark_to_file(const BenchmarkConfig& config) {
    nlohmann::json report = run_benchmark(config);
    if (!config.output.empty()) {
        if (config.output.has_parent_path()) fs::create_directories(config.output.parent_path());
        std::ofstream out(config.output);
        if (!out) throw IoError("cannot write report " + config.output.string());
        out << report.dump(2) << "\n";
    }
    return report;
}

std::string render_benchmark_table(const nlohmann::json& report) {
    auto cell = [](const nlohmann::json& agg, const char* key, const char* spec) -> std::string {
        if (!agg.contains(key)) return "-";
        return fmt::format(fmt::runtime(spec), agg[key].get<double>());
    };
    std::string out = fmt::format("{:<20} {:>8} {:>8} {:>8}\n", "Method", "PSNR", "SSIM", "AFD");
    for (const auto& [name, m] : report.at("per_method").items()) {
        const auto& agg = m.at("aggregate");
        out += fmt::format("{:<20} {:>8} {:>8} {:>8}\n", name, cell(agg, "psnr", "{:.2f}"), cell(agg, "ssim", "{:.4f}"),
                           cell(agg, "afd", "{:.2f}"));
    }
    const auto& failures = report.at("failures");
    if (!failures.empty()) out += fmt::format("{} failure(s)\n", failures.size());
    return out;
}

std::vector<std::string> write_synthetic_dataset(const fs::path& root, const SyntheticDatasetOptions& o) {
    if (o.clips == 0) throw ValidationError("synthetic dataset needs at least one clip");
    std::vector<std::string> ids;
    nlohmann::json params = nlohmann::json::object();
    for (std::size_t i = 0; i < o.clips; ++i) {
        const std::string id = fmt::format("clip{:03}", i);
        const RainSeed seed{derive_seed(o.seed, id)};
        const auto [rain, camera] = sample_params(seed);
        const SceneKind kind = i % 2 == 0 ? SceneKind::street : SceneKind::alley;
        const SceneBundle scene = generate_scene(kind, o.frames, o.dims, seed, 30.0, camera.focal_length);
        const PairedClip pair = apply_white_balance(simulate_rain(scene, rain, camera, seed), camera.white_balance);
        save_clip(pair.rainy, root / "rainy" / id);
        save_clip(pair.clean, root / "clean" / id);
        params[id] = {{"scene", to_string(kind)}, {"seed", seed.value}, {"rain", rain}, {"camera", camera}};
        ids.push_back(id);
    }
    std::ofstream out(root / "params.json");
    if (!out) throw IoError("cannot write " + (root / "params.json").string());
    out << params.dump(2) << "\n";
    return ids;
}

}  // namespace nightbench::harness
