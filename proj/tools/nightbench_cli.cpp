#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "nightbench/core/error.hpp"
#include "nightbench/core/rng.hpp"
#include "nightbench/flow/attention.hpp"
#include "nightbench/flow/flow.hpp"
#include "nightbench/harness/benchmark.hpp"
#include "nightbench/harness/grid_table.hpp"
#include "nightbench/harness/iterations.hpp"
#include "nightbench/judge/backend.hpp"
#include "nightbench/judge/dispatch.hpp"
#include "nightbench/judge/manifest.hpp"
#include "nightbench/judge/report.hpp"
#include "nightbench/metrics/report.hpp"
#include "nightbench/tiler/tiler.hpp"
#include "nightbench/video/clip_io.hpp"

using namespace nightbench;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kInvalid = 2, kIo = 3, kTransport = 4, kUsage = 64 };

int fail(const char* type, const std::string& message, int code) {
    std::cerr << nlohmann::json{{"error", {{"type", type}, {"message", message}}}}.dump() << "\n";
    return code;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!part.empty()) out.push_back(part);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct SynthArgs {
    std::string out;
    std::size_t clips = 1;
    std::size_t frames = 12;
    int height = 96;
    int width = 160;
    std::uint64_t seed = 0;
};

void run_synth(const SynthArgs& a) {
    harness::SyntheticDatasetOptions o;
    o.clips = a.clips;
    o.frames = a.frames;
    o.dims = {a.height, a.width};
    o.seed = a.seed;
    const auto ids = harness::write_synthetic_dataset(a.out, o);
    std::cout << nlohmann::json{{"root", a.out}, {"clips", ids}, {"frames", a.frames}, {"height", a.height}, {"width", a.width}}.dump(2)
              << "\n";
}

struct TileArgs {
    int height = 720;
    int width = 1280;
    int verify = 0;
    std::uint64_t seed = 0;
};

void run_tile_check(const TileArgs& a) {
    const Dims frame{a.height, a.width};
    std::cout << harness::emit_grid_table(frame);
    if (a.verify <= 0) return;
    std::size_t checked = 0;
    for (const auto& m : harness::sliding_window_methods()) {
        const TileGrid g = plan_grid(frame, m.full_frame ? frame : m.patch, m.mode, m.stride, m.pad_rule);
        for (int i = 0; i < a.verify; ++i) {
            CounterRng rng(a.seed, Stream::test, static_cast<std::uint64_t>(i));
            std::vector<float> v(static_cast<std::size_t>(a.height) * static_cast<std::size_t>(a.width) * 3);
            for (float& x : v) x = static_cast<float>(rng.uniform());
            const Frame f(a.height, a.width, std::move(v));
            if (!(stitch(extract(f, g), g) == f)) throw ValidationError(fmt::format("round trip of {} is not bit-exact", m.method));
            ++checked;
        }
    }
    std::cout << fmt::format("round trip bit-exact on {} frame/configuration pairs\n", checked);
}

struct MetricArgs {
    std::string pred;
    std::string gt;
    bool afd = false;
    bool per_frame = false;
    std::string out;
};

void run_metrics(const MetricArgs& a) {
    const Clip gt = load_clip(a.gt);
    const Clip pred = load_clip(a.pred, gt.size());
    MetricOptions o;
    o.per_frame = a.per_frame;
    if (a.afd) o.afd_backend = default_perceptual();
    nlohmann::json j = evaluate_clip(pred, gt, o);
    write_json(j, a.out);
}

struct DiffArgs {
    std::string clip;
    std::size_t first = 0;
    std::size_t second = 1;
    double gain = 10.0;
    std::string out;
};

void run_diffmap(const DiffArgs& a) {
    const GrayImage d = diff_map(load_clip_frame(a.clip, a.first), load_clip_frame(a.clip, a.second), a.gain);
    save_gray(a.out, d);
    double sum = 0.0;
    for (float v : d.samples()) sum += v;
    std::cout << nlohmann::json{{"out", a.out}, {"mean", sum / static_cast<double>(d.pixel_count())}}.dump() << "\n";
}

struct FlowArgs {
    std::uint64_t seed = 0;
    int dim = 4;
    int tokens = 6;
    int batch = 16;
    int steps = 200;
    double lr = 0.1;
};

void run_flow_demo(const FlowArgs& a) {
    using namespace nightbench::flow;
    const auto batch = random_batch(a.seed, a.batch, a.tokens, a.dim);
    LinearVelocity model = LinearVelocity::random(derive_seed(a.seed, "model"), a.dim);
    const double grad_error = grad_check(model, batch);
    const auto losses = train_linear(model, batch, a.lr, a.steps);

    nlohmann::json euler = nlohmann::json::object();
    const ContextEmbedding ctx = ContextEmbedding::no_rain(a.dim);
    const FlowSample& s = batch.front();
    for (int n : {1, 4, 50}) {
        const Matrix x1 = euler_integrate(OracleVelocity(s.x0, s.x1), s.x_con, s.x0, ctx, n);
        euler[std::to_string(n)] = (x1 - s.x1).norm() / s.x1.norm();
    }

    const auto positions = grid_positions(a.tokens, 2, (a.tokens + 1) / 2);
    const TokenSequence seq = concat_tokens(s.x_con, s.x0, positions);
    const AttentionWeights w = AttentionWeights::random(derive_seed(a.seed, "attention"), a.dim, a.dim, a.dim);
    const AttentionMask mask = build_mask(static_cast<std::size_t>(a.tokens), static_cast<std::size_t>(a.tokens));
    const TokenSequence out1 = masked_attention(seq, mask, w);
    const TokenSequence out2 = masked_attention(concat_tokens(s.x_con, s.x1, positions), mask, w);
    const double condition_change = (out1.tokens.topRows(a.tokens) - out2.tokens.topRows(a.tokens)).cwiseAbs().maxCoeff();

    std::cout << nlohmann::json{{"grad_check_max_rel_error", grad_error},
                                {"loss_first", losses.front()},
                                {"loss_last", losses.back()},
                                {"oracle_euler_rel_error", euler},
                                {"condition_change_under_generation_perturbation", condition_change}}
                     .dump(2)
              << "\n";
}

struct JudgeArgs {
    std::string protocol = "pairwise";
    std::string manifest;
    std::string backend = "mock";
    std::string policy = "reference-psnr";
    std::string methods;
    std::string url;
    std::string model;
    std::uint64_t seed = 0;
    std::size_t batch_size = 4;
    std::size_t workers = 4;
    std::size_t clip_length = 90;
    std::size_t frames_per_video = 3;
    int backoff_ms = 1000;
    std::string quality_prompt;
    std::string temporal_prompt;
    std::string out;
    bool table = false;
};

void run_judge(const JudgeArgs& a) {
    using namespace nightbench::judge;
    const Protocol protocol = parse_protocol(a.protocol);
    const Manifest manifest = load_manifest(a.manifest);
    const auto names = split_list(a.methods);
    const std::vector<MethodEntry> methods = names.empty() ? manifest.methods : manifest.select(names);
    std::vector<EvaluationItem> items;
    switch (protocol) {
        case Protocol::pairwise:
            if (methods.size() != 2) throw ValidationError(fmt::format("pairwise judging needs exactly two methods, got {}", methods.size()));
            items = build_pairwise(manifest.videos, methods[0], methods[1], a.seed, a.frames_per_video);
            break;
        case Protocol::multiway: items = build_multiway(manifest.videos, methods, a.seed); break;
        case Protocol::temporal: items = build_temporal(manifest.videos, methods, a.clip_length); break;
    }
    std::unique_ptr<JudgeBackend> backend;
    if (a.backend == "mock") {
        backend = std::make_unique<MockBackend>(parse_mock_policy(a.policy), manifest_references(manifest));
    } else if (a.backend == "http") {
        backend = std::make_unique<HttpBackend>(HttpOptions{a.url, a.model, std::chrono::seconds(120), a.workers});
    } else {
        throw ValidationError("unknown backend '" + a.backend + "' (expected mock or http)");
    }
    DispatchOptions o;
    o.batch_size = a.batch_size;
    o.workers = a.workers;
    o.seed = a.seed;
    if (a.backoff_ms < 0) throw ValidationError("retry backoff must be >= 0");
    o.retry_backoff = std::chrono::milliseconds(a.backoff_ms);
    if (!a.quality_prompt.empty()) o.prompts.quality = load_prompt(a.quality_prompt);
    if (!a.temporal_prompt.empty()) o.prompts.temporal = load_prompt(a.temporal_prompt);
    const DispatchResult result = dispatch(items, *backend, o);
    write_json(judge_report(protocol, a.seed, backend->name(), items, result, CostModel{}), a.out);
    if (a.table) std::cerr << render_judge_table(protocol, items, result);
}

struct IterArgs {
    std::uint64_t size = 0;
    std::uint64_t epochs = 0;
    std::uint64_t batch = 0;
};

void run_match_iters(const IterArgs& a) {
    if (a.size == 0 && a.epochs == 0 && a.batch == 0) {
        std::cout << fmt::format("{:<12} {:>10} {:>6} {:>6} {:>8}\n", "Method", "Size/Epoch", "Batch", "Epochs", "Iters");
        for (const auto& s : harness::benchmark_schedules()) {
            const std::string epochs = s.fixed_iterations ? "(iter)" : std::to_string(s.epochs);
            std::cout << fmt::format("{:<12} {:>10} {:>6} {:>6} {:>8}\n", s.method, s.size_per_epoch, s.batch, epochs,
                                     harness::format_iterations(harness::match_iterations(s)));
        }
        return;
    }
    const std::uint64_t n = harness::match_iterations({"custom", a.size, a.epochs, a.batch, std::nullopt});
    std::cout << nlohmann::json{{"iterations", n}, {"display", harness::format_iterations(n)}}.dump() << "\n";
}

struct BenchArgs {
    std::string config;
    std::string out;
};

void run_bench(const BenchArgs& a) {
    harness::BenchmarkConfig c = harness::load_benchmark_config(a.config);
    if (!a.out.empty()) c.output = a.out;
    const nlohmann::json report = harness::run_benchmark_to_file(c);
    if (c.output.empty()) std::cout << report.dump(2) << "\n";
    std::cerr << harness::render_benchmark_table(report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nighttime video deraining benchmark tools"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Render seeded synthetic rainy/clean clip pairs");
    s->add_option("--out", synth.out, "Output root (rainy/, clean/, params.json)")->required();
    s->add_option("--clips", synth.clips, "Number of clips")->capture_default_str();
    s->add_option("--frames", synth.frames, "Frames per clip")->capture_default_str();
    s->add_option("--height", synth.height, "Frame height")->capture_default_str();
    s->add_option("--width", synth.width, "Frame width")->capture_default_str();
    s->add_option("--seed", synth.seed, "Top-level seed")->capture_default_str();

    TileArgs tile;
    auto* t = app.add_subcommand("tile-check", "Print the sliding-window grid table and optionally verify round trips");
    t->add_option("--height", tile.height, "Frame height")->capture_default_str();
    t->add_option("--width", tile.width, "Frame width")->capture_default_str();
    t->add_option("--verify", tile.verify, "Random frames to round-trip per configuration")->capture_default_str();
    t->add_option("--seed", tile.seed, "Seed of the random frames")->capture_default_str();

    MetricArgs metrics;
    auto* m = app.add_subcommand("metrics", "PSNR/SSIM (and AFD) of a predicted clip against ground truth");
    m->add_option("--pred", metrics.pred, "Predicted frame directory")->required();
    m->add_option("--gt", metrics.gt, "Ground-truth frame directory")->required();
    m->add_flag("--afd", metrics.afd, "Also compute AFD of the prediction");
    m->add_flag("--per-frame", metrics.per_frame, "Include per-frame values");
    m->add_option("--out", metrics.out, "Report path (stdout by default)");

    DiffArgs diff;
    auto* d = app.add_subcommand("diffmap", "Amplified grayscale difference of two frames of a clip");
    d->add_option("--clip", diff.clip, "Frame directory")->required();
    d->add_option("--first", diff.first, "First frame index")->capture_default_str();
    d->add_option("--second", diff.second, "Second frame index")->capture_default_str();
    d->add_option("--gain", diff.gain, "Amplification")->capture_default_str();
    d->add_option("--out", diff.out, "Output PNG")->required();

    FlowArgs flow;
    auto* f = app.add_subcommand("flow-demo", "Flow-matching toy run: gradient check, training, Euler and mask checks");
    f->add_option("--seed", flow.seed, "Seed")->capture_default_str();
    f->add_option("--dim", flow.dim, "Token dimension")->capture_default_str();
    f->add_option("--tokens", flow.tokens, "Tokens per sample")->capture_default_str();
    f->add_option("--batch", flow.batch, "Batch size")->capture_default_str();
    f->add_option("--steps", flow.steps, "Gradient steps")->capture_default_str();
    f->add_option("--lr", flow.lr, "Learning rate")->capture_default_str();

    JudgeArgs judge;
    auto* j = app.add_subcommand("judge", "Run a judge protocol over a manifest");
    j->add_option("--protocol", judge.protocol, "pairwise, multiway or temporal")->capture_default_str();
    j->add_option("--manifest", judge.manifest, "Manifest JSON")->required();
    j->add_option("--backend", judge.backend, "mock or http")->capture_default_str();
    j->add_option("--mock-policy", judge.policy, "always-first or reference-psnr")->capture_default_str();
    j->add_option("--methods", judge.methods, "Comma-separated method keys (default: all)");
    j->add_option("--url", judge.url, "HTTP judge endpoint; token from NIGHTBENCH_JUDGE_API_KEY");
    j->add_option("--model", judge.model, "Model name sent to the HTTP judge");
    j->add_option("--seed", judge.seed, "Label and batch seed")->capture_default_str();
    j->add_option("--batch-size", judge.batch_size, "Items per batch")->capture_default_str();
    j->add_option("--workers", judge.workers, "Concurrent batches (capped at 4)")->capture_default_str();
    j->add_option("--clip-length", judge.clip_length, "Clip length for temporal frame selection")->capture_default_str();
    j->add_option("--frames-per-video", judge.frames_per_video, "Pairwise frames per video")->capture_default_str();
    j->add_option("--retry-backoff-ms", judge.backoff_ms, "Delay before the single retry")->capture_default_str();
    j->add_option("--quality-prompt", judge.quality_prompt, "File replacing the quality prompt");
    j->add_option("--temporal-prompt", judge.temporal_prompt, "File replacing the temporal prompt");
    j->add_option("--out", judge.out, "Report path (stdout by default)");
    j->add_flag("--table", judge.table, "Print the summary table to stderr");

    IterArgs iters;
    auto* i = app.add_subcommand("match-iters", "Iteration matching: floor(size x epochs / batch), or the full table");
    i->add_option("--size", iters.size, "Samples per epoch");
    i->add_option("--epochs", iters.epochs, "Epochs");
    i->add_option("--batch", iters.batch, "Samples per step");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Run a benchmark config and write its report");
    b->add_option("--config", bench.config, "Benchmark config JSON")->required();
    b->add_option("--out", bench.out, "Report path (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), kUsage);
    }

    try {
        if (*s) run_synth(synth);
        if (*t) run_tile_check(tile);
        if (*m) run_metrics(metrics);
        if (*d) run_diffmap(diff);
        if (*f) run_flow_demo(flow);
        if (*j) run_judge(judge);
        if (*i) run_match_iters(iters);
        if (*b) run_bench(bench);
    } catch (const ValidationError& e) {
        return fail("validation", e.what(), kInvalid);
    } catch (const IoError& e) {
        return fail("io", e.what(), kIo);
    } catch (const judge::TransportError& e) {
        return fail("transport", e.what(), kTransport);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), kInternal);
    }
    return kOk;
}
