// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>

#include <sys/wait.h>

#include "nightbench/core/rng.hpp"
#include "nightbench/flow/attention.hpp"
#include "nightbench/flow/flow.hpp"
#include "nightbench/harness/grid_table.hpp"
#include "nightbench/harness/iterations.hpp"
#include "nightbench/judge/backend.hpp"
#include "nightbench/judge/cost.hpp"
#include "nightbench/judge/dispatch.hpp"
#include "nightbench/judge/items.hpp"
#include "nightbench/judge/manifest.hpp"
#include "nightbench/metrics/metrics.hpp"
#include "nightbench/tiler/tiler.hpp"
#include "nightbench/video/clip_io.hpp"
#include "synth_scenes.hpp"
#include "test_support.hpp"

using namespace nightbench;
using namespace nightbench::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome verdict(bool pass, std::string detail) { return {pass, std::move(detail)}; }

Outcome grid_table_rows() {
    struct Row {
        int patch;
        TileMode mode;
        PadRule rule;
        int padded_w, padded_h, cols, rows;
        std::size_t count;
    };
    const std::vector<Row> table = {
        {224, TileMode::non_overlapping, PadRule::next_multiple, 1344, 896, 6, 4, 24},
        {128, TileMode::non_overlapping, PadRule::next_multiple, 1280, 768, 10, 6, 60},
        {256, TileMode::non_overlapping, PadRule::add_remainder, 1536, 768, 6, 3, 18},
        {64, TileMode::non_overlapping, PadRule::next_multiple, 1280, 768, 20, 12, 240},
        {64, TileMode::overlapping, PadRule::next_multiple, 1280, 720, 77, 42, 3234},
    };
    for (const Row& r : table) {
        const std::optional<Dims> stride = r.mode == TileMode::overlapping ? std::optional<Dims>(Dims{16, 16}) : std::nullopt;
        const TileGrid g = plan_grid({720, 1280}, {r.patch, r.patch}, r.mode, stride, r.rule);
        const bool padded_ok = r.mode == TileMode::overlapping || (g.padded.width == r.padded_w && g.padded.height == r.padded_h);
        if (!padded_ok || g.cols != r.cols || g.rows != r.rows || g.patch_count() != r.count) {
            return verdict(false, fmt::format("patch {}: got {}x{} {}x{} {}", r.patch, g.padded.width, g.padded.height, g.cols, g.rows,
                                              g.patch_count()));
        }
    }
    // The three 128-pixel methods share one configuration; check them by name too.
    std::size_t rows_128 = 0;
    for (const auto& row : harness::grid_table()) rows_128 += row.cells() == "128×128 | 1280×768 | 10×6 | 60";
    if (rows_128 != 3) return verdict(false, fmt::format("{} rows at 128 instead of 3", rows_128));
    return verdict(true, "224, 128 x3, 256, 64 and 64/r=16 (3,234) rows exact");
}

Outcome tiling_round_trip() {
    std::size_t checks = 0;
    for (int i = 0; i < 10; ++i) {
        const Frame f = random_frame(1000, 720, 1280, static_cast<std::uint64_t>(i));
        for (const auto& m : harness::sliding_window_methods()) {
            if (m.full_frame) continue;
            const TileGrid g = plan_grid({720, 1280}, m.patch, m.mode, m.stride, m.pad_rule);
            if (!(stitch(extract(f, g), g) == f)) return verdict(false, fmt::format("{} frame {} not bit-exact", m.method, i));
            ++checks;
        }
    }
    return verdict(true, fmt::format("{} frame x configuration round trips bit-exact", checks));
}

Outcome metric_closed_forms() {
    const Frame base = Frame::filled(32, 32, 0.5f);
    std::vector<float> shifted(base.samples().begin(), base.samples().end());
    for (float& v : shifted) v += 10.0f / 255.0f;
    const double offset_db = psnr(base, Frame(32, 32, shifted));
    const double bw = psnr(Frame::filled(16, 16, 0.0f), Frame::filled(16, 16, 1.0f));
    const Frame x = random_frame(7, 40, 48);
    const double self = ssim(x, x);

    const Frame a = lattice_frame(8, 24, 24, 0);
    const Frame b = lattice_frame(8, 24, 24, 1);
    const GrayImage d = diff_map(a, b, 10.0);
    double worst = 0.0;
    for (int yy = 0; yy < 24; ++yy) {
        for (int xx = 0; xx < 24; ++xx) {
            const double luma = 0.299 * std::abs(a.at(yy, xx, 0) - b.at(yy, xx, 0)) + 0.587 * std::abs(a.at(yy, xx, 1) - b.at(yy, xx, 1)) +
                                0.114 * std::abs(a.at(yy, xx, 2) - b.at(yy, xx, 2));
            worst = std::max(worst, std::abs(d.at(yy, xx) - std::clamp(10.0 * luma, 0.0, 1.0)));
        }
    }
    const bool pass = std::abs(offset_db - 28.13) <= 0.01 && bw == 0.0 && self == 1.0 && worst <= 1.0 / 510.0;
    return verdict(pass, fmt::format("offset {:.4f} dB, black/white {} dB, SSIM(x,x) {}, diff_map error {:.2e}", offset_db, bw, self, worst));
}

Outcome afd_sanity() {
    const PerceptualBackend backend = default_perceptual();
    const Frame still = random_frame(9, 64, 64);
    const double zero = afd(Clip(std::vector<Frame>(5, still)), backend);
    std::vector<double> values;
    for (int amp : {1, 2, 4, 8}) {
        std::vector<Frame> frames;
        for (int t = 0; t < 5; ++t) {
            CounterRng rng(10, Stream::test, static_cast<std::uint64_t>(t));
            std::vector<float> v(still.samples().begin(), still.samples().end());
            for (float& s : v) s = 0.25f + 0.5f * s + static_cast<float>((2.0 * rng.uniform() - 1.0) * amp / 255.0);
            frames.push_back(Frame::clamped(64, 64, std::move(v)));
        }
        values.push_back(afd(Clip(frames), backend));
    }
    bool increasing = true;
    for (std::size_t i = 1; i < values.size(); ++i) increasing = increasing && values[i] > values[i - 1];
    return verdict(zero == 0.0 && increasing,
                   fmt::format("static {}, noise 1/2/4/8: {:.4f} {:.4f} {:.4f} {:.4f}", zero, values[0], values[1], values[2], values[3]));
}

Outcome flow_exactness() {
    using namespace nightbench::flow;
    const auto batch = random_batch(11, 20, 6, 4);
    const ContextEmbedding ctx = ContextEmbedding::no_rain(4);
    double worst_euler = 0.0, worst_loss = 0.0, worst_fd = 0.0;
    const double h = 1e-5;
    bool fd_ok = true;
    for (const FlowSample& s : batch) {
        const OracleVelocity oracle(s.x0, s.x1);
        for (int n : {1, 4, 50}) {
            const Matrix x1 = euler_integrate(oracle, s.x_con, s.x0, ctx, n);
            worst_euler = std::max(worst_euler, (x1 - s.x1).norm() / s.x1.norm());
        }
        worst_loss = std::max(worst_loss, fm_loss(oracle, s.x_con, s.x0, s.x1, ctx, s.t));
        const double t = std::clamp(s.t, h, 1.0 - h);
        const Matrix fd = (interpolate(s.x0, s.x1, t + h) - interpolate(s.x0, s.x1, t - h)) / (2.0 * h);
        const double err = (fd - velocity_target(s.x0, s.x1)).cwiseAbs().maxCoeff();
        // Central differences of an affine path carry only rounding error.
        const double bound = 8.0 * std::numeric_limits<double>::epsilon() * (s.x0.cwiseAbs().maxCoeff() + s.x1.cwiseAbs().maxCoeff()) / h;
        worst_fd = std::max(worst_fd, err);
        fd_ok = fd_ok && err <= bound;
    }
    const bool pass = worst_euler <= 1e-6 && worst_loss == 0.0 && fd_ok;
    return verdict(pass, fmt::format("Euler rel error {:.2e}, oracle loss {}, finite-difference error {:.2e}", worst_euler, worst_loss, worst_fd));
}

flow::Matrix gaussian(std::uint64_t seed, int rows, int cols, std::uint64_t entity) {
    CounterRng rng(seed, Stream::test, entity);
    flow::Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

Outcome mask_independence() {
    using namespace nightbench::flow;
    CounterRng rng(12, Stream::test, 0);
    for (std::uint64_t draw = 0; draw < 50; ++draw) {
        const int n_con = 1 + static_cast<int>(rng.below(8));
        const int n_gen = 1 + static_cast<int>(rng.below(8));
        const int dim = 2 + static_cast<int>(rng.below(7));
        const auto pos = grid_positions(std::max(n_con, n_gen), 3, 3);
        const Matrix con = gaussian(13, n_con, dim, draw);
        const AttentionWeights w = AttentionWeights::random(500 + draw, dim, 4, dim);
        const AttentionMask mask = build_mask(static_cast<std::size_t>(n_con), static_cast<std::size_t>(n_gen));
        const TokenSequence a = masked_attention(concat_tokens(con, gaussian(14, n_gen, dim, draw), pos), mask, w);
        const TokenSequence b = masked_attention(concat_tokens(con, 25.0 * gaussian(15, n_gen, dim, draw), pos), mask, w);
        const double change = (a.tokens.topRows(n_con) - b.tokens.topRows(n_con)).cwiseAbs().maxCoeff();
        if (change != 0.0) return verdict(false, fmt::format("draw {} changed condition rows by {:.3e}", draw, change));
    }
    return verdict(true, "50 draws, condition-row change exactly 0");
}

Outcome gradient_check() {
    using namespace nightbench::flow;
    const auto batch = random_batch(16, 16, 5, 4);
    const LinearVelocity model = LinearVelocity::random(17, 4, 0.3);
    const double err = grad_check(model, batch, 1e-5);
    return verdict(err < 1e-4, fmt::format("max relative error {:.3e}", err));
}

/// Writes `videos` 8x8 clips of 4 frames with a reference, plus `methods`
/// output directories (method 0 copies the reference) and a manifest.
fs::path write_small_manifest(const fs::path& root, int videos, int methods) {
    nlohmann::json m{{"videos", nlohmann::json::array()}, {"methods", nlohmann::json::array()}};
    for (int v = 0; v < videos; ++v) {
        const std::string id = fmt::format("video{}", v);
        std::vector<Frame> input, reference;
        for (int f = 0; f < 4; ++f) {
            input.push_back(lattice_frame(20 + static_cast<std::uint64_t>(v), 8, 8, static_cast<std::uint64_t>(f)));
            reference.push_back(lattice_frame(40 + static_cast<std::uint64_t>(v), 8, 8, static_cast<std::uint64_t>(f)));
        }
        save_clip(Clip(input), root / "input" / id);
        save_clip(Clip(reference), root / "reference" / id);
        for (int k = 0; k < methods; ++k) save_clip(Clip(k == 0 ? reference : input), root / fmt::format("method{}", k) / id);
        m["videos"].push_back({{"id", id}, {"input", "input/" + id}, {"frames", 4}, {"reference", "reference/" + id}});
    }
    for (int k = 0; k < methods; ++k) m["methods"].push_back({{"name", fmt::format("method{}", k)}, {"root", fmt::format("method{}", k)}});
    std::ofstream(root / "manifest.json") << m.dump(2);
    return root / "manifest.json";
}

Outcome judge_determinism_and_counts() {
    using namespace nightbench::judge;
    TempDir dir("accept_judge");
    const Manifest manifest = load_manifest(write_small_manifest(dir.path(), 4, 2));
    const auto items = build_pairwise(manifest.videos, manifest.methods[0], manifest.methods[1], 77);
    const MockBackend mock(MockPolicy::reference_psnr, manifest_references(manifest));
    DispatchOptions o;
    o.seed = 77;
    auto run = [&] {
        nlohmann::json out = nlohmann::json::array();
        for (const Verdict& v : dispatch(items, mock, o).verdicts) out.push_back(to_json(v));
        return out.dump();
    };
    const std::string first = run();
    const std::string second = run();
    const bool identical = first == second && nlohmann::json::parse(first).size() == items.size();

    // Paper-sized manifest: 124 videos of 90 frames, 8 methods on 2 datasets.
    TempDir big("accept_scale");
    std::vector<VideoEntry> videos;
    for (int v = 0; v < 124; ++v) videos.push_back({fmt::format("v{}", v), big.path() / "in", 90, {}});
    std::vector<MethodEntry> all, ours;
    for (const std::string dataset : {"Ours", "SynNightRain"}) {
        for (int k = 0; k < 8; ++k) {
            MethodEntry e{fmt::format("m{}", k), dataset, big.path() / dataset / std::to_string(k)};
            for (const auto& v : videos) fs::create_directories(e.output_dir(v.id));
            all.push_back(e);
            if (dataset == "Ours") ours.push_back(e);
        }
    }
    const std::size_t pairwise = build_pairwise(videos, all[0], all[8], 1).size();
    const std::size_t multiway = build_multiway(videos, ours, 1).size();
    const std::size_t temporal = build_temporal(videos, all, 90).size();
    const bool counts = pairwise == 372 && multiway == 124 && temporal == 1984;
    return verdict(identical && counts, fmt::format("{} verdicts identical across runs: {}; counts {}/{}/{}", items.size(),
                                                    identical ? "yes" : "no", pairwise, multiway, temporal));
}

Outcome cost_cross_check() {
    using namespace nightbench::judge;
    const CostModel model;
    const double got[3] = {estimate_cost(2976, 3, model).input_mtok, estimate_cost(248, 9, model).input_mtok,
                           estimate_cost(1984, 11, model).input_mtok};
    const double paper[3] = {11.57, 2.82, 27.32};
    bool pass = true;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
        const double rel = std::abs(got[i] - paper[i]) / paper[i];
        pass = pass && rel <= 0.05;
        detail += fmt::format("{}{:.3f} vs {:.2f} ({:+.1f}%)", i ? ", " : "", got[i], paper[i], 100.0 * (got[i] - paper[i]) / paper[i]);
    }
    return verdict(pass, detail + fmt::format(" with {} prompt tokens per item", model.prompt_overhead_in));
}

Outcome rain_synth_invariants() {
    std::vector<std::string> failed;
    auto check = [&](bool ok, const char* name) {
        if (!ok) failed.emplace_back(name);
    };
    RainParams heavy;
    heavy.rain_intensity = 0.35;
    heavy.curtain_density = 1.0;
    heavy.glimmer_intensity = 1.0;

    const SceneBundle lit = crafted_scene(30.0, overhead_lamp({1, 1, 1}, 20.0), 2, 0.2f);
    RainParams none;
    none.rain_intensity = 0.0;
    none.curtain_density = 0.0;
    check(simulate_rain(lit, none, CameraParams{}, RainSeed{1}).rainy == lit.clean, "zero-rain identity");

    const PairedClip a = simulate_rain(lit, heavy, CameraParams{}, RainSeed{2});
    const PairedClip b = simulate_rain(lit, heavy, CameraParams{}, RainSeed{2});
    check(a.rainy == b.rainy && max_abs_change(a) > kVisibilityEpsilon, "seed determinism");

    const SceneBundle dark = crafted_scene(30.0, overhead_lamp({1, 1, 1}, 0.0), 2, 0.2f);
    check(max_abs_change(simulate_rain(dark, heavy, CameraParams{}, RainSeed{3})) == 0.0, "zero-light invisibility");

    LightSource red = overhead_lamp({1.0, 0.0, 0.0}, 20.0);
    red.position = {0.0, 6.0, 9.0};
    red.cone_half_angle = 1.2;
    red.beam_core_half_angle = 0.3;
    const SceneBundle red_scene = crafted_scene(30.0, red, 2, 0.2f);
    const PairedClip r = simulate_rain(red_scene, heavy, CameraParams{}, RainSeed{8});
    std::size_t modified = 0;
    bool red_ok = true;
    for (std::size_t f = 0; f < r.rainy.size(); ++f) {
        for (int y = 0; y < kSize; ++y) {
            for (int x = 0; x < kSize; ++x) {
                const double dr = r.rainy[f].at(y, x, 0) - r.clean[f].at(y, x, 0);
                const double dg = r.rainy[f].at(y, x, 1) - r.clean[f].at(y, x, 1);
                const double db = r.rainy[f].at(y, x, 2) - r.clean[f].at(y, x, 2);
                if (dr == 0.0 && dg == 0.0 && db == 0.0) continue;
                ++modified;
                red_ok = red_ok && dr >= dg && dr >= db;
            }
        }
    }
    check(red_ok && modified > 0, "red-light chromaticity");

    const RainParams calm = calm_rain();
    const RainField one = single_particle({0.0, 0.5, 8.0});
    const bool hidden = max_abs_change(render_rain(crafted_scene(5.0, overhead_lamp()), one, calm, CameraParams{}, RainSeed{1})) == 0.0;
    const bool seen = max_abs_change(render_rain(crafted_scene(50.0, overhead_lamp()), one, calm, CameraParams{}, RainSeed{1})) > kVisibilityEpsilon;
    check(hidden && seen, "occlusion");

    const SceneBundle black = crafted_scene(50.0, overhead_lamp({1, 1, 1}, 1.0), 1, 0.0f);
    RainParams g = calm;
    double previous = -1.0, first = 0.0;
    bool monotone = true;
    for (double level : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        g.glimmer_intensity = level;
        const double peak = peak_added_luma(render_rain(black, one, g, CameraParams{}, RainSeed{1}));
        monotone = monotone && peak >= previous;
        if (level == 0.0) first = peak;
        previous = peak;
    }
    check(monotone && previous > first, "glimmer monotonicity");

    if (failed.empty()) return verdict(true, fmt::format("6 invariants hold on 64x64 crafted scenes ({} red-lit pixels)", modified));
    std::string names;
    for (const auto& n : failed) names += (names.empty() ? "" : ", ") + n;
    return verdict(false, "failed: " + names);
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", NIGHTBENCH_CLI, args, log.string());
    const int status = std::system(cmd.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

Outcome end_to_end_bench() {
    TempDir dir("accept_bench");
    const fs::path data = dir.path() / "data";
    if (run_cli(fmt::format("synth --out \"{}\" --clips 3 --frames 12 --height 96 --width 160 --seed 11", data.string()), dir.path() / "synth.log") != 0) {
        return verdict(false, "synth subcommand failed");
    }
    const nlohmann::json config{{"dataset", {{"rainy", "data/rainy"}, {"clean", "data/clean"}}},
                                {"methods", {{{"name", "passthrough"}}, {{"name", "temporal-median"}, {"kind", "temporal_median"}, {"window", 5}}}},
                                {"seed", 11},
                                {"output", "report.json"}};
    std::ofstream(dir.path() / "bench.json") << config.dump(2);
    if (run_cli(fmt::format("bench --config \"{}\"", (dir.path() / "bench.json").string()), dir.path() / "bench.log") != 0) {
        return verdict(false, "bench subcommand failed");
    }
    std::ifstream in(dir.path() / "report.json");
    const nlohmann::json report = nlohmann::json::parse(in);
    for (const char* key : {"config", "dataset", "per_method", "failures", "cost_estimate", "timestamp", "seed"}) {
        if (!report.contains(key)) return verdict(false, fmt::format("report lacks '{}'", key));
    }
    for (const char* method : {"passthrough", "temporal-median"}) {
        const auto& m = report["per_method"][method];
        if (m["per_clip"].size() != 3) return verdict(false, fmt::format("{} has {} clip rows", method, m["per_clip"].size()));
        for (const char* metric : {"psnr", "ssim", "afd"}) {
            if (!m["aggregate"].contains(metric)) return verdict(false, fmt::format("{} lacks {}", method, metric));
        }
    }
    const double median = report["per_method"]["temporal-median"]["aggregate"]["psnr"].get<double>();
    const double pass = report["per_method"]["passthrough"]["aggregate"]["psnr"].get<double>();
    return verdict(report["failures"].empty() && median > pass,
                   fmt::format("mean PSNR temporal-median {:.3f} dB vs passthrough {:.3f} dB", median, pass));
}

Outcome iteration_matcher() {
    std::map<std::string, std::string> shown;
    for (const auto& s : harness::benchmark_schedules()) shown[s.method] = harness::format_iterations(harness::match_iterations(s));
    const bool pass = shown["ESTINet"] == "79.7K" && shown["RLP"] == "74.7K" && shown["UConNet"] == "375K";
    return verdict(pass, fmt::format("ESTINet {}, RLP {}, UConNet {}", shown["ESTINet"], shown["RLP"], shown["UConNet"]));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"Grid-table reproduction", grid_table_rows},
        {"Tiling round-trip", tiling_round_trip},
        {"Metric closed forms", metric_closed_forms},
        {"AFD sanity", afd_sanity},
        {"Flow-matching exactness", flow_exactness},
        {"Mask independence", mask_independence},
        {"Gradient check", gradient_check},
        {"Judge determinism & counts", judge_determinism_and_counts},
        {"Cost-model cross-check", cost_cross_check},
        {"Rain-synth invariants", rain_synth_invariants},
        {"End-to-end bench", end_to_end_bench},
        {"Iteration matcher", iteration_matcher},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = verdict(false, std::string("exception: ") + e.what());
        }
        failures += !o.pass;
        std::cout << fmt::format("{} {:>2}. {}: {}", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail) << std::endl;
    }
    std::cout << fmt::format("{}/{} acceptance criteria passed", criteria.size() - static_cast<std::size_t>(failures), criteria.size())
              << std::endl;
    return failures == 0 ? 0 : 1;
}
