#include "nightbench/harness/grid_table.hpp"

#include <fmt/format.h>

namespace nightbench::harness {

namespace {

std::string wxh(Dims d) { return fmt::format("{}×{}", d.width, d.height); }

}  // namespace

std::vector<SlidingWindowMethod> sliding_window_methods() {
    using M = SlidingWindowMethod;
    return {
        M{"ESTINet", {224, 224}, TileMode::non_overlapping, std::nullopt, PadRule::next_multiple, false},
        M{"RDD-Net", {128, 128}, TileMode::non_overlapping, std::nullopt, PadRule::next_multiple, false},
        M{"RLP", {256, 256}, TileMode::non_overlapping, std::nullopt, PadRule::add_remainder, false},
        M{"Turtle", {128, 128}, TileMode::non_overlapping, std::nullopt, PadRule::next_multiple, false},
        M{"UConNet", {128, 128}, TileMode::non_overlapping, std::nullopt, PadRule::next_multiple, false},
        M{"WeatherDiff", {64, 64}, TileMode::overlapping, Dims{16, 16}, PadRule::next_multiple, false},
        M{"NightRain", {64, 64}, TileMode::non_overlapping, std::nullopt, PadRule::next_multiple, false},
        M{"Our Baseline", {0, 0}, TileMode::non_overlapping, std::nullopt, PadRule::next_multiple, true},
    };
}

GridPlanner tiler_planner() {
    return [](Dims frame, Dims patch, TileMode mode, std::optional<Dims> stride, PadRule rule) {
        return plan_grid(frame, patch, mode, stride, rule);
    };
}

std::string GridTableRow::cells() const { return fmt::format("{} | {} | {} | {}", patch, padded, grid, patches); }

std::string group_thousands(std::size_t value) {
    std::string digits = std::to_string(value);
    for (int i = static_cast<int>(digits.size()) - 3; i > 0; i -= 3) digits.insert(static_cast<std::size_t>(i), ",");
    return digits;
}

std::vector<GridTableRow> grid_table(Dims frame, const GridPlanner& planner) {
    std::vector<GridTableRow> rows;
    for (const SlidingWindowMethod& m : sliding_window_methods()) {
        const Dims patch = m.full_frame ? frame : m.patch;
        const TileGrid g = planner(frame, patch, m.mode, m.stride, m.pad_rule);
        GridTableRow row;
        row.method = m.method;
        if (m.full_frame) {
            row.patch = "Full frame";
            row.padded = "N/A";
        } else {
            row.patch = wxh(patch);
            if (m.mode == TileMode::overlapping) row.patch += fmt::format(" (r={})", g.stride.width);
            row.padded = m.mode == TileMode::overlapping ? "Overlapping" : wxh(g.padded);
        }
        row.grid = fmt::format("{}×{}", g.cols, g.rows);
        row.patches = group_thousands(g.patch_count());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string emit_grid_table(Dims frame, const GridPlanner& planner) {
    std::string out = fmt::format("Sliding-window configuration at {}\n", wxh(frame));
    out += fmt::format("{:<14} | Patch Size | Padded Size | Grid | Patches/Frame\n", "Method");
    for (const GridTableRow& r : grid_table(frame, planner)) out += fmt::format("{:<14} | {}\n", r.method, r.cells());
    return out;
}

}  // namespace nightbench::harness
