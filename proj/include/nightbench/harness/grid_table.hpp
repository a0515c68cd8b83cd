#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nightbench/tiler/tiler.hpp"

namespace nightbench::harness {

/// Sliding-window inference setup of one method.
struct SlidingWindowMethod {
    std::string method;
    Dims patch;
    TileMode mode = TileMode::non_overlapping;
    std::optional<Dims> stride;
    PadRule pad_rule = PadRule::next_multiple;
    /// Processes whole frames; the patch equals the frame.
    bool full_frame = false;
};

std::vector<SlidingWindowMethod> sliding_window_methods();

using GridPlanner = std::function<TileGrid(Dims, Dims, TileMode, std::optional<Dims>, PadRule)>;

/// Default planner, tiler::plan_grid.
GridPlanner tiler_planner();

struct GridTableRow {
    std::string method;
    std::string patch;    // "224×224", "64×64 (r=16)"
    std::string padded;   // "1344×896" (W×H), "Overlapping"
    std::string grid;     // "6×4" (cols×rows)
    std::string patches;  // "24", "3,234"

    /// "224×224 | 1344×896 | 6×4 | 24"
    std::string cells() const;
};

/// Every row planned live for the frame size.
std::vector<GridTableRow> grid_table(Dims frame = {720, 1280}, const GridPlanner& planner = tiler_planner());

/// Plain-text table with a header line.
std::string emit_grid_table(Dims frame = {720, 1280}, const GridPlanner& planner = tiler_planner());

/// 3234 -> "3,234".
std::string group_thousands(std::size_t value);

}  // namespace nightbench::harness
