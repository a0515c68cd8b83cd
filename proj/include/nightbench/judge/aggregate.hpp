#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nightbench/judge/dispatch.hpp"

namespace nightbench::judge {

struct MethodPreference {
    std::size_t wins = 0;
    std::size_t losses = 0;
    std::size_t ties = 0;
    /// wins / (wins + losses); empty when every item was a tie.
    std::optional<double> rate;
    /// Wins over all items, ties included.
    double win_share = 0.0;
};

struct PreferenceSummary {
    std::size_t items = 0;
    std::size_t ties = 0;
    double tie_share = 0.0;
    std::map<std::string, MethodPreference> methods;
};

/// Pairwise verdicts only. Each item credits its chosen method with a win and
/// the other labelled method with a loss.
PreferenceSummary preference_rate(const std::vector<Verdict>& verdicts, const std::vector<EvaluationItem>& items);

/// "16.4% / 6.5% / 77.2%": first's share of all items, tie share, second's share.
std::string format_preference_row(const PreferenceSummary& s, const std::string& first, const std::string& second);

/// Percentage with one decimal, or "n/a" for an undefined rate.
std::string format_percent(std::optional<double> fraction);

struct RatingCell {
    std::size_t count = 0;
    double sum = 0.0;
    std::optional<double> mean;  // empty marks a missing cell
};

/// (method name, dataset) -> mean rating.
using RatingTable = std::map<std::pair<std::string, std::string>, RatingCell>;

/// Temporal verdicts only. `cells` lists cells that must appear even when
/// they received no ratings.
RatingTable aggregate_ratings(const std::vector<Verdict>& verdicts, const std::vector<std::pair<std::string, std::string>>& cells = {});

/// "4.46", or "-" for a missing cell.
std::string format_rating(const RatingCell& cell);

/// Multi-way: number of items each method won.
std::map<std::string, std::size_t> multiway_wins(const std::vector<Verdict>& verdicts);

nlohmann::json to_json(const PreferenceSummary& s);
nlohmann::json to_json(const RatingTable& t);

}  // namespace nightbench::judge
