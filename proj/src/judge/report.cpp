#include "nightbench/judge/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <sstream>

namespace nightbench::judge {

namespace {

// Sorted method keys of every candidate in the items.
std::vector<std::string> methods_in_order(const std::vector<EvaluationItem>& items) {
    std::vector<std::string> order;
    std::set<std::string> seen;
    for (const EvaluationItem& item : items) {
        for (const ImageRef& img : item.images) {
            if (img.role != ImageRole::candidate) continue;
            const std::string& m = item.labels.at(img.label);
            if (seen.insert(m).second) order.push_back(m);
        }
    }
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<std::pair<std::string, std::string>> rating_cells(const std::vector<EvaluationItem>& items) {
    std::set<std::pair<std::string, std::string>> cells;
    for (const EvaluationItem& item : items) {
        const std::string& key = item.labels.begin()->second;
        const std::string name = item.dataset.empty() ? key : key.substr(0, key.size() - item.dataset.size() - 1);
        cells.emplace(name, item.dataset);
    }
    return {cells.begin(), cells.end()};
}

}  // namespace

nlohmann::json judge_report(Protocol protocol, std::uint64_t seed, const std::string& backend, const std::vector<EvaluationItem>& items,
                            const DispatchResult& result, const CostModel& cost) {
    nlohmann::json verdicts = nlohmann::json::array();
    for (const Verdict& v : result.verdicts) verdicts.push_back(to_json(v));
    nlohmann::json failures = nlohmann::json::array();
    for (const DispatchFailure& f : result.failures) failures.push_back(to_json(f));

    nlohmann::json summary;
    switch (protocol) {
        case Protocol::pairwise: {
            const PreferenceSummary s = preference_rate(result.verdicts, items);
            summary = to_json(s);
            const auto methods = methods_in_order(items);
            if (methods.size() == 2) summary["row"] = format_preference_row(s, methods[0], methods[1]);
            break;
        }
        case Protocol::multiway: summary = {{"wins", multiway_wins(result.verdicts)}}; break;
        case Protocol::temporal: summary = {{"ratings", to_json(aggregate_ratings(result.verdicts, rating_cells(items)))}}; break;
    }
    std::size_t image_count = 0;
    for (const EvaluationItem& item : items) image_count += item.image_count();
    nlohmann::json cost_model;
    to_json(cost_model, cost);
    nlohmann::json estimate;
    to_json(estimate, estimate_cost(items, cost));

    return {{"protocol", to_string(protocol)},
            {"seed", seed},
            {"backend", backend},
            {"item_count", items.size()},
            {"image_count", image_count},
            {"batches", result.batches},
            {"batch_images", result.batch_images},
            {"verdicts", verdicts},
            {"failures", failures},
            {"summary", summary},
            {"cost_model", cost_model},
            {"cost", estimate}};
}

std::string render_judge_table(Protocol protocol, const std::vector<EvaluationItem>& items, const DispatchResult& result) {
    std::ostringstream out;
    switch (protocol) {
        case Protocol::pairwise: {
            const PreferenceSummary s = preference_rate(result.verdicts, items);
            const auto methods = methods_in_order(items);
            if (methods.size() != 2) {
                out << "pairwise results need exactly two methods\n";
                break;
            }
            out << fmt::format("{} vs {} ({} items)\n", methods[0], methods[1], s.items);
            out << fmt::format("{} / Tie / {}: {}\n", methods[0], methods[1], format_preference_row(s, methods[0], methods[1]));
            for (const auto& m : methods) out << fmt::format("preference rate {}: {}\n", m, format_percent(s.methods.at(m).rate));
            break;
        }
        case Protocol::multiway: {
            const auto wins = multiway_wins(result.verdicts);
            const double n = static_cast<double>(result.verdicts.size());
            out << fmt::format("{:<24} {:>6} {:>8}\n", "Method", "Wins", "Share");
            for (const auto& m : methods_in_order(items)) {
                const std::size_t w = wins.count(m) ? wins.at(m) : 0;
                out << fmt::format("{:<24} {:>6} {:>8}\n", m, w,
                                   format_percent(n > 0 ? std::optional<double>(static_cast<double>(w) / n) : std::nullopt));
            }
            break;
        }
        case Protocol::temporal: {
            const RatingTable t = aggregate_ratings(result.verdicts, rating_cells(items));
            std::set<std::string> names, datasets;
            for (const auto& [key, cell] : t) {
                names.insert(key.first);
                datasets.insert(key.second);
            }
            out << fmt::format("{:<24}", "Method");
            for (const auto& d : datasets) out << fmt::format(" {:>14}", d.empty() ? "rating" : d);
            out << "\n";
            for (const auto& m : names) {
                out << fmt::format("{:<24}", m);
                for (const auto& d : datasets) {
                    auto it = t.find({m, d});
                    out << fmt::format(" {:>14}", it == t.end() ? "-" : format_rating(it->second));
                }
                out << "\n";
            }
            break;
        }
    }
    if (!result.failures.empty()) out << fmt::format("{} item(s) failed\n", result.failures.size());
    return out.str();
}

}  // namespace nightbench::judge
