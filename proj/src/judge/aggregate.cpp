#include "nightbench/judge/aggregate.hpp"

#include <fmt/format.h>

#include "nightbench/core/error.hpp"

namespace nightbench::judge {

namespace {

std::string method_name(const std::string& key, const std::string& dataset) {
    if (dataset.empty()) return key;
    const std::string suffix = "@" + dataset;
    if (key.size() > suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return key.substr(0, key.size() - suffix.size());
    }
    return key;
}

}  // namespace

PreferenceSummary preference_rate(const std::vector<Verdict>& verdicts, const std::vector<EvaluationItem>& items) {
    PreferenceSummary s;
    for (const EvaluationItem& item : items) {
        if (item.protocol != Protocol::pairwise) continue;
        for (const auto& [letter, method] : item.labels) s.methods.emplace(method, MethodPreference{});
    }
    for (const Verdict& v : verdicts) {
        if (v.protocol != Protocol::pairwise) continue;
        if (v.item_index >= items.size()) throw ValidationError(fmt::format("verdict for unknown item {}", v.item_index));
        const EvaluationItem& item = items[v.item_index];
        ++s.items;
        if (v.choice == "tie") {
            ++s.ties;
            for (const auto& [letter, method] : item.labels) ++s.methods[method].ties;
            continue;
        }
        for (const auto& [letter, method] : item.labels) {
            if (letter == v.choice) {
                ++s.methods[method].wins;
            } else {
                ++s.methods[method].losses;
            }
        }
    }
    if (s.items > 0) s.tie_share = static_cast<double>(s.ties) / static_cast<double>(s.items);
    for (auto& [method, p] : s.methods) {
        if (p.wins + p.losses > 0) p.rate = static_cast<double>(p.wins) / static_cast<double>(p.wins + p.losses);
        if (s.items > 0) p.win_share = static_cast<double>(p.wins) / static_cast<double>(s.items);
    }
    return s;
}

std::string format_percent(std::optional<double> fraction) {
    if (!fraction) return "n/a";
    return fmt::format("{:.1f}%", *fraction * 100.0);
}

std::string format_preference_row(const PreferenceSummary& s, const std::string& first, const std::string& second) {
    auto share = [&](const std::string& m) -> std::optional<double> {
        auto it = s.methods.find(m);
        if (it == s.methods.end()) throw ValidationError(fmt::format("no pairwise results for method '{}'", m));
        if (s.items == 0) return std::nullopt;
        return it->second.win_share;
    };
    const auto a = share(first);
    const auto b = share(second);
    const std::optional<double> tie = s.items == 0 ? std::nullopt : std::optional<double>(s.tie_share);
    return fmt::format("{} / {} / {}", format_percent(a), format_percent(tie), format_percent(b));
}

RatingTable aggregate_ratings(const std::vector<Verdict>& verdicts, const std::vector<std::pair<std::string, std::string>>& cells) {
    RatingTable t;
    for (const auto& cell : cells) t.emplace(cell, RatingCell{});
    for (const Verdict& v : verdicts) {
        if (v.protocol != Protocol::temporal || !v.rating) continue;
        RatingCell& c = t[{method_name(v.resolved_method, v.dataset), v.dataset}];
        ++c.count;
        c.sum += *v.rating;
    }
    for (auto& [key, c] : t) {
        if (c.count > 0) c.mean = c.sum / static_cast<double>(c.count);
    }
    return t;
}

std::string format_rating(const RatingCell& cell) { return cell.mean ? fmt::format("{:.2f}", *cell.mean) : "-"; }

std::map<std::string, std::size_t> multiway_wins(const std::vector<Verdict>& verdicts) {
    std::map<std::string, std::size_t> wins;
    for (const Verdict& v : verdicts) {
        if (v.protocol == Protocol::multiway && !v.resolved_method.empty()) ++wins[v.resolved_method];
    }
    return wins;
}

nlohmann::json to_json(const PreferenceSummary& s) {
    nlohmann::json methods = nlohmann::json::object();
    for (const auto& [m, p] : s.methods) {
        methods[m] = {{"wins", p.wins}, {"losses", p.losses}, {"ties", p.ties}, {"win_share", p.win_share},
                      {"preference_rate", p.rate ? nlohmann::json(*p.rate) : nlohmann::json(nullptr)}};
    }
    return {{"items", s.items}, {"ties", s.ties}, {"tie_share", s.tie_share}, {"methods", methods}};
}

nlohmann::json to_json(const RatingTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [key, c] : t) {
        rows.push_back({{"method", key.first}, {"dataset", key.second}, {"count", c.count},
                        {"mean", c.mean ? nlohmann::json(*c.mean) : nlohmann::json(nullptr)}});
    }
    return rows;
}

}  // namespace nightbench::judge
