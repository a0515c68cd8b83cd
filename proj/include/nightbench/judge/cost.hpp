#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "nightbench/judge/items.hpp"

namespace nightbench::judge {

/// Token and price assumptions. Prices are per million tokens.
struct CostModel {
    double tokens_per_image = 1229.0;  // one 1280x720 image
    double prompt_overhead_in = 200.0; // prompt text per item
    double output_per_item = 100.0;    // justification + choice
    double price_in = 5.0;
    double price_out = 25.0;

    void validate() const;
};

struct CostEstimate {
    double input_mtok = 0.0;
    double output_mtok = 0.0;
    double cost = 0.0;

    CostEstimate& operator+=(const CostEstimate& o);
    friend CostEstimate operator+(CostEstimate a, const CostEstimate& b) { return a += b; }
};

CostEstimate estimate_cost(const std::vector<EvaluationItem>& items, const CostModel& model = {});
/// Same arithmetic for `items` items of `images_per_item` images each.
CostEstimate estimate_cost(std::size_t items, std::size_t images_per_item, const CostModel& model = {});

void to_json(nlohmann::json& j, const CostModel& m);
void from_json(const nlohmann::json& j, CostModel& m);
void to_json(nlohmann::json& j, const CostEstimate& e);

}  // namespace nightbench::judge
