#include "nightbench/judge/cost.hpp"

#include <cmath>

#include "nightbench/core/error.hpp"

namespace nightbench::judge {

void CostModel::validate() const {
    for (double v : {tokens_per_image, prompt_overhead_in, output_per_item, price_in, price_out}) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("cost model values must be finite and >= 0");
    }
}

CostEstimate& CostEstimate::operator+=(const CostEstimate& o) {
    input_mtok += o.input_mtok;
    output_mtok += o.output_mtok;
    cost += o.cost;
    return *this;
}

CostEstimate estimate_cost(std::size_t items, std::size_t images_per_item, const CostModel& model) {
    model.validate();
    const double n = static_cast<double>(items);
    CostEstimate e;
    e.input_mtok = n * (static_cast<double>(images_per_item) * model.tokens_per_image + model.prompt_overhead_in) / 1e6;
    e.output_mtok = n * model.output_per_item / 1e6;
    e.cost = e.input_mtok * model.price_in + e.output_mtok * model.price_out;
    return e;
}

CostEstimate estimate_cost(const std::vector<EvaluationItem>& items, const CostModel& model) {
    model.validate();
    CostEstimate total;
    for (const EvaluationItem& item : items) total += estimate_cost(1, item.image_count(), model);
    return total;
}

void to_json(nlohmann::json& j, const CostModel& m) {
    j = {{"tokens_per_image", m.tokens_per_image},
         {"prompt_overhead_in", m.prompt_overhead_in},
         {"output_per_item", m.output_per_item},
         {"price_in", m.price_in},
         {"price_out", m.price_out}};
}

void from_json(const nlohmann::json& j, CostModel& m) {
    CostModel d;
    m.tokens_per_image = j.value("tokens_per_image", d.tokens_per_image);
    m.prompt_overhead_in = j.value("prompt_overhead_in", d.prompt_overhead_in);
    m.output_per_item = j.value("output_per_item", d.output_per_item);
    m.price_in = j.value("price_in", d.price_in);
    m.price_out = j.value("price_out", d.price_out);
    m.validate();
}

void to_json(nlohmann::json& j, const CostEstimate& e) {
    j = {{"input_mtok", e.input_mtok}, {"output_mtok", e.output_mtok}, {"cost_usd", e.cost}};
}

}  // namespace nightbench::judge
