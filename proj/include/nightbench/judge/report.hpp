#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "nightbench/judge/aggregate.hpp"
#include "nightbench/judge/cost.hpp"

namespace nightbench::judge {

/// Report of one judge run: verdicts, failures, the protocol summary and the
/// cost estimate. Contains no timestamps, so equal inputs give equal bytes.
nlohmann::json judge_report(Protocol protocol, std::uint64_t seed, const std::string& backend, const std::vector<EvaluationItem>& items,
                            const DispatchResult& result, const CostModel& cost);

/// Plain-text table in the paper's layout for the protocol.
std::string render_judge_table(Protocol protocol, const std::vector<EvaluationItem>& items, const DispatchResult& result);

}  // namespace nightbench::judge
