#pragma once

#include <filesystem>
#include <string>

#include "nightbench/judge/items.hpp"

namespace nightbench::judge {

/// Quality prompt shared by the pairwise and multi-way protocols.
extern const char* const kQualityPrompt;
/// Temporal-consistency rating prompt.
extern const char* const kTemporalPrompt;

struct PromptSet {
    std::string quality = kQualityPrompt;
    std::string temporal = kTemporalPrompt;

    const std::string& for_protocol(Protocol p) const { return p == Protocol::temporal ? temporal : quality; }
};

/// Reads a replacement prompt text from a file.
std::string load_prompt(const std::filesystem::path& path);

/// Protocol prompt followed by the response-format instructions of the wire
/// contract (JSON array of {item_index, choice, justification}).
std::string render_prompt(const std::string& protocol_prompt, Protocol protocol, bool allow_tie);

}  // namespace nightbench::judge
