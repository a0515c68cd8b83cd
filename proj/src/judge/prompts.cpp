#include "nightbench/judge/prompts.hpp"

#include <fstream>
#include <sstream>

#include "nightbench/core/error.hpp"

namespace nightbench::judge {

const char* const kQualityPrompt =
    "You are conducting a blind evaluation of image deraining quality. For each comparison, you will view a rainy input image "
    "and N candidate derained images labeled with letters. Your job is to pick the candidate with the best deraining quality.\n"
    "\n"
    "Compare candidates on the following criteria:\n"
    "(1) Rain removal: how effectively are rain streaks, rain drops, rain curtains, and rain-induced fog removed?\n"
    "(2) Detail preservation: are scene structures, textures, edges, and fine details maintained?\n"
    "(3) Artifact avoidance: does the result avoid introducing blocking artifacts, color distortions, excessive blurring, or "
    "visual hallucinations?\n"
    "(4) Overall quality: considering all factors, which result looks most natural and visually clean?\n"
    "\n"
    "For each comparison, view the input image first for context, then view all candidates, choose the best one based on the "
    "criteria above, and provide a one-sentence justification.";

const char* const kTemporalPrompt =
    "You are evaluating the temporal consistency of video deraining results. Rate the following video sequence on a 1 to 5 "
    "scale:\n"
    "\n"
    "5 (Excellent): No visible temporal artifacts. Smooth, natural frame-to-frame transitions.\n"
    "4 (Good): Very minor temporal inconsistencies, barely noticeable.\n"
    "3 (Fair): Noticeable temporal artifacts. Some flickering, inconsistent deraining across frames, or minor ghosting.\n"
    "2 (Poor): Significant temporal artifacts. Obvious flickering, prominent frame-to-frame inconsistencies.\n"
    "1 (Very Poor): Severe temporal artifacts. Extreme flickering, frames appear unrelated.\n"
    "\n"
    "What to look for: flickering (unexpected brightness or color changes in static regions), inconsistent rain removal across "
    "consecutive frames, ghosting or bleeding artifacts, and whether real scene motion appears smooth and continuous. Use the "
    "difference maps to detect subtle flickering: bright patches in regions that should be static indicate temporal artifacts.\n"
    "\n"
    "Read all images (input frames, output frames, difference maps), then rate 1 to 5 and give a one-sentence reason.";

std::string load_prompt(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open prompt file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    std::string s = text.str();
    if (s.find_first_not_of(" \t\r\n") == std::string::npos) throw ValidationError("prompt file " + path.string() + " is empty");
    return s;
}

std::string render_prompt(const std::string& protocol_prompt, Protocol protocol, bool allow_tie) {
    std::string out = protocol_prompt;
    out +=
        "\n\nImages are grouped by item_index. Reply with only a JSON array holding one object per item: "
        "{\"item_index\": <int>, \"justification\": <one sentence>, \"choice\": ";
    if (protocol == Protocol::temporal) {
        out += "<integer rating 1 to 5>}.";
    } else if (allow_tie) {
        out += "<candidate letter, or \"tie\" if the candidates are visually indistinguishable>}.";
    } else {
        out += "<candidate letter>}.";
    }
    out += " Write the justification before the choice.";
    return out;
}

}  // namespace nightbench::judge
