#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vqad/image.hpp"
#include "vqad/region_map.hpp"
#include "vqad/scores.hpp"

namespace vqad {

// Category-injected instruction text sent alongside the fused image.
std::string build_prompt(const std::string& category);

/// The full query payload: instruction text plus the fused overlay image.
struct PromptBundle {
    std::string category;
    std::string prompt_text;
    ImageBuffer fused_image;
};

// Builds the bundle and checks the template invariant (the category appears
// exactly once in the prompt text).
PromptBundle build_prompt_bundle(const std::string& category, ImageBuffer fused_image);

struct ParseResult {
    RegionScores scores;
    std::vector<std::string> warnings;
};

// Total over arbitrary bytes. Strips markdown decoration (*, _, `, #,
// leading list bullets), then matches every "region <int> [:-=] <real>"
// case-insensitively. Scores clamp to [0, 1], ids unknown to `rm` are
// dropped, duplicates keep the maximum; each such event adds a warning.
ParseResult parse_region_scores(std::string_view text, const RegionMap& rm);

// "region 1: 0.9; region 3: 0.7" with shortest round-trip score formatting.
std::string format_region_scores(const RegionScores& rs);

// Pixel score = region score where present, 0 elsewhere (incl. background).
AnomalyMap scores_to_anomaly_map(const RegionMap& rm, const RegionScores& rs);

// Image-level score: maximum region score, 0 when empty.
double image_score(const RegionScores& rs);

} // namespace vqad
