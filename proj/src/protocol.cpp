#include "vqad/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>

#include "vqad/error.hpp"
#include "vqad/kernels/kernels.hpp"

namespace vqad {

std::string build_prompt(const std::string& category) {
    if (category.empty())
        raise(errc::invalid_input, "build_prompt: empty category");
    std::string prompt = "This is an image of ";
    prompt += category;
    prompt +=
        ". The image has different region divisions, each distinguished by white edges and each "
        "with a unique numerical identifier within the region, starting from 1. Each region may "
        "exhibit anomalies of unknown types, and anomaly scores range from 0 to 1, with higher "
        "values indicating a higher probability of an anomaly. Please output the anomaly scores "
        "for the regions with anomalies. Provide the answer in the following format: "
        "\xE2\x80\x9Cregion 1: 0.9; region 3: 0.7.\". Ignore the region that does not contain "
        "anomalies.";
    return prompt;
}

PromptBundle build_prompt_bundle(const std::string& category, ImageBuffer fused_image) {
    PromptBundle bundle;
    bundle.category = category;
    bundle.prompt_text = build_prompt(category);
    bundle.fused_image = std::move(fused_image);

    std::size_t occurrences = 0;
    for (std::size_t pos = bundle.prompt_text.find(category); pos != std::string::npos;
         pos = bundle.prompt_text.find(category, pos + 1))
        ++occurrences;
    if (occurrences != 1)
        raise(errc::invalid_input, "prompt must contain the category exactly once; '" + category +
                                       "' appears " + std::to_string(occurrences) + " times");
    return bundle;
}

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

// Markdown decoration: emphasis/heading characters anywhere, plus "- " / "+ "
// bullets at line starts.
std::string strip_decoration(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool at_line_start = true;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '*' || c == '_' || c == '`' || c == '#')
            continue;
        if (at_line_start && (c == '-' || c == '+') && i + 1 < text.size() && is_ws(text[i + 1]))
            continue;
        out.push_back(c);
        if (c == '\n')
            at_line_start = true;
        else if (!is_ws(c))
            at_line_start = false;
    }
    return out;
}

bool match_region_keyword(std::string_view s, std::size_t pos) {
    static constexpr std::string_view kw = "region";
    if (pos + kw.size() > s.size())
        return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != kw[i])
            return false;
    return true;
}

std::size_t skip_ws(std::string_view s, std::size_t pos) {
    while (pos < s.size() && is_ws(s[pos]))
        ++pos;
    return pos;
}

// [+-]? digits [. digits?] [eE [+-]? digits]; returns one-past-end or pos on
// no match.
std::size_t scan_real(std::string_view s, std::size_t pos) {
    std::size_t p = pos;
    if (p < s.size() && (s[p] == '+' || s[p] == '-'))
        ++p;
    std::size_t digits = 0;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
        ++p;
        ++digits;
    }
    if (p < s.size() && s[p] == '.') {
        ++p;
        while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
            ++p;
            ++digits;
        }
    }
    if (digits == 0)
        return pos;
    if (p < s.size() && (s[p] == 'e' || s[p] == 'E')) {
        std::size_t q = p + 1;
        if (q < s.size() && (s[q] == '+' || s[q] == '-'))
            ++q;
        std::size_t exp_digits = 0;
        while (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) {
            ++q;
            ++exp_digits;
        }
        if (exp_digits > 0)
            p = q;
    }
    return p;
}

} // namespace

ParseResult parse_region_scores(std::string_view text, const RegionMap& rm) {
    ParseResult result;
    const std::string s = strip_decoration(text);

    for (std::size_t pos = 0; pos < s.size(); ++pos) {
        if (!match_region_keyword(s, pos))
            continue;
        std::size_t p = pos + 6;
        if (p >= s.size() || !is_ws(s[p]))
            continue; // "regions", "regional", ...
        p = skip_ws(s, p);

        const std::size_t id_begin = p;
        while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p])))
            ++p;
        if (p == id_begin)
            continue;
        const std::size_t id_end = p;

        p = skip_ws(s, p);
        if (p >= s.size() || (s[p] != ':' && s[p] != '-' && s[p] != '='))
            continue;
        ++p;
        p = skip_ws(s, p);

        const std::size_t num_end = scan_real(s, p);
        if (num_end == p)
            continue;

        std::uint64_t id = 0;
        const auto id_res = std::from_chars(s.data() + id_begin, s.data() + id_end, id);
        if (id_res.ec != std::errc{} || id > 65535) {
            result.warnings.push_back("unparseable region id '" + std::string(s.substr(id_begin, id_end - id_begin)) + "'");
            pos = num_end - 1;
            continue;
        }

        double score = 0.0;
        const auto sc_res = std::from_chars(s.data() + p, s.data() + num_end, score);
        if (sc_res.ec == std::errc::result_out_of_range) {
            // Magnitude overflow/underflow; the sign decides the clamp side.
            score = s[p] == '-' ? -1.0 : 2.0;
        } else if (sc_res.ec != std::errc{}) {
            pos = num_end - 1;
            continue;
        }

        const std::uint16_t rid = static_cast<std::uint16_t>(id);
        if (id == 0 || id > static_cast<std::uint64_t>(rm.region_count())) {
            result.warnings.push_back("dropped unknown region id " + std::to_string(id));
            pos = num_end - 1;
            continue;
        }
        if (score < 0.0 || score > 1.0) {
            result.warnings.push_back("clamped out-of-range score for region " + std::to_string(id));
            score = std::clamp(score, 0.0, 1.0);
        }
        auto [it, inserted] = result.scores.entries.emplace(rid, score);
        if (!inserted) {
            result.warnings.push_back("duplicate region " + std::to_string(id) + ": keeping maximum score");
            it->second = std::max(it->second, score);
        }
        pos = num_end - 1;
    }
    return result;
}

std::string format_region_scores(const RegionScores& rs) {
    std::string out;
    bool first = true;
    char buf[64];
    for (const auto& [id, score] : rs.entries) {
        if (!first)
            out += "; ";
        first = false;
        out += "region ";
        out += std::to_string(id);
        out += ": ";
        const auto res = std::to_chars(buf, buf + sizeof(buf), score);
        out.append(buf, res.ptr);
    }
    return out;
}

AnomalyMap scores_to_anomaly_map(const RegionMap& rm, const RegionScores& rs) {
    for (const auto& [id, score] : rs.entries)
        if (id == 0 || id > rm.regions.size())
            raise(errc::invalid_input, "scores_to_anomaly_map: score for unknown region id " + std::to_string(id));

    std::vector<float> lut(rm.regions.size() + 1, 0.0f);
    for (const auto& [id, score] : rs.entries)
        lut[id] = static_cast<float>(score);

    AnomalyMap map(rm.width, rm.height);
    kernels::active().fill_from_lut(rm.labels.data(), rm.labels.size(), lut.data(), map.scores.data());
    return map;
}

double image_score(const RegionScores& rs) {
    double best = 0.0;
    for (const auto& [id, score] : rs.entries)
        best = std::max(best, score);
    return best;
}

} // namespace vqad
