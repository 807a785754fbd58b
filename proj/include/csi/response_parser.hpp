#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csi/errors.hpp"
#include "csi/protocol.hpp"
#include "csi/text.hpp"

namespace csi {

enum class Label { POSITIVE, NEGATIVE, NEUTRAL, MISSING };

inline std::string to_string(Label label) {
    switch (label) {
        case Label::POSITIVE: return "POSITIVE";
        case Label::NEGATIVE: return "NEGATIVE";
        case Label::NEUTRAL: return "NEUTRAL";
        default: return "MISSING";
    }
}

inline Label label_from_string(std::string_view s) {
    if (s == "POSITIVE") return Label::POSITIVE;
    if (s == "NEGATIVE") return Label::NEGATIVE;
    if (s == "NEUTRAL") return Label::NEUTRAL;
    if (s == "MISSING") return Label::MISSING;
    throw ParseError("unknown label '" + std::string(s) + "'", 0);
}

struct LabeledStimulus {
    std::string word;
    std::size_t trial_index = 0;
    Label label = Label::MISSING;
    std::string raw_fragment;  // matched response line, empty for MISSING
};

struct BatchDiagnostics {
    std::size_t matched = 0;   // stimuli labeled POSITIVE/NEGATIVE/NEUTRAL
    std::size_t missing = 0;   // stimuli left MISSING
    std::size_t neutral = 0;   // subset of matched that were NEUTRAL
    std::size_t off_template_lines = 0;     // non-empty lines no label came from
    std::size_t conflicting_duplicates = 0; // stimuli answered twice with different labels
};

namespace detail {

// One shared canonical space for matching: full-width punctuation mapped to
// ASCII, markdown decoration blanked out, ASCII case folded. Idempotent.
inline std::string canonicalize_for_match(std::string_view s) {
    std::string norm = text::normalize_width(s);
    for (char& c : norm) {
        if (c == '*' || c == '`' || c == '_' || c == '"' || c == '\'' || c == '#') c = ' ';
        c = text::ascii_lower(c);
    }
    return norm;
}

inline bool is_ascii_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline bool all_ascii(std::string_view s) {
    for (unsigned char c : s)
        if (c >= 0x80) return false;
    return true;
}

// Finds the first occurrence of `token` in `hay` at or after `from`. Tokens
// that are pure ASCII must sit on non-alphanumeric boundaries so that "rock"
// never matches inside "rocket"; CJK tokens match as plain substrings.
inline std::size_t find_token(std::string_view hay, std::string_view token, std::size_t from) {
    if (token.empty()) return std::string_view::npos;
    bool bounded = all_ascii(token);
    for (std::size_t pos = from; pos <= hay.size();) {
        pos = hay.find(token, pos);
        if (pos == std::string_view::npos) return std::string_view::npos;
        if (!bounded) return pos;
        bool left_ok = pos == 0 || !is_ascii_word_char(hay[pos - 1]);
        std::size_t end = pos + token.size();
        bool right_ok = end >= hay.size() || !is_ascii_word_char(hay[end]);
        if (left_ok && right_ok) return pos;
        ++pos;
    }
    return std::string_view::npos;
}

struct ChoiceToken {
    std::string canonical;
    Label label = Label::NEUTRAL;
};

// Leftmost candidate wins; on a shared start position the longest one does,
// so an anchor embedded in a longer candidate cannot shadow it.
inline std::optional<ChoiceToken> find_choice(std::string_view region,
                                              const std::vector<ChoiceToken>& candidates) {
    std::optional<ChoiceToken> best;
    std::size_t best_pos = std::string_view::npos;
    for (const auto& cand : candidates) {
        std::size_t pos = find_token(region, cand.canonical, 0);
        if (pos == std::string_view::npos) continue;
        if (pos < best_pos || (pos == best_pos && cand.canonical.size() > best->canonical.size())) {
            best_pos = pos;
            best = cand;
        }
    }
    return best;
}

struct StimulusOccurrence {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t stimulus = 0;
};

}  // namespace detail

// Labels every stimulus from the raw completion text. Matching is anchored on
// the stimulus word, not on line position, so reordered or renumbered lists
// parse the same. A stimulus counts as matched only when a recognizable choice
// token is found next to it (same line after the word, or alone on the next
// line); everything else degrades to MISSING rather than failing.
//
// `extra_choices` extends the recognized choice vocabulary — used by
// cross-lingual runs, where the answers may arrive in the other language.
inline std::vector<LabeledStimulus> parse_iat_response(
    std::string_view response_text, const std::vector<std::string>& stimuli,
    const AnchorPair& anchor, std::size_t trial_index = 0, BatchDiagnostics* diagnostics = nullptr,
    const std::vector<AnchorPair>& extra_choices = {}) {
    std::vector<detail::ChoiceToken> candidates;
    auto add_anchor = [&](const AnchorPair& a) {
        candidates.push_back({detail::canonicalize_for_match(a.positive), Label::POSITIVE});
        candidates.push_back({detail::canonicalize_for_match(a.negative), Label::NEGATIVE});
        for (const auto& syn : a.neutral_synonyms)
            candidates.push_back({detail::canonicalize_for_match(syn), Label::NEUTRAL});
    };
    add_anchor(anchor);
    for (const auto& extra : extra_choices) add_anchor(extra);

    auto raw_lines = text::split_lines(response_text);
    std::vector<std::string> lines;
    lines.reserve(raw_lines.size());
    for (auto line : raw_lines) lines.push_back(detail::canonicalize_for_match(line));

    std::vector<std::string> canon_stimuli;
    canon_stimuli.reserve(stimuli.size());
    for (const auto& s : stimuli)
        canon_stimuli.push_back(detail::canonicalize_for_match(text::trim(s)));

    // All stimulus occurrences per line, sorted by position — these bound the
    // choice region when several answers share one line.
    std::vector<std::vector<detail::StimulusOccurrence>> occurrences(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t k = 0; k < canon_stimuli.size(); ++k) {
            std::size_t from = 0;
            while (true) {
                std::size_t pos = detail::find_token(lines[i], canon_stimuli[k], from);
                if (pos == std::string_view::npos) break;
                occurrences[i].push_back({pos, pos + canon_stimuli[k].size(), k});
                from = pos + 1;
            }
        }
        std::sort(occurrences[i].begin(), occurrences[i].end(),
                  [](const auto& a, const auto& b) { return a.start < b.start; });
    }

    BatchDiagnostics diag;
    std::vector<bool> line_used(lines.size(), false);
    std::vector<LabeledStimulus> out;
    out.reserve(stimuli.size());

    for (std::size_t k = 0; k < stimuli.size(); ++k) {
        // Collect every (line, label) pair for this stimulus; the first wins,
        // later disagreeing ones are counted as conflicts.
        struct Match {
            std::size_t line;
            std::size_t source_line;  // line the choice token sat on
            Label label;
        };
        std::vector<Match> matches;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            for (const auto& occ : occurrences[i]) {
                if (occ.stimulus != k) continue;
                std::size_t region_end = lines[i].size();
                for (const auto& other : occurrences[i]) {
                    if (other.start >= occ.end && other.stimulus != k) {
                        region_end = other.start;
                        break;
                    }
                }
                std::string_view region =
                    std::string_view(lines[i]).substr(occ.end, region_end - occ.end);
                auto choice = detail::find_choice(region, candidates);
                if (choice) {
                    matches.push_back({i, i, choice->label});
                    continue;
                }
                // Answer-on-next-line layout: accept a bare choice token on
                // the following line as long as no other stimulus sits there.
                if (i + 1 < lines.size() && occurrences[i + 1].empty()) {
                    auto below = detail::find_choice(lines[i + 1], candidates);
                    if (below) matches.push_back({i, i + 1, below->label});
                }
            }
        }
        LabeledStimulus labeled;
        labeled.word = stimuli[k];
        labeled.trial_index = trial_index;
        if (!matches.empty()) {
            labeled.label = matches.front().label;
            labeled.raw_fragment = std::string(text::trim(raw_lines[matches.front().source_line]));
            line_used[matches.front().line] = true;
            line_used[matches.front().source_line] = true;
            for (const auto& m : matches)
                if (m.label != matches.front().label) {
                    ++diag.conflicting_duplicates;
                    break;
                }
            ++diag.matched;
            if (labeled.label == Label::NEUTRAL) ++diag.neutral;
        } else {
            ++diag.missing;
        }
        out.push_back(std::move(labeled));
    }

    for (std::size_t i = 0; i < lines.size(); ++i)
        if (!line_used[i] && !text::trim(lines[i]).empty()) ++diag.off_template_lines;
    if (diagnostics) *diagnostics = diag;
    return out;
}

namespace detail {

// Extracts the balanced JSON object starting at text[open] ('{'), honoring
// string literals and escapes. Returns npos when unbalanced.
inline std::size_t balanced_object_end(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i;
    }
    return std::string_view::npos;
}

inline int degree_from_json(const nlohmann::json& value) {
    double number;
    if (value.is_number_integer())
        number = value.get<double>();
    else if (value.is_number_float())
        number = value.get<double>();
    else if (value.is_string()) {
        try {
            number = std::stod(value.get<std::string>());
        } catch (const std::exception&) {
            throw DegreeOutOfRange(0);
        }
    } else {
        throw DegreeOutOfRange(0);
    }
    if (number < 1 || number > 10 || number != static_cast<int>(number))
        throw DegreeOutOfRange(number);
    return static_cast<int>(number);
}

}  // namespace detail

struct JudgeScore {
    int tragedy_degree = 0;
    int comedy_degree = 0;
};

// Pulls the first JSON object carrying both degree keys (either language) out
// of the completion, tolerating prose and code fences around it.
inline JudgeScore parse_judge_response(std::string_view response_text) {
    for (std::size_t open = response_text.find('{'); open != std::string_view::npos;
         open = response_text.find('{', open + 1)) {
        std::size_t close = detail::balanced_object_end(response_text, open);
        if (close == std::string_view::npos) continue;
        auto blob = response_text.substr(open, close - open + 1);
        nlohmann::json parsed = nlohmann::json::parse(blob, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) continue;
        const char* tragedy_key = nullptr;
        const char* comedy_key = nullptr;
        if (parsed.contains("TragedyDegree") && parsed.contains("ComedyDegree")) {
            tragedy_key = "TragedyDegree";
            comedy_key = "ComedyDegree";
        } else if (parsed.contains("悲剧程度") && parsed.contains("喜剧程度")) {
            tragedy_key = "悲剧程度";
            comedy_key = "喜剧程度";
        } else {
            continue;
        }
        JudgeScore score;
        score.tragedy_degree = detail::degree_from_json(parsed[tragedy_key]);
        score.comedy_degree = detail::degree_from_json(parsed[comedy_key]);
        return score;
    }
    throw NoJsonFound();
}

}  // namespace csi
