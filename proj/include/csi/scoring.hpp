#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "csi/errors.hpp"
#include "csi/rational.hpp"
#include "csi/response_parser.hpp"

namespace csi {

struct StimulusRecord {
    std::string word;
    std::uint32_t rank = 0;  // inventory rank, used to order partitions
    std::vector<Label> labels;  // one per trial, length R
};

struct CsiScore {
    Rational optimism;
    Rational pessimism;
    Rational neutrality;
    std::size_t total_stimuli_N = 0;

    friend bool operator==(const CsiScore&, const CsiScore&) = default;
};

struct ReliabilityMetrics {
    Rational consistency_rate;
    Rational reluctancy_rate;

    friend bool operator==(const ReliabilityMetrics&, const ReliabilityMetrics&) = default;
};

struct WordPartitions {
    std::vector<std::string> comedy_words;   // consistently positive, by rank
    std::vector<std::string> tragedy_words;  // consistently negative, by rank
    std::vector<std::string> neutral_words;  // everything else, by rank
};

namespace detail {

// A skipped word carries the same signal as a declined one, so MISSING is
// folded into NEUTRAL before any counting.
inline Label fold_missing(Label label) {
    return label == Label::MISSING ? Label::NEUTRAL : label;
}

inline std::size_t checked_repetitions(const std::vector<StimulusRecord>& records) {
    if (records.empty()) throw ShapeError("scoring needs at least one stimulus record");
    std::size_t reps = records.front().labels.size();
    if (reps < 2) throw ShapeError("scoring needs at least 2 repetitions per word");
    for (const auto& r : records)
        if (r.labels.size() != reps)
            throw ShapeError("record for '" + r.word + "' has " +
                             std::to_string(r.labels.size()) + " labels, expected " +
                             std::to_string(reps));
    return reps;
}

enum class WordClass { CONSISTENT_POSITIVE, CONSISTENT_NEGATIVE, OTHER };

inline WordClass classify(const std::vector<Label>& labels) {
    bool all_pos = true, all_neg = true;
    for (Label l : labels) {
        all_pos = all_pos && l == Label::POSITIVE;
        all_neg = all_neg && l == Label::NEGATIVE;
    }
    if (all_pos) return WordClass::CONSISTENT_POSITIVE;
    if (all_neg) return WordClass::CONSISTENT_NEGATIVE;
    return WordClass::OTHER;
}

}  // namespace detail

// Optimism = share of words answered positive on every trial, pessimism the
// negative mirror, neutrality everything else. Exact rationals throughout, so
// the three always sum to 1.
inline CsiScore score_csi(const std::vector<StimulusRecord>& records) {
    detail::checked_repetitions(records);
    std::int64_t positive = 0, negative = 0;
    for (const auto& r : records) {
        switch (detail::classify(r.labels)) {
            case detail::WordClass::CONSISTENT_POSITIVE: ++positive; break;
            case detail::WordClass::CONSISTENT_NEGATIVE: ++negative; break;
            default: break;
        }
    }
    auto n = static_cast<std::int64_t>(records.size());
    CsiScore score;
    score.optimism = Rational(positive, n);
    score.pessimism = Rational(negative, n);
    score.neutrality = Rational(n - positive - negative, n);
    score.total_stimuli_N = records.size();
    return score;
}

// consistency: all trials gave the same label (a word that is NEUTRAL every
// time is consistent too). reluctancy: neutral-or-missing share of all N·R
// individual responses.
inline ReliabilityMetrics score_reliability(const std::vector<StimulusRecord>& records) {
    std::size_t reps = detail::checked_repetitions(records);
    std::int64_t consistent = 0, reluctant_slots = 0;
    for (const auto& r : records) {
        bool identical = true;
        Label first = detail::fold_missing(r.labels.front());
        for (Label l : r.labels) {
            Label folded = detail::fold_missing(l);
            identical = identical && folded == first;
            if (folded == Label::NEUTRAL) ++reluctant_slots;
        }
        if (identical) ++consistent;
    }
    auto n = static_cast<std::int64_t>(records.size());
    ReliabilityMetrics metrics;
    metrics.consistency_rate = Rational(consistent, n);
    metrics.reluctancy_rate = Rational(reluctant_slots, n * static_cast<std::int64_t>(reps));
    return metrics;
}

// Splits words into the consistently-positive / consistently-negative / rest
// sets, each ordered by ascending inventory rank (most frequent first).
inline WordPartitions partition_words(std::vector<StimulusRecord> records) {
    detail::checked_repetitions(records);
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        return a.word < b.word;
    });
    WordPartitions parts;
    for (const auto& r : records) {
        switch (detail::classify(r.labels)) {
            case detail::WordClass::CONSISTENT_POSITIVE: parts.comedy_words.push_back(r.word); break;
            case detail::WordClass::CONSISTENT_NEGATIVE: parts.tragedy_words.push_back(r.word); break;
            default: parts.neutral_words.push_back(r.word); break;
        }
    }
    return parts;
}

}  // namespace csi
