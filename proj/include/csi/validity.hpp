#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "csi/correlation.hpp"
#include "csi/errors.hpp"
#include "csi/model_client.hpp"
#include "csi/protocol.hpp"
#include "csi/response_parser.hpp"
#include "csi/rng.hpp"

namespace csi {

struct GroupWord {
    std::string word;
    bool negative = false;  // true: drawn from the tragedy partition
};

struct ValidityGroup {
    std::size_t group_id = 0;
    int neg_count = 0;  // 0..5 tragedy-partition words in this group
    std::vector<GroupWord> words;
    std::string story_text;
    std::optional<int> tragedy_degree;
    std::optional<int> comedy_degree;
    std::string judge_error;  // non-empty marks the group excluded
};

struct ValidityResult {
    std::map<int, double> per_ratio_means;  // neg_count -> mean tragedy degree
    double pearson_r = 0.0;
    double spearman_rho = 0.0;
    bool degenerate = false;  // correlations had zero variance (or < 2 points)
    std::size_t excluded_count = 0;
};

inline constexpr int kGroupSize = 5;
inline constexpr int kRatioSteps = 6;  // neg_count 0..5

// groups_per_ratio groups for every ratio 0/5..5/5. Words are distinct within
// a group, re-drawable across groups, and fully determined by the seed.
inline std::vector<ValidityGroup> sample_groups(const std::vector<std::string>& comedy_words,
                                                const std::vector<std::string>& tragedy_words,
                                                std::size_t groups_per_ratio,
                                                std::uint64_t seed) {
    if (groups_per_ratio < 1) throw ConfigError("groups_per_ratio must be >= 1");
    if (comedy_words.size() < kGroupSize)
        throw InsufficientWords("comedy", kGroupSize, comedy_words.size());
    if (tragedy_words.size() < kGroupSize)
        throw InsufficientWords("tragedy", kGroupSize, tragedy_words.size());
    std::vector<ValidityGroup> groups;
    groups.reserve(groups_per_ratio * kRatioSteps);
    for (int neg = 0; neg < kRatioSteps; ++neg) {
        for (std::size_t g = 0; g < groups_per_ratio; ++g) {
            rng::Generator gen(rng::mix_key({seed, static_cast<std::uint64_t>(neg), g}));
            ValidityGroup group;
            group.group_id = groups.size();
            group.neg_count = neg;
            for (std::size_t i : rng::sample_indices(tragedy_words.size(),
                                                     static_cast<std::size_t>(neg), gen))
                group.words.push_back({tragedy_words[i], true});
            for (std::size_t i : rng::sample_indices(comedy_words.size(),
                                                     static_cast<std::size_t>(kGroupSize - neg),
                                                     gen))
                group.words.push_back({comedy_words[i], false});
            rng::shuffle(group.words, gen);  // not always tragedy-first in the prompt
            groups.push_back(std::move(group));
        }
    }
    return groups;
}

namespace detail {

inline void run_one_group(ValidityGroup& group, ModelClient& generator, ModelClient& judge,
                          Language language, double generator_temperature,
                          const TemplateSet& tpl) {
    try {
        std::vector<std::string> words;
        words.reserve(group.words.size());
        for (const auto& w : group.words) words.push_back(w.word);
        std::string story_prompt = render_story_prompt(words, language, tpl);
        Completion story = generator.complete({story_prompt, generator_temperature, 0});
        group.story_text = story.response_text;
        std::string judge_prompt = render_judge_prompt(group.story_text, language, tpl);
        // Judging must be reproducible, so the judge always runs at temperature 0.
        Completion verdict = judge.complete({judge_prompt, 0.0, 0});
        JudgeScore score = parse_judge_response(verdict.response_text);
        group.tragedy_degree = score.tragedy_degree;
        group.comedy_degree = score.comedy_degree;
    } catch (const Error& e) {
        group.judge_error = e.what();
    }
}

}  // namespace detail

// Generates and judges one story per group, then correlates neg_count with
// the judged tragedy degree. Failed groups are excluded and counted; the run
// only aborts when more than half of them fail.
inline ValidityResult run_validity(std::vector<ValidityGroup>& groups, ModelClient& generator,
                                   ModelClient& judge, Language language,
                                   double generator_temperature = 0.0, int workers = 1,
                                   const TemplateSet& tpl = TemplateSet::embedded()) {
    if (groups.empty()) throw ShapeError("run_validity needs at least one group");
    if (workers < 1) workers = 1;
    if (workers == 1) {
        for (auto& group : groups)
            detail::run_one_group(group, generator, judge, language, generator_temperature, tpl);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= groups.size()) return;
                    detail::run_one_group(groups[i], generator, judge, language,
                                          generator_temperature, tpl);
                }
            });
        for (auto& t : pool) t.join();
    }

    ValidityResult result;
    std::map<int, std::pair<double, std::size_t>> sums;  // neg -> (sum, count)
    std::vector<double> xs, ys;
    for (const auto& group : groups) {
        if (!group.tragedy_degree) {
            ++result.excluded_count;
            continue;
        }
        sums[group.neg_count].first += *group.tragedy_degree;
        sums[group.neg_count].second += 1;
        xs.push_back(static_cast<double>(group.neg_count));
        ys.push_back(static_cast<double>(*group.tragedy_degree));
    }
    if (result.excluded_count * 2 > groups.size())
        throw ClientError("validity run aborted: " + std::to_string(result.excluded_count) +
                          " of " + std::to_string(groups.size()) + " groups failed");
    for (const auto& [neg, acc] : sums)
        result.per_ratio_means[neg] = acc.first / static_cast<double>(acc.second);
    if (xs.size() < 2) {
        result.degenerate = true;
    } else {
        Correlation p = pearson(xs, ys);
        Correlation s = spearman(xs, ys);
        result.pearson_r = p.value;
        result.spearman_rho = s.value;
        result.degenerate = p.degenerate || s.degenerate;
    }
    return result;
}

}  // namespace csi
