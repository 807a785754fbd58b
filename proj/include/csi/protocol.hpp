#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csi/errors.hpp"
#include "csi/inventory.hpp"
#include "csi/rng.hpp"
#include "csi/text.hpp"

namespace csi {

struct AnchorPair {
    std::string positive;
    std::string negative;
    std::vector<std::string> neutral_synonyms;
    Language language = Language::EN;

    void validate() const {
        if (positive.empty() || negative.empty())
            throw ConfigError("anchor words must be non-empty");
        if (positive == negative) throw ConfigError("anchor words must differ");
        if (neutral_synonyms.empty())
            throw ConfigError("anchor pair needs at least one neutral synonym");
        for (const auto& s : neutral_synonyms)
            if (s == positive || s == negative)
                throw ConfigError("anchor word '" + s + "' listed as a neutral synonym");
    }
};

inline AnchorPair default_anchor(Language language) {
    if (language == Language::EN)
        return {"comedy", "tragedy", {"neutral", "unrelated", "neither", "n/a"}, Language::EN};
    return {"喜剧", "悲剧", {"中性", "无关", "都不"}, Language::ZH};
}

struct RunPlan {
    std::size_t batch_size_n = 30;
    std::size_t repetitions_R = 2;
    double temperature = 0.0;
    std::uint64_t seed = 0;
    Language prompt_language = Language::EN;
    // Cross-lingual mode: when set and different from prompt_language, one
    // extra instruction line asks the model to answer in this language.
    std::optional<Language> response_language;
    AnchorPair anchor = default_anchor(Language::EN);
    std::string inventory_ref;

    void validate() const {
        if (batch_size_n < 1) throw ConfigError("batch_size_n must be >= 1");
        if (repetitions_R < 2)
            throw ConfigError("repetitions_R must be >= 2 (consistency needs repeated trials)");
        if (!(temperature >= 0.0 && temperature <= 1.0))
            throw ConfigError("temperature must be in [0,1]");
        anchor.validate();
    }

    bool cross_lingual() const {
        return response_language && *response_language != prompt_language;
    }
};

struct PromptBatch {
    std::size_t trial_index = 0;
    std::size_t batch_index = 0;
    std::vector<std::string> stimuli;
    std::string rendered_prompt;
};

// The shipped prompt texts. Embedded byte-for-byte copies of the files under
// templates/; the golden tests assert the two stay identical.
namespace templates {

inline constexpr const char* kIatEN =
    R"TPL(You will see a series of words. Based on your first reaction, quickly decide whether each word makes you think more of "{{positive}}" or "{{negative}}". Write down your choice next to each word.

Please note:

- Quick reaction: Don’t overthink it—rely on your first impression.
- Concise response: Simply write the word and your choice. Do not add any extra content.

These words are:

{{words}}
)TPL";

inline constexpr const char* kIatZH =
    R"TPL(你将看到一系列词语。请根据你的第一反应，快速决定每个词语更让你联想到“{{positive}}”还是“{{negative}}”。在每个词语旁边写下你的选择。

请注意：

- 快速反应： 不需要过度思考，依靠第一印象。
- 简洁回答： 只需写下相应词语和你的选择，不要添加额外内容。

这些词语是：

{{words}}
)TPL";

inline constexpr const char* kStoryEN =
    R"TPL(Please write a story using the following words:

{{words}}
)TPL";

inline constexpr const char* kStoryZH =
    R"TPL(请用以下词语创作一个故事：

{{words}}
)TPL";

inline constexpr const char* kJudgeEN =
    R"TPL(Please carefully read the following story and rate its Tragedy Degree and Comedy Degree on a scale from 1 to 10 based on the criteria below. Output the scoring results in JSON format.

Scoring Criteria:

1. Tragedy Degree:
   - 1 point: Almost no tragic elements
   - 5 points: Moderate tragic plots with some emotional setbacks
   - 10 points: Very profound tragedy with strong emotional impact

2. Comedy Degree:
   - 1 point: Almost no comedic elements
   - 5 points: The story has some comedic plots and is relatively light-hearted
   - 10 points: Extremely happy ending with strong comedic aspects, emotionally delightful

Please evaluate the story based on the above criteria and output in the following JSON format:

{"TragedyDegree": x, "ComedyDegree": y}

Where x and y are integer scores between 1 and 10.

{{story}}
)TPL";

inline constexpr const char* kJudgeZH =
    R"TPL(请仔细阅读以下故事，然后根据以下标准对故事的悲剧程度和喜剧程度进行评分（1-10分）。请以JSON格式输出评分结果。

评分标准：

1. 悲剧程度：
   - 1分：几乎没有悲剧成分
   - 5分：有适度的悲剧情节，情感上有一定挫折
   - 10分：非常深刻的悲剧，带有强烈的情感冲击

2. 喜剧程度：
   - 1分：几乎没有喜剧成分
   - 5分：故事有一些喜剧性情节，较为轻松
   - 10分：结局极为圆满，具有强烈的喜剧色彩，情感上令人愉悦

请根据上述标准对故事进行评估，并以以下JSON格式输出：

{"悲剧程度": x, "喜剧程度": y}

其中，x和y为1到10之间的整数评分。

{{story}}
)TPL";

// Cross-lingual instruction lines, written in the prompt language.
inline constexpr const char* kRespondInZhEN = "Please respond in Chinese.";
inline constexpr const char* kRespondInEnZH = "请用英语回答。";

}  // namespace templates

struct TemplateSet {
    std::string iat_en = templates::kIatEN;
    std::string iat_zh = templates::kIatZH;
    std::string story_en = templates::kStoryEN;
    std::string story_zh = templates::kStoryZH;
    std::string judge_en = templates::kJudgeEN;
    std::string judge_zh = templates::kJudgeZH;

    static const TemplateSet& embedded() {
        static const TemplateSet set;
        return set;
    }

    // Reads the six template files from a directory (iat_en.txt, iat_zh.txt,
    // story_en.txt, story_zh.txt, judge_en.txt, judge_zh.txt).
    static TemplateSet load(const std::string& dir) {
        auto slurp = [&](const char* name) {
            std::string path = dir + "/" + name;
            std::ifstream in(path, std::ios::binary);
            if (!in) throw Error("cannot open template: " + path);
            std::ostringstream buf;
            buf << in.rdbuf();
            return buf.str();
        };
        TemplateSet set;
        set.iat_en = slurp("iat_en.txt");
        set.iat_zh = slurp("iat_zh.txt");
        set.story_en = slurp("story_en.txt");
        set.story_zh = slurp("story_zh.txt");
        set.judge_en = slurp("judge_en.txt");
        set.judge_zh = slurp("judge_zh.txt");
        return set;
    }

    const std::string& iat(Language lang) const {
        return lang == Language::EN ? iat_en : iat_zh;
    }
    const std::string& story(Language lang) const {
        return lang == Language::EN ? story_en : story_zh;
    }
    const std::string& judge(Language lang) const {
        return lang == Language::EN ? judge_en : judge_zh;
    }
};

inline std::string join_words(const std::vector<std::string>& words, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += sep;
        out += words[i];
    }
    return out;
}

// Stimuli go into the word-list slot one per line, in the given order.
inline std::string render_iat_prompt(const std::vector<std::string>& stimuli,
                                     const AnchorPair& anchor, Language prompt_language,
                                     std::optional<Language> response_language = std::nullopt,
                                     const TemplateSet& tpl = TemplateSet::embedded()) {
    if (stimuli.empty()) throw ShapeError("render_iat_prompt needs at least one stimulus");
    if (anchor.language != prompt_language)
        throw ConfigError("anchor language " + to_string(anchor.language) +
                          " does not match prompt language " + to_string(prompt_language));
    std::string out = tpl.iat(prompt_language);
    out = text::replace_all(out, "{{positive}}", anchor.positive);
    out = text::replace_all(out, "{{negative}}", anchor.negative);
    out = text::replace_all(out, "{{words}}", join_words(stimuli, "\n"));
    if (response_language && *response_language != prompt_language) {
        out += prompt_language == Language::EN ? templates::kRespondInZhEN
                                               : templates::kRespondInEnZH;
        out += '\n';
    }
    return out;
}

// Story prompts list the words inline: comma-separated in English, full-width
// comma in Chinese.
inline std::string render_story_prompt(const std::vector<std::string>& words, Language language,
                                       const TemplateSet& tpl = TemplateSet::embedded()) {
    if (words.empty()) throw ShapeError("render_story_prompt needs at least one word");
    std::string joined =
        language == Language::EN ? join_words(words, ", ") : join_words(words, "，");
    return text::replace_all(tpl.story(language), "{{words}}", joined);
}

inline std::string render_judge_prompt(const std::string& story, Language language,
                                       const TemplateSet& tpl = TemplateSet::embedded()) {
    if (story.empty()) throw ShapeError("render_judge_prompt needs a non-empty story");
    return text::replace_all(tpl.judge(language), "{{story}}", story);
}

// One deterministic permutation of the full inventory per trial, partitioned
// into batches of plan.batch_size_n (last batch possibly short). Every word
// appears in exactly one batch per trial.
inline std::vector<PromptBatch> plan_trials(const std::vector<std::string>& words,
                                            const RunPlan& plan,
                                            const TemplateSet& tpl = TemplateSet::embedded()) {
    plan.validate();
    if (words.empty()) throw ShapeError("plan_trials needs a non-empty inventory");
    std::vector<PromptBatch> batches;
    for (std::size_t trial = 0; trial < plan.repetitions_R; ++trial) {
        std::vector<std::string> order = words;
        rng::Generator gen(rng::mix_key({plan.seed, trial}));
        rng::shuffle(order, gen);
        for (std::size_t start = 0, index = 0; start < order.size();
             start += plan.batch_size_n, ++index) {
            PromptBatch batch;
            batch.trial_index = trial;
            batch.batch_index = index;
            std::size_t end = std::min(start + plan.batch_size_n, order.size());
            batch.stimuli.assign(order.begin() + start, order.begin() + end);
            batch.rendered_prompt = render_iat_prompt(batch.stimuli, plan.anchor,
                                                      plan.prompt_language,
                                                      plan.response_language, tpl);
            batches.push_back(std::move(batch));
        }
    }
    return batches;
}

inline std::vector<PromptBatch> plan_trials(const Inventory& inventory, const RunPlan& plan,
                                            const TemplateSet& tpl = TemplateSet::embedded()) {
    return plan_trials(inventory_words(inventory), plan, tpl);
}

}  // namespace csi
