#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "csi/errors.hpp"
#include "csi/inventory.hpp"
#include "csi/model_client.hpp"
#include "csi/protocol.hpp"
#include "csi/reporting.hpp"
#include "csi/response_parser.hpp"
#include "csi/scoring.hpp"
#include "csi/validity.hpp"

namespace csi {

// Timestamped append-only log. Timestamps live here and nowhere else, so the
// rest of a run directory stays byte-reproducible.
class RunLog {
public:
    RunLog(const std::string& run_dir, bool echo)
        : out_(run_dir + "/" + runfiles::kLog, std::ios::app), echo_(echo) {}

    void line(const std::string& message) {
        std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out_ << "[" << stamp << "] " << message << "\n";
        out_.flush();
        if (echo_) std::cout << message << "\n";
    }

private:
    std::ofstream out_;
    bool echo_;
};

struct CsiRunInputs {
    Inventory inventory;
    RunPlan plan;
    std::string model_name;
    Provider provider = Provider::MOCK;
};

namespace detail {

inline std::string batch_file_stem(const PromptBatch& batch) {
    char name[48];
    std::snprintf(name, sizeof name, "trial%zu-batch%04zu", batch.trial_index,
                  batch.batch_index);
    return name;
}

inline nlohmann::json plan_to_json(const CsiRunInputs& in) {
    const RunPlan& plan = in.plan;
    nlohmann::json anchor{{"positive", plan.anchor.positive},
                          {"negative", plan.anchor.negative},
                          {"neutral_synonyms", plan.anchor.neutral_synonyms},
                          {"language", to_string(plan.anchor.language)}};
    nlohmann::json j{{"model_name", in.model_name},
                     {"provider", to_string(in.provider)},
                     {"prompt_language", to_string(plan.prompt_language)},
                     {"batch_size_n", plan.batch_size_n},
                     {"repetitions_R", plan.repetitions_R},
                     {"temperature", plan.temperature},
                     {"seed", plan.seed},
                     {"anchor", anchor},
                     {"inventory",
                      {{"ref", plan.inventory_ref},
                       {"size", in.inventory.size()},
                       {"source_digest", in.inventory.source_digest}}}};
    nlohmann::json notes = nlohmann::json::array();
    notes.push_back("requests carry a single user-role message and no system message");
    if (plan.cross_lingual()) {
        j["response_language"] = to_string(*plan.response_language);
        notes.push_back(
            "cross-lingual hint line appended to the prompt (interpretation, not a "
            "verbatim protocol)");
    }
    if (plan.repetitions_R > 2)
        notes.push_back("with more than 2 repetitions, optimism/pessimism require agreement "
                        "across all trials (strict reading)");
    j["notes"] = notes;
    return j;
}

}  // namespace detail

// Executes plan -> prompts -> completions -> labels -> scores -> report,
// persisting every stage under run_dir. Returns the finished report.
inline DiagnosisReport run_csi_pipeline(const std::string& run_dir, const CsiRunInputs& in,
                                        ModelClient& client,
                                        const TemplateSet& tpl = TemplateSet::embedded(),
                                        bool echo_log = false) {
    in.plan.validate();
    if (in.inventory.size() == 0) throw ShapeError("run needs a non-empty inventory");
    namespace fs = std::filesystem;
    fs::create_directories(run_dir);
    fs::create_directories(run_dir + "/" + runfiles::kPrompts);
    fs::create_directories(run_dir + "/" + runfiles::kCompletions);
    RunLog log(run_dir, echo_log);
    log.line("run started: model=" + in.model_name + " language=" +
             to_string(in.plan.prompt_language) + " N=" + std::to_string(in.inventory.size()) +
             " n=" + std::to_string(in.plan.batch_size_n) +
             " R=" + std::to_string(in.plan.repetitions_R) +
             " seed=" + std::to_string(in.plan.seed));

    write_file(run_dir + "/" + runfiles::kPlan, detail::plan_to_json(in).dump(2) + "\n");

    std::vector<PromptBatch> batches = plan_trials(in.inventory, in.plan, tpl);
    for (const auto& batch : batches)
        write_file(run_dir + "/" + runfiles::kPrompts + "/" + detail::batch_file_stem(batch) +
                       ".txt",
                   batch.rendered_prompt);
    log.line("planned " + std::to_string(batches.size()) + " batches across " +
             std::to_string(in.plan.repetitions_R) + " trials");

    // The answers may arrive in the response language on cross-lingual runs,
    // so the parser learns that language's anchor words too.
    std::vector<AnchorPair> extra_choices;
    if (in.plan.cross_lingual()) extra_choices.push_back(default_anchor(*in.plan.response_language));

    std::map<std::string, StimulusRecord> table;
    for (const auto& entry : in.inventory.entries) {
        StimulusRecord record;
        record.word = entry.word;
        record.rank = entry.rank;
        record.labels.assign(in.plan.repetitions_R, Label::MISSING);
        table[entry.word] = std::move(record);
    }

    BatchDiagnostics totals;
    for (const auto& batch : batches) {
        std::string stem = detail::batch_file_stem(batch);
        Completion completion;
        try {
            completion = client.complete(
                {batch.rendered_prompt, in.plan.temperature, batch.trial_index});
        } catch (const ClientError& e) {
            completion.prompt_digest = prompt_digest(batch.rendered_prompt);
            completion.response_text = e.what();
            completion.failed = true;
            completion.provider = in.provider;
            nlohmann::json j{{"prompt_digest", completion.prompt_digest},
                             {"response_text", completion.response_text},
                             {"latency_ms", completion.latency_ms},
                             {"attempts", completion.attempt_count},
                             {"provider", to_string(completion.provider)},
                             {"failed", true}};
            write_file(run_dir + "/" + runfiles::kCompletions + "/" + stem + ".json",
                       j.dump(2) + "\n");
            log.line("batch " + stem + " failed: " + std::string(e.what()));
            throw;
        }
        nlohmann::json j{{"prompt_digest", completion.prompt_digest},
                         {"response_text", completion.response_text},
                         {"latency_ms", completion.latency_ms},
                         {"attempts", completion.attempt_count},
                         {"provider", to_string(completion.provider)},
                         {"failed", false}};
        write_file(run_dir + "/" + runfiles::kCompletions + "/" + stem + ".json",
                   j.dump(2) + "\n");

        BatchDiagnostics diag;
        auto labeled = parse_iat_response(completion.response_text, batch.stimuli,
                                          in.plan.anchor, batch.trial_index, &diag,
                                          extra_choices);
        for (const auto& l : labeled) table[l.word].labels[l.trial_index] = l.label;
        totals.matched += diag.matched;
        totals.missing += diag.missing;
        totals.neutral += diag.neutral;
        totals.off_template_lines += diag.off_template_lines;
        totals.conflicting_duplicates += diag.conflicting_duplicates;
        log.line("batch " + stem + " diagnostics: {matched: " + std::to_string(diag.matched) +
                 ", missing: " + std::to_string(diag.missing) +
                 ", neutral: " + std::to_string(diag.neutral) +
                 ", off_template_lines: " + std::to_string(diag.off_template_lines) + "}");
    }

    std::vector<StimulusRecord> records;
    records.reserve(table.size());
    for (const auto& entry : in.inventory.entries) records.push_back(table[entry.word]);
    write_file(run_dir + "/" + runfiles::kLabels, labels_to_jsonl(records));

    CsiScore scores = score_csi(records);
    ReliabilityMetrics reliability = score_reliability(records);
    nlohmann::json scores_json = scores_to_json(scores, reliability);
    scores_json["parse_diagnostics"] = {{"matched", totals.matched},
                                        {"missing", totals.missing},
                                        {"neutral", totals.neutral},
                                        {"off_template_lines", totals.off_template_lines},
                                        {"conflicting_duplicates", totals.conflicting_duplicates}};
    write_file(run_dir + "/" + runfiles::kScores, scores_json.dump(2) + "\n");

    DiagnosisReport report = build_report(run_dir);
    write_file(run_dir + "/" + runfiles::kReport, report_to_json(report).dump(2) + "\n");
    log.line("run finished: O=" + scores.optimism.to_decimal(4) +
             " P=" + scores.pessimism.to_decimal(4) + " N=" + scores.neutrality.to_decimal(4) +
             " consistency=" + reliability.consistency_rate.to_decimal(4) +
             " reluctancy=" + reliability.reluctancy_rate.to_decimal(4));
    return report;
}

// Runs the story-generation validity experiment against the partitions of a
// finished CSI run, writing validity/{groups.jsonl,summary.json,means.csv}.
inline ValidityResult run_validity_pipeline(const std::string& csi_run_dir,
                                            ModelClient& generator, ModelClient& judge,
                                            std::size_t groups_per_ratio, std::uint64_t seed,
                                            double generator_temperature = 0.0, int workers = 1,
                                            const TemplateSet& tpl = TemplateSet::embedded(),
                                            bool echo_log = false) {
    std::string labels_bytes = read_artifact(csi_run_dir, runfiles::kLabels);
    std::string plan_bytes = read_artifact(csi_run_dir, runfiles::kPlan);
    Language language = language_from_string(
        nlohmann::json::parse(plan_bytes).value("prompt_language", "EN"));
    WordPartitions parts = partition_words(labels_from_jsonl(labels_bytes));

    RunLog log(csi_run_dir, echo_log);
    log.line("validity started: groups_per_ratio=" + std::to_string(groups_per_ratio) +
             " seed=" + std::to_string(seed) + " comedy_pool=" +
             std::to_string(parts.comedy_words.size()) +
             " tragedy_pool=" + std::to_string(parts.tragedy_words.size()));

    std::vector<ValidityGroup> groups =
        sample_groups(parts.comedy_words, parts.tragedy_words, groups_per_ratio, seed);
    ValidityResult result =
        run_validity(groups, generator, judge, language, generator_temperature, workers, tpl);

    std::string dir = csi_run_dir + "/" + runfiles::kValidity;
    std::filesystem::create_directories(dir);
    std::string jsonl;
    for (const auto& group : groups) {
        jsonl += validity_group_to_json(group).dump();
        jsonl += '\n';
    }
    write_file(dir + "/groups.jsonl", jsonl);
    write_file(dir + "/summary.json", validity_summary_to_json(result).dump(2) + "\n");
    write_file(dir + "/means.csv", render_validity_csv(result));

    char r_text[64];
    std::snprintf(r_text, sizeof r_text, "pearson_r=%.4f spearman_rho=%.4f", result.pearson_r,
                  result.spearman_rho);
    log.line("validity finished: " + std::string(r_text) +
             " excluded=" + std::to_string(result.excluded_count));
    return result;
}

}  // namespace csi
