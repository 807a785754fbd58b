#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "csi/errors.hpp"
#include "csi/inventory.hpp"
#include "csi/rational.hpp"
#include "csi/rng.hpp"
#include "csi/scoring.hpp"
#include "csi/validity.hpp"

namespace csi {

// Fixed file names inside a run directory.
namespace runfiles {
inline constexpr const char* kPlan = "plan";
inline constexpr const char* kPrompts = "prompts";
inline constexpr const char* kCompletions = "completions";
inline constexpr const char* kLabels = "labels";
inline constexpr const char* kScores = "scores";
inline constexpr const char* kReport = "report";
inline constexpr const char* kValidity = "validity";
inline constexpr const char* kCache = "cache";
inline constexpr const char* kLog = "run.log";
}  // namespace runfiles

enum class ReportFormat { JSON, CSV, TSV_TABLE };

inline ReportFormat report_format_from_string(std::string_view s) {
    if (s == "json") return ReportFormat::JSON;
    if (s == "csv") return ReportFormat::CSV;
    if (s == "tsv" || s == "table") return ReportFormat::TSV_TABLE;
    throw ConfigError("unknown report format '" + std::string(s) + "' (json, csv, tsv)");
}

struct DiagnosisReport {
    std::string model_name;
    Language language = Language::EN;
    nlohmann::json plan_summary;  // verbatim echo of the stored plan
    CsiScore scores;
    ReliabilityMetrics reliability;
    std::vector<std::string> top_comedy;
    std::vector<std::string> top_tragedy;
    std::vector<std::string> top_neutral;
    std::string run_digest;

    friend bool operator==(const DiagnosisReport&, const DiagnosisReport&) = default;
};

// ---- JSON <-> domain helpers ------------------------------------------------

inline nlohmann::json rational_to_json(const Rational& r) {
    return {{"num", r.num()}, {"den", r.den()}, {"decimal", r.to_decimal(4)}};
}

inline Rational rational_from_json(const nlohmann::json& j) {
    return Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

inline std::string read_artifact(const std::string& run_dir, const char* name) {
    std::string path = run_dir + "/" + name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact(name);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::vector<StimulusRecord> labels_from_jsonl(const std::string& text) {
    std::vector<StimulusRecord> records;
    std::size_t lineno = 0;
    for (auto line : text::split_lines(text)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError("labels line is not JSON", lineno);
        StimulusRecord record;
        record.word = j.at("word").get<std::string>();
        record.rank = j.at("rank").get<std::uint32_t>();
        for (const auto& l : j.at("labels"))
            record.labels.push_back(label_from_string(l.get<std::string>()));
        records.push_back(std::move(record));
    }
    return records;
}

inline std::string labels_to_jsonl(const std::vector<StimulusRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        nlohmann::json labels = nlohmann::json::array();
        for (Label l : r.labels) labels.push_back(to_string(l));
        nlohmann::json j{{"word", r.word}, {"rank", r.rank}, {"labels", labels}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline nlohmann::json scores_to_json(const CsiScore& scores, const ReliabilityMetrics& rel) {
    return {{"o_score", rational_to_json(scores.optimism)},
            {"p_score", rational_to_json(scores.pessimism)},
            {"n_score", rational_to_json(scores.neutrality)},
            {"consistency_rate", rational_to_json(rel.consistency_rate)},
            {"reluctancy_rate", rational_to_json(rel.reluctancy_rate)},
            {"total_stimuli", scores.total_stimuli_N}};
}

// ---- report assembly ---------------------------------------------------------

// Everything comes from the stored artifacts (plan, labels, scores), so
// regenerating a report from the same run directory is byte-identical.
inline DiagnosisReport build_report(const std::string& run_dir, std::size_t top_n = 20) {
    std::string plan_bytes = read_artifact(run_dir, runfiles::kPlan);
    std::string labels_bytes = read_artifact(run_dir, runfiles::kLabels);
    std::string scores_bytes = read_artifact(run_dir, runfiles::kScores);

    DiagnosisReport report;
    report.plan_summary = nlohmann::json::parse(plan_bytes);
    report.model_name = report.plan_summary.value("model_name", "unknown");
    report.language =
        language_from_string(report.plan_summary.value("prompt_language", "EN"));

    nlohmann::json scores = nlohmann::json::parse(scores_bytes);
    report.scores.optimism = rational_from_json(scores.at("o_score"));
    report.scores.pessimism = rational_from_json(scores.at("p_score"));
    report.scores.neutrality = rational_from_json(scores.at("n_score"));
    report.scores.total_stimuli_N = scores.at("total_stimuli").get<std::size_t>();
    report.reliability.consistency_rate = rational_from_json(scores.at("consistency_rate"));
    report.reliability.reluctancy_rate = rational_from_json(scores.at("reluctancy_rate"));

    WordPartitions parts = partition_words(labels_from_jsonl(labels_bytes));
    auto take = [&](const std::vector<std::string>& words) {
        return std::vector<std::string>(words.begin(),
                                        words.begin() + std::min(top_n, words.size()));
    };
    report.top_comedy = take(parts.comedy_words);
    report.top_tragedy = take(parts.tragedy_words);
    report.top_neutral = take(parts.neutral_words);

    char digest[17];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(
                      rng::fnv1a64(plan_bytes + labels_bytes + scores_bytes)));
    report.run_digest = digest;
    return report;
}

inline nlohmann::json report_to_json(const DiagnosisReport& report) {
    return {{"model_name", report.model_name},
            {"language", to_string(report.language)},
            {"plan", report.plan_summary},
            {"scores", scores_to_json(report.scores, report.reliability)},
            {"top_comedy", report.top_comedy},
            {"top_tragedy", report.top_tragedy},
            {"top_neutral", report.top_neutral},
            {"run_digest", report.run_digest}};
}

inline DiagnosisReport report_from_json(const nlohmann::json& j) {
    DiagnosisReport report;
    report.model_name = j.at("model_name").get<std::string>();
    report.language = language_from_string(j.at("language").get<std::string>());
    report.plan_summary = j.at("plan");
    const auto& scores = j.at("scores");
    report.scores.optimism = rational_from_json(scores.at("o_score"));
    report.scores.pessimism = rational_from_json(scores.at("p_score"));
    report.scores.neutrality = rational_from_json(scores.at("n_score"));
    report.scores.total_stimuli_N = scores.at("total_stimuli").get<std::size_t>();
    report.reliability.consistency_rate = rational_from_json(scores.at("consistency_rate"));
    report.reliability.reluctancy_rate = rational_from_json(scores.at("reluctancy_rate"));
    report.top_comedy = j.at("top_comedy").get<std::vector<std::string>>();
    report.top_tragedy = j.at("top_tragedy").get<std::vector<std::string>>();
    report.top_neutral = j.at("top_neutral").get<std::vector<std::string>>();
    report.run_digest = j.at("run_digest").get<std::string>();
    return report;
}

// ---- renderings ---------------------------------------------------------------

// One row per (model, language); decimals are round-half-even to 4 places.
inline std::string render_csv(const DiagnosisReport& report) {
    std::string out =
        "model,language,o_score,p_score,n_score,consistency_rate,reluctancy_rate,total_stimuli\n";
    out += report.model_name;
    out += ',';
    out += to_string(report.language);
    out += ',';
    out += report.scores.optimism.to_decimal(4);
    out += ',';
    out += report.scores.pessimism.to_decimal(4);
    out += ',';
    out += report.scores.neutrality.to_decimal(4);
    out += ',';
    out += report.reliability.consistency_rate.to_decimal(4);
    out += ',';
    out += report.reliability.reluctancy_rate.to_decimal(4);
    out += ',';
    out += std::to_string(report.scores.total_stimuli_N);
    out += '\n';
    return out;
}

inline std::string render_tsv_table(const DiagnosisReport& report) {
    std::string out = "Model\tLanguage\tO_score\tP_score\tN_score\tConsistency\tReluctancy\n";
    out += report.model_name;
    out += '\t';
    out += to_string(report.language);
    out += '\t';
    out += report.scores.optimism.to_decimal(4);
    out += '\t';
    out += report.scores.pessimism.to_decimal(4);
    out += '\t';
    out += report.scores.neutrality.to_decimal(4);
    out += '\t';
    out += report.reliability.consistency_rate.to_decimal(4);
    out += '\t';
    out += report.reliability.reluctancy_rate.to_decimal(4);
    out += '\n';
    return out;
}

inline std::string render_report(const DiagnosisReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::JSON: return report_to_json(report).dump(2) + "\n";
        case ReportFormat::CSV: return render_csv(report);
        default: return render_tsv_table(report);
    }
}

// ---- validity emission ---------------------------------------------------------

inline nlohmann::json validity_summary_to_json(const ValidityResult& result) {
    nlohmann::json means = nlohmann::json::object();
    for (const auto& [neg, mean] : result.per_ratio_means)
        means[std::to_string(neg)] = mean;
    return {{"per_ratio_means", means},
            {"pearson_r", result.pearson_r},
            {"spearman_rho", result.spearman_rho},
            {"degenerate", result.degenerate},
            {"excluded_count", result.excluded_count}};
}

inline nlohmann::json validity_group_to_json(const ValidityGroup& group) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& w : group.words)
        words.push_back({{"word", w.word}, {"polarity", w.negative ? "tragedy" : "comedy"}});
    nlohmann::json j{{"group_id", group.group_id},
                     {"neg_count", group.neg_count},
                     {"words", words},
                     {"story_digest", prompt_digest(group.story_text)}};
    if (group.tragedy_degree) j["tragedy_degree"] = *group.tragedy_degree;
    if (group.comedy_degree) j["comedy_degree"] = *group.comedy_degree;
    if (!group.judge_error.empty()) j["judge_error"] = group.judge_error;
    return j;
}

// Plot-ready per-ratio table: one row per tragedy-word count.
inline std::string render_validity_csv(const ValidityResult& result) {
    std::string out = "neg_count,mean_tragedy_degree\n";
    for (const auto& [neg, mean] : result.per_ratio_means) {
        char value[32];
        std::snprintf(value, sizeof value, "%.4f", mean);
        out += std::to_string(neg);
        out += ',';
        out += value;
        out += '\n';
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

}  // namespace csi
