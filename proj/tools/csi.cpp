// csi — command-line front end for the Core Sentiment Inventory toolkit.
//
// Subcommands: build-inventory, run-csi, run-validity, report.
// Exit codes: 0 success, 1 usage/config error, 2 upstream model failure,
// 3 data error.

#include <cstdint>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csi/csi.hpp"
#include "csi/http_transport.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool mock = false;
    std::string mock_spec_path;
};

csi::Config load_or_default(const GlobalArgs& args) {
    return args.config_path.empty() ? csi::Config{} : csi::load_config(args.config_path);
}

csi::MockModelSpec load_mock_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw csi::ConfigError("cannot open mock spec file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw csi::ConfigError("mock spec file is not valid JSON: " + path);
    nlohmann::json wrapped{{"mock", j}};
    return csi::config_from_json(wrapped).mock;
}

// A mock with no explicit bias table gets one derived from word hashes: every
// word deterministically all-positive or all-negative, so mock runs come out
// perfectly consistent and non-reluctant.
void fill_default_bias(csi::MockModelSpec& spec, const std::vector<std::string>& words) {
    if (!spec.word_bias.empty()) return;
    for (const auto& word : words)
        spec.word_bias[word] = (csi::rng::fnv1a64(word) >> 1 & 1) ? 1.0 : 0.0;
}

std::string sanitize_component(std::string s) {
    for (char& c : s)
        if (c == '/' || c == ' ' || c == ':') c = '_';
    return s;
}

std::string default_run_dir(const csi::Config& config, const csi::RunPlan& plan,
                            const std::string& model_name) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "-n%zu-R%zu-t%g-s%llu", plan.batch_size_n,
                  plan.repetitions_R, plan.temperature,
                  static_cast<unsigned long long>(plan.seed));
    return config.output_dir + "/csi-" + sanitize_component(model_name) + "-" +
           csi::to_string(plan.prompt_language) + buf;
}

struct SweepSetting {
    std::string key;     // "n" or "temperature"
    std::string value;   // original text, used in directory names
};

std::vector<SweepSetting> parse_sweep(const std::string& sweep) {
    auto eq = sweep.find('=');
    if (eq == std::string::npos)
        throw csi::ConfigError("--sweep expects key=v1,v2,... (keys: n, temperature)");
    std::string key = sweep.substr(0, eq);
    if (key != "n" && key != "temperature")
        throw csi::ConfigError("--sweep key must be 'n' or 'temperature', got '" + key + "'");
    std::vector<SweepSetting> settings;
    for (const auto& value : csi::text::split(sweep.substr(eq + 1), ","))
        if (!csi::text::trim(value).empty())
            settings.push_back({key, std::string(csi::text::trim(value))});
    if (settings.empty()) throw csi::ConfigError("--sweep lists no values");
    return settings;
}

csi::Inventory load_run_inventory(const csi::Config& config, const std::string& inventory_arg,
                                  csi::Language language, std::string& ref_out) {
    std::string path = inventory_arg;
    if (path.empty()) {
        auto it = config.inventories.find(csi::to_string(language));
        if (it == config.inventories.end())
            throw csi::ConfigError("no inventory configured for language " +
                                   csi::to_string(language) +
                                   " (pass --inventory or set inventories in the config)");
        path = it->second;
    }
    ref_out = path;
    return csi::load_inventory(path);
}

std::unique_ptr<csi::ModelClient> make_client(const GlobalArgs& args, const csi::Config& config,
                                              const csi::ModelEndpoint& endpoint,
                                              const csi::RunPlan& plan,
                                              const std::vector<std::string>& words,
                                              const std::string& cache_dir) {
    if (args.mock) {
        csi::MockModelSpec spec = args.mock_spec_path.empty()
                                      ? config.mock
                                      : load_mock_spec(args.mock_spec_path);
        if (spec.seed == 0) spec.seed = plan.seed;
        fill_default_bias(spec, words);
        return std::make_unique<csi::MockModelClient>(std::move(spec));
    }
    auto cache = cache_dir.empty() ? nullptr : std::make_shared<csi::CompletionCache>(cache_dir);
    return std::make_unique<csi::HttpModelClient>(endpoint, csi::make_httplib_transport(),
                                                  plan.seed, std::move(cache));
}

int cmd_build_inventory(const std::string& tokens_path, const std::string& language_str,
                        std::size_t size, const std::string& out_path) {
    csi::Language language = csi::language_from_string(language_str);
    auto tokens = csi::load_token_stream(tokens_path);
    auto table = csi::ingest_tokens(tokens, language);
    csi::Inventory inventory = csi::build_inventory(table, language, size);
    csi::save_inventory(inventory, out_path);
    std::cout << "inventory written: " << out_path << " (" << inventory.size() << " words, "
              << csi::to_string(language) << ", source digest " << inventory.source_digest
              << ")\n";
    std::cout << "top words:\n";
    for (std::size_t i = 0; i < inventory.size() && i < 10; ++i) {
        const auto& e = inventory.entries[i];
        std::cout << "  " << e.rank << ". " << e.word << " (" << csi::to_string(e.pos) << ", "
                  << e.frequency << ")\n";
    }
    return 0;
}

int run_single_csi(const GlobalArgs& args, const csi::Config& config, csi::RunPlan plan,
                   const csi::Inventory& inventory, const std::string& run_dir,
                   csi::DiagnosisReport& report_out) {
    std::string model_name = args.mock ? "mock" : config.generator.model_name;
    auto client = make_client(args, config, config.generator, plan,
                              csi::inventory_words(inventory),
                              args.mock ? "" : run_dir + "/" + csi::runfiles::kCache);
    csi::CsiRunInputs inputs{inventory, plan, model_name,
                             args.mock ? csi::Provider::MOCK : csi::Provider::LIVE};
    report_out = csi::run_csi_pipeline(run_dir, inputs, *client);
    std::cout << "run directory: " << run_dir << "\n";
    std::cout << csi::render_tsv_table(report_out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Core Sentiment Inventory (CSI) toolkit"};
    app.require_subcommand(1);
    GlobalArgs args;
    app.add_option("--config", args.config_path, "Path to the JSON config file");
    app.add_option("--out", args.out, "Output directory (or file for `report`)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Override the run seed");
    auto* mock_opt =
        app.add_option("--mock", args.mock_spec_path,
                       "Use the deterministic mock provider (optionally: path to a mock "
                       "spec JSON file)")
            ->expected(0, 1);
    app.fallthrough();

    auto* build = app.add_subcommand("build-inventory",
                                     "Count a tagged token stream and emit an inventory file");
    std::string tokens_path, language_str = "EN", out_path = "inventory.tsv";
    std::size_t size = 5000;
    build->add_option("--tokens", tokens_path, "Token stream file (word<TAB>pos<TAB>lang)")
        ->required();
    build->add_option("--language", language_str, "EN or ZH");
    build->add_option("--size", size, "Number of words to keep");
    build->add_option("--out-file", out_path, "Where to write the inventory")->required();

    auto* run = app.add_subcommand("run-csi", "Run the IAT protocol over an inventory");
    std::string inventory_arg, sweep, anchor_pair, prompt_language_str, response_language_str;
    std::size_t n_override = 0, r_override = 0;
    double temperature_override = -1.0;
    run->add_option("--inventory", inventory_arg, "Inventory file (overrides config)");
    run->add_option("--n", n_override, "Words per prompt batch");
    run->add_option("--repetitions", r_override, "Trials per word (>= 2)");
    run->add_option("--temperature", temperature_override, "Sampling temperature in [0,1]");
    run->add_option("--anchor", anchor_pair, "Anchor words as positive,negative");
    run->add_option("--prompt-language", prompt_language_str, "EN or ZH");
    run->add_option("--response-language", response_language_str,
                    "Ask for answers in this language (cross-lingual mode)");
    run->add_option("--sweep", sweep, "Sweep one setting: n=10,20,30 or temperature=0,0.5");

    auto* validity = app.add_subcommand("run-validity",
                                        "Story-generation validity experiment for a finished run");
    std::string run_dir_arg;
    std::size_t groups_per_ratio = 100;
    int workers = 1;
    validity->add_option("--run-dir", run_dir_arg, "Finished CSI run directory")->required();
    validity->add_option("--groups-per-ratio", groups_per_ratio,
                         "Word groups per mixing ratio (default 100)");
    validity->add_option("--workers", workers, "Concurrent story/judge pipelines");

    auto* report_cmd = app.add_subcommand("report", "Render a run's report");
    std::string report_run_dir, format_str = "tsv";
    bool validity_report = false;
    report_cmd->add_option("--run-dir", report_run_dir, "Run directory")->required();
    report_cmd->add_option("--format", format_str, "json, csv, or tsv");
    report_cmd->add_flag("--validity", validity_report, "Render the validity summary instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    args.mock = mock_opt->count() > 0;
    if (seed_opt->count() > 0) args.seed = seed_value;

    try {
        if (build->parsed())
            return cmd_build_inventory(tokens_path, language_str, size, out_path);

        csi::Config config = load_or_default(args);
        if (args.seed) config.plan.seed = *args.seed;

        if (run->parsed()) {
            csi::RunPlan plan = config.plan;
            if (!prompt_language_str.empty()) {
                plan.prompt_language = csi::language_from_string(prompt_language_str);
                if (!config.anchor_from_config && anchor_pair.empty())
                    plan.anchor = csi::default_anchor(plan.prompt_language);
            }
            if (!response_language_str.empty())
                plan.response_language = csi::language_from_string(response_language_str);
            if (n_override > 0) plan.batch_size_n = n_override;
            if (r_override > 0) plan.repetitions_R = r_override;
            if (temperature_override >= 0.0) plan.temperature = temperature_override;
            if (!anchor_pair.empty()) {
                auto parts = csi::text::split(anchor_pair, ",");
                if (parts.size() != 2)
                    throw csi::ConfigError("--anchor expects exactly 'positive,negative'");
                plan.anchor.positive = std::string(csi::text::trim(parts[0]));
                plan.anchor.negative = std::string(csi::text::trim(parts[1]));
            }
            plan.validate();
            csi::Inventory inventory =
                load_run_inventory(config, inventory_arg, plan.prompt_language,
                                   plan.inventory_ref);

            if (sweep.empty()) {
                std::string run_dir =
                    args.out.empty()
                        ? default_run_dir(config, plan,
                                          args.mock ? "mock" : config.generator.model_name)
                        : args.out;
                csi::DiagnosisReport report;
                return run_single_csi(args, config, plan, inventory, run_dir, report);
            }

            auto settings = parse_sweep(sweep);
            std::string parent = args.out.empty() ? config.output_dir + "/sweep" : args.out;
            std::string summary =
                "Setting\tModel\tLanguage\tO_score\tP_score\tN_score\tConsistency\tReluctancy\n";
            for (const auto& setting : settings) {
                csi::RunPlan swept = plan;
                if (setting.key == "n")
                    swept.batch_size_n = static_cast<std::size_t>(std::stoull(setting.value));
                else
                    swept.temperature = std::stod(setting.value);
                swept.validate();
                std::string run_dir = parent + "/" + setting.key + setting.value;
                csi::DiagnosisReport report;
                run_single_csi(args, config, swept, inventory, run_dir, report);
                std::string row = csi::render_tsv_table(report);
                summary += setting.key + "=" + setting.value + "\t" +
                           row.substr(row.find('\n') + 1);
            }
            std::filesystem::create_directories(parent);
            csi::write_file(parent + "/sweep-summary.tsv", summary);
            std::cout << "sweep summary (" << parent << "/sweep-summary.tsv):\n" << summary;
            return 0;
        }

        if (validity->parsed()) {
            std::uint64_t seed = args.seed ? *args.seed : config.plan.seed;
            std::unique_ptr<csi::ModelClient> generator, judge;
            if (args.mock) {
                csi::MockModelSpec spec = args.mock_spec_path.empty()
                                              ? config.mock
                                              : load_mock_spec(args.mock_spec_path);
                if (spec.seed == 0) spec.seed = seed;
                if (spec.word_bias.empty()) {
                    // Polarity must match the partitions the groups are drawn
                    // from, so the mock judge sees the same word biases.
                    auto labels = csi::labels_from_jsonl(
                        csi::read_artifact(run_dir_arg, csi::runfiles::kLabels));
                    auto parts = csi::partition_words(labels);
                    for (const auto& w : parts.comedy_words) spec.word_bias[w] = 1.0;
                    for (const auto& w : parts.tragedy_words) spec.word_bias[w] = 0.0;
                    if (spec.judge_noise == 0) spec.judge_noise = 1;
                }
                generator = std::make_unique<csi::MockModelClient>(spec);
                judge = std::make_unique<csi::MockModelClient>(std::move(spec));
            } else {
                generator = std::make_unique<csi::HttpModelClient>(
                    config.generator, csi::make_httplib_transport(), seed,
                    std::make_shared<csi::CompletionCache>(run_dir_arg + "/" +
                                                           csi::runfiles::kCache));
                judge = std::make_unique<csi::HttpModelClient>(
                    config.judge, csi::make_httplib_transport(), seed,
                    std::make_shared<csi::CompletionCache>(run_dir_arg + "/" +
                                                           csi::runfiles::kCache));
            }
            csi::ValidityResult result = csi::run_validity_pipeline(
                run_dir_arg, *generator, *judge, groups_per_ratio, seed,
                config.plan.temperature, workers);
            std::cout << "validity written: " << run_dir_arg << "/"
                      << csi::runfiles::kValidity << "\n";
            char line[96];
            std::snprintf(line, sizeof line, "pearson_r=%.4f spearman_rho=%.4f excluded=%zu\n",
                          result.pearson_r, result.spearman_rho, result.excluded_count);
            std::cout << line << "per-ratio mean tragedy degree:\n";
            for (const auto& [neg, mean] : result.per_ratio_means) {
                std::snprintf(line, sizeof line, "  %d/5 negative -> %.4f\n", neg, mean);
                std::cout << line;
            }
            if (result.degenerate)
                std::cout << "note: zero-variance input, correlations reported as 0\n";
            return 0;
        }

        if (report_cmd->parsed()) {
            std::string rendered;
            if (validity_report) {
                std::string summary_path =
                    report_run_dir + "/" + csi::runfiles::kValidity + "/summary.json";
                std::ifstream in(summary_path, std::ios::binary);
                if (!in) throw csi::MissingArtifact("validity");
                nlohmann::json summary = nlohmann::json::parse(in);
                if (format_str == "json") {
                    rendered = summary.dump(2) + "\n";
                } else {
                    csi::ValidityResult result;
                    result.pearson_r = summary.value("pearson_r", 0.0);
                    result.spearman_rho = summary.value("spearman_rho", 0.0);
                    result.excluded_count = summary.value("excluded_count", std::size_t{0});
                    for (const auto& item : summary.at("per_ratio_means").items())
                        result.per_ratio_means[std::stoi(item.key())] =
                            item.value().get<double>();
                    rendered = csi::render_validity_csv(result);
                }
            } else {
                csi::DiagnosisReport report = csi::build_report(report_run_dir);
                rendered =
                    csi::render_report(report, csi::report_format_from_string(format_str));
            }
            if (args.out.empty())
                std::cout << rendered;
            else
                csi::write_file(args.out, rendered);
            return 0;
        }
    } catch (const csi::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const csi::ClientError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const csi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
