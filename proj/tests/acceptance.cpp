// Acceptance checks for the CSI toolkit. Each criterion prints exactly one
// PASS/FAIL line; the process exits with the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csi/csi.hpp"

using namespace csi;
namespace fs = std::filesystem;

namespace {

std::string source_dir() {
    const char* src = std::getenv("CSI_SOURCE_DIR");
    return src ? src : ".";
}

fs::path fresh_dir(const std::string& tag) {
    fs::path path = fs::temp_directory_path() / ("csi_acceptance_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
    return path;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Inventory numbered_inventory(std::size_t size, const std::string& stem = "word") {
    Inventory inv;
    inv.language = Language::EN;
    inv.source_digest = "feedfacefeedface";
    for (std::size_t i = 0; i < size; ++i) {
        char word[32];
        std::snprintf(word, sizeof word, "%s%04zu", stem.c_str(), i);
        inv.entries.push_back({word, Pos::NOUN, static_cast<std::uint64_t>(size + 10 - i),
                               static_cast<std::uint32_t>(i + 1)});
    }
    return inv;
}

// Alternating all-positive / all-negative biases over an inventory.
MockModelSpec polarized_spec(const Inventory& inv, std::uint64_t seed, double neutral_prob = 0.0) {
    MockModelSpec spec;
    spec.seed = seed;
    spec.neutral_prob = neutral_prob;
    for (std::size_t i = 0; i < inv.size(); ++i)
        spec.word_bias[inv.entries[i].word] = i % 2 == 0 ? 1.0 : 0.0;
    return spec;
}

// Per-word label table gathered by actually rendering, answering, and parsing
// every planned batch.
std::map<std::string, std::vector<Label>> run_in_memory(const Inventory& inv,
                                                        const RunPlan& plan,
                                                        MockModelClient& client) {
    std::map<std::string, std::vector<Label>> table;
    for (const auto& entry : inv.entries)
        table[entry.word].assign(plan.repetitions_R, Label::MISSING);
    for (const auto& batch : plan_trials(inv, plan)) {
        Completion c = client.complete({batch.rendered_prompt, plan.temperature,
                                        batch.trial_index});
        for (const auto& l : parse_iat_response(c.response_text, batch.stimuli, plan.anchor,
                                                batch.trial_index))
            table[l.word][l.trial_index] = l.label;
    }
    return table;
}

std::vector<StimulusRecord> to_records(const Inventory& inv,
                                       const std::map<std::string, std::vector<Label>>& table) {
    std::vector<StimulusRecord> records;
    for (const auto& entry : inv.entries)
        records.push_back({entry.word, entry.rank, table.at(entry.word)});
    return records;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Relative path -> bytes for every regular file except the timestamped log.
std::map<std::string, std::string> dir_snapshot(const fs::path& root) {
    std::map<std::string, std::string> snapshot;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename() == runfiles::kLog) continue;
        snapshot[fs::relative(entry.path(), root).string()] = read_file(entry.path());
    }
    return snapshot;
}

struct FixtureVariant {
    Language language = Language::EN;
    std::vector<std::string> stimuli;
    std::string response;
    std::vector<std::string> expect_word;
    std::vector<Label> expect_label;
};

std::vector<FixtureVariant> load_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open fixture: " + path);
    std::vector<FixtureVariant> variants;
    std::string line;
    std::string section;
    std::vector<std::string> response_lines;
    auto flush_response = [&]() {
        if (variants.empty()) return;
        std::string& r = variants.back().response;
        for (std::size_t i = 0; i < response_lines.size(); ++i) {
            if (i) r += '\n';
            r += response_lines[i];
        }
        response_lines.clear();
    };
    while (std::getline(in, line)) {
        if (line.rfind("== variant ", 0) == 0) {
            flush_response();
            FixtureVariant v;
            v.language = line.find(" ZH ") != std::string::npos ? Language::ZH : Language::EN;
            variants.push_back(std::move(v));
            section.clear();
            continue;
        }
        if (line == "-- stimuli" || line == "-- response" || line == "-- expect") {
            flush_response();
            section = line.substr(3);
            continue;
        }
        if (section.empty()) continue;
        if (section == "stimuli") {
            if (!line.empty()) variants.back().stimuli.push_back(line);
        } else if (section == "response") {
            response_lines.push_back(line);
        } else if (section == "expect") {
            if (line.empty()) continue;
            auto fields = text::split(line, "\t");
            if (fields.size() < 2) throw Error("bad expect row: " + line);
            variants.back().expect_word.push_back(std::string(fields[0]));
            variants.back().expect_label.push_back(label_from_string(fields[1]));
        }
    }
    flush_response();
    return variants;
}

// Independent counter + sorter used as the inventory oracle. Implements the
// published grouping rules from scratch: EN groups case-insensitively, the
// representative surface is the most frequent (lexicographically first on a
// tie), the POS is the higher-count reading (NOUN on a tie), and the final
// order is frequency descending then word ascending.
Inventory brute_force_inventory(const std::vector<TaggedToken>& tokens, Language language,
                                std::size_t size, const std::string& digest) {
    struct Group {
        std::map<std::string, std::uint64_t> surfaces;
        std::uint64_t noun = 0, verb = 0;
    };
    std::map<std::string, Group> groups;
    for (const auto& token : tokens) {
        std::string surface(text::trim(token.surface));
        if (token.pos == Pos::OTHER || surface.empty()) continue;
        std::string key = language == Language::EN ? text::fold_ascii(surface) : surface;
        Group& g = groups[key];
        g.surfaces[surface] += 1;
        (token.pos == Pos::NOUN ? g.noun : g.verb) += 1;
    }
    struct Candidate {
        std::string word;
        Pos pos;
        std::uint64_t freq;
    };
    std::vector<Candidate> candidates;
    for (const auto& [key, g] : groups) {
        Candidate c;
        c.freq = g.noun + g.verb;
        c.pos = g.verb > g.noun ? Pos::VERB : Pos::NOUN;
        std::uint64_t best = 0;
        for (const auto& [surface, count] : g.surfaces)
            if (count > best) {
                best = count;
                c.word = surface;
            }
        candidates.push_back(std::move(c));
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.freq != b.freq) return a.freq > b.freq;
        return a.word < b.word;
    });
    Inventory inv;
    inv.language = language;
    inv.source_digest = digest;
    for (std::size_t i = 0; i < size && i < candidates.size(); ++i)
        inv.entries.push_back({candidates[i].word, candidates[i].pos, candidates[i].freq,
                               static_cast<std::uint32_t>(i + 1)});
    return inv;
}

}  // namespace

int main() {
    int failures = 0;
    auto criterion = [&](const char* name, const std::function<bool(std::string&)>& check) {
        std::string detail;
        bool ok = false;
        try {
            ok = check(detail);
        } catch (const std::exception& e) {
            detail = e.what();
            ok = false;
        }
        if (ok)
            std::printf("PASS: %s\n", name);
        else
            std::printf("FAIL: %s%s%s\n", name, detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    };

    criterion("score identity: O+P+N == 1 exactly over 1000 random tables", [](std::string& d) {
        auto start = std::chrono::steady_clock::now();
        rng::Generator gen(0xACCE97);
        for (int i = 0; i < 1000; ++i) {
            std::size_t n = 1 + gen.bounded(60);
            std::size_t r = 2 + gen.bounded(3);
            std::vector<StimulusRecord> records;
            for (std::size_t w = 0; w < n; ++w) {
                StimulusRecord rec{"w" + std::to_string(w), static_cast<std::uint32_t>(w + 1), {}};
                for (std::size_t t = 0; t < r; ++t)
                    rec.labels.push_back(static_cast<Label>(gen.bounded(4)));
                records.push_back(std::move(rec));
            }
            CsiScore s = score_csi(records);
            if (!(s.optimism + s.pessimism + s.neutrality == Rational(1))) {
                d = "triplet sum departed from 1 on table " + std::to_string(i);
                return false;
            }
        }
        double elapsed = seconds_since(start);
        if (elapsed >= 5.0) {
            d = "took " + std::to_string(elapsed) + "s (budget 5s)";
            return false;
        }
        return true;
    });

    criterion("consistency equals O+P whenever reluctancy is zero and R=2", [](std::string& d) {
        // Constructed table: 7328 all-positive, 1288 all-negative, 1384 mixed.
        std::vector<StimulusRecord> table;
        std::uint32_t rank = 1;
        for (int i = 0; i < 7328; ++i)
            table.push_back({"p" + std::to_string(i), rank++,
                             {Label::POSITIVE, Label::POSITIVE}});
        for (int i = 0; i < 1288; ++i)
            table.push_back({"n" + std::to_string(i), rank++,
                             {Label::NEGATIVE, Label::NEGATIVE}});
        for (int i = 0; i < 1384; ++i)
            table.push_back({"m" + std::to_string(i), rank++,
                             {Label::POSITIVE, Label::NEGATIVE}});
        CsiScore s = score_csi(table);
        ReliabilityMetrics rel = score_reliability(table);
        if (rel.reluctancy_rate != Rational(0)) {
            d = "constructed table shows nonzero reluctancy";
            return false;
        }
        if (rel.consistency_rate != s.optimism + s.pessimism ||
            rel.consistency_rate.to_decimal(4) != "0.8616" ||
            s.optimism.to_decimal(4) != "0.7328" || s.pessimism.to_decimal(4) != "0.1288") {
            d = "constructed table: consistency " + rel.consistency_rate.to_decimal(4) +
                " vs O+P " + (s.optimism + s.pessimism).to_decimal(4);
            return false;
        }

        // Random tables with only decisive answers keep the identity exactly.
        rng::Generator gen(0xACCE98);
        for (int i = 0; i < 300; ++i) {
            std::vector<StimulusRecord> random_table;
            std::size_t n = 1 + gen.bounded(40);
            for (std::size_t w = 0; w < n; ++w) {
                Label a = gen.bounded(2) ? Label::POSITIVE : Label::NEGATIVE;
                Label b = gen.bounded(2) ? Label::POSITIVE : Label::NEGATIVE;
                random_table.push_back(
                    {"w" + std::to_string(w), static_cast<std::uint32_t>(w + 1), {a, b}});
            }
            CsiScore rs = score_csi(random_table);
            ReliabilityMetrics rr = score_reliability(random_table);
            if (rr.reluctancy_rate != Rational(0) ||
                rr.consistency_rate != rs.optimism + rs.pessimism) {
                d = "identity failed on random table " + std::to_string(i);
                return false;
            }
        }

        // And on an actual mock run with decisive biases.
        Inventory inv = numbered_inventory(100, "cw");
        RunPlan plan;
        plan.batch_size_n = 30;
        plan.repetitions_R = 2;
        plan.seed = 21;
        MockModelClient client(polarized_spec(inv, 21));
        auto records = to_records(inv, run_in_memory(inv, plan, client));
        CsiScore ms = score_csi(records);
        ReliabilityMetrics mr = score_reliability(records);
        if (mr.reluctancy_rate != Rational(0) ||
            mr.consistency_rate != ms.optimism + ms.pessimism) {
            d = "identity failed on the mock run";
            return false;
        }
        return true;
    });

    criterion("mock end-to-end run matches the keyed-draw oracle exactly", [](std::string& d) {
        auto start = std::chrono::steady_clock::now();
        Inventory inv = numbered_inventory(5000);
        RunPlan plan;
        plan.batch_size_n = 30;
        plan.repetitions_R = 2;
        plan.seed = 1;
        MockModelSpec spec = polarized_spec(inv, 77);
        fs::path run_dir = fresh_dir("e2e");

        MockModelClient client(spec);
        CsiRunInputs inputs{inv, plan, "mock", Provider::MOCK};
        DiagnosisReport report = run_csi_pipeline(run_dir.string(), inputs, client);

        auto oracle_records = mock_expected_labels(spec, inv, plan);
        CsiScore oracle_scores = score_csi(oracle_records);
        ReliabilityMetrics oracle_rel = score_reliability(oracle_records);
        WordPartitions oracle_parts = partition_words(oracle_records);

        auto run_records = labels_from_jsonl(read_file(run_dir / runfiles::kLabels));
        WordPartitions run_parts = partition_words(run_records);

        bool labels_equal = run_records.size() == oracle_records.size();
        for (std::size_t i = 0; labels_equal && i < run_records.size(); ++i)
            labels_equal = run_records[i].word == oracle_records[i].word &&
                           run_records[i].labels == oracle_records[i].labels;
        fs::remove_all(run_dir);

        if (!labels_equal) {
            d = "per-word labels diverge from the oracle";
            return false;
        }
        if (!(report.scores == oracle_scores)) {
            d = "score triplet diverges from the oracle";
            return false;
        }
        if (!(report.reliability == oracle_rel)) {
            d = "reliability diverges from the oracle";
            return false;
        }
        if (run_parts.comedy_words != oracle_parts.comedy_words ||
            run_parts.tragedy_words != oracle_parts.tragedy_words ||
            run_parts.neutral_words != oracle_parts.neutral_words) {
            d = "partitions diverge from the oracle";
            return false;
        }
        if (report.reliability.consistency_rate != Rational(1) ||
            report.reliability.reluctancy_rate != Rational(0)) {
            d = "decisive mock should be perfectly consistent and non-reluctant";
            return false;
        }
        double elapsed = seconds_since(start);
        if (elapsed >= 60.0) {
            d = "took " + std::to_string(elapsed) + "s (budget 60s)";
            return false;
        }
        return true;
    });

    criterion("reluctancy calibrates to the mock neutral probability", [](std::string& d) {
        Inventory inv = numbered_inventory(5000);
        RunPlan plan;
        plan.batch_size_n = 50;
        plan.repetitions_R = 2;  // 5000 words x 2 trials = 10000 response slots
        plan.seed = 2;
        MockModelSpec spec = polarized_spec(inv, 123, 0.10);

        MockModelClient client(spec);
        auto measured_records = to_records(inv, run_in_memory(inv, plan, client));
        ReliabilityMetrics measured = score_reliability(measured_records);
        ReliabilityMetrics oracle = score_reliability(mock_expected_labels(spec, inv, plan));

        if (measured.reluctancy_rate != oracle.reluctancy_rate) {
            d = "measured reluctancy is not the oracle's exact count";
            return false;
        }
        double rate = static_cast<double>(measured.reluctancy_rate.num()) /
                      static_cast<double>(measured.reluctancy_rate.den());
        if (rate < 0.09 || rate > 0.11) {
            d = "reluctancy " + measured.reluctancy_rate.to_decimal(4) +
                " outside 0.10 +/- 0.01";
            return false;
        }
        return true;
    });

    criterion("per-word labels and scores are invariant to batch size", [](std::string& d) {
        Inventory inv = numbered_inventory(1000, "bi");
        MockModelSpec spec = polarized_spec(inv, 9, 0.10);

        RunPlan small;
        small.batch_size_n = 10;
        small.repetitions_R = 2;
        small.seed = 3;
        RunPlan large = small;
        large.batch_size_n = 50;

        MockModelClient client(spec);
        auto labels_small = run_in_memory(inv, small, client);
        auto labels_large = run_in_memory(inv, large, client);
        if (labels_small != labels_large) {
            d = "per-word labels changed with the batch size";
            return false;
        }
        auto records_small = to_records(inv, labels_small);
        auto records_large = to_records(inv, labels_large);
        if (!(score_csi(records_small) == score_csi(records_large)) ||
            !(score_reliability(records_small) == score_reliability(records_large))) {
            d = "scores changed with the batch size";
            return false;
        }
        return true;
    });

    criterion("judged tragedy tracks the negative-word ratio (r > 0.85)", [](std::string& d) {
        auto start = std::chrono::steady_clock::now();
        std::vector<std::string> comedy, tragedy;
        for (int i = 0; i < 50; ++i) {
            char pos_word[16], neg_word[16];
            std::snprintf(pos_word, sizeof pos_word, "bright%02d", i);
            std::snprintf(neg_word, sizeof neg_word, "sombre%02d", i);
            comedy.push_back(pos_word);
            tragedy.push_back(neg_word);
        }
        MockModelSpec spec;
        spec.seed = 55;
        spec.judge_noise = 1;  // tragedy = 1 + neg_count + U{-1,0,1}, clamped
        for (const auto& w : comedy) spec.word_bias[w] = 1.0;
        for (const auto& w : tragedy) spec.word_bias[w] = 0.0;

        auto groups = sample_groups(comedy, tragedy, 100, 55);  // 600 groups
        MockModelClient generator(spec);
        MockModelClient judge(spec);
        ValidityResult result = run_validity(groups, generator, judge, Language::EN, 0.0, 4);

        if (result.degenerate || result.excluded_count != 0) {
            d = "validity run degenerate or lossy";
            return false;
        }
        if (!(result.pearson_r > 0.85)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "pearson_r %.4f <= 0.85", result.pearson_r);
            d = buf;
            return false;
        }
        for (int neg = 0; neg < 5; ++neg)
            if (result.per_ratio_means.at(neg) > result.per_ratio_means.at(neg + 1)) {
                d = "per-ratio means are not weakly increasing";
                return false;
            }
        double elapsed = seconds_since(start);
        if (elapsed >= 60.0) {
            d = "took " + std::to_string(elapsed) + "s (budget 60s)";
            return false;
        }
        return true;
    });

    criterion("parser recovers at least 95% of the fixture corpus pairs", [](std::string& d) {
        auto variants = load_fixture(source_dir() + "/tests/fixtures/iat_response_variants.txt");
        if (variants.size() != 40) {
            d = "fixture holds " + std::to_string(variants.size()) + " variants, expected 40";
            return false;
        }
        std::size_t total = 0, recovered = 0;
        for (const auto& v : variants) {
            auto labels = parse_iat_response(v.response, v.stimuli,
                                             default_anchor(v.language));
            std::map<std::string, Label> by_word;
            for (const auto& l : labels) by_word[l.word] = l.label;
            for (std::size_t i = 0; i < v.expect_word.size(); ++i) {
                ++total;
                auto it = by_word.find(v.expect_word[i]);
                if (it != by_word.end() && it->second == v.expect_label[i]) ++recovered;
            }
        }
        double recall = static_cast<double>(recovered) / static_cast<double>(total);
        if (total < 100 || recall < 0.95) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "recall %.4f (%zu/%zu pairs)", recall, recovered,
                          total);
            d = buf;
            return false;
        }
        return true;
    });

    criterion("inventory top-k matches an independent counter byte for byte", [](std::string& d) {
        // 200k synthetic tokens over a ~20k-word vocabulary with case noise,
        // mixed POS readings, and OTHER tokens to ignore.
        std::vector<TaggedToken> tokens;
        tokens.reserve(200000);
        rng::Generator gen(0x1A7E57);
        for (int i = 0; i < 200000; ++i) {
            std::uint64_t id = gen.bounded(20000);
            id = id * id / 20000;  // skew toward low ids
            char word[24];
            std::snprintf(word, sizeof word, "tok%05llu", static_cast<unsigned long long>(id));
            if (gen.bounded(7) == 0) word[0] = 'T';
            Pos pos = gen.bounded(11) == 0 ? Pos::OTHER
                                           : (gen.bounded(3) == 0 ? Pos::VERB : Pos::NOUN);
            tokens.push_back({word, pos, Language::EN});
        }
        FrequencyTable table = ingest_tokens(tokens, Language::EN);
        Inventory built = build_inventory(table, Language::EN, 5000);
        Inventory oracle =
            brute_force_inventory(tokens, Language::EN, 5000, table.source_digest);
        std::string built_bytes = serialize_inventory(built);
        std::string oracle_bytes = serialize_inventory(oracle);
        if (built_bytes != oracle_bytes) {
            for (std::size_t i = 0; i < built.entries.size(); ++i)
                if (!(built.entries[i] == oracle.entries[i])) {
                    d = "first divergence at rank " + std::to_string(i + 1) + ": built '" +
                        built.entries[i].word + "' vs oracle '" + oracle.entries[i].word + "'";
                    return false;
                }
            d = "serializations differ";
            return false;
        }
        return true;
    });

    criterion("embedded prompt templates match the template files byte for byte",
              [](std::string& d) {
                  TemplateSet embedded = TemplateSet::embedded();
                  TemplateSet files = TemplateSet::load(source_dir() + "/templates");
                  struct Pair {
                      const char* name;
                      const std::string& a;
                      const std::string& b;
                  };
                  const Pair pairs[] = {
                      {"iat_en", embedded.iat_en, files.iat_en},
                      {"iat_zh", embedded.iat_zh, files.iat_zh},
                      {"story_en", embedded.story_en, files.story_en},
                      {"story_zh", embedded.story_zh, files.story_zh},
                      {"judge_en", embedded.judge_en, files.judge_en},
                      {"judge_zh", embedded.judge_zh, files.judge_zh},
                  };
                  for (const auto& pair : pairs)
                      if (pair.a != pair.b) {
                          d = std::string("template '") + pair.name +
                              "' differs between the embedded copy and the file";
                          return false;
                      }

                  // Rendering is exactly the file text with the slots filled.
                  auto filled = [](std::string tpl,
                                   std::initializer_list<std::pair<const char*, std::string>>
                                       subs) {
                      for (const auto& [slot, value] : subs)
                          tpl = text::replace_all(tpl, slot, value);
                      return tpl;
                  };
                  std::string en = render_iat_prompt({"apple", "rock"},
                                                     default_anchor(Language::EN), Language::EN);
                  if (en != filled(files.iat_en, {{"{{positive}}", "comedy"},
                                                  {"{{negative}}", "tragedy"},
                                                  {"{{words}}", "apple\nrock"}})) {
                      d = "EN IAT rendering departs from the template file";
                      return false;
                  }
                  std::string zh = render_iat_prompt({"苹果"}, default_anchor(Language::ZH),
                                                     Language::ZH);
                  if (zh != filled(files.iat_zh, {{"{{positive}}", "喜剧"},
                                                  {"{{negative}}", "悲剧"},
                                                  {"{{words}}", "苹果"}})) {
                      d = "ZH IAT rendering departs from the template file";
                      return false;
                  }
                  if (render_story_prompt({"a", "b"}, Language::EN) !=
                          filled(files.story_en, {{"{{words}}", "a, b"}}) ||
                      render_story_prompt({"甲", "乙"}, Language::ZH) !=
                          filled(files.story_zh, {{"{{words}}", "甲，乙"}})) {
                      d = "story rendering departs from the template file";
                      return false;
                  }
                  if (render_judge_prompt("Once upon a time.", Language::EN) !=
                          filled(files.judge_en, {{"{{story}}", "Once upon a time."}}) ||
                      render_judge_prompt("从前。", Language::ZH) !=
                          filled(files.judge_zh, {{"{{story}}", "从前。"}})) {
                      d = "judge rendering departs from the template file";
                      return false;
                  }
                  return true;
              });

    criterion("same-seed mock runs reproduce byte-identical run directories",
              [](std::string& d) {
                  Inventory inv = numbered_inventory(200, "det");
                  RunPlan plan;
                  plan.batch_size_n = 30;
                  plan.repetitions_R = 2;
                  plan.seed = 11;
                  MockModelSpec spec = polarized_spec(inv, 11);

                  auto run_once = [&](const std::string& tag) {
                      fs::path dir = fresh_dir(tag);
                      MockModelClient client(spec);
                      CsiRunInputs inputs{inv, plan, "mock", Provider::MOCK};
                      run_csi_pipeline(dir.string(), inputs, client);
                      MockModelClient generator(spec);
                      MockModelClient judge(spec);
                      run_validity_pipeline(dir.string(), generator, judge, 2, plan.seed);
                      return dir;
                  };
                  fs::path first = run_once("det1");
                  fs::path second = run_once("det2");
                  auto a = dir_snapshot(first);
                  auto b = dir_snapshot(second);
                  fs::remove_all(first);
                  fs::remove_all(second);
                  if (a.size() != b.size()) {
                      d = "run directories hold different file sets";
                      return false;
                  }
                  for (const auto& [name, bytes] : a) {
                      auto it = b.find(name);
                      if (it == b.end()) {
                          d = "second run is missing " + name;
                          return false;
                      }
                      if (it->second != bytes) {
                          d = "file " + name + " differs between runs";
                          return false;
                      }
                  }
                  return true;
              });

    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria failed\n", failures);
    return failures;
}
