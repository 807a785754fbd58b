#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "csi/response_parser.hpp"

using namespace csi;

namespace {

struct FixtureVariant {
    std::string name;
    Language language = Language::EN;
    std::vector<std::string> stimuli;
    std::string response;
    std::vector<std::string> expect_word;
    std::vector<Label> expect_label;
    std::vector<bool> expect_hard;  // pairs the parser is not expected to recover
};

std::vector<FixtureVariant> load_fixture() {
    const char* src = std::getenv("CSI_SOURCE_DIR");
    REQUIRE(src != nullptr);
    std::ifstream in(std::string(src) + "/tests/fixtures/iat_response_variants.txt");
    REQUIRE(in.good());

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
            v.name = line.substr(3);
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
        if (section.empty()) continue;  // preamble comments
        if (section == "stimuli") {
            if (!line.empty()) variants.back().stimuli.push_back(line);
        } else if (section == "response") {
            response_lines.push_back(line);
        } else if (section == "expect") {
            if (line.empty()) continue;
            auto fields = text::split(line, "\t");
            REQUIRE(fields.size() >= 2);
            variants.back().expect_word.push_back(fields[0]);
            variants.back().expect_label.push_back(label_from_string(fields[1]));
            variants.back().expect_hard.push_back(fields.size() > 2 && fields[2] == "hard");
        }
    }
    flush_response();
    return variants;
}

}  // namespace

TEST_CASE("canonical format parses") {
    auto labels = parse_iat_response("apple: comedy\nrock: tragedy", {"apple", "rock"},
                                     default_anchor(Language::EN));
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].word == "apple");
    CHECK(labels[0].label == Label::POSITIVE);
    CHECK(labels[0].raw_fragment == "apple: comedy");
    CHECK(labels[1].word == "rock");
    CHECK(labels[1].label == Label::NEGATIVE);
}

TEST_CASE("zh numbered list with mixed separators parses") {
    auto labels = parse_iat_response("1. 苹果 - 喜剧\n2. 石头：悲剧", {"苹果", "石头"},
                                     default_anchor(Language::ZH));
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].label == Label::POSITIVE);
    CHECK(labels[1].label == Label::NEGATIVE);
}

TEST_CASE("neutral synonym, case fold, and absent word") {
    auto labels = parse_iat_response("apple: neutral\nbanana: Comedy",
                                     {"apple", "banana", "rock"}, default_anchor(Language::EN));
    REQUIRE(labels.size() == 3);
    CHECK(labels[0].label == Label::NEUTRAL);
    CHECK(labels[1].label == Label::POSITIVE);
    CHECK(labels[2].label == Label::MISSING);
    CHECK(labels[2].raw_fragment.empty());
}

TEST_CASE("output cardinality and order always match the stimuli") {
    std::vector<std::string> stimuli{"a1", "b2", "c3", "d4"};
    for (const char* response : {"", "garbage", "a1: comedy", "c3: tragedy\nnonsense\nb2: what"}) {
        auto labels = parse_iat_response(response, stimuli, default_anchor(Language::EN));
        REQUIRE(labels.size() == stimuli.size());
        for (std::size_t i = 0; i < stimuli.size(); ++i) CHECK(labels[i].word == stimuli[i]);
    }
}

TEST_CASE("swapping anchor roles swaps positive and negative labels") {
    std::string response = "apple: comedy\nrock: tragedy\npear: neutral\nplum: huh";
    std::vector<std::string> stimuli{"apple", "rock", "pear", "plum"};
    AnchorPair anchor = default_anchor(Language::EN);
    AnchorPair swapped = anchor;
    std::swap(swapped.positive, swapped.negative);

    auto direct = parse_iat_response(response, stimuli, anchor);
    auto inverted = parse_iat_response(response, stimuli, swapped);
    REQUIRE(direct.size() == inverted.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        Label expected = direct[i].label == Label::POSITIVE   ? Label::NEGATIVE
                         : direct[i].label == Label::NEGATIVE ? Label::POSITIVE
                                                              : direct[i].label;
        CHECK(inverted[i].label == expected);
    }
}

TEST_CASE("first occurrence wins and conflicts are counted") {
    BatchDiagnostics diag;
    auto labels = parse_iat_response("apple: comedy\napple: tragedy", {"apple"},
                                     default_anchor(Language::EN), 0, &diag);
    CHECK(labels[0].label == Label::POSITIVE);
    CHECK(diag.conflicting_duplicates == 1);

    // duplicate with the same label is not a conflict
    BatchDiagnostics diag2;
    parse_iat_response("apple: comedy\napple: comedy", {"apple"}, default_anchor(Language::EN), 0,
                       &diag2);
    CHECK(diag2.conflicting_duplicates == 0);
}

TEST_CASE("diagnostics count matched, missing, neutral, off-template") {
    BatchDiagnostics diag;
    parse_iat_response("Here you go:\napple: comedy\nrock: neutral\nhave a nice day",
                       {"apple", "rock", "pear"}, default_anchor(Language::EN), 0, &diag);
    CHECK(diag.matched == 2);
    CHECK(diag.missing == 1);
    CHECK(diag.neutral == 1);
    CHECK(diag.off_template_lines == 2);
}

TEST_CASE("trial index is stamped onto every label") {
    auto labels = parse_iat_response("apple: comedy", {"apple"}, default_anchor(Language::EN), 7);
    CHECK(labels[0].trial_index == 7);
}

TEST_CASE("extra anchor languages extend the recognized choices") {
    // cross-lingual run: ZH prompt requesting EN answers (or a model that
    // switches language midstream)
    auto labels = parse_iat_response("苹果: comedy\n石头：悲剧", {"苹果", "石头"},
                                     default_anchor(Language::ZH), 0, nullptr,
                                     {default_anchor(Language::EN)});
    CHECK(labels[0].label == Label::POSITIVE);
    CHECK(labels[1].label == Label::NEGATIVE);

    // without the extra anchor the English answer is unrecognized
    auto bare = parse_iat_response("苹果: comedy", {"苹果"}, default_anchor(Language::ZH));
    CHECK(bare[0].label == Label::MISSING);
}

TEST_CASE("canonicalization is idempotent") {
    for (const char* sample :
         {"**Apple**: COMEDY", "１. 苹果 —— “喜剧”", "`rock` - 'tragedy'", "#  plain  #",
          "ＡＰＰＬＥ：ｃｏｍｅｄｙ", "「石头」：悲剧。"}) {
        std::string once = detail::canonicalize_for_match(sample);
        CHECK(detail::canonicalize_for_match(once) == once);
    }
}

TEST_CASE("ascii tokens respect word boundaries, cjk tokens match as substrings") {
    CHECK(detail::find_token("a rocket launch", "rock", 0) == std::string_view::npos);
    CHECK(detail::find_token("a rock garden", "rock", 0) == 2);
    CHECK(detail::find_token("rock", "rock", 0) == 0);
    CHECK(detail::find_token("商店里有苹果汁", "苹果", 0) != std::string_view::npos);
}

TEST_CASE("fixture corpus recall meets the 95 percent bar") {
    auto variants = load_fixture();
    REQUIRE(variants.size() == 40);

    std::size_t total = 0;
    std::size_t recovered = 0;
    for (const auto& v : variants) {
        INFO(v.name);
        REQUIRE(v.expect_word.size() == v.stimuli.size());
        auto labels = parse_iat_response(v.response, v.stimuli, default_anchor(v.language));
        REQUIRE(labels.size() == v.stimuli.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            INFO("stimulus " << v.stimuli[i] << " expected " << to_string(v.expect_label[i])
                             << " got " << to_string(labels[i].label));
            CHECK(labels[i].word == v.expect_word[i]);
            ++total;
            if (labels[i].label == v.expect_label[i]) {
                ++recovered;
            } else {
                // only pairs marked hard may be missed; anything else is a
                // parser regression
                REQUIRE(v.expect_hard[i]);
            }
        }
    }
    INFO("recovered " << recovered << " of " << total);
    CHECK(total >= 100);
    CHECK(static_cast<double>(recovered) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("judge json parses plain and fenced") {
    auto plain = parse_judge_response(R"({"TragedyDegree": 6, "ComedyDegree": 2})");
    CHECK(plain.tragedy_degree == 6);
    CHECK(plain.comedy_degree == 2);

    auto fenced = parse_judge_response(
        "Here is my rating: ```json {\"TragedyDegree\":1,\"ComedyDegree\":8}```");
    CHECK(fenced.tragedy_degree == 1);
    CHECK(fenced.comedy_degree == 8);

    auto zh = parse_judge_response("评分如下：{\"悲剧程度\": 9, \"喜剧程度\": 1}");
    CHECK(zh.tragedy_degree == 9);
    CHECK(zh.comedy_degree == 1);
}

TEST_CASE("judge parser skips objects without both degree keys") {
    auto score = parse_judge_response(
        R"(First {"note": "warmup"} then {"TragedyDegree": 3} and finally
           {"TragedyDegree": 4, "ComedyDegree": 7})");
    CHECK(score.tragedy_degree == 4);
    CHECK(score.comedy_degree == 7);
}

TEST_CASE("judge parser handles nested and stringy content") {
    auto nested = parse_judge_response(
        R"({"analysis": {"mood": "dark"}, "TragedyDegree": 8, "ComedyDegree": 2})");
    CHECK(nested.tragedy_degree == 8);

    // braces inside string literals must not unbalance the scan
    auto tricky = parse_judge_response(
        R"({"comment": "odd { brace", "TragedyDegree": 2, "ComedyDegree": 5})");
    CHECK(tricky.comedy_degree == 5);

    // numeric strings are accepted
    auto stringy = parse_judge_response(R"({"TragedyDegree": "7", "ComedyDegree": "3"})");
    CHECK(stringy.tragedy_degree == 7);
}

TEST_CASE("judge degrees outside 1..10 raise DegreeOutOfRange") {
    try {
        parse_judge_response(R"({"TragedyDegree": 14, "ComedyDegree": 2})");
        FAIL("expected DegreeOutOfRange");
    } catch (const DegreeOutOfRange& e) {
        CHECK(e.value == 14);
    }
    CHECK_THROWS_AS(parse_judge_response(R"({"TragedyDegree": 0, "ComedyDegree": 2})"),
                    DegreeOutOfRange);
    CHECK_THROWS_AS(parse_judge_response(R"({"TragedyDegree": 2.5, "ComedyDegree": 2})"),
                    DegreeOutOfRange);
}

TEST_CASE("judge response without usable json raises NoJsonFound") {
    CHECK_THROWS_AS(parse_judge_response("I would rate this story a solid seven."), NoJsonFound);
    CHECK_THROWS_AS(parse_judge_response(""), NoJsonFound);
    CHECK_THROWS_AS(parse_judge_response("{\"TragedyDegree\": 3"), NoJsonFound);  // unbalanced
    CHECK_THROWS_AS(parse_judge_response("{\"Mood\": \"sad\"}"), NoJsonFound);
}

TEST_CASE("label strings round-trip") {
    for (Label label : {Label::POSITIVE, Label::NEGATIVE, Label::NEUTRAL, Label::MISSING})
        CHECK(label_from_string(to_string(label)) == label);
    CHECK_THROWS_AS(label_from_string("SOMETHING"), ParseError);
}
