#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "csi/errors.hpp"
#include "csi/inventory.hpp"
#include "csi/protocol.hpp"
#include "csi/response_parser.hpp"
#include "csi/rng.hpp"
#include "csi/scoring.hpp"
#include "csi/text.hpp"

namespace csi {

enum class Provider { LIVE, MOCK };

inline std::string to_string(Provider p) { return p == Provider::LIVE ? "LIVE" : "MOCK"; }

struct ModelEndpoint {
    std::string base_url;      // e.g. https://api.openai.com/v1
    std::string model_name;
    std::string api_key_ref;   // NAME of the environment variable holding the key
    int timeout_seconds = 60;
    int max_retries = 3;
    int max_concurrency = 4;

    void validate() const {
        if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
        if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
        if (timeout_seconds < 1) throw ConfigError("timeout must be >= 1 second");
    }
};

struct Completion {
    std::string prompt_digest;
    std::string response_text;  // verbatim model text; final error text when failed
    std::int64_t latency_ms = 0;
    int attempt_count = 1;
    Provider provider = Provider::MOCK;
    bool failed = false;  // set by callers that record a failure instead of rethrowing
};

struct Request {
    std::string prompt;
    double temperature = 0.0;
    // Which repetition this prompt belongs to. The mock keys its draws by
    // (word, trial) so identical prompts in different trials answer
    // independently; the live provider ignores it.
    std::size_t trial_hint = 0;
};

inline std::string prompt_digest(std::string_view prompt) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(rng::fnv1a64(prompt)));
    return buf;
}

class ModelClient {
public:
    virtual ~ModelClient() = default;
    virtual Completion complete(const Request& request) = 0;
};

// ---- deterministic mock provider -------------------------------------------

// Answers IAT, story, and judge prompts from a fixed word-bias table. Every
// draw is keyed by (seed, word, trial), so responses depend only on the word
// and the repetition — never on batch composition — and replay exactly.
struct MockModelSpec {
    std::map<std::string, double> word_bias;  // word -> probability of the positive anchor
    double neutral_prob = 0.0;                // chance of answering with a neutral synonym
    std::uint64_t seed = 0;
    double default_bias = 0.5;                // for words absent from word_bias
    int judge_noise = 0;                      // half-width of the judge's tragedy jitter
};

namespace detail {

inline Label mock_label(const MockModelSpec& spec, std::string_view word, std::size_t trial) {
    rng::Generator gen(rng::mix_key({spec.seed, rng::fnv1a64(word), trial}));
    if (gen.unit_double() < spec.neutral_prob) return Label::NEUTRAL;
    auto it = spec.word_bias.find(std::string(word));
    double p_pos = it != spec.word_bias.end() ? it->second : spec.default_bias;
    return gen.unit_double() < p_pos ? Label::POSITIVE : Label::NEGATIVE;
}

// First two quoted tokens of the line, accepting straight or CJK quotes.
inline std::vector<std::string> quoted_tokens(std::string_view line) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size() && tokens.size() < 2) {
        std::size_t n = i;
        std::uint32_t cp = text::decode_utf8(line, n);
        if (cp == '"' || cp == 0x201C) {
            std::uint32_t closer = cp == '"' ? '"' : 0x201D;
            std::string token;
            std::size_t j = n;
            while (j < line.size()) {
                std::size_t next = j;
                std::uint32_t inner = text::decode_utf8(line, next);
                if (inner == closer) break;
                token.append(line.substr(j, next - j));
                j = next;
            }
            if (j < line.size()) {
                tokens.push_back(std::move(token));
                i = j;
                text::decode_utf8(line, i);  // step past the closing quote
                continue;
            }
        }
        i = n;
    }
    return tokens;
}

}  // namespace detail

class MockModelClient : public ModelClient {
public:
    explicit MockModelClient(MockModelSpec spec) : spec_(std::move(spec)) {}

    Completion complete(const Request& request) override {
        Completion completion;
        completion.prompt_digest = prompt_digest(request.prompt);
        completion.provider = Provider::MOCK;
        completion.response_text = respond(request);
        return completion;
    }

    const MockModelSpec& spec() const { return spec_; }

private:
    MockModelSpec spec_;

    std::string respond(const Request& request) const {
        const std::string& prompt = request.prompt;
        bool zh_iat = text::contains(prompt, "这些词语是：");
        if (text::contains(prompt, "These words are:") || zh_iat)
            return respond_iat(prompt, zh_iat, request.trial_hint);
        if (text::contains(prompt, "TragedyDegree") || text::contains(prompt, "悲剧程度"))
            return respond_judge(prompt, text::contains(prompt, "悲剧程度"));
        if (text::starts_with(prompt, "Please write a story") || text::starts_with(prompt, "请用以下词语"))
            return respond_story(prompt);
        return "OK";
    }

    std::string respond_iat(const std::string& prompt, bool zh, std::size_t trial) const {
        std::string_view first_line(prompt);
        first_line = first_line.substr(0, first_line.find('\n'));
        auto anchors = detail::quoted_tokens(first_line);
        std::string positive = anchors.size() > 0 ? anchors[0] : "comedy";
        std::string negative = anchors.size() > 1 ? anchors[1] : "tragedy";
        std::string neutral = zh ? "中性" : "neutral";

        std::string marker = zh ? "这些词语是：" : "These words are:";
        std::size_t at = prompt.find(marker);
        std::size_t words_start = prompt.find('\n', at);
        std::string out;
        for (auto line : text::split_lines(std::string_view(prompt).substr(words_start + 1))) {
            auto word = text::trim(line);
            if (word.empty()) continue;
            if (word == templates::kRespondInZhEN || word == templates::kRespondInEnZH) continue;
            Label label = detail::mock_label(spec_, word, trial);
            out.append(word);
            out += ": ";
            switch (label) {
                case Label::POSITIVE: out += positive; break;
                case Label::NEGATIVE: out += negative; break;
                default: out += neutral; break;
            }
            out += '\n';
        }
        return out;
    }

    std::string respond_story(const std::string& prompt) const {
        std::size_t blank = prompt.find("\n\n");
        std::string_view rest =
            blank == std::string::npos ? std::string_view() : std::string_view(prompt).substr(blank + 2);
        std::string words(text::trim(rest));
        return "Here is a story about " + words + ".";
    }

    // Tragedy degree rises with the count of negatively-biased words present
    // in the story (plus optional bounded jitter); comedy mirrors it.
    std::string respond_judge(const std::string& prompt, bool zh) const {
        std::string_view marker = zh ? std::string_view("其中，x和y为1到10之间的整数评分。")
                                     : std::string_view("Where x and y are integer scores between 1 and 10.");
        std::size_t at = prompt.rfind(marker);
        std::string_view story = std::string_view(prompt).substr(
            at == std::string::npos ? 0 : at + marker.size());
        story = text::trim(story);
        int negatives = 0;
        for (const auto& [word, bias] : spec_.word_bias)
            if (bias < 0.5 && text::contains(story, word)) ++negatives;
        int tragedy = 1 + negatives;
        if (spec_.judge_noise > 0) {
            rng::Generator gen(
                rng::mix_key({spec_.seed, rng::fnv1a64(story), 0x6A756467ULL /*"judg"*/}));
            int span = 2 * spec_.judge_noise + 1;
            tragedy += static_cast<int>(gen.bounded(static_cast<std::uint64_t>(span))) -
                       spec_.judge_noise;
        }
        tragedy = std::clamp(tragedy, 1, 10);
        int comedy = 11 - tragedy;
        std::string tkey = zh ? "悲剧程度" : "TragedyDegree";
        std::string ckey = zh ? "喜剧程度" : "ComedyDegree";
        return "{\"" + tkey + "\": " + std::to_string(tragedy) + ", \"" + ckey +
               "\": " + std::to_string(comedy) + "}";
    }
};

// Replays the mock's keyed draws per (word, trial) without going through
// prompts at all — the brute-force oracle scoring tests compare against.
inline std::vector<StimulusRecord> mock_expected_labels(const MockModelSpec& spec,
                                                        const Inventory& inventory,
                                                        const RunPlan& plan) {
    std::vector<StimulusRecord> records;
    records.reserve(inventory.size());
    for (const auto& entry : inventory.entries) {
        StimulusRecord record;
        record.word = entry.word;
        record.rank = entry.rank;
        for (std::size_t trial = 0; trial < plan.repetitions_R; ++trial)
            record.labels.push_back(detail::mock_label(spec, entry.word, trial));
        records.push_back(std::move(record));
    }
    return records;
}

// ---- live HTTP provider -----------------------------------------------------

struct CacheRecord {
    std::string prompt_digest;
    std::string response_text;
    std::int64_t latency_ms = 0;
    int attempts = 1;
};

// On-disk completion cache keyed by (endpoint, prompt digest, temperature),
// so interrupted live runs resume without re-spending tokens.
class CompletionCache {
public:
    explicit CompletionCache(std::string dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::string key(const ModelEndpoint& endpoint, const std::string& digest,
                    double temperature) const {
        char temp[32];
        std::snprintf(temp, sizeof temp, "%.4f", temperature);
        return prompt_digest(endpoint.base_url + "\x1f" + endpoint.model_name) + "-" + digest +
               "-" + temp;
    }

    bool lookup(const std::string& key, CacheRecord& out) const {
        std::lock_guard<std::mutex> lock(mutex_);
        std::ifstream in(path_for(key), std::ios::binary);
        if (!in) return false;
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) return false;
        out.prompt_digest = j.value("prompt_digest", "");
        out.response_text = j.value("response_text", "");
        out.latency_ms = j.value("latency_ms", std::int64_t{0});
        out.attempts = j.value("attempts", 1);
        return true;
    }

    void store(const std::string& key, const CacheRecord& record) {
        nlohmann::json j{{"prompt_digest", record.prompt_digest},
                         {"response_text", record.response_text},
                         {"latency_ms", record.latency_ms},
                         {"attempts", record.attempts}};
        std::lock_guard<std::mutex> lock(mutex_);
        std::string tmp = path_for(key) + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            out << j.dump();
        }
        std::filesystem::rename(tmp, path_for(key));
    }

private:
    std::string path_for(const std::string& key) const { return dir_ + "/" + key + ".json"; }

    std::string dir_;
    mutable std::mutex mutex_;
};

struct HttpTransportResult {
    int status = 0;          // 0 = transport-level failure
    std::string body;
    bool timed_out = false;
};

// One POST of a JSON body; kept behind std::function so tests can run the
// client against a fake transport and the CLI against httplib.
using HttpTransport = std::function<HttpTransportResult(
    const ModelEndpoint& endpoint, const std::string& api_key, const std::string& body)>;

class HttpModelClient : public ModelClient {
public:
    HttpModelClient(ModelEndpoint endpoint, HttpTransport transport, std::uint64_t run_seed,
                    std::shared_ptr<CompletionCache> cache = nullptr, int backoff_base_ms = 500,
                    int backoff_cap_ms = 8000)
        : endpoint_(std::move(endpoint)),
          transport_(std::move(transport)),
          run_seed_(run_seed),
          cache_(std::move(cache)),
          backoff_base_ms_(backoff_base_ms),
          backoff_cap_ms_(backoff_cap_ms),
          // validate() must run before the semaphore sees max_concurrency
          slots_((endpoint_.validate(), endpoint_.max_concurrency)),
          sleep_ms_([](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); }) {
        const char* key = std::getenv(endpoint_.api_key_ref.c_str());
        if (!key || !*key)
            throw AuthError("environment variable " + endpoint_.api_key_ref +
                            " is not set; it must hold the API key");
        api_key_ = key;  // held in memory only, never written to files or logs
    }

    void set_sleeper(std::function<void(int)> fn) { sleep_ms_ = std::move(fn); }

    Completion complete(const Request& request) override {
        std::string digest = prompt_digest(request.prompt);
        std::string cache_key;
        if (cache_) {
            cache_key = cache_->key(endpoint_, digest, request.temperature);
            CacheRecord hit;
            if (cache_->lookup(cache_key, hit)) {
                Completion cached;
                cached.prompt_digest = digest;
                cached.response_text = hit.response_text;
                cached.latency_ms = hit.latency_ms;
                cached.attempt_count = hit.attempts;
                cached.provider = Provider::LIVE;
                return cached;
            }
        }

        nlohmann::json body{{"model", endpoint_.model_name},
                            {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
                            {"temperature", request.temperature}};
        std::string payload = body.dump();

        auto started = std::chrono::steady_clock::now();
        int attempts = 0;
        for (int attempt = 0;; ++attempt) {
            ++attempts;
            HttpTransportResult result;
            {
                std::counting_semaphore<>* slots = &slots_;
                slots->acquire();
                struct Release {
                    std::counting_semaphore<>* s;
                    ~Release() { s->release(); }
                } release{slots};
                result = transport_(endpoint_, api_key_, payload);
            }

            if (result.status == 200) {
                nlohmann::json parsed = nlohmann::json::parse(result.body, nullptr, false);
                if (parsed.is_discarded())
                    throw MalformedResponse("response body is not JSON");
                if (!parsed.contains("choices") || parsed["choices"].empty() ||
                    !parsed["choices"][0].contains("message") ||
                    !parsed["choices"][0]["message"].contains("content"))
                    throw MalformedResponse("response JSON has no choices[0].message.content");
                Completion completion;
                completion.prompt_digest = digest;
                completion.response_text =
                    parsed["choices"][0]["message"]["content"].get<std::string>();
                completion.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                            std::chrono::steady_clock::now() - started)
                                            .count();
                completion.attempt_count = attempts;
                completion.provider = Provider::LIVE;
                if (cache_)
                    cache_->store(cache_key, {digest, completion.response_text,
                                              completion.latency_ms, attempts});
                return completion;
            }

            if (result.status == 401 || result.status == 403)
                throw AuthError("endpoint rejected the API key (HTTP " +
                                std::to_string(result.status) + ")");

            bool transient = result.status == 429 || result.status >= 500 || result.status == 0;
            if (!transient)
                throw ClientError("HTTP " + std::to_string(result.status) + ": " + result.body);
            if (attempt >= endpoint_.max_retries) {
                if (result.status == 429)
                    throw RateLimited("still rate-limited after " + std::to_string(attempts) +
                                      " attempts");
                if (result.status == 0)
                    throw Timeout(result.timed_out
                                      ? "request timed out after " + std::to_string(attempts) +
                                            " attempts"
                                      : "connection failed after " + std::to_string(attempts) +
                                            " attempts");
                throw ClientError("HTTP " + std::to_string(result.status) + " after " +
                                  std::to_string(attempts) + " attempts");
            }
            sleep_ms_(backoff_delay_ms(digest, attempt));
        }
    }

    // Exponential, capped, with deterministic jitter replayable from the run
    // seed: delay = min(cap, base·2^attempt) · U[0.5,1.0).
    int backoff_delay_ms(const std::string& digest, int attempt) const {
        std::int64_t base = backoff_base_ms_;
        for (int i = 0; i < attempt && base < backoff_cap_ms_; ++i) base *= 2;
        base = std::min<std::int64_t>(base, backoff_cap_ms_);
        rng::Generator gen(rng::mix_key({run_seed_, rng::fnv1a64(digest),
                                         static_cast<std::uint64_t>(attempt)}));
        double factor = 0.5 + gen.unit_double() * 0.5;
        return static_cast<int>(static_cast<double>(base) * factor);
    }

private:
    ModelEndpoint endpoint_;
    HttpTransport transport_;
    std::uint64_t run_seed_;
    std::shared_ptr<CompletionCache> cache_;
    int backoff_base_ms_;
    int backoff_cap_ms_;
    std::string api_key_;
    std::counting_semaphore<> slots_;
    std::function<void(int)> sleep_ms_;
};

}  // namespace csi
