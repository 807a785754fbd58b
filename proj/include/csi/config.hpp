#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "csi/errors.hpp"
#include "csi/model_client.hpp"
#include "csi/protocol.hpp"

namespace csi {

struct Config {
    ModelEndpoint generator{"https://api.openai.com/v1", "gpt-4o", "OPENAI_API_KEY"};
    ModelEndpoint judge{"https://api.openai.com/v1", "qwen2-72b-instruct", "OPENAI_API_KEY"};
    RunPlan plan;
    std::map<std::string, std::string> inventories;  // "EN"/"ZH" -> inventory file
    std::string output_dir = "runs";
    MockModelSpec mock;
    bool anchor_from_config = false;  // config supplied explicit anchor words
};

namespace detail {

inline void check_keys(const nlohmann::json& obj,
                       std::initializer_list<const char*> allowed,
                       const std::string& context) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known)
            throw ConfigError("unknown config key '" +
                              (context.empty() ? item.key() : context + "." + item.key()) + "'");
    }
}

template <typename T>
T config_value(const nlohmann::json& obj, const char* key, T fallback,
               const std::string& context) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + context + "." + key + "' has the wrong type");
    }
}

inline ModelEndpoint endpoint_from_json(const nlohmann::json& j, const ModelEndpoint& base,
                                        const std::string& context) {
    check_keys(j,
               {"base_url", "model_name", "api_key_env", "timeout_seconds", "max_retries",
                "max_concurrency"},
               context);
    ModelEndpoint endpoint = base;
    endpoint.base_url = config_value<std::string>(j, "base_url", endpoint.base_url, context);
    endpoint.model_name = config_value<std::string>(j, "model_name", endpoint.model_name, context);
    endpoint.api_key_ref = config_value<std::string>(j, "api_key_env", endpoint.api_key_ref, context);
    endpoint.timeout_seconds = config_value<int>(j, "timeout_seconds", endpoint.timeout_seconds, context);
    endpoint.max_retries = config_value<int>(j, "max_retries", endpoint.max_retries, context);
    endpoint.max_concurrency = config_value<int>(j, "max_concurrency", endpoint.max_concurrency, context);
    endpoint.validate();
    return endpoint;
}

}  // namespace detail

inline Config config_from_json(const nlohmann::json& j) {
    detail::check_keys(j, {"generator", "judge", "plan", "inventories", "output_dir", "mock"},
                       "");
    Config config;
    if (j.contains("generator"))
        config.generator = detail::endpoint_from_json(j.at("generator"), config.generator,
                                                      "generator");
    config.judge = j.contains("judge")
                       ? detail::endpoint_from_json(j.at("judge"), config.judge, "judge")
                       : config.generator;

    if (j.contains("plan")) {
        const auto& p = j.at("plan");
        detail::check_keys(p,
                           {"batch_size_n", "repetitions_R", "temperature", "seed",
                            "prompt_language", "response_language", "anchor"},
                           "plan");
        config.plan.batch_size_n =
            detail::config_value<std::size_t>(p, "batch_size_n", config.plan.batch_size_n, "plan");
        config.plan.repetitions_R =
            detail::config_value<std::size_t>(p, "repetitions_R", config.plan.repetitions_R, "plan");
        config.plan.temperature =
            detail::config_value<double>(p, "temperature", config.plan.temperature, "plan");
        config.plan.seed =
            detail::config_value<std::uint64_t>(p, "seed", config.plan.seed, "plan");
        config.plan.prompt_language = language_from_string(detail::config_value<std::string>(
            p, "prompt_language", to_string(config.plan.prompt_language), "plan"));
        if (p.contains("response_language") && !p.at("response_language").is_null())
            config.plan.response_language = language_from_string(
                detail::config_value<std::string>(p, "response_language", "EN", "plan"));
        if (p.contains("anchor")) {
            const auto& a = p.at("anchor");
            detail::check_keys(a, {"positive", "negative", "neutral_synonyms"}, "plan.anchor");
            AnchorPair anchor = default_anchor(config.plan.prompt_language);
            anchor.positive =
                detail::config_value<std::string>(a, "positive", anchor.positive, "plan.anchor");
            anchor.negative =
                detail::config_value<std::string>(a, "negative", anchor.negative, "plan.anchor");
            anchor.neutral_synonyms = detail::config_value<std::vector<std::string>>(
                a, "neutral_synonyms", anchor.neutral_synonyms, "plan.anchor");
            config.plan.anchor = anchor;
            config.anchor_from_config = true;
        }
    }
    if (!config.anchor_from_config)
        config.plan.anchor = default_anchor(config.plan.prompt_language);

    if (j.contains("inventories")) {
        detail::check_keys(j.at("inventories"), {"EN", "ZH"}, "inventories");
        for (const auto& item : j.at("inventories").items())
            config.inventories[item.key()] = item.value().get<std::string>();
    }
    config.output_dir =
        detail::config_value<std::string>(j, "output_dir", config.output_dir, "");

    if (j.contains("mock")) {
        const auto& m = j.at("mock");
        detail::check_keys(m, {"word_bias", "neutral_prob", "seed", "default_bias", "judge_noise"},
                           "mock");
        if (m.contains("word_bias"))
            for (const auto& item : m.at("word_bias").items())
                config.mock.word_bias[item.key()] = item.value().get<double>();
        config.mock.neutral_prob =
            detail::config_value<double>(m, "neutral_prob", config.mock.neutral_prob, "mock");
        config.mock.seed = detail::config_value<std::uint64_t>(m, "seed", config.mock.seed, "mock");
        config.mock.default_bias =
            detail::config_value<double>(m, "default_bias", config.mock.default_bias, "mock");
        config.mock.judge_noise =
            detail::config_value<int>(m, "judge_noise", config.mock.judge_noise, "mock");
    }

    config.plan.validate();
    return config;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
    return config_from_json(j);
}

}  // namespace csi
