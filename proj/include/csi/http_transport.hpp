#pragma once

#include <string>
#include <utility>

#include <httplib.h>

#include "csi/model_client.hpp"

namespace csi {

// "https://host:port/v1" -> ("https://host:port", "/v1"); trailing slash on
// the prefix is dropped so the request path never doubles it.
inline std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    std::size_t scheme_end = base_url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    std::size_t slash = base_url.find('/', host_start);
    if (slash == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, slash), prefix};
}

// The production transport: one POST to {base_url}/chat/completions with a
// bearer token. A fresh httplib client per call keeps it thread-safe.
inline HttpTransport make_httplib_transport() {
    return [](const ModelEndpoint& endpoint, const std::string& api_key,
              const std::string& body) {
        auto [host, prefix] = split_base_url(endpoint.base_url);
        httplib::Client client(host);
        client.set_connection_timeout(endpoint.timeout_seconds, 0);
        client.set_read_timeout(endpoint.timeout_seconds, 0);
        client.set_write_timeout(endpoint.timeout_seconds, 0);
        httplib::Headers headers{{"Authorization", "Bearer " + api_key}};
        auto res =
            client.Post(prefix + "/chat/completions", headers, body, "application/json");
        HttpTransportResult out;
        if (!res) {
            out.status = 0;
            out.timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                            res.error() == httplib::Error::Read ||
                            res.error() == httplib::Error::Write;
            out.body = httplib::to_string(res.error());
            return out;
        }
        out.status = res->status;
        out.body = res->body;
        return out;
    };
}

}  // namespace csi
