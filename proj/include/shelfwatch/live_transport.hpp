// Copyright 2026 The Shelfwatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Real HTTP transport and webhook poster on top of cpp-httplib. This header
// is only pulled in by hosts that explicitly enable live mode; the library
// and its tests never include it. Define SHELFWATCH_USE_OPENSSL before
// including to get https support (and link OpenSSL).

#ifdef SHELFWATCH_USE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#ifdef SHELFWATCH_USE_ZLIB
#define CPPHTTPLIB_ZLIB_SUPPORT
#endif
#include <httplib.h>

#include <memory>
#include <string>

#include "shelfwatch/fetch.hpp"
#include "shelfwatch/url.hpp"

namespace shelfwatch {

namespace live_detail {

inline std::string client_target(const Url& url) {
    std::string origin = url.scheme + "://" + url.host;
    if (!url.port.empty()) origin += ":" + url.port;
    return origin;
}

inline httplib::Client make_client(const Url& url, const PolitenessPolicy& policy) {
    httplib::Client client(client_target(url));
    client.set_connection_timeout(0, policy.timeout_ms * 1000);
    client.set_read_timeout(policy.timeout_ms / 1000, (policy.timeout_ms % 1000) * 1000);
    client.set_follow_location(true);
    client.set_default_headers({{"User-Agent", policy.user_agent}});
    return client;
}

inline std::optional<std::string> charset_of(const httplib::Response& res) {
    std::string type = res.get_header_value("Content-Type");
    size_t pos = type.find("charset=");
    if (pos == std::string::npos) return std::nullopt;
    std::string cs = type.substr(pos + 8);
    if (size_t semi = cs.find(';'); semi != std::string::npos) cs = cs.substr(0, semi);
    while (!cs.empty() && (cs.front() == ' ' || cs.front() == '"')) cs.erase(cs.begin());
    while (!cs.empty() && (cs.back() == ' ' || cs.back() == '"')) cs.pop_back();
    return cs.empty() ? std::nullopt : std::make_optional(cs);
}

}  // namespace live_detail

class LiveTransport final : public Transport {
public:
    Result get(const Url& url, const PolitenessPolicy& policy) override {
        auto client = live_detail::make_client(url, policy);
        auto res = client.Get(url.request_target());
        if (!res) {
            auto err = res.error();
            bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             err == httplib::Error::Read || err == httplib::Error::Write;
            return {timed_out ? Result::Outcome::timeout : Result::Outcome::connection_error, 0,
                    {}, std::nullopt};
        }
        return {Result::Outcome::ok, res->status, res->body, live_detail::charset_of(*res)};
    }
};

/// Webhook poster for the alert sink; returns the status or -1 on failure.
inline HttpPoster live_webhook_poster(const PolitenessPolicy& policy) {
    return [policy](const std::string& url, const std::string& body) -> int {
        auto parsed = Url::parse(url);
        if (!parsed || !parsed->is_absolute()) return -1;
        auto client = live_detail::make_client(*parsed, policy);
        auto res = client.Post(parsed->request_target(), body, "application/json");
        return res ? res->status : -1;
    };
}

}  // namespace shelfwatch
