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

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "shelfwatch/errors.hpp"
#include "shelfwatch/text.hpp"
#include "shelfwatch/time.hpp"
#include "shelfwatch/url.hpp"
#include "shelfwatch/watchlist.hpp"

// Turning departments into page requests and downloading them politely:
// per-host delays, capped retries with exponential backoff, an explicit
// user agent. Transports are swappable; tests and offline runs replay a
// recorded fixture corpus and never touch the network.

namespace shelfwatch {

struct PolitenessPolicy {
    int64_t min_delay_ms = 1000;  // gap between dispatches to one host
    int max_retries = 2;
    int64_t backoff_base_ms = 250;  // wait before retry k is base * 2^k
    int64_t timeout_ms = 10000;
    std::string user_agent = "shelfwatch/0.1";
    int max_pages_per_department = 1;
    int max_concurrent_fetches = 2;

    std::vector<std::string> validate() const {
        std::vector<std::string> problems;
        if (min_delay_ms < 0) problems.push_back("politeness.min_delay_ms must be >= 0");
        if (max_retries < 0) problems.push_back("politeness.max_retries must be >= 0");
        if (backoff_base_ms < 0) problems.push_back("politeness.backoff_base_ms must be >= 0");
        if (timeout_ms <= 0) problems.push_back("politeness.timeout_ms must be > 0");
        if (user_agent.empty()) problems.push_back("politeness.user_agent must be non-empty");
        if (max_pages_per_department < 1) {
            problems.push_back("politeness.max_pages_per_department must be >= 1");
        }
        if (max_concurrent_fetches < 1) {
            problems.push_back("politeness.max_concurrent_fetches must be >= 1");
        }
        return problems;
    }
};

struct PageRequest {
    Url url;
    DepartmentEntry department;
    int page_index = 1;
};

struct PageResponse {
    PageRequest request;
    int status = 0;
    std::string body;
    std::optional<std::string> declared_encoding;
    UtcTime fetched_at;  // from the injected clock, never the wall clock
};

/// One-shot GET against a URL. Implementations must be safe for concurrent
/// use. Network-level failures are outcomes, not exceptions — retry policy
/// lives above this interface.
class Transport {
public:
    struct Result {
        enum class Outcome { ok, timeout, connection_error };
        Outcome outcome = Outcome::connection_error;
        int status = 0;
        std::string body;
        std::optional<std::string> declared_encoding;
    };

    virtual ~Transport() = default;
    virtual Result get(const Url& url, const PolitenessPolicy& policy) = 0;
};

// --- request construction -----------------------------------------------

inline constexpr std::string_view kDefaultUrlTemplate = "{base}/{slug}?page={page}";

namespace fetch_detail {

inline std::string replace_all(std::string s, std::string_view what, std::string_view with) {
    size_t pos = 0;
    while ((pos = s.find(what, pos)) != std::string::npos) {
        s.replace(pos, what.size(), with);
        pos += with.size();
    }
    return s;
}

}  // namespace fetch_detail

/// Expands the URL template for one department page. Page 1 drops the query
/// part when the {page} placeholder lives in the query string, so first
/// pages use the canonical department URL.
inline std::string expand_url_template(std::string_view url_template, std::string_view base,
                                       std::string_view slug, int page) {
    std::string t(url_template);
    while (!base.empty() && base.back() == '/') base.remove_suffix(1);
    if (page == 1) {
        size_t q = t.find('?');
        if (q != std::string::npos && t.find("{page}", q) != std::string::npos) {
            t = t.substr(0, q);
        }
    }
    t = fetch_detail::replace_all(std::move(t), "{base}", base);
    t = fetch_detail::replace_all(std::move(t), "{slug}", slug);
    t = fetch_detail::replace_all(std::move(t), "{page}", std::to_string(page));
    return t;
}

/// One request per department page, watchlist order then page order.
inline std::vector<PageRequest> build_department_urls(
    const Url& base_url, const WatchList& watchlist, const PolitenessPolicy& policy,
    std::string_view url_template = kDefaultUrlTemplate) {
    if (!base_url.is_absolute()) {
        throw InvalidBaseUrlError("base URL must be absolute: " + base_url.to_string());
    }
    std::string base = base_url.to_string();
    std::vector<PageRequest> requests;
    for (const auto& dept : watchlist.departments) {
        for (int page = 1; page <= policy.max_pages_per_department; ++page) {
            std::string expanded = expand_url_template(url_template, base, dept.slug, page);
            auto url = Url::parse(expanded);
            if (!url || !url->is_absolute()) {
                throw InvalidBaseUrlError("url template expands to a non-absolute URL: " +
                                          expanded);
            }
            requests.push_back({std::move(*url), dept, page});
        }
    }
    return requests;
}

// --- rate limiting --------------------------------------------------------

/// Shared, mutually exclusive per-host dispatch gate. acquire() reserves the
/// next allowed dispatch slot for the host and waits (through the injected
/// clock) until that slot arrives, so concurrent workers still keep
/// min_delay_ms between dispatches to one host.
class RateLimiter {
public:
    RateLimiter(SteadyClock& clock, int64_t min_delay_ms)
        : clock_(clock), min_delay_ms_(min_delay_ms) {}

    void acquire(const std::string& host) {
        int64_t target;
        {
            std::lock_guard lock(m_);
            int64_t now = clock_.now_ms();
            auto it = next_slot_.find(host);
            target = it == next_slot_.end() ? now : std::max(now, it->second);
            next_slot_[host] = target + min_delay_ms_;
        }
        int64_t wait = target - clock_.now_ms();
        if (wait > 0) clock_.sleep_ms(wait);
    }

private:
    SteadyClock& clock_;
    int64_t min_delay_ms_;
    std::mutex m_;
    std::map<std::string, int64_t> next_slot_;
};

// --- fetch with retries ---------------------------------------------------

namespace fetch_detail {

inline bool retryable(const Transport::Result& r) {
    if (r.outcome != Transport::Result::Outcome::ok) return true;  // timeout / connection
    if (r.status >= 500) return true;
    if (r.status == 429) return true;
    return false;
}

inline std::string describe(const Transport::Result& r) {
    switch (r.outcome) {
        case Transport::Result::Outcome::timeout: return "timeout";
        case Transport::Result::Outcome::connection_error: return "connection error";
        case Transport::Result::Outcome::ok: return "HTTP " + std::to_string(r.status);
    }
    return "?";
}

}  // namespace fetch_detail

/// Downloads one page. Retryable failures (timeout, connection error, 5xx,
/// 429) are retried up to max_retries with exponential backoff; total
/// attempts never exceed max_retries + 1. Throws FetchExhaustedError with
/// the last cause, or NonRetryableError for other 4xx responses.
inline PageResponse fetch(const PageRequest& request, const PolitenessPolicy& policy,
                          Transport& transport, RateLimiter& limiter, SteadyClock& steady,
                          Clock& clock) {
    Transport::Result last;
    for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
        if (attempt > 0) {
            steady.sleep_ms(policy.backoff_base_ms << (attempt - 1));
        }
        limiter.acquire(request.url.host);
        last = transport.get(request.url, policy);
        if (last.outcome == Transport::Result::Outcome::ok && last.status >= 200 &&
            last.status < 300) {
            return PageResponse{request, last.status, std::move(last.body),
                                std::move(last.declared_encoding), clock.now_utc()};
        }
        if (!fetch_detail::retryable(last)) {
            throw NonRetryableError(request.url.to_string() + ": " +
                                    fetch_detail::describe(last));
        }
    }
    throw FetchExhaustedError(request.url.to_string() + ": retries exhausted, last: " +
                              fetch_detail::describe(last));
}

/// Per-page outcome of a crawl; a failed page carries its reason instead of
/// aborting the run.
struct FetchOutcome {
    std::optional<PageResponse> response;
    std::string error;
};

/// Fetches every request with bounded parallelism. Results come back in
/// request order regardless of completion order.
inline std::vector<FetchOutcome> fetch_all(const std::vector<PageRequest>& requests,
                                           const PolitenessPolicy& policy, Transport& transport,
                                           RateLimiter& limiter, SteadyClock& steady,
                                           Clock& clock) {
    std::vector<FetchOutcome> outcomes(requests.size());
    if (requests.empty()) return outcomes;
    const size_t workers =
        std::min<size_t>(static_cast<size_t>(policy.max_concurrent_fetches), requests.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= requests.size()) return;
            try {
                outcomes[i].response =
                    fetch(requests[i], policy, transport, limiter, steady, clock);
            } catch (const Error& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return outcomes;
}

// --- fixture corpus transport ----------------------------------------------

inline constexpr std::string_view kManifestFilename = "manifest.tsv";

struct ManifestEntry {
    std::string url;
    std::string file;  // relative to the corpus directory
    bool operator==(const ManifestEntry&) const = default;
};

struct FixtureManifest {
    std::vector<ManifestEntry> entries;
    bool operator==(const FixtureManifest&) const = default;
};

/// Reads manifest.tsv: one `URL<TAB>relative-file` pair per line.
inline FixtureManifest load_manifest(const std::filesystem::path& corpus_dir) {
    const auto path = corpus_dir / kManifestFilename;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestMissingError("no manifest at " + path.string());
    FixtureManifest manifest;
    std::string line;
    int lineno = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            throw ManifestMalformedError("manifest line " + std::to_string(lineno) +
                                         " is not URL<TAB>file: '" + line + "'");
        }
        std::string url = line.substr(0, tab);
        std::string file = line.substr(tab + 1);
        if (seen.count(url)) {
            throw ManifestMalformedError("manifest line " + std::to_string(lineno) +
                                         " repeats URL " + url);
        }
        seen[url] = lineno;
        manifest.entries.push_back({std::move(url), std::move(file)});
    }
    return manifest;
}

inline void save_manifest(const std::filesystem::path& corpus_dir,
                          const FixtureManifest& manifest) {
    std::ofstream out(corpus_dir / kManifestFilename, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write manifest in " + corpus_dir.string());
    for (const auto& e : manifest.entries) out << e.url << '\t' << e.file << '\n';
}

/// Replays recorded pages: known URLs serve their file bytes with status
/// 200, unknown URLs get 404. Pure — same corpus and URL, same bytes.
class FixtureTransport final : public Transport {
public:
    explicit FixtureTransport(std::filesystem::path corpus_dir)
        : corpus_dir_(std::move(corpus_dir)) {
        for (auto& e : load_manifest(corpus_dir_).entries) {
            files_[std::move(e.url)] = std::move(e.file);
        }
    }

    Result get(const Url& url, const PolitenessPolicy&) override {
        auto it = files_.find(url.to_string());
        if (it == files_.end()) {
            return {Result::Outcome::ok, 404, {}, std::nullopt};
        }
        std::ifstream in(corpus_dir_ / it->second, std::ios::binary);
        if (!in) {
            return {Result::Outcome::ok, 404, {}, std::nullopt};
        }
        std::ostringstream body;
        body << in.rdbuf();
        return {Result::Outcome::ok, 200, body.str(), std::nullopt};
    }

private:
    std::filesystem::path corpus_dir_;
    std::map<std::string, std::string> files_;
};

// --- robots.txt -----------------------------------------------------------

/// Prefix rules from the group matching our user agent (falling back to
/// `*`). Longest matching prefix wins; ties go to allow; no rules at all
/// means everything is allowed.
struct RobotsRules {
    struct Rule {
        bool allow = false;
        std::string prefix;
    };
    std::vector<Rule> rules;

    bool allows(std::string_view path) const {
        size_t best_len = 0;
        bool best_allow = true;
        bool found = false;
        for (const auto& r : rules) {
            if (r.prefix.empty()) continue;  // "Disallow:" empty = allow all
            if (path.substr(0, r.prefix.size()) == r.prefix) {
                if (r.prefix.size() > best_len || (r.prefix.size() == best_len && r.allow)) {
                    best_len = r.prefix.size();
                    best_allow = r.allow;
                    found = true;
                }
            }
        }
        return found ? best_allow : true;
    }
};

/// Parses a robots.txt body for the given user agent. The agent token is
/// the product name before any '/'. Exact-token groups beat the `*` group.
inline RobotsRules parse_robots_txt(std::string_view body, std::string_view user_agent) {
    std::string agent_token = std::string(user_agent.substr(0, user_agent.find('/')));
    agent_token = text::to_lower_utf8(agent_token);

    RobotsRules exact, wildcard;
    bool in_exact = false, in_wildcard = false, last_was_agent = false;
    bool have_exact = false;

    size_t pos = 0;
    while (pos <= body.size()) {
        size_t eol = body.find('\n', pos);
        if (eol == std::string_view::npos) eol = body.size();
        std::string_view line = body.substr(pos, eol - pos);
        pos = eol + 1;
        if (size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        std::string key = text::to_lower_utf8(text::collapse_ws(line.substr(0, colon)));
        std::string value = text::collapse_ws(line.substr(colon + 1));

        if (key == "user-agent") {
            if (!last_was_agent) {
                in_exact = in_wildcard = false;
            }
            std::string v = text::to_lower_utf8(value);
            if (v == "*") in_wildcard = true;
            else if (v == agent_token) in_exact = have_exact = true;
            last_was_agent = true;
        } else if (key == "allow" || key == "disallow") {
            last_was_agent = false;
            RobotsRules::Rule rule{key == "allow", value};
            if (in_exact) exact.rules.push_back(rule);
            if (in_wildcard) wildcard.rules.push_back(rule);
        } else {
            last_was_agent = false;
        }
        if (eol == body.size()) break;
    }
    return have_exact ? exact : wildcard;
}

}  // namespace shelfwatch
