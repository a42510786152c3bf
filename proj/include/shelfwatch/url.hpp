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

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "shelfwatch/errors.hpp"
#include "shelfwatch/text.hpp"

// URL parsing and RFC 3986 reference resolution. Only the generic syntax is
// implemented; no IDNA, no normalization beyond dot-segment removal.

namespace shelfwatch {

struct Url {
    std::string scheme;  // lowercased
    std::string host;    // lowercased; empty if no authority
    std::string port;    // digits, without ':'
    std::string path;
    std::string query;     // without '?'
    std::string fragment;  // without '#'
    bool has_authority = false;

    bool is_absolute() const { return !scheme.empty() && !host.empty(); }

    std::string authority() const {
        std::string a = host;
        if (!port.empty()) {
            a += ':';
            a += port;
        }
        return a;
    }

    std::string to_string() const {
        std::string s;
        if (!scheme.empty()) {
            s += scheme;
            s += ':';
        }
        if (has_authority) {
            s += "//";
            s += authority();
        }
        s += path;
        if (!query.empty()) {
            s += '?';
            s += query;
        }
        if (!fragment.empty()) {
            s += '#';
            s += fragment;
        }
        return s;
    }

    /// Path plus query, as sent in a request line. Empty path becomes "/".
    std::string request_target() const {
        std::string t = path.empty() ? "/" : path;
        if (!query.empty()) {
            t += '?';
            t += query;
        }
        return t;
    }

    /// Parses an absolute URL or a relative reference. Returns nullopt only
    /// for structurally broken input (bad scheme characters, stray ':').
    static std::optional<Url> parse(std::string_view s) {
        Url u;
        // fragment
        if (size_t h = s.find('#'); h != std::string_view::npos) {
            u.fragment = std::string(s.substr(h + 1));
            s = s.substr(0, h);
        }
        // query
        if (size_t q = s.find('?'); q != std::string_view::npos) {
            u.query = std::string(s.substr(q + 1));
            s = s.substr(0, q);
        }
        // scheme: ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ) ":"
        size_t colon = s.find(':');
        size_t slash = s.find('/');
        if (colon != std::string_view::npos && (slash == std::string_view::npos || colon < slash)) {
            std::string_view sch = s.substr(0, colon);
            if (sch.empty() || !std::isalpha(static_cast<unsigned char>(sch[0]))) {
                return std::nullopt;
            }
            for (char c : sch) {
                if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' &&
                    c != '.') {
                    return std::nullopt;
                }
            }
            u.scheme = text::to_lower_utf8(sch);
            s = s.substr(colon + 1);
        }
        // authority
        if (s.size() >= 2 && s[0] == '/' && s[1] == '/') {
            s = s.substr(2);
            size_t end = s.find('/');
            std::string_view auth = end == std::string_view::npos ? s : s.substr(0, end);
            s = end == std::string_view::npos ? std::string_view{} : s.substr(end);
            u.has_authority = true;
            // userinfo is accepted and dropped
            if (size_t at = auth.rfind('@'); at != std::string_view::npos) {
                auth = auth.substr(at + 1);
            }
            if (size_t pc = auth.rfind(':'); pc != std::string_view::npos) {
                std::string_view p = auth.substr(pc + 1);
                bool digits = !p.empty();
                for (char c : p) digits = digits && c >= '0' && c <= '9';
                if (digits || p.empty()) {
                    u.port = std::string(p);
                    auth = auth.substr(0, pc);
                }
            }
            u.host = text::to_lower_utf8(auth);
        }
        u.path = std::string(s);
        return u;
    }
};

/// RFC 3986 section 5.2.4.
inline std::string remove_dot_segments(std::string_view in) {
    std::string input(in);
    std::string out;
    while (!input.empty()) {
        if (input.rfind("../", 0) == 0) {
            input.erase(0, 3);
        } else if (input.rfind("./", 0) == 0) {
            input.erase(0, 2);
        } else if (input.rfind("/./", 0) == 0) {
            input.replace(0, 3, "/");
        } else if (input == "/.") {
            input = "/";
        } else if (input.rfind("/../", 0) == 0 || input == "/..") {
            input.replace(0, input == "/.." ? 3 : 4, "/");
            size_t last = out.rfind('/');
            out.erase(last == std::string::npos ? 0 : last);
        } else if (input == "." || input == "..") {
            input.clear();
        } else {
            size_t next = input.find('/', 1);
            out += input.substr(0, next);
            input.erase(0, next == std::string::npos ? input.size() : next);
        }
    }
    return out;
}

namespace detail {
inline std::string merge_paths(const Url& base, std::string_view ref_path) {
    if (base.has_authority && base.path.empty()) {
        return "/" + std::string(ref_path);
    }
    size_t last = base.path.rfind('/');
    if (last == std::string::npos) return std::string(ref_path);
    return base.path.substr(0, last + 1) + std::string(ref_path);
}
}  // namespace detail

/// RFC 3986 section 5.2.2 reference resolution (strict).
/// Throws UnresolvableHrefError for empty or unparseable references.
inline Url resolve_url(const Url& base, std::string_view href) {
    if (href.empty()) throw UnresolvableHrefError("empty href");
    auto ref_opt = Url::parse(href);
    if (!ref_opt) throw UnresolvableHrefError("unparseable href: " + std::string(href));
    const Url& r = *ref_opt;
    Url t;
    if (!r.scheme.empty()) {
        t.scheme = r.scheme;
        t.has_authority = r.has_authority;
        t.host = r.host;
        t.port = r.port;
        t.path = remove_dot_segments(r.path);
        t.query = r.query;
    } else {
        t.scheme = base.scheme;
        if (r.has_authority) {
            t.has_authority = true;
            t.host = r.host;
            t.port = r.port;
            t.path = remove_dot_segments(r.path);
            t.query = r.query;
        } else {
            t.has_authority = base.has_authority;
            t.host = base.host;
            t.port = base.port;
            if (r.path.empty()) {
                t.path = base.path;
                t.query = r.query.empty() ? base.query : r.query;
            } else {
                t.path = r.path[0] == '/' ? std::string(r.path)
                                          : detail::merge_paths(base, r.path);
                t.path = remove_dot_segments(t.path);
                t.query = r.query;
            }
        }
    }
    t.fragment = r.fragment;
    return t;
}

/// Decodes %XX escapes; leaves malformed escapes untouched.
inline std::string percent_decode(std::string_view s) {
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            int hi = hex(s[i + 1]), lo = hex(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

}  // namespace shelfwatch
