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
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "shelfwatch/errors.hpp"
#include "shelfwatch/record.hpp"
#include "shelfwatch/text.hpp"

// The user's interest lists: which departments to crawl and which product
// names to alert on. Loaded from two plain-text files, one entry per line,
// `#` comments, UTF-8. A WatchList is immutable after load and safe to
// share across pipeline workers.

namespace shelfwatch {

struct DepartmentEntry {
    std::string slug;  // URL path segment, no whitespace, no edge '/'
    std::optional<std::string> display_name;
    bool operator==(const DepartmentEntry&) const = default;
};

enum class MatchMode {
    all_tokens_present,  // every pattern token occurs somewhere in the name
    exact_phrase,        // pattern tokens occur consecutively, in order
};

struct ProductPattern {
    std::vector<std::string> tokens;  // lowercase, non-empty
    MatchMode mode = MatchMode::all_tokens_present;
    bool operator==(const ProductPattern&) const = default;
};

struct WatchList {
    std::vector<DepartmentEntry> departments;  // non-empty
    std::vector<ProductPattern> products;      // empty means match everything
    bool operator==(const WatchList&) const = default;
};

/// Tokenizes a display name for matching: lowercase, with `.`, `,`, `/`,
/// `-`, non-breaking spaces and ASCII whitespace all acting as separators.
/// Total; may return an empty list.
inline std::vector<std::string> normalize_name(std::string_view raw) {
    std::vector<std::string> tokens;
    std::string current;
    size_t i = 0;
    while (i < raw.size()) {
        char32_t cp = text::next_codepoint(raw, i);
        bool sep = cp == '.' || cp == ',' || cp == '/' || cp == '-' || cp == 0xA0 ||
                   (cp < 0x80 && text::is_ascii_space(static_cast<char>(cp)));
        if (sep) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            text::append_utf8(current, text::to_lower(cp));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

namespace detail {

inline std::string strip_comment(std::string_view line) {
    size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    size_t b = 0, e = line.size();
    while (b < e && text::is_ascii_space(line[b])) ++b;
    while (e > b && text::is_ascii_space(line[e - 1])) --e;
    return std::string(line.substr(b, e - b));
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileMissingError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace detail

/// Loads the department and product files. Throws FileMissingError or
/// MalformedLineError (with the offending line number) — a bad watchlist
/// aborts the run rather than silently crawling the wrong thing.
inline WatchList load_watchlist(const std::filesystem::path& departments_path,
                                const std::filesystem::path& products_path) {
    WatchList wl;
    std::set<std::string> seen_slugs;
    int lineno = 0;
    for (const auto& raw : detail::read_lines(departments_path)) {
        ++lineno;
        std::string entry = detail::strip_comment(raw);
        if (entry.empty()) continue;
        for (char c : entry) {
            if (text::is_ascii_space(c)) {
                throw MalformedLineError("department slug contains whitespace: '" + entry + "'",
                                         lineno);
            }
        }
        if (entry.front() == '/' || entry.back() == '/') {
            throw MalformedLineError("department slug has a leading or trailing '/': '" + entry +
                                         "'",
                                     lineno);
        }
        std::string folded = text::to_lower_utf8(entry);
        if (!seen_slugs.insert(folded).second) {
            throw MalformedLineError("duplicate department slug: '" + entry + "'", lineno);
        }
        wl.departments.push_back({entry, std::nullopt});
    }
    if (wl.departments.empty()) {
        throw MalformedLineError("department file lists no departments: " +
                                     departments_path.string(),
                                 lineno);
    }

    lineno = 0;
    for (const auto& raw : detail::read_lines(products_path)) {
        ++lineno;
        std::string entry = detail::strip_comment(raw);
        if (entry.empty()) continue;
        ProductPattern p;
        if (entry.size() >= 2 && entry.front() == '"' && entry.back() == '"') {
            p.mode = MatchMode::exact_phrase;
            entry = entry.substr(1, entry.size() - 2);
        }
        for (const auto& tok : text::split_ws(entry)) {
            p.tokens.push_back(text::to_lower_utf8(tok));
        }
        if (p.tokens.empty()) {
            throw MalformedLineError("product pattern has no tokens", lineno);
        }
        wl.products.push_back(std::move(p));
    }
    return wl;
}

/// Writes the two files back in the load format. load(save(wl)) == wl.
inline void save_watchlist(const WatchList& wl, const std::filesystem::path& departments_path,
                           const std::filesystem::path& products_path) {
    {
        std::ofstream out(departments_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + departments_path.string());
        for (const auto& d : wl.departments) out << d.slug << '\n';
    }
    std::ofstream out(products_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + products_path.string());
    for (const auto& p : wl.products) {
        if (p.mode == MatchMode::exact_phrase) out << '"';
        for (size_t i = 0; i < p.tokens.size(); ++i) {
            if (i) out << ' ';
            out << p.tokens[i];
        }
        if (p.mode == MatchMode::exact_phrase) out << '"';
        out << '\n';
    }
}

inline bool pattern_matches(const ProductPattern& p, const std::vector<std::string>& tokens) {
    if (p.mode == MatchMode::all_tokens_present) {
        for (const auto& want : p.tokens) {
            if (std::find(tokens.begin(), tokens.end(), want) == tokens.end()) return false;
        }
        return true;
    }
    if (p.tokens.size() > tokens.size()) return false;
    for (size_t start = 0; start + p.tokens.size() <= tokens.size(); ++start) {
        bool all = true;
        for (size_t k = 0; k < p.tokens.size(); ++k) {
            if (tokens[start + k] != p.tokens[k]) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

/// True iff the product list is empty (wildcard) or some pattern matches
/// the given normalized name tokens.
inline bool matches_tokens(const WatchList& wl, const std::vector<std::string>& tokens) {
    if (wl.products.empty()) return true;
    for (const auto& p : wl.products) {
        if (pattern_matches(p, tokens)) return true;
    }
    return false;
}

/// Name and model are matched together as one token stream.
inline std::vector<std::string> record_tokens(const ProductRecord& r) {
    std::string joined = r.name;
    if (r.model) {
        joined += ' ';
        joined += *r.model;
    }
    return normalize_name(joined);
}

inline bool matches(const WatchList& wl, const ProductRecord& r) {
    return matches_tokens(wl, record_tokens(r));
}

}  // namespace shelfwatch
