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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "shelfwatch/errors.hpp"
#include "shelfwatch/fetch.hpp"
#include "shelfwatch/html.hpp"
#include "shelfwatch/text.hpp"
#include "shelfwatch/watchlist.hpp"

// Building and checking the recorded fixture corpus that stands in for the
// live site. Synthesized pages use the same card shape the default rule set
// expects (an anchor with title/href plus nested date and price containers),
// so the generator and the extractor keep each other honest.

namespace shelfwatch {

/// Input for the page generator. names, prices and post_times are parallel
/// per-card lists; prices and post_times may hold empty strings for cards
/// without those parts.
struct CorpusSpec {
    std::string base_url = "https://example.test";
    std::string department = "vaihtoautot";
    std::string url_template{kDefaultUrlTemplate};
    int n_cards = 0;
    std::vector<std::string> names;
    std::vector<std::string> prices;
    std::vector<std::string> post_times;
    int cards_per_page = 0;  // 0 = everything on one page
    uint64_t seed = 1;
};

namespace corpus_detail {

inline std::string escape_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string escape_attr(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

/// ASCII-only path slug from a name token; anything else falls back.
inline std::string path_slug(const std::vector<std::string>& tokens, size_t index,
                             std::string_view fallback) {
    if (index < tokens.size()) {
        std::string out;
        for (char c : tokens[index]) {
            if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) out.push_back(c);
        }
        if (!out.empty()) return out;
    }
    return std::string(fallback);
}

inline void validate_spec(const CorpusSpec& spec) {
    const size_t n = static_cast<size_t>(spec.n_cards);
    if (spec.n_cards < 0 || spec.names.size() != n || spec.prices.size() != n ||
        spec.post_times.size() != n) {
        throw SpecInvalidError("names/prices/post_times lengths must all equal n_cards");
    }
    if (spec.cards_per_page < 0) throw SpecInvalidError("cards_per_page must be >= 0");
    if (spec.department.empty() || spec.department.front() == '/' ||
        spec.department.back() == '/') {
        throw SpecInvalidError("department must be a bare path segment");
    }
    for (char c : spec.department) {
        if (text::is_ascii_space(c)) throw SpecInvalidError("department contains whitespace");
    }
    auto base = Url::parse(spec.base_url);
    if (!base || !base->is_absolute()) throw SpecInvalidError("base_url must be absolute");
    for (size_t i = 0; i < n; ++i) {
        if (spec.names[i].empty()) {
            throw SpecInvalidError("names[" + std::to_string(i) + "] is empty");
        }
        // Texts must already be whitespace-collapsed, or extraction could
        // never hand them back verbatim.
        if (spec.post_times[i] != text::collapse_ws(spec.post_times[i])) {
            throw SpecInvalidError("post_times[" + std::to_string(i) +
                                   "] is not whitespace-collapsed");
        }
        if (spec.prices[i] != text::collapse_ws(spec.prices[i])) {
            throw SpecInvalidError("prices[" + std::to_string(i) +
                                   "] is not whitespace-collapsed");
        }
    }
}

}  // namespace corpus_detail

/// Deterministically generates listing pages for the spec, writes them plus
/// a manifest into out_dir and returns the manifest. Extraction under the
/// default rule set reproduces the spec's names, prices and post-time texts.
inline FixtureManifest synthesize_corpus(const CorpusSpec& spec,
                                         const std::filesystem::path& out_dir) {
    corpus_detail::validate_spec(spec);
    std::filesystem::create_directories(out_dir);

    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<int64_t> id_dist(10000000, 99999999);
    std::set<std::string> used_ids;
    auto fresh_id = [&] {
        for (;;) {
            std::string id = std::to_string(id_dist(rng));
            if (used_ids.insert(id).second) return id;
        }
    };

    const size_t n = static_cast<size_t>(spec.n_cards);
    const size_t per_page = spec.cards_per_page == 0
                                ? std::max<size_t>(n, 1)
                                : static_cast<size_t>(spec.cards_per_page);
    const size_t pages = n == 0 ? 1 : (n + per_page - 1) / per_page;

    FixtureManifest manifest;
    size_t card = 0;
    for (size_t page = 1; page <= pages; ++page) {
        std::ostringstream html;
        html << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>"
             << corpus_detail::escape_text(spec.department) << " - page " << page
             << "</title>\n</head>\n<body>\n<div class=\"listing\">\n";
        for (size_t k = 0; k < per_page && card < n; ++k, ++card) {
            const std::string& name = spec.names[card];
            auto tokens = normalize_name(name);
            std::string make = corpus_detail::path_slug(tokens, 0, "item");
            std::string model = corpus_detail::path_slug(tokens, 1, "misc");
            std::string id = fresh_id();
            html << "<a tabindex=\"-1\" href=\"/" << spec.department << "/" << make << "/"
                 << model << "/" << id << "\" title=\"" << corpus_detail::escape_attr(name)
                 << "\" aria-label=\"" << corpus_detail::escape_attr(name)
                 << "\" class=\"adCard_anchor__2R5Cs block px-2 py-2 m:py-4 m:px-4 l-px-6\">\n"
                 << "  <img class=\"item-image\" src=\"/img/" << id << ".jpg\">\n"
                 << "  <div class=\"date-cat-container\"><div class=\"date image\">"
                 << corpus_detail::escape_text(spec.post_times[card]) << "</div></div>\n"
                 << "  <div class=\"price\">" << corpus_detail::escape_text(spec.prices[card])
                 << "</div>\n</a>\n";
        }
        html << "</div>\n</body>\n</html>\n";

        std::string filename = spec.department + "_p" + std::to_string(page) + ".html";
        std::ofstream out(out_dir / filename, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + (out_dir / filename).string());
        out << html.str();

        std::string url = expand_url_template(spec.url_template, spec.base_url, spec.department,
                                              static_cast<int>(page));
        manifest.entries.push_back({url, filename});
    }
    save_manifest(out_dir, manifest);
    return manifest;
}

/// Fetches each URL once through the given transport and records the bytes
/// verbatim. Failures are reported and skipped; the manifest covers what
/// succeeded.
inline FixtureManifest record_corpus(const std::vector<std::string>& urls, Transport& transport,
                                     const PolitenessPolicy& policy, SteadyClock& steady,
                                     Clock& clock, const std::filesystem::path& out_dir,
                                     std::ostream& log) {
    std::filesystem::create_directories(out_dir);
    RateLimiter limiter(steady, policy.min_delay_ms);
    FixtureManifest manifest;
    int index = 0;
    for (const auto& raw_url : urls) {
        ++index;
        auto url = Url::parse(raw_url);
        if (!url || !url->is_absolute()) {
            log << "skipping non-absolute URL: " << raw_url << "\n";
            continue;
        }
        PageRequest request{*url, DepartmentEntry{"recorded", std::nullopt}, 1};
        try {
            PageResponse response = fetch(request, policy, transport, limiter, steady, clock);
            std::string filename = "page_" + std::to_string(index) + ".html";
            std::ofstream out(out_dir / filename, std::ios::binary | std::ios::trunc);
            if (!out) throw Error("cannot write " + (out_dir / filename).string());
            out << response.body;
            manifest.entries.push_back({raw_url, filename});
        } catch (const Error& e) {
            log << "failed: " << raw_url << " (" << e.what() << ")\n";
        }
    }
    save_manifest(out_dir, manifest);
    return manifest;
}

/// Manifest closure check: the manifest loads, URLs are absolute and every
/// referenced file exists and runs through the HTML parser. Returns one
/// message per problem; empty means the corpus is usable.
inline std::vector<std::string> validate_corpus(const std::filesystem::path& corpus_dir) {
    std::vector<std::string> problems;
    FixtureManifest manifest;
    try {
        manifest = load_manifest(corpus_dir);
    } catch (const Error& e) {
        problems.push_back(e.what());
        return problems;
    }
    for (const auto& entry : manifest.entries) {
        auto url = Url::parse(entry.url);
        if (!url || !url->is_absolute()) {
            problems.push_back("manifest URL not absolute: " + entry.url);
        }
        std::ifstream in(corpus_dir / entry.file, std::ios::binary);
        if (!in) {
            problems.push_back("missing file: " + entry.file);
            continue;
        }
        std::ostringstream body;
        body << in.rdbuf();
        html::parse_html(body.str());  // total; proves the bytes are readable
    }
    return problems;
}

}  // namespace shelfwatch
