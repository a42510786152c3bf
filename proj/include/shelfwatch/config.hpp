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

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shelfwatch/errors.hpp"
#include "shelfwatch/extract.hpp"
#include "shelfwatch/fetch.hpp"
#include "shelfwatch/temporal.hpp"
#include "shelfwatch/watchlist.hpp"

// The run configuration: one JSON file wiring every stage together, plus
// the validation that turns a bad config into diagnostics naming the exact
// section and field instead of a crash three stages later.

namespace shelfwatch {

enum class TransportMode { live, fixture };
enum class SinkKind { text, jsonl, webhook };

struct SinkSpec {
    SinkKind kind = SinkKind::jsonl;
    std::string webhook_url;

    /// "text", "jsonl" or "webhook:URL".
    static std::optional<SinkSpec> parse(std::string_view s) {
        if (s == "text") return SinkSpec{SinkKind::text, {}};
        if (s == "jsonl") return SinkSpec{SinkKind::jsonl, {}};
        if (s.rfind("webhook:", 0) == 0) {
            return SinkSpec{SinkKind::webhook, std::string(s.substr(8))};
        }
        return std::nullopt;
    }

    std::string to_string() const {
        switch (kind) {
            case SinkKind::text: return "text";
            case SinkKind::jsonl: return "jsonl";
            case SinkKind::webhook: return "webhook:" + webhook_url;
        }
        return "jsonl";
    }
};

struct RunConfig {
    std::string base_url;
    std::string url_template{kDefaultUrlTemplate};
    std::filesystem::path departments_path;
    std::filesystem::path products_path;
    ExtractionRuleSet extraction;
    LocaleTable locale = finnish_locale();
    SiteClock site_clock;
    RecencyWindow window{1440};
    PolitenessPolicy politeness;
    std::filesystem::path store_path = "shelfwatch-seen.jsonl";
    SinkSpec sink;
    TransportMode mode = TransportMode::fixture;
    std::filesystem::path fixtures_dir;
};

/// Rules for the anchor-card listing shape: the card is an anchor whose
/// class carries the ad-card token; name and link come off its attributes,
/// post time and price from nested containers.
inline ExtractionRuleSet default_rule_set() {
    ExtractionRuleSet rules;
    rules.card_pattern.tag = "a";
    rules.card_pattern.class_contains = {"adCard_anchor__2R5Cs"};

    FieldRule name;
    name.target_field = TargetField::name;
    name.source = {FieldSource::Kind::attribute, "title"};
    name.required = true;
    rules.field_rules.push_back(name);

    FieldRule href;
    href.target_field = TargetField::href;
    href.source = {FieldSource::Kind::attribute, "href"};
    href.required = true;
    rules.field_rules.push_back(href);

    FieldRule posted;
    posted.target_field = TargetField::posted_text;
    posted.within = html::NodePattern{};
    posted.within->tag = "div";
    posted.within->class_contains = {"date", "image"};
    posted.source = {FieldSource::Kind::text_content, {}};
    rules.field_rules.push_back(posted);

    FieldRule price;
    price.target_field = TargetField::price_text;
    price.within = html::NodePattern{};
    price.within->tag = "div";
    price.within->class_contains = {"price"};
    price.source = {FieldSource::Kind::text_content, {}};
    rules.field_rules.push_back(price);

    FieldRule image;
    image.target_field = TargetField::image_url;
    image.within = html::NodePattern{};
    image.within->tag = "img";
    image.source = {FieldSource::Kind::attribute, "src"};
    rules.field_rules.push_back(image);

    return rules;
}

namespace config_detail {

using nlohmann::json;

inline void parse_node_pattern(const json& j, std::string_view where, html::NodePattern& out,
                               std::vector<std::string>& diags) {
    if (!j.is_object()) {
        diags.push_back(std::string(where) + ": expected an object");
        return;
    }
    if (j.contains("tag")) {
        if (!j["tag"].is_string()) diags.push_back(std::string(where) + ".tag: expected string");
        else out.tag = j["tag"].get<std::string>();
    }
    if (j.contains("class_contains")) {
        if (!j["class_contains"].is_array()) {
            diags.push_back(std::string(where) + ".class_contains: expected array of strings");
        } else {
            for (const auto& t : j["class_contains"]) {
                if (t.is_string()) out.class_contains.push_back(t.get<std::string>());
                else diags.push_back(std::string(where) + ".class_contains: expected string");
            }
        }
    }
    if (j.contains("attr_equals")) {
        if (!j["attr_equals"].is_object()) {
            diags.push_back(std::string(where) + ".attr_equals: expected object");
        } else {
            for (auto it = j["attr_equals"].begin(); it != j["attr_equals"].end(); ++it) {
                if (it.value().is_string()) {
                    out.attr_equals.emplace_back(it.key(), it.value().get<std::string>());
                } else {
                    diags.push_back(std::string(where) + ".attr_equals." + it.key() +
                                    ": expected string");
                }
            }
        }
    }
    if (j.contains("attr_present")) {
        if (!j["attr_present"].is_array()) {
            diags.push_back(std::string(where) + ".attr_present: expected array of strings");
        } else {
            for (const auto& t : j["attr_present"]) {
                if (t.is_string()) out.attr_present.push_back(t.get<std::string>());
                else diags.push_back(std::string(where) + ".attr_present: expected string");
            }
        }
    }
}

inline void parse_extraction(const json& j, ExtractionRuleSet& out,
                             std::vector<std::string>& diags) {
    if (!j.is_object()) {
        diags.push_back("extraction: expected an object");
        return;
    }
    out.field_rules.clear();
    out.card_pattern = {};
    if (j.contains("card_pattern")) {
        parse_node_pattern(j["card_pattern"], "extraction.card_pattern", out.card_pattern, diags);
    } else {
        diags.push_back("extraction.card_pattern: missing");
    }
    if (j.contains("field_rules") && j["field_rules"].is_array()) {
        for (const auto& rj : j["field_rules"]) {
            if (!rj.is_object() || !rj.contains("target_field") ||
                !rj["target_field"].is_string()) {
                diags.push_back("extraction.field_rules: each rule needs a target_field string");
                continue;
            }
            std::string field_name = rj["target_field"].get<std::string>();
            auto target = target_field_from_string(field_name);
            if (!target) {
                diags.push_back("extraction.field_rules." + field_name +
                                ": unknown target_field");
                continue;
            }
            FieldRule rule;
            rule.target_field = *target;
            std::string where = "extraction.field_rules." + field_name;
            if (rj.contains("within")) {
                rule.within = html::NodePattern{};
                parse_node_pattern(rj["within"], where + ".within", *rule.within, diags);
            }
            if (rj.contains("source")) {
                const auto& sj = rj["source"];
                if (sj.is_string() && sj.get<std::string>() == "text_content") {
                    rule.source = {FieldSource::Kind::text_content, {}};
                } else if (sj.is_object() && sj.contains("attribute") &&
                           sj["attribute"].is_string()) {
                    rule.source = {FieldSource::Kind::attribute,
                                   sj["attribute"].get<std::string>()};
                } else {
                    diags.push_back(where +
                                    ".source: expected \"text_content\" or {\"attribute\": name}");
                }
            }
            if (rj.contains("required")) {
                if (rj["required"].is_boolean()) rule.required = rj["required"].get<bool>();
                else diags.push_back(where + ".required: expected boolean");
            }
            out.field_rules.push_back(std::move(rule));
        }
    } else if (j.contains("field_rules")) {
        diags.push_back("extraction.field_rules: expected an array");
    } else {
        diags.push_back("extraction.field_rules: missing");
    }
    if (j.contains("href_parse")) {
        const auto& hj = j["href_parse"];
        if (hj.is_object() && hj.contains("segments") && hj["segments"].is_array()) {
            out.href_parse.roles.clear();
            for (const auto& seg : hj["segments"]) {
                std::string s = seg.is_string() ? seg.get<std::string>() : std::string();
                if (s == "department") out.href_parse.roles.push_back(SegmentRole::department);
                else if (s == "product") out.href_parse.roles.push_back(SegmentRole::product);
                else if (s == "model") out.href_parse.roles.push_back(SegmentRole::model);
                else if (s == "product_id") {
                    out.href_parse.roles.push_back(SegmentRole::product_id);
                } else {
                    diags.push_back("extraction.href_parse.segments: unknown role '" + s + "'");
                }
            }
        } else {
            diags.push_back("extraction.href_parse: expected {\"segments\": [...]}");
        }
    }
}

template <typename T>
void read_number(const json& j, const char* key, std::string_view section, T& out,
                 std::vector<std::string>& diags) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) {
        diags.push_back(std::string(section) + "." + key + ": expected a number");
        return;
    }
    out = j[key].get<T>();
}

inline void read_string_list(const json& j, const char* key, std::string_view section,
                             std::vector<std::string>& out, std::vector<std::string>& diags) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) {
        diags.push_back(std::string(section) + "." + key + ": expected an array of strings");
        return;
    }
    out.clear();
    for (const auto& t : j[key]) {
        if (t.is_string()) out.push_back(t.get<std::string>());
        else diags.push_back(std::string(section) + "." + key + ": expected string");
    }
}

}  // namespace config_detail

/// Parses config JSON into a RunConfig, appending a diagnostic for every
/// problem found instead of stopping at the first.
inline RunConfig config_from_json(const nlohmann::json& j, std::vector<std::string>& diags) {
    using config_detail::read_number;
    using config_detail::read_string_list;
    RunConfig cfg;
    cfg.extraction = default_rule_set();
    if (!j.is_object()) {
        diags.push_back("config: expected a JSON object");
        return cfg;
    }
    if (j.contains("base_url")) {
        if (j["base_url"].is_string()) cfg.base_url = j["base_url"].get<std::string>();
        else diags.push_back("base_url: expected string");
    }
    if (j.contains("url_template")) {
        if (j["url_template"].is_string()) {
            cfg.url_template = j["url_template"].get<std::string>();
        } else {
            diags.push_back("url_template: expected string");
        }
    }
    if (j.contains("watchlist")) {
        const auto& wj = j["watchlist"];
        if (!wj.is_object()) {
            diags.push_back("watchlist: expected an object");
        } else {
            if (wj.contains("departments_path") && wj["departments_path"].is_string()) {
                cfg.departments_path = wj["departments_path"].get<std::string>();
            }
            if (wj.contains("products_path") && wj["products_path"].is_string()) {
                cfg.products_path = wj["products_path"].get<std::string>();
            }
        }
    }
    if (j.contains("extraction")) {
        config_detail::parse_extraction(j["extraction"], cfg.extraction, diags);
    }
    if (j.contains("locale")) {
        const auto& lj = j["locale"];
        if (!lj.is_object()) {
            diags.push_back("locale: expected an object");
        } else {
            read_string_list(lj, "today_tokens", "locale", cfg.locale.today_tokens, diags);
            read_string_list(lj, "yesterday_tokens", "locale", cfg.locale.yesterday_tokens,
                             diags);
            read_string_list(lj, "month_names", "locale", cfg.locale.month_names, diags);
        }
    }
    if (j.contains("site_clock")) {
        const auto& sj = j["site_clock"];
        if (!sj.is_object()) {
            diags.push_back("site_clock: expected an object");
        } else {
            read_number(sj, "site_utc_offset_min", "site_clock",
                        cfg.site_clock.site_utc_offset_min, diags);
            read_number(sj, "local_utc_offset_min", "site_clock",
                        cfg.site_clock.local_utc_offset_min, diags);
        }
    }
    read_number(j, "recency_window_min", "config", cfg.window.duration_min, diags);
    if (j.contains("politeness")) {
        const auto& pj = j["politeness"];
        if (!pj.is_object()) {
            diags.push_back("politeness: expected an object");
        } else {
            read_number(pj, "min_delay_ms", "politeness", cfg.politeness.min_delay_ms, diags);
            read_number(pj, "max_retries", "politeness", cfg.politeness.max_retries, diags);
            read_number(pj, "backoff_base_ms", "politeness", cfg.politeness.backoff_base_ms,
                        diags);
            read_number(pj, "timeout_ms", "politeness", cfg.politeness.timeout_ms, diags);
            read_number(pj, "max_pages_per_department", "politeness",
                        cfg.politeness.max_pages_per_department, diags);
            read_number(pj, "max_concurrent_fetches", "politeness",
                        cfg.politeness.max_concurrent_fetches, diags);
            if (pj.contains("user_agent")) {
                if (pj["user_agent"].is_string()) {
                    cfg.politeness.user_agent = pj["user_agent"].get<std::string>();
                } else {
                    diags.push_back("politeness.user_agent: expected string");
                }
            }
        }
    }
    if (j.contains("store_path")) {
        if (j["store_path"].is_string()) cfg.store_path = j["store_path"].get<std::string>();
        else diags.push_back("store_path: expected string");
    }
    if (j.contains("sink")) {
        if (j["sink"].is_string()) {
            auto spec = SinkSpec::parse(j["sink"].get<std::string>());
            if (spec) cfg.sink = *spec;
            else diags.push_back("sink: expected \"text\", \"jsonl\" or \"webhook:URL\"");
        } else {
            diags.push_back("sink: expected string");
        }
    }
    if (j.contains("transport")) {
        const auto& tj = j["transport"];
        if (!tj.is_object()) {
            diags.push_back("transport: expected an object");
        } else {
            if (tj.contains("mode") && tj["mode"].is_string()) {
                std::string m = tj["mode"].get<std::string>();
                if (m == "live") cfg.mode = TransportMode::live;
                else if (m == "fixture") cfg.mode = TransportMode::fixture;
                else diags.push_back("transport.mode: expected \"live\" or \"fixture\"");
            }
            if (tj.contains("fixtures_dir") && tj["fixtures_dir"].is_string()) {
                cfg.fixtures_dir = tj["fixtures_dir"].get<std::string>();
            }
        }
    }
    return cfg;
}

/// Cross-section checks on an already-parsed config. Every diagnostic names
/// the section and field it is about.
inline std::vector<std::string> validate_config(const RunConfig& cfg) {
    std::vector<std::string> diags;
    auto base = Url::parse(cfg.base_url);
    if (cfg.base_url.empty() || !base || !base->is_absolute()) {
        diags.push_back("base_url: must be an absolute URL");
    }
    if (cfg.url_template.find("{slug}") == std::string::npos) {
        diags.push_back("url_template: missing the {slug} placeholder");
    }
    if (cfg.departments_path.empty()) {
        diags.push_back("watchlist.departments_path: missing");
    } else if (!std::filesystem::exists(cfg.departments_path)) {
        diags.push_back("watchlist.departments_path: no such file: " +
                        cfg.departments_path.string());
    }
    if (cfg.products_path.empty()) {
        diags.push_back("watchlist.products_path: missing");
    } else if (!std::filesystem::exists(cfg.products_path)) {
        diags.push_back("watchlist.products_path: no such file: " + cfg.products_path.string());
    }
    if (!cfg.departments_path.empty() && !cfg.products_path.empty() &&
        std::filesystem::exists(cfg.departments_path) &&
        std::filesystem::exists(cfg.products_path)) {
        try {
            load_watchlist(cfg.departments_path, cfg.products_path);
        } catch (const Error& e) {
            diags.push_back(std::string("watchlist: ") + e.what());
        }
    }
    for (auto& d : cfg.extraction.validate()) diags.push_back(d);
    for (const auto& t : cfg.locale.today_tokens) {
        if (temporal_detail::token_in(cfg.locale.yesterday_tokens, t)) {
            diags.push_back("locale.today_tokens: '" + t + "' also listed as a yesterday token");
        }
    }
    if (!cfg.locale.month_names.empty() && cfg.locale.month_names.size() != 12) {
        diags.push_back("locale.month_names: expected 12 names, got " +
                        std::to_string(cfg.locale.month_names.size()));
    }
    if (!cfg.site_clock.valid()) {
        diags.push_back("site_clock: offsets must be within +/-14 hours");
    }
    if (cfg.window.duration_min < 0) {
        diags.push_back("recency_window_min: must be >= 0");
    }
    for (auto& d : cfg.politeness.validate()) diags.push_back(d);
    if (cfg.store_path.empty()) diags.push_back("store_path: missing");
    if (cfg.sink.kind == SinkKind::webhook) {
        auto hook = Url::parse(cfg.sink.webhook_url);
        if (!hook || !hook->is_absolute()) {
            diags.push_back("sink: webhook URL must be absolute");
        }
    }
    if (cfg.mode == TransportMode::fixture) {
        if (cfg.fixtures_dir.empty()) {
            diags.push_back("transport.fixtures_dir: required in fixture mode");
        } else if (!std::filesystem::exists(cfg.fixtures_dir / kManifestFilename)) {
            diags.push_back("transport.fixtures_dir: no manifest.tsv in " +
                            cfg.fixtures_dir.string());
        }
    }
    return diags;
}

/// Loads and parses the file; file-level problems become diagnostics too.
inline RunConfig load_config_file(const std::filesystem::path& path,
                                  std::vector<std::string>& diags) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        diags.push_back("config: cannot open " + path.string());
        return RunConfig{};
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        diags.push_back("config: " + path.string() + " is not valid JSON");
        return RunConfig{};
    }
    return config_from_json(j, diags);
}

/// Convenience for callers that want a valid config or an exception.
inline RunConfig load_config_file_or_throw(const std::filesystem::path& path) {
    std::vector<std::string> diags;
    RunConfig cfg = load_config_file(path, diags);
    if (!diags.empty()) throw ConfigError("config invalid: " + diags.front());
    return cfg;
}

}  // namespace shelfwatch
