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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shelfwatch/errors.hpp"
#include "shelfwatch/html.hpp"
#include "shelfwatch/record.hpp"
#include "shelfwatch/text.hpp"
#include "shelfwatch/time.hpp"
#include "shelfwatch/url.hpp"
#include "shelfwatch/watchlist.hpp"

// Declarative extraction: a card pattern finds product cards, field rules
// pull values out of each card, and the href schema turns the product link
// into identity. Rules are data, not code — new sites mean new config.

namespace shelfwatch {

enum class TargetField {
    name,
    model,
    department,
    product_id,
    href,
    image_url,
    price_text,
    posted_text,
};

inline const char* to_string(TargetField f) {
    switch (f) {
        case TargetField::name: return "name";
        case TargetField::model: return "model";
        case TargetField::department: return "department";
        case TargetField::product_id: return "product_id";
        case TargetField::href: return "href";
        case TargetField::image_url: return "image_url";
        case TargetField::price_text: return "price_text";
        case TargetField::posted_text: return "posted_text";
    }
    return "?";
}

inline std::optional<TargetField> target_field_from_string(std::string_view s) {
    static const std::map<std::string_view, TargetField> table = {
        {"name", TargetField::name},           {"model", TargetField::model},
        {"department", TargetField::department}, {"product_id", TargetField::product_id},
        {"href", TargetField::href},           {"image_url", TargetField::image_url},
        {"price_text", TargetField::price_text}, {"posted_text", TargetField::posted_text},
    };
    auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

/// Where a field's value comes from within its node.
struct FieldSource {
    enum class Kind { text_content, attribute };
    Kind kind = Kind::text_content;
    std::string attribute;  // set when kind == attribute
    bool operator==(const FieldSource&) const = default;
};

struct FieldRule {
    TargetField target_field = TargetField::name;
    std::optional<html::NodePattern> within;  // descendant scope under the card
    FieldSource source;
    bool required = false;
};

/// Roles bound to the final path segments of a product href,
/// e.g. /vaihtoautot/toyota/yaris/84905081 under the default schema.
enum class SegmentRole { department, product, model, product_id };

struct HrefSchema {
    std::vector<SegmentRole> roles = {SegmentRole::department, SegmentRole::product,
                                      SegmentRole::model, SegmentRole::product_id};
};

struct ExtractionRuleSet {
    html::NodePattern card_pattern;
    std::vector<FieldRule> field_rules;
    HrefSchema href_parse;

    const FieldRule* rule_for(TargetField f) const {
        for (const auto& r : field_rules) {
            if (r.target_field == f) return &r;
        }
        return nullptr;
    }

    /// Structural checks; each problem names the offending piece.
    std::vector<std::string> validate() const {
        std::vector<std::string> problems;
        if (card_pattern.unconstrained()) {
            problems.push_back("extraction.card_pattern: at least one constraint required");
        }
        std::map<TargetField, int> counts;
        for (const auto& r : field_rules) {
            counts[r.target_field]++;
            if (r.within && r.within->unconstrained()) {
                problems.push_back(std::string("extraction.field_rules.") +
                                   to_string(r.target_field) +
                                   ".within: at least one constraint required");
            }
            if (r.source.kind == FieldSource::Kind::attribute && r.source.attribute.empty()) {
                problems.push_back(std::string("extraction.field_rules.") +
                                   to_string(r.target_field) + ".source: attribute name empty");
            }
        }
        for (const auto& [field, n] : counts) {
            if (n > 1) {
                problems.push_back(std::string("extraction.field_rules.") + to_string(field) +
                                   ": appears " + std::to_string(n) + " times");
            }
        }
        if (!counts.count(TargetField::href)) {
            problems.push_back("extraction.field_rules.href: missing (record identity needs it)");
        }
        if (href_parse.roles.empty() ||
            href_parse.roles.back() != SegmentRole::product_id) {
            problems.push_back("extraction.href_parse: product_id must be the final segment");
        }
        return problems;
    }
};

// --- href parsing -------------------------------------------------------

struct HrefFields {
    std::string department_slug;
    std::string product;
    std::string model;
    std::string product_id;
};

enum class HrefStatus {
    ok,        // every role bound
    salvaged,  // too few segments, but a usable product_id was recovered
    failed,    // no usable product_id
};

struct HrefParseResult {
    HrefStatus status = HrefStatus::failed;
    HrefFields fields;
};

namespace extract_detail {

inline bool plausible_product_id(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

inline std::vector<std::string> path_segments(std::string_view href) {
    // Path only; query and fragment never carry identity here.
    size_t cut = href.find_first_of("?#");
    if (cut != std::string_view::npos) href = href.substr(0, cut);
    std::vector<std::string> segments;
    size_t i = 0;
    while (i <= href.size()) {
        size_t next = href.find('/', i);
        if (next == std::string_view::npos) next = href.size();
        if (next > i) segments.push_back(percent_decode(href.substr(i, next - i)));
        i = next + 1;
    }
    return segments;
}

}  // namespace extract_detail

/// Binds the schema's roles to the final path segments. With too few
/// segments the final one is salvaged as product_id when it looks like one.
inline HrefParseResult parse_href(std::string_view href, const HrefSchema& schema) {
    HrefParseResult result;
    auto segments = extract_detail::path_segments(href);
    const size_t want = schema.roles.size();
    if (segments.size() >= want && want > 0) {
        size_t base = segments.size() - want;
        for (size_t k = 0; k < want; ++k) {
            const std::string& value = segments[base + k];
            switch (schema.roles[k]) {
                case SegmentRole::department: result.fields.department_slug = value; break;
                case SegmentRole::product: result.fields.product = value; break;
                case SegmentRole::model: result.fields.model = value; break;
                case SegmentRole::product_id: result.fields.product_id = value; break;
            }
        }
        if (extract_detail::plausible_product_id(result.fields.product_id)) {
            result.status = HrefStatus::ok;
            return result;
        }
        result.fields = {};
    }
    if (!segments.empty() && extract_detail::plausible_product_id(segments.back())) {
        result.status = HrefStatus::salvaged;
        result.fields.product_id = segments.back();
        return result;
    }
    result.status = HrefStatus::failed;
    return result;
}

// --- price parsing ------------------------------------------------------

namespace extract_detail {

struct CurrencyMark {
    std::string_view symbol;
    const char* code;
};

inline const std::vector<CurrencyMark>& currency_symbols() {
    static const std::vector<CurrencyMark> table = {
        {"€", "EUR"},  // €
        {"$", "USD"},
        {"£", "GBP"},  // £
    };
    return table;
}

inline const std::vector<std::string_view>& currency_codes() {
    static const std::vector<std::string_view> table = {"EUR", "USD", "GBP"};
    return table;
}

}  // namespace extract_detail

/// Parses price text into minor units. Grammar: an optional currency symbol
/// or ISO code before or after the number; digit groups split by space,
/// NBSP, '.' or ','; an optional 1–2 digit decimal part after '.' or ','.
/// Total — anything that does not fit yields absent, meaning "no price".
inline std::optional<Money> parse_price(std::string_view raw,
                                        std::string_view default_currency = "EUR") {
    if (raw.empty()) return std::nullopt;

    std::string currency;
    for (const auto& mark : extract_detail::currency_symbols()) {
        if (raw.find(mark.symbol) != std::string_view::npos) {
            currency = mark.code;
            break;
        }
    }
    if (currency.empty()) {
        for (const auto& code : extract_detail::currency_codes()) {
            if (raw.find(code) != std::string_view::npos) {
                currency = code;
                break;
            }
        }
    }

    // Collect the first run of digits and group/decimal separators.
    struct Group {
        std::string digits;
        char32_t sep_before = 0;  // separator between previous group and this
    };
    std::vector<Group> groups;
    size_t i = 0;
    bool in_number = false;
    char32_t pending_sep = 0;
    bool ended = false;
    while (i < raw.size() && !ended) {
        char32_t cp = text::next_codepoint(raw, i);
        bool digit = cp >= '0' && cp <= '9';
        bool sep = cp == ' ' || cp == 0xA0 || cp == 0x202F || cp == '.' || cp == ',';
        if (digit) {
            if (!in_number) {
                groups.push_back({});
                groups.back().sep_before = pending_sep;
                in_number = true;
            }
            groups.back().digits.push_back(static_cast<char>(cp));
        } else if (sep && in_number) {
            in_number = false;
            pending_sep = cp;
        } else if (!groups.empty()) {
            // Number ended. A space between groups may precede a trailing
            // currency mark; any other character ends the scan.
            if (cp == ' ' || cp == 0xA0) continue;
            ended = true;
        }
    }
    if (groups.empty()) return std::nullopt;

    // Decide whether the final group is a decimal part.
    bool has_decimal = false;
    if (groups.size() >= 2) {
        const Group& last = groups.back();
        if ((last.sep_before == '.' || last.sep_before == ',') && last.digits.size() <= 2) {
            has_decimal = true;
        }
    }
    size_t integer_groups = groups.size() - (has_decimal ? 1 : 0);
    // Integer part: groups after the first must be 3-digit thousands groups.
    std::string integer_digits = groups[0].digits;
    for (size_t g = 1; g < integer_groups; ++g) {
        if (groups[g].digits.size() != 3) return std::nullopt;
        integer_digits += groups[g].digits;
    }
    if (integer_digits.empty() || integer_digits.size() > 15) return std::nullopt;

    int64_t units = 0;
    for (char c : integer_digits) units = units * 10 + (c - '0');
    int64_t minor = units * 100;
    if (has_decimal) {
        const std::string& frac = groups.back().digits;
        int64_t cents = (frac[0] - '0') * 10;
        if (frac.size() == 2) cents += frac[1] - '0';
        minor += cents;
    }

    if (currency.empty()) currency = std::string(default_currency);
    return Money{minor, currency};
}

// --- record extraction --------------------------------------------------

struct ExtractStats {
    int cards_seen = 0;
    int cards_dropped = 0;   // required field missing / unusable href
    int field_misses = 0;    // optional field rules that found nothing
    int href_salvages = 0;   // href shape mismatches recovered by salvage
    std::map<std::string, int> misses_by_field;
};

struct ExtractResult {
    std::vector<ProductRecord> records;
    ExtractStats stats;
};

/// Applies a rule set to a parsed page. One record per card-pattern match,
/// in document order. A card missing a required field is dropped and
/// counted; page-level failures do not exist — this is total.
inline ExtractResult extract_records(const html::Document& tree, const ExtractionRuleSet& rules,
                                     const Url& page_url, const DepartmentEntry& department,
                                     Clock& clock) {
    ExtractResult out;
    const UtcTime now = clock.now_utc();

    for (const html::Node* card : html::select_nodes(tree, rules.card_pattern)) {
        out.stats.cards_seen++;

        // Evaluate every rule: first matching node in document order wins.
        std::map<TargetField, std::string> values;
        bool dropped = false;
        for (const auto& rule : rules.field_rules) {
            const html::Node* node = card;
            if (rule.within) {
                auto scoped = html::select_nodes(*card, *rule.within);
                node = scoped.empty() ? nullptr : scoped.front();
            }
            std::optional<std::string> value;
            if (node) {
                if (rule.source.kind == FieldSource::Kind::text_content) {
                    value = html::text_of(*node);
                } else if (const std::string* attr = node->attribute(rule.source.attribute)) {
                    value = *attr;
                }
            }
            if (value && !value->empty()) {
                values[rule.target_field] = std::move(*value);
            } else if (rule.required) {
                dropped = true;
                break;
            } else {
                out.stats.field_misses++;
                out.stats.misses_by_field[to_string(rule.target_field)]++;
            }
        }
        if (dropped || !values.count(TargetField::href)) {
            out.stats.cards_dropped++;
            continue;
        }

        const std::string& href = values[TargetField::href];
        Url resolved;
        try {
            resolved = resolve_url(page_url, href);
        } catch (const UnresolvableHrefError&) {
            out.stats.cards_dropped++;
            continue;
        }
        HrefParseResult parsed = parse_href(resolved.path, rules.href_parse);
        if (parsed.status == HrefStatus::salvaged) out.stats.href_salvages++;

        ProductRecord rec;
        if (values.count(TargetField::product_id)) {
            rec.product_id = values[TargetField::product_id];
        } else {
            rec.product_id = parsed.fields.product_id;
        }
        if (rec.product_id.empty()) {
            out.stats.cards_dropped++;
            continue;
        }
        rec.url = resolved.to_string();
        rec.name = values.count(TargetField::name) ? values[TargetField::name] : std::string();
        if (values.count(TargetField::model)) {
            rec.model = values[TargetField::model];
        } else if (!parsed.fields.model.empty()) {
            rec.model = parsed.fields.model;
        }
        if (values.count(TargetField::department)) {
            rec.department_slug = values[TargetField::department];
        } else if (!parsed.fields.department_slug.empty()) {
            rec.department_slug = parsed.fields.department_slug;
        } else {
            rec.department_slug = department.slug;
        }
        if (values.count(TargetField::image_url)) {
            try {
                rec.image_url = resolve_url(page_url, values[TargetField::image_url]).to_string();
            } catch (const UnresolvableHrefError&) {
                out.stats.field_misses++;
                out.stats.misses_by_field["image_url"]++;
            }
        }
        if (values.count(TargetField::price_text)) {
            rec.price = parse_price(values[TargetField::price_text]);
        }
        if (values.count(TargetField::posted_text)) {
            rec.posted_text = text::collapse_ws(values[TargetField::posted_text]);
        }
        rec.source_page = page_url.to_string();
        rec.scraped_at = now;
        out.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace shelfwatch
