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
#include <array>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shelfwatch/text.hpp"

// Error-recovering HTML parser producing an immutable element tree, plus the
// node-pattern matching used to pull fields out of listing pages.
//
// The parser is total: any byte sequence yields a tree. Recovery follows the
// common HTML5 behaviours that real listing markup depends on — void
// elements, raw-text script/style, implicit closing of p/li/td/tr/option,
// an <a> start tag closing an open <a>, unclosed tags closed at EOF. Tag and
// attribute names are lowercased; entities are decoded in text and attribute
// values.

namespace shelfwatch::html {

struct Attribute {
    std::string name;   // lowercased
    std::string value;  // entity-decoded, verbatim otherwise
};

class Node {
public:
    enum class Type { document, element, text, comment };

    Type type = Type::document;
    std::string tag;  // elements only, lowercased
    std::vector<Attribute> attributes;
    std::string text;  // text and comment nodes
    std::vector<std::unique_ptr<Node>> children;
    const Node* parent = nullptr;

    const std::string* attribute(std::string_view name) const {
        for (const auto& a : attributes) {
            if (a.name == name) return &a.value;
        }
        return nullptr;
    }

    /// Token-wise class test: the class attribute is split on whitespace and
    /// the token must equal one of the pieces exactly.
    bool has_class_token(std::string_view token) const {
        const std::string* cls = attribute("class");
        if (!cls) return false;
        size_t i = 0;
        while (i < cls->size()) {
            while (i < cls->size() && text::is_ascii_space((*cls)[i])) ++i;
            size_t start = i;
            while (i < cls->size() && !text::is_ascii_space((*cls)[i])) ++i;
            if (i > start && std::string_view(*cls).substr(start, i - start) == token) return true;
        }
        return false;
    }
};

class Document {
public:
    Document() : root_(std::make_unique<Node>()) {}
    const Node& root() const { return *root_; }
    Node& mutable_root() { return *root_; }
    const std::string& encoding() const { return encoding_; }
    void set_encoding(std::string e) { encoding_ = std::move(e); }

private:
    std::unique_ptr<Node> root_;
    std::string encoding_ = "utf-8";
};

namespace detail {

// --- entities ---------------------------------------------------------

inline const std::map<std::string_view, char32_t>& named_entities() {
    static const std::map<std::string_view, char32_t> table = {
        {"AElig", 0xC6},    {"Aacute", 0xC1},  {"Acirc", 0xC2},   {"Agrave", 0xC0},
        {"Aring", 0xC5},    {"Atilde", 0xC3},  {"Auml", 0xC4},    {"Ccedil", 0xC7},
        {"Dagger", 0x2021}, {"Eacute", 0xC9},  {"Ecirc", 0xCA},   {"Egrave", 0xC8},
        {"Euml", 0xCB},     {"Iacute", 0xCD},  {"Icirc", 0xCE},   {"Igrave", 0xCC},
        {"Iuml", 0xCF},     {"Ntilde", 0xD1},  {"Oacute", 0xD3},  {"Ocirc", 0xD4},
        {"Ograve", 0xD2},   {"Oslash", 0xD8},  {"Otilde", 0xD5},  {"Ouml", 0xD6},
        {"Scaron", 0x160},  {"Uacute", 0xDA},  {"Ucirc", 0xDB},   {"Ugrave", 0xD9},
        {"Uuml", 0xDC},     {"Yacute", 0xDD},  {"Zcaron", 0x17D}, {"aacute", 0xE1},
        {"acirc", 0xE2},    {"aelig", 0xE6},   {"agrave", 0xE0},  {"amp", '&'},
        {"apos", '\''},     {"aring", 0xE5},   {"atilde", 0xE3},  {"auml", 0xE4},
        {"bdquo", 0x201E},  {"bull", 0x2022},  {"ccedil", 0xE7},  {"cent", 0xA2},
        {"copy", 0xA9},     {"curren", 0xA4},  {"dagger", 0x2020}, {"deg", 0xB0},
        {"divide", 0xF7},   {"eacute", 0xE9},  {"ecirc", 0xEA},   {"egrave", 0xE8},
        {"ensp", 0x2002},   {"emsp", 0x2003},  {"euml", 0xEB},    {"euro", 0x20AC},
        {"frac12", 0xBD},   {"frac14", 0xBC},  {"frac34", 0xBE},  {"gt", '>'},
        {"hellip", 0x2026}, {"iacute", 0xED},  {"icirc", 0xEE},   {"iexcl", 0xA1},
        {"igrave", 0xEC},   {"iquest", 0xBF},  {"iuml", 0xEF},    {"laquo", 0xAB},
        {"ldquo", 0x201C},  {"lsaquo", 0x2039}, {"lsquo", 0x2018}, {"lt", '<'},
        {"mdash", 0x2014},  {"middot", 0xB7},  {"minus", 0x2212}, {"nbsp", 0xA0},
        {"ndash", 0x2013},  {"ntilde", 0xF1},  {"oacute", 0xF3},  {"ocirc", 0xF4},
        {"ograve", 0xF2},   {"oslash", 0xF8},  {"otilde", 0xF5},  {"ouml", 0xF6},
        {"para", 0xB6},     {"permil", 0x2030}, {"plusmn", 0xB1},  {"pound", 0xA3},
        {"quot", '"'},      {"raquo", 0xBB},   {"rdquo", 0x201D}, {"reg", 0xAE},
        {"rsaquo", 0x203A}, {"rsquo", 0x2019}, {"sbquo", 0x201A}, {"scaron", 0x161},
        {"sect", 0xA7},     {"shy", 0xAD},     {"sup1", 0xB9},    {"sup2", 0xB2},
        {"sup3", 0xB3},     {"szlig", 0xDF},   {"thinsp", 0x2009}, {"times", 0xD7},
        {"trade", 0x2122},  {"uacute", 0xFA},  {"ucirc", 0xFB},   {"ugrave", 0xF9},
        {"uuml", 0xFC},     {"yacute", 0xFD},  {"yen", 0xA5},     {"yuml", 0xFF},
        {"zcaron", 0x17E},
    };
    return table;
}

// Legacy names that browsers accept without a trailing semicolon.
inline bool legacy_entity(std::string_view name, char32_t& cp) {
    static const std::map<std::string_view, char32_t> table = {
        {"amp", '&'},  {"lt", '<'},    {"gt", '>'},   {"quot", '"'},
        {"nbsp", 0xA0}, {"copy", 0xA9}, {"reg", 0xAE}, {"pound", 0xA3},
    };
    auto it = table.find(name);
    if (it == table.end()) return false;
    cp = it->second;
    return true;
}

// HTML5 maps numeric references in the C1 range through windows-1252.
inline char32_t remap_c1(char32_t cp) {
    static constexpr std::array<char32_t, 32> table = {
        0x20AC, 0x81,   0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
        0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0x8D,   0x017D, 0x8F,
        0x90,   0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
        0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x9D,   0x017E, 0x0178,
    };
    if (cp >= 0x80 && cp <= 0x9F) return table[cp - 0x80];
    return cp;
}

inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        size_t j = i + 1;
        char32_t cp = 0;
        bool ok = false;
        if (j < s.size() && s[j] == '#') {
            ++j;
            bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
            if (hex) ++j;
            size_t digits_start = j;
            char32_t v = 0;
            while (j < s.size()) {
                char c = s[j];
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else break;
                if (v < 0x110000) v = v * (hex ? 16 : 10) + static_cast<char32_t>(d);
                ++j;
            }
            if (j > digits_start) {
                if (j < s.size() && s[j] == ';') ++j;
                cp = remap_c1(v);
                if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
                    cp = text::kReplacementChar;
                }
                ok = true;
            }
        } else {
            size_t name_start = j;
            while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
            std::string_view name = s.substr(name_start, j - name_start);
            if (!name.empty()) {
                if (j < s.size() && s[j] == ';') {
                    auto it = named_entities().find(name);
                    if (it != named_entities().end()) {
                        cp = it->second;
                        ++j;
                        ok = true;
                    }
                } else if (legacy_entity(name, cp)) {
                    ok = true;
                }
            }
        }
        if (ok) {
            text::append_utf8(out, cp);
            i = j;
        } else {
            out.push_back(s[i++]);
        }
    }
    return out;
}

// --- encodings --------------------------------------------------------

inline std::string normalize_encoding_name(std::string_view name) {
    std::string n;
    for (char c : name) {
        if (c == '-' || c == '_' || text::is_ascii_space(c)) continue;
        n.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c + 0x20) : c);
    }
    return n;
}

/// Replaces malformed UTF-8 sequences with U+FFFD.
inline std::string sanitize_utf8(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        size_t start = i;
        char32_t cp = text::next_codepoint(s, i);
        if (cp == text::kReplacementChar && s.substr(start, i - start) != "\xEF\xBF\xBD") {
            text::append_utf8(out, text::kReplacementChar);
        } else {
            out.append(s.substr(start, i - start));
        }
    }
    return out;
}

inline std::string from_windows1252(std::string_view s) {
    // 0x80..0x9F differ from Latin-1; the rest map straight to codepoints.
    static constexpr std::array<char32_t, 32> high = {
        0x20AC, 0x81,   0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
        0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0x8D,   0x017D, 0x8F,
        0x90,   0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
        0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x9D,   0x017E, 0x0178,
    };
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (c < 0x80) out.push_back(static_cast<char>(c));
        else if (c <= 0x9F) text::append_utf8(out, high[c - 0x80]);
        else text::append_utf8(out, c);
    }
    return out;
}

inline std::string from_utf16(std::string_view s, bool little_endian) {
    std::string out;
    for (size_t i = 0; i + 1 < s.size(); i += 2) {
        unsigned char a = s[i], b = s[i + 1];
        char32_t unit = little_endian ? (b << 8 | a) : (a << 8 | b);
        if (unit >= 0xD800 && unit <= 0xDBFF && i + 3 < s.size()) {
            unsigned char c = s[i + 2], d = s[i + 3];
            char32_t low = little_endian ? (d << 8 | c) : (c << 8 | d);
            if (low >= 0xDC00 && low <= 0xDFFF) {
                text::append_utf8(out, 0x10000 + ((unit - 0xD800) << 10) + (low - 0xDC00));
                i += 2;
                continue;
            }
        }
        if (unit >= 0xD800 && unit <= 0xDFFF) unit = text::kReplacementChar;
        text::append_utf8(out, unit);
    }
    return out;
}

/// Scans the first KiB for <meta charset=...> or http-equiv content-type.
inline std::optional<std::string> sniff_meta_charset(std::string_view body) {
    std::string head = text::to_lower_utf8(body.substr(0, std::min<size_t>(body.size(), 2048)));
    size_t pos = head.find("charset");
    while (pos != std::string::npos) {
        size_t i = pos + 7;
        while (i < head.size() && (text::is_ascii_space(head[i]))) ++i;
        if (i < head.size() && head[i] == '=') {
            ++i;
            while (i < head.size() && text::is_ascii_space(head[i])) ++i;
            char quote = 0;
            if (i < head.size() && (head[i] == '"' || head[i] == '\'')) quote = head[i++];
            size_t start = i;
            while (i < head.size()) {
                char c = head[i];
                if (quote ? c == quote
                          : (text::is_ascii_space(c) || c == '"' || c == '\'' || c == ';' ||
                             c == '>' || c == '/')) {
                    break;
                }
                ++i;
            }
            if (i > start) return std::string(head.substr(start, i - start));
        }
        pos = head.find("charset", pos + 7);
    }
    return std::nullopt;
}

inline std::string to_utf8(std::string_view body, const std::optional<std::string>& declared) {
    // BOM wins over everything.
    if (body.size() >= 3 && body.substr(0, 3) == "\xEF\xBB\xBF") {
        return sanitize_utf8(body.substr(3));
    }
    if (body.size() >= 2 && static_cast<unsigned char>(body[0]) == 0xFF &&
        static_cast<unsigned char>(body[1]) == 0xFE) {
        return from_utf16(body.substr(2), true);
    }
    if (body.size() >= 2 && static_cast<unsigned char>(body[0]) == 0xFE &&
        static_cast<unsigned char>(body[1]) == 0xFF) {
        return from_utf16(body.substr(2), false);
    }
    std::string enc;
    if (declared && !declared->empty()) {
        enc = normalize_encoding_name(*declared);
    } else if (auto sniffed = sniff_meta_charset(body)) {
        enc = normalize_encoding_name(*sniffed);
    }
    if (enc == "iso88591" || enc == "latin1" || enc == "windows1252" || enc == "cp1252") {
        return from_windows1252(body);
    }
    // utf-8, us-ascii, unknown names: decode as UTF-8 with replacement.
    return sanitize_utf8(body);
}

// --- tree construction ------------------------------------------------

inline bool is_void_element(std::string_view tag) {
    static constexpr std::string_view kVoid[] = {
        "area", "base", "br", "col", "embed", "hr", "img", "input",
        "link", "meta", "param", "source", "track", "wbr",
    };
    return std::find(std::begin(kVoid), std::end(kVoid), tag) != std::end(kVoid);
}

inline bool is_raw_text_element(std::string_view tag) {
    return tag == "script" || tag == "style";
}

inline bool closes_p(std::string_view tag) {
    static constexpr std::string_view kBlocks[] = {
        "address", "article", "aside", "blockquote", "details", "div", "dl",
        "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
        "h4", "h5", "h6", "header", "hr", "main", "menu", "nav", "ol", "p",
        "pre", "section", "table", "ul",
    };
    return std::find(std::begin(kBlocks), std::end(kBlocks), tag) != std::end(kBlocks);
}

struct TreeBuilder {
    Document doc;
    std::vector<Node*> open;

    TreeBuilder() { open.push_back(&doc.mutable_root()); }

    Node* top() { return open.back(); }

    void add_text(std::string value) {
        if (value.empty()) return;
        auto n = std::make_unique<Node>();
        n->type = Node::Type::text;
        n->text = std::move(value);
        n->parent = top();
        top()->children.push_back(std::move(n));
    }

    void add_comment(std::string value) {
        auto n = std::make_unique<Node>();
        n->type = Node::Type::comment;
        n->text = std::move(value);
        n->parent = top();
        top()->children.push_back(std::move(n));
    }

    bool has_open(std::string_view tag) const {
        for (size_t i = open.size(); i-- > 1;) {
            if (open[i]->tag == tag) return true;
        }
        return false;
    }

    void close_through(std::string_view tag) {
        while (open.size() > 1) {
            bool match = open.back()->tag == tag;
            open.pop_back();
            if (match) break;
        }
    }

    void start_tag(std::string tag, std::vector<Attribute> attrs, bool self_closing) {
        // Recovery: the common implicit-close rules listing markup needs.
        if (tag == "a" && has_open("a")) close_through("a");
        if (closes_p(tag) && has_open("p")) close_through("p");
        if ((tag == "li" || tag == "dt" || tag == "dd" || tag == "tr" || tag == "td" ||
             tag == "th" || tag == "option") &&
            top()->tag == tag) {
            open.pop_back();
        }
        if ((tag == "td" || tag == "th") && (top()->tag == "td" || top()->tag == "th")) {
            open.pop_back();
        }

        auto n = std::make_unique<Node>();
        n->type = Node::Type::element;
        n->tag = std::move(tag);
        n->attributes = std::move(attrs);
        n->parent = top();
        Node* raw = n.get();
        top()->children.push_back(std::move(n));
        if (!self_closing && !is_void_element(raw->tag)) {
            open.push_back(raw);
        }
    }

    void end_tag(std::string_view tag) {
        if (has_open(tag)) close_through(tag);
        // Unmatched end tags are ignored.
    }
};

}  // namespace detail

/// Parses HTML bytes into a tree. Total: malformed markup yields a
/// best-effort tree, never an error. Encoding resolution order: BOM,
/// the transport-declared encoding, a meta-charset sniff, UTF-8 with
/// replacement characters.
inline Document parse_html(std::string_view body,
                           const std::optional<std::string>& declared_encoding = std::nullopt) {
    std::string src = detail::to_utf8(body, declared_encoding);
    detail::TreeBuilder builder;
    if (declared_encoding && !declared_encoding->empty()) {
        builder.doc.set_encoding(detail::normalize_encoding_name(*declared_encoding));
    } else if (auto sniffed = detail::sniff_meta_charset(body)) {
        builder.doc.set_encoding(detail::normalize_encoding_name(*sniffed));
    }

    const std::string_view s = src;
    size_t i = 0;
    std::string pending_text;
    auto flush_text = [&] {
        builder.add_text(detail::decode_entities(pending_text));
        pending_text.clear();
    };

    while (i < s.size()) {
        if (s[i] != '<') {
            size_t next = s.find('<', i);
            if (next == std::string_view::npos) next = s.size();
            pending_text.append(s.substr(i, next - i));
            i = next;
            continue;
        }
        // '<' — decide between tag, end tag, comment, declaration, junk.
        if (i + 1 >= s.size()) {
            pending_text.push_back('<');
            break;
        }
        char c = s[i + 1];
        if (std::isalpha(static_cast<unsigned char>(c))) {
            flush_text();
            // start tag
            size_t j = i + 1;
            size_t name_start = j;
            while (j < s.size() && !text::is_ascii_space(s[j]) && s[j] != '>' && s[j] != '/') ++j;
            std::string tag = text::to_lower_utf8(s.substr(name_start, j - name_start));
            std::vector<Attribute> attrs;
            bool self_closing = false;
            while (j < s.size() && s[j] != '>') {
                while (j < s.size() && text::is_ascii_space(s[j])) ++j;
                if (j < s.size() && s[j] == '/') {
                    ++j;
                    if (j < s.size() && s[j] == '>') self_closing = true;
                    continue;
                }
                if (j >= s.size() || s[j] == '>') break;
                size_t an = j;
                while (j < s.size() && !text::is_ascii_space(s[j]) && s[j] != '=' && s[j] != '>' &&
                       s[j] != '/') {
                    ++j;
                }
                std::string name = text::to_lower_utf8(s.substr(an, j - an));
                std::string value;
                while (j < s.size() && text::is_ascii_space(s[j])) ++j;
                if (j < s.size() && s[j] == '=') {
                    ++j;
                    while (j < s.size() && text::is_ascii_space(s[j])) ++j;
                    if (j < s.size() && (s[j] == '"' || s[j] == '\'')) {
                        char quote = s[j++];
                        size_t vs = j;
                        while (j < s.size() && s[j] != quote) ++j;
                        value = detail::decode_entities(s.substr(vs, j - vs));
                        if (j < s.size()) ++j;
                    } else {
                        size_t vs = j;
                        while (j < s.size() && !text::is_ascii_space(s[j]) && s[j] != '>') ++j;
                        value = detail::decode_entities(s.substr(vs, j - vs));
                    }
                }
                if (!name.empty()) attrs.push_back({std::move(name), std::move(value)});
            }
            if (j < s.size()) ++j;  // consume '>'
            bool raw = detail::is_raw_text_element(tag);
            builder.start_tag(tag, std::move(attrs), self_closing);
            i = j;
            if (raw && !self_closing) {
                // Swallow everything up to the matching close tag, verbatim.
                std::string close = "</" + tag;
                size_t k = i;
                size_t found = std::string_view::npos;
                while (k < s.size()) {
                    size_t cand = s.find('<', k);
                    if (cand == std::string_view::npos) break;
                    if (text::starts_with_ci(s.substr(cand), close)) {
                        found = cand;
                        break;
                    }
                    k = cand + 1;
                }
                size_t content_end = found == std::string_view::npos ? s.size() : found;
                builder.add_text(std::string(s.substr(i, content_end - i)));
                if (found == std::string_view::npos) {
                    i = s.size();
                } else {
                    i = s.find('>', found);
                    i = i == std::string_view::npos ? s.size() : i + 1;
                }
                builder.end_tag(tag);
            }
            continue;
        }
        if (c == '/') {
            flush_text();
            size_t j = i + 2;
            size_t name_start = j;
            while (j < s.size() && !text::is_ascii_space(s[j]) && s[j] != '>') ++j;
            std::string tag = text::to_lower_utf8(s.substr(name_start, j - name_start));
            size_t gt = s.find('>', j);
            i = gt == std::string_view::npos ? s.size() : gt + 1;
            if (!tag.empty()) builder.end_tag(tag);
            continue;
        }
        if (c == '!') {
            flush_text();
            if (s.substr(i + 2, 2) == "--") {
                size_t end = s.find("-->", i + 4);
                std::string comment(s.substr(i + 4, end == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : end - (i + 4)));
                builder.add_comment(std::move(comment));
                i = end == std::string_view::npos ? s.size() : end + 3;
            } else {
                // Doctype, CDATA and other declarations are dropped.
                size_t end = s.find('>', i + 2);
                i = end == std::string_view::npos ? s.size() : end + 1;
            }
            continue;
        }
        if (c == '?') {
            flush_text();
            size_t end = s.find('>', i + 2);
            i = end == std::string_view::npos ? s.size() : end + 1;
            continue;
        }
        // Stray '<' — literal text.
        pending_text.push_back('<');
        ++i;
    }
    flush_text();
    return std::move(builder.doc);
}

/// One declarative constraint set over a node. At least one field must be
/// set for the pattern to be usable; an unconstrained pattern matches
/// nothing.
struct NodePattern {
    std::optional<std::string> tag;
    std::vector<std::string> class_contains;
    std::vector<std::pair<std::string, std::string>> attr_equals;
    std::vector<std::string> attr_present;

    bool unconstrained() const {
        return !tag && class_contains.empty() && attr_equals.empty() && attr_present.empty();
    }

    bool matches(const Node& n) const {
        if (n.type != Node::Type::element) return false;
        if (unconstrained()) return false;
        if (tag && n.tag != *tag) return false;
        for (const auto& token : class_contains) {
            if (!n.has_class_token(token)) return false;
        }
        for (const auto& [name, value] : attr_equals) {
            const std::string* v = n.attribute(name);
            if (!v || *v != value) return false;
        }
        for (const auto& name : attr_present) {
            if (!n.attribute(name)) return false;
        }
        return true;
    }
};

namespace detail {
inline void select_into(const Node& scope, const NodePattern& p,
                        std::vector<const Node*>& out) {
    for (const auto& child : scope.children) {
        if (p.matches(*child)) out.push_back(child.get());
        select_into(*child, p, out);  // nested matches are all reported
    }
}
}  // namespace detail

/// All descendants of `scope` (scope itself excluded) matching the pattern,
/// in document order.
inline std::vector<const Node*> select_nodes(const Node& scope, const NodePattern& pattern) {
    std::vector<const Node*> out;
    detail::select_into(scope, pattern, out);
    return out;
}

inline std::vector<const Node*> select_nodes(const Document& doc, const NodePattern& pattern) {
    return select_nodes(doc.root(), pattern);
}

namespace detail {
inline void collect_text(const Node& n, std::string& out) {
    if (n.type == Node::Type::text) {
        out += n.text;
        return;
    }
    if (n.type == Node::Type::comment) return;
    for (const auto& child : n.children) collect_text(*child, out);
}
}  // namespace detail

/// Concatenated descendant text with entities already decoded, ASCII
/// whitespace runs collapsed to single spaces, trimmed. No separator is
/// injected between inline elements.
inline std::string text_of(const Node& n) {
    std::string raw;
    detail::collect_text(n, raw);
    return text::collapse_ws(raw);
}

}  // namespace shelfwatch::html
