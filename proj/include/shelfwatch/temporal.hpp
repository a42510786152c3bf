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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shelfwatch/text.hpp"
#include "shelfwatch/time.hpp"

// Resolving locale-relative post-time strings ("tänään 17:39") against a
// reference "now", converting between the site's wall clock and the
// operator's, and deciding whether a post is recent enough to alert on.
//
// Zone handling is deliberately two signed UTC offsets supplied by the
// operator; there is no tz database and DST shifts are the operator's call.

namespace shelfwatch {

/// Token tables for one site locale. Matching is case-insensitive after
/// lowercasing; time-of-day accepts H:MM / HH:MM / HH.MM, 24-hour.
struct LocaleTable {
    std::vector<std::string> today_tokens;
    std::vector<std::string> yesterday_tokens;
    /// Month names for the explicit "D Month [HH:MM]" form, January first.
    /// Empty disables that form. Matched by prefix, so inflected forms work.
    std::vector<std::string> month_names;
};

/// Finnish defaults. The site the journal-style listing format comes from
/// spells "today" tänään; the misspelling täänän is accepted as well since
/// it appears in the wild.
inline LocaleTable finnish_locale() {
    return LocaleTable{
        {"tänään", "täänän"},
        {"eilen"},
        {"tammikuu", "helmikuu", "maaliskuu", "huhtikuu", "toukokuu", "kesäkuu", "heinäkuu",
         "elokuu", "syyskuu", "lokakuu", "marraskuu", "joulukuu"},
    };
}

/// The site's and the operator's UTC offsets, minutes east of UTC.
struct SiteClock {
    int site_utc_offset_min = 0;
    int local_utc_offset_min = 0;

    bool valid() const {
        return site_utc_offset_min >= -14 * 60 && site_utc_offset_min <= 14 * 60 &&
               local_utc_offset_min >= -14 * 60 && local_utc_offset_min <= 14 * 60;
    }
};

struct RecencyWindow {
    int64_t duration_min = 0;
};

namespace temporal_detail {

inline bool token_in(const std::vector<std::string>& table, std::string_view token) {
    std::string lowered = text::to_lower_utf8(token);
    for (const auto& t : table) {
        if (text::to_lower_utf8(t) == lowered) return true;
    }
    return false;
}

/// "17:39", "8.05" — hours 0..23, minutes 00..59, ':' or '.' separator.
inline std::optional<int> parse_time_of_day_min(std::string_view s) {
    size_t sep = s.find_first_of(":.");
    if (sep == std::string_view::npos || sep == 0 || sep > 2) return std::nullopt;
    if (s.size() - sep - 1 != 2) return std::nullopt;
    int h = 0, m = 0;
    for (size_t i = 0; i < sep; ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        h = h * 10 + (s[i] - '0');
    }
    for (size_t i = sep + 1; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        m = m * 10 + (s[i] - '0');
    }
    if (h > 23 || m > 59) return std::nullopt;
    return h * 60 + m;
}

inline std::optional<int> parse_day_number(std::string_view s) {
    if (s.empty() || s.size() > 2) return std::nullopt;
    int d = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        d = d * 10 + (c - '0');
    }
    if (d < 1 || d > 31) return std::nullopt;
    return d;
}

/// Month-name match by shared prefix of at least 3 characters, so "kesä",
/// "kesäkuu" and "kesäkuuta" all hit month 6.
inline std::optional<int> match_month(const std::vector<std::string>& names,
                                      std::string_view token) {
    std::string lowered = text::to_lower_utf8(token);
    for (size_t m = 0; m < names.size(); ++m) {
        std::string name = text::to_lower_utf8(names[m]);
        const std::string& shorter = lowered.size() < name.size() ? lowered : name;
        const std::string& longer = lowered.size() < name.size() ? name : lowered;
        if (shorter.size() >= 3 && longer.compare(0, shorter.size(), shorter) == 0) {
            return static_cast<int>(m) + 1;
        }
    }
    return std::nullopt;
}

/// "31.12.2020", "1.6.2021"
inline std::optional<CivilDateTime> parse_numeric_date(std::string_view s) {
    int parts[3] = {0, 0, 0};
    int lens[3] = {0, 0, 0};
    int idx = 0;
    for (char c : s) {
        if (c >= '0' && c <= '9') {
            parts[idx] = parts[idx] * 10 + (c - '0');
            if (++lens[idx] > 4) return std::nullopt;
        } else if (c == '.') {
            if (lens[idx] == 0 || idx == 2) return std::nullopt;
            ++idx;
        } else {
            return std::nullopt;
        }
    }
    if (idx != 2 || lens[2] != 4) return std::nullopt;
    CivilDateTime c{parts[2], parts[1], parts[0], 0, 0, 0};
    if (!civil_valid(c)) return std::nullopt;
    return c;
}

}  // namespace temporal_detail

/// Resolves a post-time string against "now" expressed in site-local time.
/// Recognized forms: "<today> HH:MM", "<yesterday> HH:MM",
/// "D Month [HH:MM]" (latest occurrence not after the reference date) and
/// "DD.MM.YYYY [HH:MM]". Anything else is absent — never an error.
inline std::optional<WallTime> parse_post_time(std::string_view raw, const LocaleTable& locale,
                                               WallTime reference_now_site) {
    // NBSP behaves like a space in post-time strings.
    std::string cleaned;
    size_t i = 0;
    while (i < raw.size()) {
        char32_t cp = text::next_codepoint(raw, i);
        if (cp == 0xA0) cp = ' ';
        text::append_utf8(cleaned, cp);
    }
    std::vector<std::string> tokens = text::split_ws(cleaned);
    if (tokens.empty()) return std::nullopt;

    const CivilDateTime ref = civil_from_wall(reference_now_site);

    auto at_time = [](CivilDateTime date, int minutes) {
        date.hour = minutes / 60;
        date.minute = minutes % 60;
        date.second = 0;
        return wall_from_civil(date);
    };

    // relative day + time
    if (tokens.size() == 2) {
        auto tod = temporal_detail::parse_time_of_day_min(tokens[1]);
        if (tod) {
            if (temporal_detail::token_in(locale.today_tokens, tokens[0])) {
                return at_time(ref, *tod);
            }
            if (temporal_detail::token_in(locale.yesterday_tokens, tokens[0])) {
                CivilDateTime date = civil_from_wall(WallTime{reference_now_site.sec - 86400});
                return at_time(date, *tod);
            }
        }
    }

    // DD.MM.YYYY [HH:MM]
    if (tokens.size() == 1 || tokens.size() == 2) {
        if (auto date = temporal_detail::parse_numeric_date(tokens[0])) {
            int tod = 0;
            if (tokens.size() == 2) {
                auto t = temporal_detail::parse_time_of_day_min(tokens[1]);
                if (!t) return std::nullopt;
                tod = *t;
            }
            return at_time(*date, tod);
        }
    }

    // D Month [HH:MM] — year picked so the date does not land after the
    // reference date.
    if ((tokens.size() == 2 || tokens.size() == 3) && !locale.month_names.empty()) {
        auto day = temporal_detail::parse_day_number(tokens[0]);
        auto month = temporal_detail::match_month(locale.month_names, tokens[1]);
        if (day && month) {
            int tod = 0;
            if (tokens.size() == 3) {
                auto t = temporal_detail::parse_time_of_day_min(tokens[2]);
                if (!t) return std::nullopt;
                tod = *t;
            }
            CivilDateTime date{ref.year, *month, *day, 0, 0, 0};
            if (*month > ref.month || (*month == ref.month && *day > ref.day)) {
                date.year -= 1;
            }
            if (!civil_valid(date)) return std::nullopt;
            return at_time(date, tod);
        }
    }

    return std::nullopt;
}

/// Site wall clock to operator wall clock: out through UTC, back in through
/// the local offset. Adding a fixed hour difference is the special case of
/// this with constant offsets.
inline WallTime site_to_local(WallTime t_site, const SiteClock& clock) {
    return WallTime{t_site.sec - static_cast<int64_t>(clock.site_utc_offset_min) * 60 +
                    static_cast<int64_t>(clock.local_utc_offset_min) * 60};
}

inline WallTime local_to_site(WallTime t_local, const SiteClock& clock) {
    return WallTime{t_local.sec - static_cast<int64_t>(clock.local_utc_offset_min) * 60 +
                    static_cast<int64_t>(clock.site_utc_offset_min) * 60};
}

/// True iff the post is between zero and `window` minutes old. Future-dated
/// posts are never recent.
inline bool is_recent(WallTime posted_at_site, WallTime now_site, RecencyWindow window) {
    int64_t age_sec = now_site.sec - posted_at_site.sec;
    return age_sec >= 0 && age_sec <= window.duration_min * 60;
}

}  // namespace shelfwatch
