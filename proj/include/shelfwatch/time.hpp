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

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

// Timestamps and injected clocks. All timing behaviour in the library goes
// through Clock (wall time) or SteadyClock (delays), so every code path is
// testable without real sleeping or reading the system clock.

namespace shelfwatch {

struct CivilDateTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
    auto operator<=>(const CivilDateTime&) const = default;
};

// Days-from-civil and back, via the usual era-based algorithm.
inline int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                         static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yr = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

inline bool is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int y, int m) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return (m >= 1 && m <= 12) ? kDays[m - 1] : 0;
}

inline bool civil_valid(const CivilDateTime& c) {
    return c.month >= 1 && c.month <= 12 && c.day >= 1 && c.day <= days_in_month(c.year, c.month) &&
           c.hour >= 0 && c.hour <= 23 && c.minute >= 0 && c.minute <= 59 && c.second >= 0 &&
           c.second <= 59;
}

/// A clock-face reading with no zone attached: seconds since the epoch of
/// that face. Site-local and user-local timestamps are WallTimes; which
/// frame a value is in is part of the variable's meaning, not the type.
struct WallTime {
    int64_t sec = 0;
    auto operator<=>(const WallTime&) const = default;
};

/// An instant known to be UTC.
struct UtcTime {
    int64_t sec = 0;
    auto operator<=>(const UtcTime&) const = default;
};

inline WallTime wall_from_civil(const CivilDateTime& c) {
    return WallTime{days_from_civil(c.year, c.month, c.day) * 86400 + c.hour * 3600 +
                    c.minute * 60 + c.second};
}

inline CivilDateTime civil_from_wall(WallTime t) {
    int64_t days = t.sec / 86400;
    int64_t rem = t.sec % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    CivilDateTime c;
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(rem / 3600);
    c.minute = static_cast<int>((rem % 3600) / 60);
    c.second = static_cast<int>(rem % 60);
    return c;
}

/// Reinterprets a UTC instant as a wall-clock reading at the given offset.
inline WallTime wall_from_utc(UtcTime t, int offset_min) {
    return WallTime{t.sec + static_cast<int64_t>(offset_min) * 60};
}

inline UtcTime utc_from_wall(WallTime t, int offset_min) {
    return UtcTime{t.sec - static_cast<int64_t>(offset_min) * 60};
}

namespace detail {
inline void format_civil(std::string& out, const CivilDateTime& c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", c.year, c.month, c.day, c.hour,
                  c.minute, c.second);
    out += buf;
}
}  // namespace detail

/// "2021-06-15T15:39:00Z"
inline std::string format_iso_utc(UtcTime t) {
    std::string out;
    detail::format_civil(out, civil_from_wall(WallTime{t.sec}));
    out += 'Z';
    return out;
}

/// "2021-06-15T17:39:00+03:00" — a wall reading plus the offset it is in.
inline std::string format_iso_offset(WallTime t, int offset_min) {
    std::string out;
    detail::format_civil(out, civil_from_wall(t));
    char buf[8];
    int abs_min = offset_min < 0 ? -offset_min : offset_min;
    std::snprintf(buf, sizeof buf, "%c%02d:%02d", offset_min < 0 ? '-' : '+', abs_min / 60,
                  abs_min % 60);
    out += buf;
    return out;
}

namespace detail {
inline bool read_int(std::string_view s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (size_t i = 0; i < len; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}
}  // namespace detail

/// Parses "YYYY-MM-DDTHH:MM[:SS]" with no zone suffix (a bare wall reading).
inline std::optional<CivilDateTime> parse_civil(std::string_view s) {
    CivilDateTime c;
    if (!detail::read_int(s, 0, 4, c.year)) return std::nullopt;
    if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ')) {
        return std::nullopt;
    }
    if (!detail::read_int(s, 5, 2, c.month) || !detail::read_int(s, 8, 2, c.day) ||
        !detail::read_int(s, 11, 2, c.hour) || s[13] != ':' ||
        !detail::read_int(s, 14, 2, c.minute)) {
        return std::nullopt;
    }
    size_t rest = 16;
    if (rest < s.size() && s[rest] == ':') {
        if (!detail::read_int(s, rest + 1, 2, c.second)) return std::nullopt;
        rest += 3;
    }
    if (rest != s.size()) return std::nullopt;
    if (!civil_valid(c)) return std::nullopt;
    return c;
}

inline std::optional<WallTime> parse_wall(std::string_view s) {
    auto c = parse_civil(s);
    if (!c) return std::nullopt;
    return wall_from_civil(*c);
}

/// Parses a full instant: "....Z" or "....+HH:MM"/"-HH:MM", converted to UTC.
inline std::optional<UtcTime> parse_iso_utc(std::string_view s) {
    if (s.empty()) return std::nullopt;
    int offset_min = 0;
    std::string_view face = s;
    if (s.back() == 'Z') {
        face = s.substr(0, s.size() - 1);
    } else {
        size_t tpos = s.find('T');
        if (tpos == std::string_view::npos) return std::nullopt;
        size_t sign = s.find_first_of("+-", tpos);
        if (sign == std::string_view::npos) return std::nullopt;
        int h = 0, m = 0;
        std::string_view off = s.substr(sign + 1);
        if (off.size() != 5 || off[2] != ':' || !detail::read_int(off, 0, 2, h) ||
            !detail::read_int(off, 3, 2, m)) {
            return std::nullopt;
        }
        offset_min = h * 60 + m;
        if (s[sign] == '-') offset_min = -offset_min;
        face = s.substr(0, sign);
    }
    auto wall = parse_wall(face);
    if (!wall) return std::nullopt;
    return utc_from_wall(*wall, offset_min);
}

/// Wall-clock source for timestamps. Implementations must be usable from
/// multiple threads.
class Clock {
public:
    virtual ~Clock() = default;
    virtual UtcTime now_utc() = 0;
};

class SystemClock final : public Clock {
public:
    UtcTime now_utc() override {
        auto now = std::chrono::system_clock::now();
        return UtcTime{std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
                           .count()};
    }
};

class ManualClock final : public Clock {
public:
    explicit ManualClock(UtcTime t = {}) : t_(t) {}
    UtcTime now_utc() override {
        std::lock_guard lock(m_);
        return t_;
    }
    void set(UtcTime t) {
        std::lock_guard lock(m_);
        t_ = t;
    }
    void advance_sec(int64_t s) {
        std::lock_guard lock(m_);
        t_.sec += s;
    }

private:
    std::mutex m_;
    UtcTime t_;
};

/// Monotonic time plus the ability to wait. Rate limiting, retry backoff
/// and the watch loop only ever talk to this interface.
class SteadyClock {
public:
    virtual ~SteadyClock() = default;
    virtual int64_t now_ms() = 0;
    virtual void sleep_ms(int64_t ms) = 0;
};

class SystemSteadyClock final : public SteadyClock {
public:
    int64_t now_ms() override {
        auto now = std::chrono::steady_clock::now();
        return std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch())
            .count();
    }
    void sleep_ms(int64_t ms) override {
        if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }
};

/// Fake steady clock: sleeping advances simulated time instantly.
class FakeSteadyClock final : public SteadyClock {
public:
    int64_t now_ms() override {
        std::lock_guard lock(m_);
        return t_;
    }
    void sleep_ms(int64_t ms) override {
        std::lock_guard lock(m_);
        if (ms > 0) t_ += ms;
    }
    void advance_ms(int64_t ms) {
        std::lock_guard lock(m_);
        t_ += ms;
    }

private:
    std::mutex m_;
    int64_t t_ = 0;
};

}  // namespace shelfwatch
