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

#include "shelfwatch/temporal.hpp"

#include <doctest.h>

#include <cstdio>
#include <random>

using namespace shelfwatch;

namespace {
const WallTime kRef = wall_from_civil({2021, 6, 15, 18, 0, 0});
}

TEST_CASE("today form resolves to the reference date") {
    auto t = parse_post_time("tänään 17:39", finnish_locale(), kRef);
    REQUIRE(t);
    CHECK(*t == wall_from_civil({2021, 6, 15, 17, 39, 0}));

    // the misspelled variant and case changes both land
    CHECK(parse_post_time("täänän 17:39", finnish_locale(), kRef) == t);
    CHECK(parse_post_time("TÄNÄÄN 17:39", finnish_locale(), kRef) == t);
    // dot separator
    CHECK(parse_post_time("tänään 17.39", finnish_locale(), kRef) == t);
    // NBSP between token and time
    CHECK(parse_post_time("tänään\xC2\xA0"
                          "17:39",
                          finnish_locale(), kRef) == t);
}

TEST_CASE("yesterday form crosses midnight correctly") {
    WallTime just_past_midnight = wall_from_civil({2021, 6, 15, 0, 10, 0});
    auto t = parse_post_time("eilen 23:59", finnish_locale(), just_past_midnight);
    REQUIRE(t);
    CHECK(*t == wall_from_civil({2021, 6, 14, 23, 59, 0}));
}

TEST_CASE("relative forms against a brute-force oracle") {
    // Straight-line oracle: resolve the date by decrementing the civil day
    // field directly, independent of the implementation's arithmetic.
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int64_t> ref_days(10000, 25000);
    std::uniform_int_distribution<int> ref_min(0, 1439);
    std::uniform_int_distribution<int> tod_h(0, 23);
    std::uniform_int_distribution<int> tod_m(0, 59);

    for (int iter = 0; iter < 1000; ++iter) {
        int64_t day = ref_days(rng);
        WallTime ref{day * 86400 + ref_min(rng) * 60};
        int h = tod_h(rng), m = tod_m(rng);
        bool yesterday = iter % 2 == 1;

        char buf[40];
        std::snprintf(buf, sizeof buf, "%s %02d:%02d", yesterday ? "eilen" : "tänään", h, m);
        auto got = parse_post_time(buf, finnish_locale(), ref);
        REQUIRE(got);

        int64_t oracle_day = day - (yesterday ? 1 : 0);
        WallTime expected{oracle_day * 86400 + h * 3600 + m * 60};
        CHECK(*got == expected);
        // relative forms never land after the reference's day
        CHECK(got->sec < (day + 1) * 86400);
    }
}

TEST_CASE("unrecognized strings resolve to absent") {
    const LocaleTable fi = finnish_locale();
    CHECK(!parse_post_time("soon", fi, kRef));
    CHECK(!parse_post_time("", fi, kRef));
    CHECK(!parse_post_time("tänään", fi, kRef));          // no time
    CHECK(!parse_post_time("tänään 25:00", fi, kRef));    // invalid hour
    CHECK(!parse_post_time("tänään 17:60", fi, kRef));    // invalid minute
    CHECK(!parse_post_time("huomenna 17:39", fi, kRef));  // unknown token
    CHECK(!parse_post_time("tänään 17:39 extra", fi, kRef));
    CHECK(!parse_post_time("31.02.2021", fi, kRef));      // impossible date
}

TEST_CASE("explicit date forms") {
    const LocaleTable fi = finnish_locale();

    auto t = parse_post_time("14.06.2021 09:15", fi, kRef);
    REQUIRE(t);
    CHECK(*t == wall_from_civil({2021, 6, 14, 9, 15, 0}));

    auto midnight = parse_post_time("1.6.2021", fi, kRef);
    REQUIRE(midnight);
    CHECK(*midnight == wall_from_civil({2021, 6, 1, 0, 0, 0}));

    // "D Month" picks the latest occurrence not after the reference
    auto spring = parse_post_time("14 kesäkuuta 12:00", fi, kRef);
    REQUIRE(spring);
    CHECK(*spring == wall_from_civil({2021, 6, 14, 12, 0, 0}));

    auto last_year = parse_post_time("24 joulukuuta", fi, kRef);
    REQUIRE(last_year);
    CHECK(*last_year == wall_from_civil({2020, 12, 24, 0, 0, 0}));
}

TEST_CASE("site wall time converts to operator wall time by offsets") {
    WallTime posted = wall_from_civil({2021, 6, 15, 17, 39, 0});

    // Finland winter (+120) to West Africa (+60): one hour back.
    CHECK(site_to_local(posted, SiteClock{120, 60}) ==
          wall_from_civil({2021, 6, 15, 16, 39, 0}));
    // Finland summer (+180) to West Africa (+60): two hours back.
    CHECK(site_to_local(posted, SiteClock{180, 60}) ==
          wall_from_civil({2021, 6, 15, 15, 39, 0}));
    // equal offsets: identity
    CHECK(site_to_local(posted, SiteClock{120, 120}) == posted);
}

TEST_CASE("conversion round-trips for random clocks and timestamps") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int64_t> secs(0, 4102444800LL);
    std::uniform_int_distribution<int> offset(-14 * 60, 14 * 60);
    for (int i = 0; i < 10000; ++i) {
        SiteClock clock{offset(rng), offset(rng)};
        WallTime t{secs(rng)};
        CHECK(local_to_site(site_to_local(t, clock), clock) == t);
        // the conversion is pure integer arithmetic
        CHECK(site_to_local(t, clock).sec ==
              t.sec - clock.site_utc_offset_min * 60 + clock.local_utc_offset_min * 60);
    }
}

TEST_CASE("recency window boundaries") {
    WallTime posted = wall_from_civil({2021, 6, 15, 17, 39, 0});

    CHECK(is_recent(posted, posted, RecencyWindow{0}));
    // 61 minutes later misses a 60-minute window
    WallTime now = wall_from_civil({2021, 6, 15, 18, 40, 0});
    CHECK(!is_recent(posted, now, RecencyWindow{60}));
    CHECK(is_recent(posted, wall_from_civil({2021, 6, 15, 18, 39, 0}), RecencyWindow{60}));
    // future posts are never recent
    CHECK(!is_recent(posted, WallTime{posted.sec - 1}, RecencyWindow{10000}));
}

TEST_CASE("recency is monotone in the window") {
    std::mt19937_64 rng(53);
    std::uniform_int_distribution<int64_t> secs(0, 4102444800LL);
    std::uniform_int_distribution<int64_t> win(0, 100000);
    for (int i = 0; i < 1000; ++i) {
        WallTime posted{secs(rng)};
        WallTime now{posted.sec + (rng() % 200000) - 100000};
        int64_t w1 = win(rng), w2 = win(rng);
        if (w1 > w2) std::swap(w1, w2);
        if (is_recent(posted, now, RecencyWindow{w1})) {
            CHECK(is_recent(posted, now, RecencyWindow{w2}));
        }
    }
}

TEST_CASE("site clock validation") {
    CHECK(SiteClock{180, 60}.valid());
    CHECK(SiteClock{-14 * 60, 14 * 60}.valid());
    CHECK(!SiteClock{15 * 60, 0}.valid());
    CHECK(!SiteClock{0, -15 * 60}.valid());
}
