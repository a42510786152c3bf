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

#include "shelfwatch/time.hpp"

#include <doctest.h>

#include <random>

using namespace shelfwatch;

TEST_CASE("civil day arithmetic hits known anchors") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(1970, 1, 2) == 1);
    CHECK(days_from_civil(1969, 12, 31) == -1);
    CHECK(days_from_civil(2000, 3, 1) == 11017);
    CHECK(days_from_civil(2021, 6, 15) == 18793);

    int y, m, d;
    civil_from_days(18793, y, m, d);
    CHECK(y == 2021);
    CHECK(m == 6);
    CHECK(d == 15);
}

TEST_CASE("civil round-trips across a wide range") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int64_t> days(-200000, 200000);
    for (int i = 0; i < 1000; ++i) {
        int64_t z = days(rng);
        int y, m, d;
        civil_from_days(z, y, m, d);
        CHECK(days_from_civil(y, m, d) == z);
    }
}

TEST_CASE("leap years and month lengths") {
    CHECK(is_leap_year(2000));
    CHECK(!is_leap_year(1900));
    CHECK(is_leap_year(2024));
    CHECK(days_in_month(2024, 2) == 29);
    CHECK(days_in_month(2023, 2) == 28);
    CHECK(days_in_month(2021, 6) == 30);
}

TEST_CASE("iso formatting and parsing") {
    WallTime t = wall_from_civil({2021, 6, 15, 17, 39, 0});
    CHECK(format_iso_offset(t, 180) == "2021-06-15T17:39:00+03:00");
    CHECK(format_iso_offset(t, -330) == "2021-06-15T17:39:00-05:30");
    CHECK(format_iso_utc(UtcTime{t.sec}) == "2021-06-15T17:39:00Z");

    CHECK(parse_wall("2021-06-15T18:00") == wall_from_civil({2021, 6, 15, 18, 0, 0}));
    CHECK(parse_wall("2021-06-15T18:00:30") == wall_from_civil({2021, 6, 15, 18, 0, 30}));
    CHECK(!parse_wall("2021-13-15T18:00"));
    CHECK(!parse_wall("2021-06-15"));
    CHECK(!parse_wall("garbage"));

    auto utc = parse_iso_utc("2021-06-15T17:39:00+03:00");
    REQUIRE(utc);
    CHECK(format_iso_utc(*utc) == "2021-06-15T14:39:00Z");
    CHECK(parse_iso_utc("2021-06-15T14:39:00Z") == utc);
}

TEST_CASE("iso round-trip property") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int64_t> secs(-4102444800LL, 4102444800LL);  // ±2100
    for (int i = 0; i < 1000; ++i) {
        UtcTime t{secs(rng)};
        auto back = parse_iso_utc(format_iso_utc(t));
        REQUIRE(back);
        CHECK(*back == t);
    }
}

TEST_CASE("utc and wall conversions invert") {
    UtcTime t{1623771540};
    CHECK(utc_from_wall(wall_from_utc(t, 180), 180) == t);
    CHECK(wall_from_utc(t, 0).sec == t.sec);
}

TEST_CASE("manual and fake clocks behave deterministically") {
    ManualClock clock(UtcTime{100});
    CHECK(clock.now_utc() == UtcTime{100});
    clock.advance_sec(60);
    CHECK(clock.now_utc() == UtcTime{160});

    FakeSteadyClock steady;
    CHECK(steady.now_ms() == 0);
    steady.sleep_ms(500);
    CHECK(steady.now_ms() == 500);
    steady.sleep_ms(-5);
    CHECK(steady.now_ms() == 500);
}
