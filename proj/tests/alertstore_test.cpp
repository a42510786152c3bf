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

#include "shelfwatch/alertstore.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"

using namespace shelfwatch;
using testing::TempDir;
using testing::write_file;

namespace {

ProductRecord record_of(std::string id, std::optional<Money> price = std::nullopt) {
    ProductRecord r;
    r.product_id = std::move(id);
    r.name = "Toyota Yaris";
    r.department_slug = "vaihtoautot";
    r.url = "https://example.test/vaihtoautot/toyota/yaris/" + r.product_id;
    r.price = std::move(price);
    return r;
}

}  // namespace

TEST_CASE("an absent journal is an empty store") {
    TempDir dir;
    SeenStore store = SeenStore::load(dir.file("seen.jsonl"));
    CHECK(store.size() == 0);
}

TEST_CASE("later journal lines supersede earlier ones") {
    TempDir dir;
    auto path = dir.file("seen.jsonl");
    write_file(path,
               R"({"product_id":"84905081","last_price":{"amount_minor":1250000,"currency":"EUR"},"first_seen_at":"2021-06-15T10:00:00Z","last_seen_at":"2021-06-15T10:00:00Z"})"
               "\n"
               R"({"product_id":"84905081","last_price":{"amount_minor":1199900,"currency":"EUR"},"first_seen_at":"2021-06-15T10:00:00Z","last_seen_at":"2021-06-15T11:00:00Z"})"
               "\n");
    SeenStore store = SeenStore::load(path);
    CHECK(store.size() == 1);
    const SeenEntry* entry = store.find("84905081");
    REQUIRE(entry);
    CHECK(entry->last_price == Money{1199900, "EUR"});
    CHECK(entry->first_seen_at == *parse_iso_utc("2021-06-15T10:00:00Z"));
    CHECK(entry->last_seen_at == *parse_iso_utc("2021-06-15T11:00:00Z"));
}

TEST_CASE("a truncated line aborts the replay with its line number") {
    TempDir dir;
    auto path = dir.file("seen.jsonl");
    write_file(path,
               R"({"product_id":"1","last_price":null,"first_seen_at":"2021-06-15T10:00:00Z","last_seen_at":"2021-06-15T10:00:00Z"})"
               "\n"
               R"({"product_id":"2","last_pri)");
    CHECK_THROWS_AS(SeenStore::load(path), JournalCorruptError);
    try {
        SeenStore::load(path);
    } catch (const JournalCorruptError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("discovery, dedup and price change across runs") {
    TempDir dir;
    auto path = dir.file("seen.jsonl");
    ManualClock clock(UtcTime{1000});

    {
        SeenStore store = SeenStore::load(path);
        auto events =
            diff_and_record(store, {record_of("84905081", Money{1250000, "EUR"})}, clock);
        REQUIRE(events.size() == 1);
        CHECK(events[0].kind == AlertKind::new_product);
        CHECK(!events[0].previous_price);
        CHECK(events[0].emitted_at == UtcTime{1000});
    }

    clock.set(UtcTime{2000});
    {
        // same price on a fresh replay: no event, last_seen refreshed
        SeenStore store = SeenStore::load(path);
        auto events =
            diff_and_record(store, {record_of("84905081", Money{1250000, "EUR"})}, clock);
        CHECK(events.empty());
        CHECK(store.find("84905081")->last_seen_at == UtcTime{2000});
        CHECK(store.find("84905081")->first_seen_at == UtcTime{1000});
    }

    clock.set(UtcTime{3000});
    {
        // the price drop surfaces exactly once, with the previous price
        SeenStore store = SeenStore::load(path);
        auto events =
            diff_and_record(store, {record_of("84905081", Money{1199900, "EUR"})}, clock);
        REQUIRE(events.size() == 1);
        CHECK(events[0].kind == AlertKind::price_change);
        CHECK(events[0].previous_price == Money{1250000, "EUR"});
        CHECK(events[0].record.price == Money{1199900, "EUR"});
    }

    clock.set(UtcTime{4000});
    {
        SeenStore store = SeenStore::load(path);
        auto events =
            diff_and_record(store, {record_of("84905081", Money{1199900, "EUR"})}, clock);
        CHECK(events.empty());
    }
}

TEST_CASE("price appearing or disappearing counts as a change") {
    TempDir dir;
    ManualClock clock;
    SeenStore store = SeenStore::load(dir.file("s.jsonl"));

    diff_and_record(store, {record_of("7")}, clock);
    auto events = diff_and_record(store, {record_of("7", Money{100, "EUR"})}, clock);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == AlertKind::price_change);
    CHECK(!events[0].previous_price);

    auto gone = diff_and_record(store, {record_of("7")}, clock);
    REQUIRE(gone.size() == 1);
    CHECK(gone[0].previous_price == Money{100, "EUR"});
    CHECK(!gone[0].record.price);
}

TEST_CASE("duplicate ids within one batch collapse") {
    TempDir dir;
    ManualClock clock;
    SeenStore store = SeenStore::load(dir.file("s.jsonl"));
    auto events = diff_and_record(
        store, {record_of("9", Money{100, "EUR"}), record_of("9", Money{100, "EUR"})}, clock);
    CHECK(events.size() == 1);
}

TEST_CASE("a crash between journal append and emit cannot duplicate alerts") {
    TempDir dir;
    auto path = dir.file("s.jsonl");
    ManualClock clock;
    {
        SeenStore store = SeenStore::load(path);
        auto events = diff_and_record(store, {record_of("11", Money{5000, "EUR"})}, clock);
        CHECK(events.size() == 1);
        // pretend the process dies here, before any sink sees the events
    }
    SeenStore reloaded = SeenStore::load(path);
    auto events = diff_and_record(reloaded, {record_of("11", Money{5000, "EUR"})}, clock);
    CHECK(events.empty());
}

TEST_CASE("journal replay reproduces arbitrary stores") {
    std::mt19937_64 rng(83);
    std::uniform_int_distribution<int> n_entries(0, 12);
    std::uniform_int_distribution<int64_t> cents(0, 10000000);
    std::uniform_int_distribution<int64_t> when(0, 2000000000);
    TempDir dir;

    for (int iter = 0; iter < 1000; ++iter) {
        auto path = dir.file("replay-" + std::to_string(iter) + ".jsonl");
        ManualClock clock;
        SeenStore store = SeenStore::load(path);
        int n = n_entries(rng);
        std::vector<ProductRecord> batch;
        for (int k = 0; k < n; ++k) {
            std::optional<Money> price;
            if (rng() % 3) price = Money{cents(rng), rng() % 2 ? "EUR" : "USD"};
            batch.push_back(record_of(std::to_string(rng() % 40), price));
        }
        clock.set(UtcTime{when(rng)});
        diff_and_record(store, batch, clock);

        SeenStore replayed = SeenStore::load(path);
        CHECK(replayed.entries() == store.entries());
    }
}

TEST_CASE("event count equals distinct consecutive price states plus discovery") {
    std::mt19937_64 rng(97);
    TempDir dir;
    for (int iter = 0; iter < 200; ++iter) {
        auto path = dir.file("states-" + std::to_string(iter) + ".jsonl");
        ManualClock clock;
        int runs = 1 + static_cast<int>(rng() % 6);
        std::vector<std::optional<Money>> prices;
        for (int r = 0; r < runs; ++r) {
            if (rng() % 4 == 0) prices.push_back(std::nullopt);
            else prices.push_back(Money{static_cast<int64_t>(rng() % 3) * 100, "EUR"});
        }
        size_t total_events = 0;
        for (int r = 0; r < runs; ++r) {
            SeenStore store = SeenStore::load(path);
            clock.set(UtcTime{(r + 1) * 100});
            total_events += diff_and_record(store, {record_of("42", prices[r])}, clock).size();
        }
        size_t expected = 1;  // discovery
        for (int r = 1; r < runs; ++r) {
            if (prices[r] != prices[r - 1]) ++expected;
        }
        CHECK(total_events == expected);
    }
}

TEST_CASE("alert lines carry the stable schema") {
    AlertEvent event;
    event.kind = AlertKind::price_change;
    event.record = record_of("84905081", Money{1199900, "EUR"});
    event.record.posted_at = wall_from_civil({2021, 6, 15, 17, 39, 0});
    event.previous_price = Money{1250000, "EUR"};
    event.emitted_at = *parse_iso_utc("2021-06-15T15:00:00Z");

    nlohmann::json j = alert_to_json(event, 180);
    CHECK(j.at("v") == 1);
    CHECK(j.at("kind") == "price_change");
    CHECK(j.at("product_id") == "84905081");
    CHECK(j.at("name") == "Toyota Yaris");
    CHECK(j.at("department") == "vaihtoautot");
    CHECK(j.at("url") == "https://example.test/vaihtoautot/toyota/yaris/84905081");
    CHECK(j.at("price").at("amount_minor") == 1199900);
    CHECK(j.at("price").at("currency") == "EUR");
    CHECK(j.at("previous_price").at("amount_minor") == 1250000);
    CHECK(j.at("posted_at") == "2021-06-15T17:39:00+03:00");
    CHECK(j.at("emitted_at") == "2021-06-15T15:00:00Z");

    AlertEvent fresh;
    fresh.kind = AlertKind::new_product;
    fresh.record = record_of("1");
    nlohmann::json j2 = alert_to_json(fresh, 0);
    CHECK(j2.at("kind") == "new_product");
    CHECK(j2.at("price").is_null());
    CHECK(j2.at("previous_price").is_null());
    CHECK(j2.at("posted_at").is_null());
}

TEST_CASE("jsonl sink writes one line per event") {
    std::ostringstream out;
    JsonlSink sink(out, 180);
    emit({}, sink);
    CHECK(out.str().empty());

    AlertEvent event;
    event.record = record_of("5");
    emit({event}, sink);
    std::string line = out.str();
    CHECK(line.back() == '\n');
    nlohmann::json parsed = nlohmann::json::parse(line);
    CHECK(parsed.at("kind") == "new_product");
    CHECK(parsed.at("product_id") == "5");
}

TEST_CASE("text sink is readable and ordered") {
    std::ostringstream out;
    TextSink sink(out, 0);
    AlertEvent a;
    a.record = record_of("1", Money{123456, "EUR"});
    AlertEvent b;
    b.kind = AlertKind::price_change;
    b.record = record_of("2", Money{100, "EUR"});
    b.previous_price = Money{200, "EUR"};
    emit({a, b}, sink);
    std::string s = out.str();
    CHECK(s.find("NEW") != std::string::npos);
    CHECK(s.find("1234.56 EUR") != std::string::npos);
    CHECK(s.find("PRICE") != std::string::npos);
    CHECK(s.find("(was 2.00 EUR)") != std::string::npos);
    CHECK(s.find("NEW") < s.find("PRICE"));
}

TEST_CASE("webhook delivery retries until the endpoint accepts") {
    FakeSteadyClock steady;
    std::ostringstream log;
    PolitenessPolicy policy;
    policy.max_retries = 2;
    policy.backoff_base_ms = 10;

    int calls = 0;
    std::string seen_url, seen_body;
    HttpPoster poster = [&](const std::string& url, const std::string& body) {
        ++calls;
        seen_url = url;
        seen_body = body;
        return calls < 3 ? 500 : 200;
    };
    WebhookSink sink("https://hooks.test/alert", poster, policy, steady, log, 0);
    AlertEvent event;
    event.record = record_of("3");
    sink.deliver(event);
    CHECK(calls == 3);
    CHECK(seen_url == "https://hooks.test/alert");
    CHECK(nlohmann::json::parse(seen_body).at("product_id") == "3");
    CHECK(log.str().empty());

    // a dead endpoint is logged, never thrown
    calls = 0;
    HttpPoster dead = [&](const std::string&, const std::string&) {
        ++calls;
        return -1;
    };
    WebhookSink doomed("https://hooks.test/alert", dead, policy, steady, log, 0);
    doomed.deliver(event);
    CHECK(calls == 3);
    CHECK(!log.str().empty());
}

TEST_CASE("the store lock admits one writer") {
    TempDir dir;
    auto path = dir.file("s.jsonl");
    StoreLock first(path);
    CHECK_THROWS_AS(StoreLock{path}, StoreLockedError);
    // released on destruction
    {
        StoreLock scoped(dir.file("other.jsonl"));
    }
    StoreLock again(dir.file("other.jsonl"));
}
