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

#include "shelfwatch/corpus.hpp"

#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "shelfwatch/config.hpp"
#include "shelfwatch/extract.hpp"

using namespace shelfwatch;
using testing::ScriptedTransport;
using testing::TempDir;
using testing::url_of;

namespace {

/// Extracts every record from a synthesized corpus, page by manifest order.
std::vector<ProductRecord> extract_corpus(const std::filesystem::path& dir,
                                          const FixtureManifest& manifest) {
    ManualClock clock;
    ExtractionRuleSet rules = default_rule_set();
    std::vector<ProductRecord> records;
    for (const auto& entry : manifest.entries) {
        std::ifstream in(dir / entry.file, std::ios::binary);
        REQUIRE(in);
        std::ostringstream body;
        body << in.rdbuf();
        html::Document doc = html::parse_html(body.str());
        auto result = extract_records(doc, rules, url_of(entry.url),
                                      DepartmentEntry{"fallback", std::nullopt}, clock);
        CHECK(result.stats.cards_dropped == 0);
        for (auto& r : result.records) records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

TEST_CASE("two known names synthesize and extract back") {
    TempDir dir;
    CorpusSpec spec;
    spec.n_cards = 2;
    spec.names = {"Toyota Yaris", "Volkswagen Transporter"};
    spec.prices = {"12 500 \xE2\x82\xAC", "8 900 \xE2\x82\xAC"};
    spec.post_times = {"tänään 17:39", "eilen 09:15"};

    FixtureManifest manifest = synthesize_corpus(spec, dir.path());
    REQUIRE(manifest.entries.size() == 1);
    CHECK(manifest.entries[0].url == "https://example.test/vaihtoautot");

    auto records = extract_corpus(dir.path(), manifest);
    REQUIRE(records.size() == 2);
    CHECK(records[0].name == "Toyota Yaris");
    CHECK(records[1].name == "Volkswagen Transporter");
    CHECK(records[0].posted_text == "tänään 17:39");
    CHECK(records[1].posted_text == "eilen 09:15");
    CHECK(records[0].price == Money{1250000, "EUR"});
    CHECK(records[1].price == Money{890000, "EUR"});
    CHECK(records[0].department_slug == "vaihtoautot");
    CHECK(records[0].model == "yaris");
    CHECK(records[0].image_url);
}

TEST_CASE("zero cards make a valid empty page") {
    TempDir dir;
    CorpusSpec spec;
    spec.n_cards = 0;
    FixtureManifest manifest = synthesize_corpus(spec, dir.path());
    REQUIRE(manifest.entries.size() == 1);
    CHECK(extract_corpus(dir.path(), manifest).empty());
    CHECK(validate_corpus(dir.path()).empty());
}

TEST_CASE("mismatched list lengths are rejected") {
    TempDir dir;
    CorpusSpec spec;
    spec.n_cards = 2;
    spec.names = {"One"};
    spec.prices = {"", ""};
    spec.post_times = {"", ""};
    CHECK_THROWS_AS(synthesize_corpus(spec, dir.path()), SpecInvalidError);

    CorpusSpec uncollapsed;
    uncollapsed.n_cards = 1;
    uncollapsed.names = {"A"};
    uncollapsed.prices = {""};
    uncollapsed.post_times = {"tänään  17:39"};  // double space
    CHECK_THROWS_AS(synthesize_corpus(uncollapsed, dir.path()), SpecInvalidError);

    CorpusSpec empty_name;
    empty_name.n_cards = 1;
    empty_name.names = {""};
    empty_name.prices = {""};
    empty_name.post_times = {""};
    CHECK_THROWS_AS(synthesize_corpus(empty_name, dir.path()), SpecInvalidError);
}

TEST_CASE("cards split across pages per the template") {
    TempDir dir;
    CorpusSpec spec;
    spec.n_cards = 20;
    for (int i = 0; i < 20; ++i) {
        spec.names.push_back("Car Model" + std::to_string(i));
        spec.prices.push_back("1 000 \xE2\x82\xAC");
        spec.post_times.push_back("tänään 12:00");
    }
    spec.cards_per_page = 7;
    FixtureManifest manifest = synthesize_corpus(spec, dir.path());
    REQUIRE(manifest.entries.size() == 3);
    CHECK(manifest.entries[0].url == "https://example.test/vaihtoautot");
    CHECK(manifest.entries[1].url == "https://example.test/vaihtoautot?page=2");
    CHECK(manifest.entries[2].url == "https://example.test/vaihtoautot?page=3");

    auto records = extract_corpus(dir.path(), manifest);
    REQUIRE(records.size() == 20);
    for (int i = 0; i < 20; ++i) CHECK(records[i].name == "Car Model" + std::to_string(i));

    // ids are unique across the corpus
    std::set<std::string> ids;
    for (const auto& r : records) ids.insert(r.product_id);
    CHECK(ids.size() == 20);
    CHECK(validate_corpus(dir.path()).empty());
}

TEST_CASE("synthesis is deterministic for a fixed seed") {
    TempDir a, b;
    CorpusSpec spec;
    spec.n_cards = 3;
    spec.names = {"A B", "C D", "E F"};
    spec.prices = {"1 \xE2\x82\xAC", "2 \xE2\x82\xAC", "3 \xE2\x82\xAC"};
    spec.post_times = {"tänään 10:00", "tänään 11:00", "tänään 12:00"};
    spec.seed = 42;
    synthesize_corpus(spec, a.path());
    synthesize_corpus(spec, b.path());

    for (const auto& entry : load_manifest(a.path()).entries) {
        std::ifstream fa(a.path() / entry.file, std::ios::binary);
        std::ifstream fb(b.path() / entry.file, std::ios::binary);
        std::ostringstream ca, cb;
        ca << fa.rdbuf();
        cb << fb.rdbuf();
        CHECK(ca.str() == cb.str());
    }
}

TEST_CASE("generator and extractor agree on random specs") {
    std::mt19937_64 rng(113);
    const char* words[] = {"Toyota",  "Yaris", "Opel",  "ASTRA", "1.6i",  "ääliö",
                           "Škoda",   "Ford",  "Focus", "Kia",   "cee'd", "&co",
                           "\"quote\"", "a<b>", "mökki", "x"};
    std::uniform_int_distribution<int> n_cards(0, 8);
    std::uniform_int_distribution<int> n_tokens(1, 4);
    std::uniform_int_distribution<int> pick(0, 15);
    std::uniform_int_distribution<int> page_split(0, 5);
    std::uniform_int_distribution<int> hour(0, 23);
    std::uniform_int_distribution<int> minute(0, 59);
    std::uniform_int_distribution<int> euros(0, 99999);
    TempDir dir;

    for (int iter = 0; iter < 1000; ++iter) {
        CorpusSpec spec;
        spec.seed = rng();
        spec.n_cards = n_cards(rng);
        spec.cards_per_page = page_split(rng);
        for (int c = 0; c < spec.n_cards; ++c) {
            std::string name;
            int nt = n_tokens(rng);
            for (int t = 0; t < nt; ++t) {
                if (t) name += ' ';
                name += words[pick(rng)];
            }
            spec.names.push_back(name);
            switch (rng() % 3) {
                case 0: spec.prices.push_back(""); break;
                case 1: spec.prices.push_back(std::to_string(euros(rng)) + " \xE2\x82\xAC"); break;
                default: spec.prices.push_back(std::to_string(euros(rng))); break;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%s %02d:%02d", rng() % 2 ? "tänään" : "eilen",
                          hour(rng), minute(rng));
            spec.post_times.push_back(rng() % 5 == 0 ? "" : buf);
        }

        auto out = dir.file("gen-" + std::to_string(iter));
        FixtureManifest manifest = synthesize_corpus(spec, out);
        auto records = extract_corpus(out, manifest);
        REQUIRE(records.size() == static_cast<size_t>(spec.n_cards));
        for (int c = 0; c < spec.n_cards; ++c) {
            CHECK(records[c].name == spec.names[c]);
            CHECK(records[c].posted_text == spec.post_times[c]);
            CHECK(records[c].price == parse_price(spec.prices[c]));
        }
    }
}

TEST_CASE("recording replays whatever the transport served") {
    TempDir dir;
    FakeSteadyClock steady;
    ManualClock clock;
    std::ostringstream log;
    PolitenessPolicy policy;
    policy.min_delay_ms = 0;
    policy.max_retries = 0;

    ScriptedTransport transport(
        {ScriptedTransport::ok("<html>one</html>"), ScriptedTransport::status(404)});
    FixtureManifest manifest =
        record_corpus({"https://site.test/a", "https://site.test/b"}, transport, policy, steady,
                      clock, dir.path(), log);
    REQUIRE(manifest.entries.size() == 1);
    CHECK(manifest.entries[0].url == "https://site.test/a");
    CHECK(log.str().find("https://site.test/b") != std::string::npos);

    FixtureTransport replay(dir.path());
    CHECK(replay.get(url_of("https://site.test/a"), policy).body == "<html>one</html>");

    // zero URLs still produce a valid (empty) corpus
    TempDir empty;
    ScriptedTransport unused({});
    FixtureManifest none =
        record_corpus({}, unused, policy, steady, clock, empty.path(), log);
    CHECK(none.entries.empty());
    CHECK(validate_corpus(empty.path()).empty());
}

TEST_CASE("corpus validation reacts to missing files and bad manifests") {
    TempDir dir;
    testing::write_file(dir.file("manifest.tsv"), "https://a.test/x\tmissing.html\n");
    auto problems = validate_corpus(dir.path());
    REQUIRE(problems.size() == 1);
    CHECK(problems[0].find("missing.html") != std::string::npos);

    TempDir no_manifest;
    CHECK(!validate_corpus(no_manifest.path()).empty());

    TempDir relative;
    testing::write_file(relative.file("manifest.tsv"), "not-absolute\tf.html\n");
    testing::write_file(relative.file("f.html"), "<p>x</p>");
    CHECK(!validate_corpus(relative.path()).empty());
}
