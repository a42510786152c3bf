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

#include "shelfwatch/url.hpp"

#include <doctest.h>

using namespace shelfwatch;

TEST_CASE("url parsing splits components") {
    auto u = Url::parse("https://Example.Test:8080/a/b?x=1#frag");
    REQUIRE(u);
    CHECK(u->scheme == "https");
    CHECK(u->host == "example.test");
    CHECK(u->port == "8080");
    CHECK(u->path == "/a/b");
    CHECK(u->query == "x=1");
    CHECK(u->fragment == "frag");
    CHECK(u->is_absolute());
    CHECK(u->to_string() == "https://example.test:8080/a/b?x=1#frag");
    CHECK(u->request_target() == "/a/b?x=1");

    auto rel = Url::parse("/vaihtoautot?page=2");
    REQUIRE(rel);
    CHECK(!rel->is_absolute());
    CHECK(rel->path == "/vaihtoautot");
    CHECK(rel->query == "page=2");

    CHECK(Url::parse("http://host")->request_target() == "/");
    CHECK(!Url::parse("1http://bad/scheme"));
}

// The normal-resolution examples from the URI standard, frozen as the
// oracle for reference resolution.
TEST_CASE("reference resolution matches the standard example table") {
    const Url base = *Url::parse("http://a/b/c/d;p?q");
    auto resolve = [&](const char* href) { return resolve_url(base, href).to_string(); };

    CHECK(resolve("g:h") == "g:h");
    CHECK(resolve("g") == "http://a/b/c/g");
    CHECK(resolve("./g") == "http://a/b/c/g");
    CHECK(resolve("g/") == "http://a/b/c/g/");
    CHECK(resolve("/g") == "http://a/g");
    CHECK(resolve("//g") == "http://g");
    CHECK(resolve("?y") == "http://a/b/c/d;p?y");
    CHECK(resolve("g?y") == "http://a/b/c/g?y");
    CHECK(resolve("#s") == "http://a/b/c/d;p?q#s");
    CHECK(resolve("g#s") == "http://a/b/c/g#s");
    CHECK(resolve("g?y#s") == "http://a/b/c/g?y#s");
    CHECK(resolve(";x") == "http://a/b/c/;x");
    CHECK(resolve("g;x") == "http://a/b/c/g;x");
    CHECK(resolve("g;x?y#s") == "http://a/b/c/g;x?y#s");
    CHECK(resolve(".") == "http://a/b/c/");
    CHECK(resolve("./") == "http://a/b/c/");
    CHECK(resolve("..") == "http://a/b/");
    CHECK(resolve("../") == "http://a/b/");
    CHECK(resolve("../g") == "http://a/b/g");
    CHECK(resolve("../..") == "http://a/");
    CHECK(resolve("../../") == "http://a/");
    CHECK(resolve("../../g") == "http://a/g");

    // a few of the abnormal ones
    CHECK(resolve("../../../g") == "http://a/g");
    CHECK(resolve("/./g") == "http://a/g");
    CHECK(resolve("/../g") == "http://a/g");
    CHECK(resolve("g.") == "http://a/b/c/g.");
    CHECK(resolve(".g") == "http://a/b/c/.g");
    CHECK(resolve("g/./h") == "http://a/b/c/g/h");
    CHECK(resolve("g/../h") == "http://a/b/c/h");
}

TEST_CASE("resolving site-relative product links") {
    const Url base = *Url::parse("https://example.test/x");
    CHECK(resolve_url(base, "/vaihtoautot/toyota/yaris/84905081").to_string() ==
          "https://example.test/vaihtoautot/toyota/yaris/84905081");
    // already absolute: identity
    CHECK(resolve_url(base, "https://other.test/q").to_string() == "https://other.test/q");
    CHECK(resolve_url(*Url::parse("https://a/b/c"), "d").to_string() == "https://a/b/d");
}

TEST_CASE("empty and broken hrefs are rejected") {
    const Url base = *Url::parse("https://example.test/");
    CHECK_THROWS_AS(resolve_url(base, ""), UnresolvableHrefError);
    CHECK_THROWS_AS(resolve_url(base, "1bad://x"), UnresolvableHrefError);
}

TEST_CASE("percent decoding") {
    CHECK(percent_decode("a%20b") == "a b");
    CHECK(percent_decode("%C3%A4") == "\xC3\xA4");
    CHECK(percent_decode("100%") == "100%");
    CHECK(percent_decode("%GZ") == "%GZ");
}
