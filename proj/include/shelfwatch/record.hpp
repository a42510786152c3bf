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

#include "shelfwatch/time.hpp"

namespace shelfwatch {

/// A price in minor units (cents) with an ISO-4217 currency code.
struct Money {
    int64_t amount_minor = 0;
    std::string currency;
    bool operator==(const Money&) const = default;
};

/// One product pulled off a listing page.
struct ProductRecord {
    std::string product_id;
    std::string name;
    std::optional<std::string> model;
    std::string department_slug;
    std::string url;  // absolute
    std::optional<std::string> image_url;
    std::optional<Money> price;
    std::string posted_text;  // verbatim after whitespace collapse
    std::optional<WallTime> posted_at;  // site-local, resolved later
    std::string source_page;
    UtcTime scraped_at;

    bool operator==(const ProductRecord&) const = default;
};

}  // namespace shelfwatch
