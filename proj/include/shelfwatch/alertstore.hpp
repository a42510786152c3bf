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

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shelfwatch/errors.hpp"
#include "shelfwatch/fetch.hpp"
#include "shelfwatch/record.hpp"
#include "shelfwatch/time.hpp"

// Deduplication against an append-only JSON-lines journal, and the alert
// sinks. The journal is the source of truth: entries are appended and
// fsynced before any event is handed to a sink, so a crash between the two
// can only suppress a duplicate, never invent one.

namespace shelfwatch {

struct SeenEntry {
    std::string product_id;
    std::optional<Money> last_price;
    UtcTime first_seen_at;
    UtcTime last_seen_at;
    bool operator==(const SeenEntry&) const = default;
};

enum class AlertKind { new_product, price_change };

inline const char* to_string(AlertKind k) {
    return k == AlertKind::new_product ? "new_product" : "price_change";
}

struct AlertEvent {
    AlertKind kind = AlertKind::new_product;
    ProductRecord record;
    std::optional<Money> previous_price;  // present iff price_change
    UtcTime emitted_at;
};

namespace store_detail {

inline nlohmann::json money_to_json(const std::optional<Money>& m) {
    if (!m) return nullptr;
    return nlohmann::json{{"amount_minor", m->amount_minor}, {"currency", m->currency}};
}

inline std::optional<Money> money_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return Money{j.at("amount_minor").get<int64_t>(), j.at("currency").get<std::string>()};
}

inline nlohmann::json entry_to_json(const SeenEntry& e) {
    return nlohmann::json{
        {"product_id", e.product_id},
        {"last_price", money_to_json(e.last_price)},
        {"first_seen_at", format_iso_utc(e.first_seen_at)},
        {"last_seen_at", format_iso_utc(e.last_seen_at)},
    };
}

inline std::optional<SeenEntry> entry_from_json_line(const std::string& line) {
    try {
        const nlohmann::json j = nlohmann::json::parse(line);
        SeenEntry e;
        e.product_id = j.at("product_id").get<std::string>();
        e.last_price = money_from_json(j.at("last_price"));
        auto first = parse_iso_utc(j.at("first_seen_at").get<std::string>());
        auto last = parse_iso_utc(j.at("last_seen_at").get<std::string>());
        if (!first || !last || e.product_id.empty()) return std::nullopt;
        e.first_seen_at = *first;
        e.last_seen_at = *last;
        return e;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

}  // namespace store_detail

/// In-memory view of the journal, keyed by product id. Reconstructed by
/// replaying the journal in order; later lines supersede earlier ones.
class SeenStore {
public:
    explicit SeenStore(std::filesystem::path journal_path)
        : journal_path_(std::move(journal_path)) {}

    /// Replays the journal. A missing file is an empty store; a line that
    /// fails to parse aborts with its line number — silent skipping would
    /// quietly re-alert on everything after the bad line.
    static SeenStore load(const std::filesystem::path& journal_path) {
        SeenStore store(journal_path);
        std::ifstream in(journal_path, std::ios::binary);
        if (!in) return store;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            auto entry = store_detail::entry_from_json_line(line);
            if (!entry) throw JournalCorruptError("journal entry does not parse", lineno);
            store.entries_[entry->product_id] = std::move(*entry);
        }
        return store;
    }

    const std::filesystem::path& journal_path() const { return journal_path_; }
    size_t size() const { return entries_.size(); }

    const SeenEntry* find(const std::string& product_id) const {
        auto it = entries_.find(product_id);
        return it == entries_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, SeenEntry>& entries() const { return entries_; }

    void put(SeenEntry e) { entries_[e.product_id] = std::move(e); }

private:
    std::filesystem::path journal_path_;
    std::map<std::string, SeenEntry> entries_;
};

/// Advisory single-writer lock next to the journal. Uses flock, so the lock
/// dies with the process and a crash never wedges future runs.
class StoreLock {
public:
    explicit StoreLock(const std::filesystem::path& store_path)
        : lock_path_(store_path.string() + ".lock") {
        fd_ = ::open(lock_path_.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw StoreWriteFailedError("cannot open lock file " + lock_path_);
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw StoreLockedError("another run holds the journal: " + lock_path_);
        }
    }

    ~StoreLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

private:
    std::string lock_path_;
    int fd_ = -1;
};

/// Diffs fresh records against the store. Unknown id → new_product; known
/// id with a different price (absent counts as a value) → price_change;
/// otherwise just a last_seen refresh. Every processed record appends its
/// entry snapshot to the journal, which is fsynced before events are
/// returned. Throws StoreWriteFailedError with no events on write failure.
inline std::vector<AlertEvent> diff_and_record(SeenStore& store,
                                               const std::vector<ProductRecord>& records,
                                               Clock& clock) {
    if (records.empty()) return {};
    std::vector<AlertEvent> events;
    std::string batch;

    const UtcTime now = clock.now_utc();
    for (const auto& rec : records) {
        const SeenEntry* known = store.find(rec.product_id);
        SeenEntry updated;
        if (!known) {
            updated = SeenEntry{rec.product_id, rec.price, now, now};
            events.push_back({AlertKind::new_product, rec, std::nullopt, now});
        } else {
            updated = *known;
            updated.last_seen_at = now;
            if (known->last_price != rec.price) {
                events.push_back({AlertKind::price_change, rec, known->last_price, now});
                updated.last_price = rec.price;
            }
        }
        store.put(updated);
        batch += store_detail::entry_to_json(updated).dump();
        batch += '\n';
    }

    int fd = ::open(store.journal_path().c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
    if (fd < 0) {
        throw StoreWriteFailedError("cannot open journal " + store.journal_path().string());
    }
    size_t off = 0;
    while (off < batch.size()) {
        ssize_t n = ::write(fd, batch.data() + off, batch.size() - off);
        if (n <= 0) {
            ::close(fd);
            throw StoreWriteFailedError("journal append failed: " +
                                        store.journal_path().string());
        }
        off += static_cast<size_t>(n);
    }
    if (::fsync(fd) != 0) {
        ::close(fd);
        throw StoreWriteFailedError("journal fsync failed: " + store.journal_path().string());
    }
    ::close(fd);
    return events;
}

// --- sinks ------------------------------------------------------------------

/// Stable, versioned alert line. posted_at is rendered in the site's offset
/// and is null when the post time could not be resolved.
inline nlohmann::json alert_to_json(const AlertEvent& event, int site_utc_offset_min) {
    nlohmann::json j{
        {"v", 1},
        {"kind", to_string(event.kind)},
        {"product_id", event.record.product_id},
        {"name", event.record.name},
        {"department", event.record.department_slug},
        {"url", event.record.url},
        {"price", store_detail::money_to_json(event.record.price)},
        {"previous_price", store_detail::money_to_json(event.previous_price)},
        {"emitted_at", format_iso_utc(event.emitted_at)},
    };
    if (event.record.posted_at) {
        j["posted_at"] = format_iso_offset(*event.record.posted_at, site_utc_offset_min);
    } else {
        j["posted_at"] = nullptr;
    }
    return j;
}

class Sink {
public:
    virtual ~Sink() = default;
    virtual void deliver(const AlertEvent& event) = 0;
};

class JsonlSink final : public Sink {
public:
    JsonlSink(std::ostream& out, int site_utc_offset_min)
        : out_(out), offset_min_(site_utc_offset_min) {}

    void deliver(const AlertEvent& event) override {
        out_ << alert_to_json(event, offset_min_).dump() << '\n';
        out_.flush();
    }

private:
    std::ostream& out_;
    int offset_min_;
};

class TextSink final : public Sink {
public:
    TextSink(std::ostream& out, int site_utc_offset_min)
        : out_(out), offset_min_(site_utc_offset_min) {}

    void deliver(const AlertEvent& event) override {
        const ProductRecord& r = event.record;
        out_ << (event.kind == AlertKind::new_product ? "NEW    " : "PRICE  ") << r.product_id
             << "  " << r.name;
        if (r.price) out_ << "  " << format_money(*r.price);
        if (event.previous_price) out_ << " (was " << format_money(*event.previous_price) << ")";
        if (r.posted_at) out_ << "  posted " << format_iso_offset(*r.posted_at, offset_min_);
        out_ << "  " << r.url << '\n';
        out_.flush();
    }

private:
    static std::string format_money(const Money& m) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%lld.%02lld %s",
                      static_cast<long long>(m.amount_minor / 100),
                      static_cast<long long>(m.amount_minor % 100), m.currency.c_str());
        return buf;
    }

    std::ostream& out_;
    int offset_min_;
};

/// Posts one JSON body; returns the HTTP status, or < 0 for a transport
/// failure. Injectable so webhook delivery is testable without a server.
using HttpPoster = std::function<int(const std::string& url, const std::string& body)>;

/// POSTs each alert as application/json, retrying per the politeness policy.
/// Delivery is best effort — the journal already holds the truth, so a dead
/// webhook costs notifications, not correctness.
class WebhookSink final : public Sink {
public:
    WebhookSink(std::string url, HttpPoster poster, const PolitenessPolicy& policy,
                SteadyClock& steady, std::ostream& log, int site_utc_offset_min = 0)
        : url_(std::move(url)), poster_(std::move(poster)), policy_(policy), steady_(steady),
          log_(log), offset_min_(site_utc_offset_min) {}

    void deliver(const AlertEvent& event) override {
        const std::string body = alert_to_json(event, offset_min_).dump();
        for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
            if (attempt > 0) steady_.sleep_ms(policy_.backoff_base_ms << (attempt - 1));
            int status = poster_(url_, body);
            if (status >= 200 && status < 300) return;
        }
        log_ << "webhook delivery failed for product " << event.record.product_id << "\n";
    }

private:
    std::string url_;
    HttpPoster poster_;
    PolitenessPolicy policy_;
    SteadyClock& steady_;
    std::ostream& log_;
    int offset_min_;
};

/// Delivers events in order. Sink failures are the sink's business.
inline void emit(const std::vector<AlertEvent>& events, Sink& sink) {
    for (const auto& e : events) sink.deliver(e);
}

}  // namespace shelfwatch
