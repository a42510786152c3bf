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

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shelfwatch/alertstore.hpp"
#include "shelfwatch/config.hpp"
#include "shelfwatch/extract.hpp"
#include "shelfwatch/fetch.hpp"
#include "shelfwatch/temporal.hpp"
#include "shelfwatch/watchlist.hpp"

// The run loop: departments -> requests -> pages -> records -> watchlist
// match -> time filter -> dedup/journal -> alerts. One bad page is logged
// and skipped; the run carries on.

namespace shelfwatch {

struct RunSummary {
    int pages_requested = 0;
    int pages_fetched = 0;  // successful downloads only
    int records_extracted = 0;
    int records_matched = 0;
    int records_recent = 0;
    int events_emitted = 0;
    int cards_dropped = 0;
    // Field rules that found nothing, href shapes that needed salvaging and
    // post times that would not parse.
    int parse_misses = 0;

    bool all_pages_failed() const { return pages_requested > 0 && pages_fetched == 0; }
};

/// Everything a run needs from its host: clocks, streams and the transports
/// it is allowed to construct. Tests inject fakes here; the CLI wires the
/// real ones. The live transport only exists when the host provides the
/// factory, so a fixture run cannot touch the network by construction.
struct PipelineEnv {
    Clock& clock;
    SteadyClock& steady;
    std::ostream& data_out;
    std::ostream& log;
    Transport* transport = nullptr;  // overrides config.mode when set
    std::function<std::unique_ptr<Transport>()> live_transport_factory;
    HttpPoster poster;  // webhook delivery
};

inline nlohmann::json record_to_json(const ProductRecord& r, int site_utc_offset_min) {
    nlohmann::json j{
        {"product_id", r.product_id},
        {"name", r.name},
        {"model", r.model ? nlohmann::json(*r.model) : nlohmann::json(nullptr)},
        {"department", r.department_slug},
        {"url", r.url},
        {"image_url", r.image_url ? nlohmann::json(*r.image_url) : nlohmann::json(nullptr)},
        {"price", store_detail::money_to_json(r.price)},
        {"posted_text", r.posted_text},
        {"posted_at", r.posted_at
                          ? nlohmann::json(format_iso_offset(*r.posted_at, site_utc_offset_min))
                          : nlohmann::json(nullptr)},
        {"source_page", r.source_page},
        {"scraped_at", format_iso_utc(r.scraped_at)},
    };
    return j;
}

namespace pipeline_detail {

inline std::unique_ptr<Sink> make_sink(const RunConfig& cfg, PipelineEnv& env) {
    switch (cfg.sink.kind) {
        case SinkKind::text:
            return std::make_unique<TextSink>(env.data_out, cfg.site_clock.site_utc_offset_min);
        case SinkKind::jsonl:
            return std::make_unique<JsonlSink>(env.data_out, cfg.site_clock.site_utc_offset_min);
        case SinkKind::webhook:
            if (!env.poster) {
                throw ConfigError("sink: webhook delivery needs an HTTP poster");
            }
            return std::make_unique<WebhookSink>(cfg.sink.webhook_url, env.poster,
                                                 cfg.politeness, env.steady, env.log,
                                                 cfg.site_clock.site_utc_offset_min);
    }
    throw ConfigError("sink: unknown kind");
}

}  // namespace pipeline_detail

/// One full pass over the watchlist. Throws ConfigError for an unusable
/// config and StoreLockedError when another run holds the journal;
/// per-page trouble is only logged.
inline RunSummary run_once(const RunConfig& cfg, PipelineEnv& env) {
    if (!cfg.site_clock.valid()) throw ConfigError("site_clock: offsets out of range");
    if (cfg.window.duration_min < 0) throw ConfigError("recency_window_min: must be >= 0");
    auto base = Url::parse(cfg.base_url);
    if (!base || !base->is_absolute()) throw ConfigError("base_url: must be absolute");

    const WatchList watchlist = load_watchlist(cfg.departments_path, cfg.products_path);

    std::unique_ptr<Transport> owned_transport;
    Transport* transport = env.transport;
    if (!transport) {
        if (cfg.mode == TransportMode::fixture) {
            owned_transport = std::make_unique<FixtureTransport>(cfg.fixtures_dir);
        } else {
            if (!env.live_transport_factory) {
                throw ConfigError("transport.mode: live mode requires the --live flag");
            }
            owned_transport = env.live_transport_factory();
        }
        transport = owned_transport.get();
    }

    StoreLock lock(cfg.store_path);
    SeenStore store = SeenStore::load(cfg.store_path);

    RunSummary summary;
    std::vector<PageRequest> requests =
        build_department_urls(*base, watchlist, cfg.politeness, cfg.url_template);

    if (cfg.mode == TransportMode::live && !env.transport) {
        // Honor robots.txt in live mode; fixture replay skips this.
        Url robots_url = *base;
        robots_url.path = "/robots.txt";
        robots_url.query.clear();
        auto result = transport->get(robots_url, cfg.politeness);
        if (result.outcome == Transport::Result::Outcome::ok && result.status == 200) {
            RobotsRules rules = parse_robots_txt(result.body, cfg.politeness.user_agent);
            std::vector<PageRequest> allowed;
            for (auto& r : requests) {
                if (rules.allows(r.url.request_target())) {
                    allowed.push_back(std::move(r));
                } else {
                    env.log << "robots.txt disallows " << r.url.to_string() << "\n";
                }
            }
            requests = std::move(allowed);
        }
    }
    summary.pages_requested = static_cast<int>(requests.size());

    RateLimiter limiter(env.steady, cfg.politeness.min_delay_ms);
    std::vector<FetchOutcome> outcomes =
        fetch_all(requests, cfg.politeness, *transport, limiter, env.steady, env.clock);

    std::vector<ProductRecord> records;
    for (size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].response) {
            env.log << "page discarded: " << requests[i].url.to_string() << " ("
                    << outcomes[i].error << ")\n";
            continue;
        }
        summary.pages_fetched++;
        const PageResponse& page = *outcomes[i].response;
        html::Document doc = html::parse_html(page.body, page.declared_encoding);
        ExtractResult extracted =
            extract_records(doc, cfg.extraction, page.request.url, page.request.department,
                            env.clock);
        summary.cards_dropped += extracted.stats.cards_dropped;
        summary.parse_misses += extracted.stats.field_misses + extracted.stats.href_salvages;
        for (auto& rec : extracted.records) records.push_back(std::move(rec));
    }
    summary.records_extracted = static_cast<int>(records.size());

    std::vector<ProductRecord> matched;
    for (auto& rec : records) {
        if (matches(watchlist, rec)) matched.push_back(std::move(rec));
    }
    summary.records_matched = static_cast<int>(matched.size());

    // Post times resolve against "now" in the site's frame. A record whose
    // post time cannot be resolved passes the gate (and is counted): age
    // unknown is not evidence of staleness.
    const WallTime now_site =
        wall_from_utc(env.clock.now_utc(), cfg.site_clock.site_utc_offset_min);
    std::vector<ProductRecord> recent;
    for (auto& rec : matched) {
        if (!rec.posted_text.empty()) {
            rec.posted_at = parse_post_time(rec.posted_text, cfg.locale, now_site);
            if (!rec.posted_at) summary.parse_misses++;
        }
        if (!rec.posted_at || is_recent(*rec.posted_at, now_site, cfg.window)) {
            recent.push_back(std::move(rec));
        }
    }
    summary.records_recent = static_cast<int>(recent.size());

    std::vector<AlertEvent> events = diff_and_record(store, recent, env.clock);
    summary.events_emitted = static_cast<int>(events.size());

    auto sink = pipeline_detail::make_sink(cfg, env);
    emit(events, *sink);

    env.log << "run: pages " << summary.pages_fetched << "/" << summary.pages_requested
            << ", extracted " << summary.records_extracted << ", matched "
            << summary.records_matched << ", recent " << summary.records_recent << ", alerts "
            << summary.events_emitted << ", dropped " << summary.cards_dropped << ", misses "
            << summary.parse_misses << "\n";
    return summary;
}

/// Runs run_once every interval until keep_going says stop. A failing tick
/// is logged and the loop waits for the next one.
inline void watch_loop(const RunConfig& cfg, int interval_min, PipelineEnv& env,
                       const std::function<bool()>& keep_going,
                       const std::function<void(const RunSummary&)>& on_tick = {}) {
    if (interval_min < 1) throw ConfigError("interval: must be >= 1 minute");
    while (keep_going()) {
        try {
            RunSummary summary = run_once(cfg, env);
            if (on_tick) on_tick(summary);
        } catch (const Error& e) {
            env.log << "run failed: " << e.what() << "\n";
        }
        env.steady.sleep_ms(static_cast<int64_t>(interval_min) * 60000);
    }
}

/// Parse + extract only, for rule debugging: no store, no network, no
/// filtering. Records go out as JSON lines.
inline std::vector<ProductRecord> extract_file(const std::filesystem::path& html_path,
                                               const RunConfig& cfg, Clock& clock) {
    std::ifstream in(html_path, std::ios::binary);
    if (!in) throw FileMissingError("cannot open " + html_path.string());
    std::ostringstream body;
    body << in.rdbuf();
    html::Document doc = html::parse_html(body.str());
    Url page_url;
    if (auto base = Url::parse(cfg.base_url); base && base->is_absolute()) {
        page_url = *base;
    } else {
        page_url = *Url::parse("file:///" + html_path.filename().string());
        page_url.host = "local";
        page_url.has_authority = true;
    }
    DepartmentEntry no_department{"", std::nullopt};
    return extract_records(doc, cfg.extraction, page_url, no_department, clock).records;
}

}  // namespace shelfwatch
