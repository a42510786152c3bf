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

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shelfwatch/config.hpp"
#include "shelfwatch/corpus.hpp"
#include "shelfwatch/live_transport.hpp"
#include "shelfwatch/pipeline.hpp"
#include "shelfwatch/version.hpp"

// Exit codes: 0 success, 1 run-level failure (every page failed),
// 2 usage or configuration error.

namespace {

using namespace shelfwatch;

volatile std::sig_atomic_t g_interrupted = 0;

void handle_interrupt(int) { g_interrupted = 1; }

/// Real steady clock whose sleeps wake early on SIGINT/SIGTERM, so the
/// watch loop shuts down promptly and releases its lock.
class InterruptibleSteadyClock final : public SteadyClock {
public:
    int64_t now_ms() override { return inner_.now_ms(); }
    void sleep_ms(int64_t ms) override {
        while (ms > 0 && !g_interrupted) {
            int64_t slice = std::min<int64_t>(ms, 200);
            inner_.sleep_ms(slice);
            ms -= slice;
        }
    }

private:
    SystemSteadyClock inner_;
};

struct CommonFlags {
    std::string config_path;
    std::string departments_path;
    std::string products_path;
    std::string fixtures_dir;
    std::string store_path;
    std::string sink_spec;
    std::string now_override;  // ISO-8601 UTC, for reproducible runs
    int window_min = -1;
    bool live = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path,
                    "Run configuration file (JSON); defaults to $SHELFWATCH_CONFIG");
    cmd->add_option("--departments", flags.departments_path, "Departments watch file");
    cmd->add_option("--products", flags.products_path, "Product name watch file");
    cmd->add_option("--fixtures", flags.fixtures_dir, "Fixture corpus directory");
    cmd->add_option("--store", flags.store_path, "Dedup journal path");
    cmd->add_option("--sink", flags.sink_spec, "Alert sink: text, jsonl or webhook:URL");
    cmd->add_option("--window", flags.window_min, "Recency window in minutes");
    cmd->add_option("--now", flags.now_override,
                    "Fix the clock to an ISO-8601 UTC instant (reproducible runs)");
    cmd->add_flag("--live", flags.live, "Allow real network fetching");
}

/// Builds the effective config: file (flag or env), then flag overrides.
/// Returns nullopt after printing diagnostics.
std::optional<RunConfig> resolve_config(const CommonFlags& flags, bool need_watchlist) {
    std::vector<std::string> diags;
    RunConfig cfg;
    std::string path = flags.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("SHELFWATCH_CONFIG")) path = env;
    }
    if (!path.empty()) {
        cfg = load_config_file(path, diags);
    } else {
        cfg.extraction = default_rule_set();
        cfg.base_url = "https://example.test";
    }
    if (!flags.departments_path.empty()) cfg.departments_path = flags.departments_path;
    if (!flags.products_path.empty()) cfg.products_path = flags.products_path;
    if (!flags.fixtures_dir.empty()) {
        cfg.fixtures_dir = flags.fixtures_dir;
        cfg.mode = TransportMode::fixture;
    }
    if (!flags.store_path.empty()) cfg.store_path = flags.store_path;
    if (flags.window_min >= 0) cfg.window.duration_min = flags.window_min;
    if (!flags.sink_spec.empty()) {
        auto sink = SinkSpec::parse(flags.sink_spec);
        if (!sink) {
            diags.push_back("sink: expected text, jsonl or webhook:URL");
        } else {
            cfg.sink = *sink;
        }
    }
    if (flags.live) cfg.mode = TransportMode::live;

    if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << "config error: " << d << "\n";
        return std::nullopt;
    }
    if (need_watchlist) {
        for (const auto& d : validate_config(cfg)) diags.push_back(d);
        if (cfg.mode == TransportMode::live && !flags.live) {
            diags.push_back("transport.mode: live mode requires the --live flag");
        }
        if (!diags.empty()) {
            for (const auto& d : diags) std::cerr << "config error: " << d << "\n";
            return std::nullopt;
        }
    }
    return cfg;
}

std::unique_ptr<Clock> make_clock(const CommonFlags& flags, bool& ok) {
    ok = true;
    if (flags.now_override.empty()) return std::make_unique<SystemClock>();
    auto t = parse_iso_utc(flags.now_override);
    if (!t) {
        std::cerr << "config error: --now must be ISO-8601 UTC, e.g. 2021-06-15T15:00:00Z\n";
        ok = false;
        return nullptr;
    }
    return std::make_unique<ManualClock>(*t);
}

PipelineEnv make_env(Clock& clock, SteadyClock& steady, const RunConfig& cfg, bool live) {
    PipelineEnv env{clock, steady, std::cout, std::cerr, nullptr, nullptr, nullptr};
    if (live) {
        env.live_transport_factory = [] { return std::make_unique<LiveTransport>(); };
        if (cfg.sink.kind == SinkKind::webhook) {
            env.poster = live_webhook_poster(cfg.politeness);
        }
    }
    return env;
}

int cmd_run(const CommonFlags& flags) {
    auto cfg = resolve_config(flags, true);
    if (!cfg) return 2;
    bool clock_ok = false;
    auto clock = make_clock(flags, clock_ok);
    if (!clock_ok) return 2;
    InterruptibleSteadyClock steady;
    PipelineEnv env = make_env(*clock, steady, *cfg, flags.live);
    try {
        RunSummary summary = run_once(*cfg, env);
        return summary.all_pages_failed() ? 1 : 0;
    } catch (const StoreLockedError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_watch(const CommonFlags& flags, int interval_min) {
    if (interval_min < 1) {
        std::cerr << "config error: --interval must be >= 1\n";
        return 2;
    }
    auto cfg = resolve_config(flags, true);
    if (!cfg) return 2;
    bool clock_ok = false;
    auto clock = make_clock(flags, clock_ok);
    if (!clock_ok) return 2;
    InterruptibleSteadyClock steady;
    PipelineEnv env = make_env(*clock, steady, *cfg, flags.live);
    std::signal(SIGINT, handle_interrupt);
    std::signal(SIGTERM, handle_interrupt);
    try {
        watch_loop(*cfg, interval_min, env, [] { return g_interrupted == 0; });
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    std::cerr << "interrupted, shutting down\n";
    return 0;
}

int cmd_extract(const CommonFlags& flags, const std::string& html_path) {
    auto cfg = resolve_config(flags, false);
    if (!cfg) return 2;
    bool clock_ok = false;
    auto clock = make_clock(flags, clock_ok);
    if (!clock_ok) return 2;
    try {
        auto records = extract_file(html_path, *cfg, *clock);
        for (const auto& r : records) {
            std::cout << record_to_json(r, cfg->site_clock.site_utc_offset_min).dump() << "\n";
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_validate_config(const CommonFlags& flags) {
    std::string path = flags.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("SHELFWATCH_CONFIG")) path = env;
    }
    if (path.empty()) {
        std::cerr << "config error: --config (or SHELFWATCH_CONFIG) is required\n";
        return 2;
    }
    std::vector<std::string> diags;
    RunConfig cfg = load_config_file(path, diags);
    if (diags.empty()) {
        for (const auto& d : validate_config(cfg)) diags.push_back(d);
    }
    if (diags.empty()) {
        std::cout << "ok: " << path << "\n";
        return 0;
    }
    for (const auto& d : diags) std::cerr << d << "\n";
    return 2;
}

int cmd_corpus_record(const CommonFlags& flags, const std::vector<std::string>& urls,
                      const std::string& out_dir) {
    if (!flags.live) {
        std::cerr << "config error: corpus record fetches the network; pass --live\n";
        return 2;
    }
    auto cfg = resolve_config(flags, false);
    if (!cfg) return 2;
    SystemClock clock;
    InterruptibleSteadyClock steady;
    LiveTransport transport;
    try {
        FixtureManifest manifest = record_corpus(urls, transport, cfg->politeness, steady, clock,
                                                 out_dir, std::cerr);
        std::cerr << "recorded " << manifest.entries.size() << "/" << urls.size() << " pages\n";
        return manifest.entries.size() == urls.size() ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_corpus_synthesize(const std::string& spec_path, const std::string& out_dir) {
    std::ifstream in(spec_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open spec " << spec_path << "\n";
        return 2;
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        std::cerr << "spec is not valid JSON: " << spec_path << "\n";
        return 2;
    }
    CorpusSpec spec;
    try {
        if (j.contains("base_url")) spec.base_url = j.at("base_url").get<std::string>();
        if (j.contains("department")) spec.department = j.at("department").get<std::string>();
        if (j.contains("url_template")) {
            spec.url_template = j.at("url_template").get<std::string>();
        }
        if (j.contains("cards_per_page")) spec.cards_per_page = j.at("cards_per_page").get<int>();
        if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
        spec.names = j.at("names").get<std::vector<std::string>>();
        spec.prices = j.at("prices").get<std::vector<std::string>>();
        spec.post_times = j.at("post_times").get<std::vector<std::string>>();
        spec.n_cards = j.contains("n_cards") ? j.at("n_cards").get<int>()
                                             : static_cast<int>(spec.names.size());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    }
    try {
        FixtureManifest manifest = synthesize_corpus(spec, out_dir);
        std::cerr << "wrote " << manifest.entries.size() << " pages to " << out_dir << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_corpus_validate(const std::string& dir) {
    auto problems = validate_corpus(dir);
    if (problems.empty()) {
        std::cout << "ok: " << dir << "\n";
        return 0;
    }
    for (const auto& p : problems) std::cerr << p << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Product update alerts for e-commerce listing pages"};
    app.set_version_flag("--version", SHELFWATCH_VERSION);
    app.require_subcommand(1);

    CommonFlags flags;
    int interval_min = 0;
    std::string html_path, spec_path, out_dir, corpus_dir;
    std::vector<std::string> urls;

    CLI::App* run = app.add_subcommand("run", "Crawl once and emit alerts");
    add_common_flags(run, flags);

    CLI::App* watch = app.add_subcommand("watch", "Crawl repeatedly on an interval");
    add_common_flags(watch, flags);
    watch->add_option("--interval", interval_min, "Minutes between runs")->required();

    CLI::App* extract = app.add_subcommand("extract", "Extract records from one HTML file");
    add_common_flags(extract, flags);
    extract->add_option("file", html_path, "HTML file to extract")->required();

    CLI::App* validate = app.add_subcommand("validate-config", "Check a config file");
    add_common_flags(validate, flags);

    CLI::App* corpus = app.add_subcommand("corpus", "Fixture corpus utilities");
    corpus->require_subcommand(1);
    CLI::App* record = corpus->add_subcommand("record", "Fetch URLs into a corpus");
    add_common_flags(record, flags);
    record->add_option("--out", out_dir, "Corpus output directory")->required();
    record->add_option("urls", urls, "URLs to record")->required();
    CLI::App* synth = corpus->add_subcommand("synthesize", "Generate a corpus from a spec");
    synth->add_option("--spec", spec_path, "Corpus spec (JSON)")->required();
    synth->add_option("--out", out_dir, "Corpus output directory")->required();
    CLI::App* check = corpus->add_subcommand("validate", "Check corpus closure");
    check->add_option("dir", corpus_dir, "Corpus directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (*run) return cmd_run(flags);
    if (*watch) return cmd_watch(flags, interval_min);
    if (*extract) return cmd_extract(flags, html_path);
    if (*validate) return cmd_validate_config(flags);
    if (*record) return cmd_corpus_record(flags, urls, out_dir);
    if (*synth) return cmd_corpus_synthesize(spec_path, out_dir);
    if (*check) return cmd_corpus_validate(corpus_dir);
    return 2;
}
