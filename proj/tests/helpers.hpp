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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "shelfwatch/fetch.hpp"

namespace shelfwatch::testing {

/// Self-cleaning unique directory under the system temp root.
class TempDir {
public:
    TempDir() {
        static std::atomic<uint64_t> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path_ = base / ("shelfwatch-test-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, std::string_view content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

/// Transport that plays back a scripted list of results and records every
/// request (URL and dispatch time when a clock is attached).
class ScriptedTransport final : public Transport {
public:
    using Result = Transport::Result;

    explicit ScriptedTransport(std::vector<Result> script, SteadyClock* clock = nullptr)
        : script_(std::move(script)), clock_(clock) {}

    static Result ok(std::string body, int status = 200) {
        return {Result::Outcome::ok, status, std::move(body), std::nullopt};
    }
    static Result status(int code) { return {Result::Outcome::ok, code, {}, std::nullopt}; }
    static Result timeout() { return {Result::Outcome::timeout, 0, {}, std::nullopt}; }
    static Result connection_error() {
        return {Result::Outcome::connection_error, 0, {}, std::nullopt};
    }

    Result get(const Url& url, const PolitenessPolicy&) override {
        std::lock_guard lock(m_);
        urls.push_back(url.to_string());
        if (clock_) dispatch_times_ms.push_back(clock_->now_ms());
        if (calls < script_.size()) return script_[calls++];
        ++calls;
        return script_.empty() ? status(404) : script_.back();
    }

    size_t calls = 0;
    std::vector<std::string> urls;
    std::vector<int64_t> dispatch_times_ms;

private:
    std::vector<Result> script_;
    SteadyClock* clock_;
    std::mutex m_;
};

inline Url url_of(const std::string& s) { return *Url::parse(s); }

}  // namespace shelfwatch::testing
