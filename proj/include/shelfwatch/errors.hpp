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

#include <stdexcept>
#include <string>

namespace shelfwatch {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FileMissingError : public Error {
public:
    using Error::Error;
};

/// A text input line violated its format. Carries a 1-based line number.
class MalformedLineError : public Error {
public:
    MalformedLineError(const std::string& what, int line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class InvalidBaseUrlError : public Error {
public:
    using Error::Error;
};

class UnresolvableHrefError : public Error {
public:
    using Error::Error;
};

/// All retries for one page were used up. Keeps the last cause.
class FetchExhaustedError : public Error {
public:
    using Error::Error;
};

/// A response that retrying cannot fix (4xx other than 429).
class NonRetryableError : public Error {
public:
    using Error::Error;
};

class ManifestMissingError : public Error {
public:
    using Error::Error;
};

class ManifestMalformedError : public Error {
public:
    using Error::Error;
};

class JournalCorruptError : public Error {
public:
    JournalCorruptError(const std::string& what, int line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class StoreWriteFailedError : public Error {
public:
    using Error::Error;
};

class StoreLockedError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SpecInvalidError : public Error {
public:
    using Error::Error;
};

}  // namespace shelfwatch
