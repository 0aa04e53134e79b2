// Copyright 2026 The qlap Authors
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
/**
 * @file
 * Exception types thrown by qlap. Everything derives from qlap::Error so
 * callers can catch the family at once.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qlap {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition (maps to CLI exit code 2).
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Malformed edge-list input. `line()` is 1-based.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class SelfLoopError : public ParseError {
  public:
    explicit SelfLoopError(std::size_t line)
        : ParseError(line, "self-loop edges are not allowed") {}
};

/// The dense oracle refuses matrices above its size cap.
class CapExceeded : public Error {
  public:
    CapExceeded(std::size_t dim, std::size_t cap)
        : Error("matrix dimension " + std::to_string(dim) +
                " exceeds dense oracle cap " + std::to_string(cap) +
                "; use `qlap estimate` for quantum resource figures or raise "
                "QLAP_ORACLE_CAP"),
          dim_(dim), cap_(cap) {}
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t cap() const noexcept { return cap_; }

  private:
    std::size_t dim_;
    std::size_t cap_;
};

/// Raised when an operation needs a connected graph. Carries the component
/// count so callers can split by components first.
class DisconnectedGraph : public Error {
  public:
    explicit DisconnectedGraph(std::size_t components)
        : Error("graph has " + std::to_string(components) +
                " connected components; split by components first"),
          components_(components) {}
    [[nodiscard]] std::size_t components() const noexcept {
        return components_;
    }

  private:
    std::size_t components_;
};

/// A post-selected phase bin was not observed within the attempt budget.
class PostSelectionStarved : public Error {
  public:
    PostSelectionStarved(std::size_t bin, std::size_t attempts)
        : Error("target bin " + std::to_string(bin) +
                " not observed in " + std::to_string(attempts) +
                " attempts"),
          bin_(bin), attempts_(attempts) {}
    [[nodiscard]] std::size_t bin() const noexcept { return bin_; }
    [[nodiscard]] std::size_t attempts() const noexcept { return attempts_; }

  private:
    std::size_t bin_;
    std::size_t attempts_;
};

} // namespace qlap
