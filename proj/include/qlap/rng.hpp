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
 * Counter-based random streams keyed by (seed, stream_id).
 *
 * Draw k of a stream is a pure function of (seed, stream_id, k), so shot
 * loops can hand each shot its own child stream and still aggregate
 * identically regardless of execution order or thread count. The mixing
 * function is the SplitMix64 finalizer; floating-point conversions are
 * written out here instead of using <random> distributions, whose output is
 * implementation-defined.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qlap {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
}

} // namespace detail

class RngStream {
  public:
    constexpr explicit RngStream(std::uint64_t seed,
                                 std::uint64_t stream_id = 0) noexcept
        : seed_(seed), stream_id_(stream_id),
          key_(detail::mix64(seed ^ detail::mix64(stream_id +
                                                   0x632BE59BD9B4E019ULL))) {}

    [[nodiscard]] constexpr std::uint64_t seed() const noexcept {
        return seed_;
    }
    [[nodiscard]] constexpr std::uint64_t stream_id() const noexcept {
        return stream_id_;
    }
    [[nodiscard]] constexpr std::uint64_t counter() const noexcept {
        return counter_;
    }

    /// Child stream `index`; independent of how many draws this stream made.
    [[nodiscard]] constexpr RngStream split(std::uint64_t index) const noexcept {
        return RngStream(seed_, detail::mix64(stream_id_ * detail::kGolden +
                                              detail::mix64(index + 1)));
    }

    constexpr std::uint64_t next_u64() noexcept {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::kGolden);
    }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11U) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (one value per call, two draws).
    double normal() noexcept {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, bound). bound must be > 0.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        // Lemire-style rejection keeps the result unbiased.
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace qlap
