// Copyright 2026 The omas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OMAS_RANDOM_HPP
#define OMAS_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

#include "omas/error.hpp"

namespace omas {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Deterministic random source.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// converts to reals and bounded integers by hand: the std distributions are
/// implementation-defined and would break cross-platform replay.
///
/// Streams are derived from a root seed by name and index:
///   seed(root, name, index) = splitmix64(splitmix64(root ^ fnv1a(name)) + index)
/// so that e.g. the churn stream of trial 17 never depends on how many draws
/// the topology stream consumed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t root, std::string_view name,
                             std::uint64_t index = 0) {
    const std::uint64_t base = detail::splitmix64(root ^ detail::fnv1a(name));
    return RandomStream(detail::splitmix64(base + index));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1): exact zeros are redrawn so logarithms stay finite.
  double uniform_open() {
    for (;;) {
      const double v = uniform();
      if (v > 0.0) return v;
    }
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw Error("RandomStream::below: bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      const std::uint64_t v = engine_();
      if (v < limit) return v % bound;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace omas

#endif  // OMAS_RANDOM_HPP
