// Copyright 2026 The bosonsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace bosonsim {

using Rng = std::mt19937_64;

namespace detail {

constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Seed of the independent stream `stream` under `master`. Streams with
/// different indices (or masters) are decorrelated by two splitmix rounds.
constexpr uint64_t derive_seed(uint64_t master, uint64_t stream) {
    return detail::splitmix64(detail::splitmix64(master) ^ detail::splitmix64(~stream));
}

inline Rng make_rng(uint64_t master, uint64_t stream = 0) {
    return Rng(derive_seed(master, stream));
}

}  // namespace bosonsim
