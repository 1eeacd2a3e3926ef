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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bosonsim/error.hpp"

namespace bosonsim {

/// One move of a mixed-radix Gray enumeration: coordinate `position` takes
/// digit `new_value` (an index into that coordinate's roots of unity).
struct GrayStep {
    std::size_t position;
    std::size_t new_value;

    bool operator==(const GrayStep &) const = default;
};

/// Loopless reflected mixed-radix Gray code (Knuth, TAOCP 7.2.1.1, Alg. H).
///
/// Starts from the all-zero tuple. Each call to next() moves exactly one
/// coordinate by +-1 and reports it; after prod(moduli) - 1 moves it returns
/// nullopt. Coordinate 0 changes fastest. Coordinates with modulus 1 never move.
class MixedRadixGray {
  public:
    explicit MixedRadixGray(std::span<const std::size_t> moduli)
        : digits_(moduli.size(), 0) {
        for (std::size_t i = 0; i < moduli.size(); ++i) {
            detail::require(moduli[i] >= 1, "gray code moduli must be at least 1");
            if (moduli[i] >= 2) {
                active_.push_back(i);
                radix_.push_back(moduli[i]);
            }
        }
        const std::size_t n = active_.size();
        direction_.assign(n, 1);
        focus_.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            focus_[j] = j;
        }
    }

    std::optional<GrayStep> next() {
        const std::size_t n = active_.size();
        const std::size_t j = focus_[0];
        focus_[0] = 0;
        if (j == n) {
            return std::nullopt;
        }
        const std::size_t coord = active_[j];
        digits_[coord] = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(digits_[coord]) + direction_[j]);
        if (digits_[coord] == 0 || digits_[coord] == radix_[j] - 1) {
            direction_[j] = -direction_[j];
            focus_[j] = focus_[j + 1];
            focus_[j + 1] = j + 1;
        }
        return GrayStep{coord, digits_[coord]};
    }

    /// Current tuple, indexed like the moduli passed to the constructor.
    std::span<const std::size_t> digits() const { return digits_; }

  private:
    std::vector<std::size_t> digits_;
    std::vector<std::size_t> active_;
    std::vector<std::size_t> radix_;
    std::vector<int> direction_;
    std::vector<std::size_t> focus_;
};

/// All steps of the enumeration; an empty moduli list gives an empty sequence.
inline std::vector<GrayStep> mixed_radix_gray(std::span<const std::size_t> moduli) {
    MixedRadixGray gray(moduli);
    std::vector<GrayStep> steps;
    while (auto step = gray.next()) {
        steps.push_back(*step);
    }
    return steps;
}

}  // namespace bosonsim
