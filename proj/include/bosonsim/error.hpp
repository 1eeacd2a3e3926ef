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

#include <stdexcept>
#include <string>

namespace bosonsim {

/// Bad input: out-of-range index, wrong shape, parameter outside its domain.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Inputs are well formed but outside the regime the method covers (e.g. N > M).
struct UnsupportedRegime : std::domain_error {
    using std::domain_error::domain_error;
};

/// Exhaustive oracle or enumeration refused because the problem is too large.
struct TooLarge : std::length_error {
    using std::length_error::length_error;
};

namespace detail {

inline void require(bool condition, const std::string &message) {
    if (!condition) {
        throw InvalidArgument(message);
    }
}

}  // namespace detail

}  // namespace bosonsim
