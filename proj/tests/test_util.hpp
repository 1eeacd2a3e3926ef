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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "bosonsim/matrix.hpp"
#include "bosonsim/rng.hpp"

namespace bosonsim::testutil {

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, Rng &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double re = g(rng);
            const double im = g(rng);
            a(i, j) = Complex(re, im);
        }
    }
    return a;
}

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, uint64_t seed) {
    Rng rng = make_rng(seed);
    return random_matrix(rows, cols, rng);
}

inline double relative_error(Complex got, Complex want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Integer compositions of n (ordered lists of positive parts summing to n).
inline std::vector<std::vector<std::size_t>> compositions(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    if (n == 0) {
        return out;
    }
    // bit i of mask set => cut after position i
    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
        std::vector<std::size_t> parts;
        std::size_t run = 1;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (mask & (1u << i)) {
                parts.push_back(run);
                run = 1;
            } else {
                ++run;
            }
        }
        parts.push_back(run);
        out.push_back(std::move(parts));
    }
    return out;
}

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value.
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    if (lambda < 0.2) {
        return 1.0;
    }
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace bosonsim::testutil
