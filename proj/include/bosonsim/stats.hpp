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
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "bosonsim/error.hpp"

namespace bosonsim {

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Pearson goodness of fit of `observed` counts against `probabilities`.
/// Bins whose expected count is below `min_expected` are pooled; a pool that
/// is still too small is folded into the smallest regular bin.
inline ChiSquareResult chi_square_gof(std::span<const uint64_t> observed, std::span<const double> probabilities,
                                      double min_expected = 5.0) {
    detail::require(observed.size() == probabilities.size(), "chi_square_gof: bin count mismatch");
    const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), uint64_t{0}));
    detail::require(total > 0.0, "chi_square_gof: no observations");
    const double mass = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);

    struct Bin {
        double observed;
        double expected;
    };
    std::vector<Bin> bins;
    Bin pool{0.0, 0.0};
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = total * probabilities[i] / mass;
        const double o = static_cast<double>(observed[i]);
        if (e < min_expected) {
            pool.observed += o;
            pool.expected += e;
        } else {
            bins.push_back({o, e});
        }
    }
    if (pool.expected >= min_expected) {
        bins.push_back(pool);
    } else if (pool.observed > 0.0 || pool.expected > 0.0) {
        if (bins.empty()) {
            bins.push_back(pool);
        } else {
            auto smallest = std::min_element(bins.begin(), bins.end(),
                                             [](const Bin &a, const Bin &b) { return a.expected < b.expected; });
            smallest->observed += pool.observed;
            smallest->expected += pool.expected;
        }
    }
    ChiSquareResult out;
    for (const Bin &b : bins) {
        const double d = b.observed - b.expected;
        out.statistic += d * d / b.expected;
    }
    if (bins.size() < 2) {
        return out;
    }
    out.dof = bins.size() - 1;
    out.p_value = boost::math::gamma_q(0.5 * static_cast<double>(out.dof), 0.5 * out.statistic);
    return out;
}

/// 1/2 sum |p - q| over the union of supports.
template <typename Key>
double total_variation(const std::map<Key, double> &p, const std::map<Key, double> &q) {
    double sum = 0.0;
    for (const auto &[k, v] : p) {
        auto it = q.find(k);
        sum += std::abs(v - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto &[k, v] : q) {
        if (!p.contains(k)) {
            sum += std::abs(v);
        }
    }
    return 0.5 * sum;
}

}  // namespace bosonsim
