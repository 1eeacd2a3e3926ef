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
#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bosonsim/error.hpp"
#include "bosonsim/exact.hpp"
#include "bosonsim/gray_code.hpp"
#include "bosonsim/matrix.hpp"

namespace bosonsim {

/// Bosons per output port, m = (m_1, ..., m_M).
struct OutputConfiguration {
    std::vector<std::size_t> occupations;

    std::size_t modes() const { return occupations.size(); }
    std::size_t bosons() const { return std::accumulate(occupations.begin(), occupations.end(), std::size_t{0}); }

    std::size_t occupied_count() const {
        return static_cast<std::size_t>(
            std::count_if(occupations.begin(), occupations.end(), [](std::size_t m) { return m > 0; }));
    }

    /// Indices of occupied ports, ascending.
    std::vector<std::size_t> occupied_ports() const {
        std::vector<std::size_t> ports;
        for (std::size_t l = 0; l < occupations.size(); ++l) {
            if (occupations[l] > 0) {
                ports.push_back(l);
            }
        }
        return ports;
    }

    /// Multiplicities of the occupied ports, in the order of occupied_ports().
    std::vector<std::size_t> multiplicities() const {
        std::vector<std::size_t> out;
        for (std::size_t m : occupations) {
            if (m > 0) {
                out.push_back(m);
            }
        }
        return out;
    }

    /// Sorted port multiset l_1 <= ... <= l_N.
    std::vector<std::size_t> port_multiset() const {
        std::vector<std::size_t> ports;
        for (std::size_t l = 0; l < occupations.size(); ++l) {
            ports.insert(ports.end(), occupations[l], l);
        }
        return ports;
    }

    static OutputConfiguration from_ports(std::span<const std::size_t> ports, std::size_t modes) {
        OutputConfiguration m{std::vector<std::size_t>(modes, 0)};
        for (std::size_t l : ports) {
            detail::require(l < modes, "port index out of range");
            ++m.occupations[l];
        }
        return m;
    }

    auto operator<=>(const OutputConfiguration &) const = default;
};

namespace detail {

inline void require_square(const ComplexMatrix &a, const char *who) {
    if (!a.is_square()) {
        throw InvalidArgument(std::string(who) + ": matrix must be square");
    }
}

inline double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) {
        f *= static_cast<double>(i);
    }
    return f;
}

inline Complex product(std::span<const Complex> values) {
    Complex p(1.0, 0.0);
    for (const Complex &v : values) {
        p *= v;
    }
    return p;
}

/// Roots of unity exp(2 pi i t / order), t = 0..order-1.
inline std::vector<Complex> roots_of_unity(std::size_t order) {
    std::vector<Complex> roots(order);
    roots[0] = Complex(1.0, 0.0);
    for (std::size_t t = 1; t < order; ++t) {
        roots[t] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(order));
    }
    return roots;
}

/// Column whose auxiliary variable is pinned to 1: smallest multiplicity,
/// lowest index on ties.
inline std::size_t pinned_column(std::span<const std::size_t> multiplicities) {
    return static_cast<std::size_t>(
        std::min_element(multiplicities.begin(), multiplicities.end()) - multiplicities.begin());
}

struct ExpansionResult {
    Complex value;  // standard permanent of the column-expanded matrix
    uint64_t gray_steps = 0;
};

/// Roots-of-unity expansion of the permanent of the N x N matrix obtained by
/// repeating column j of `a` multiplicities[j] times. The N row sums are
/// updated in O(N) per Gray step. With `pin` set, that column's variable is
/// fixed to 1 and dropped from the enumeration.
inline ExpansionResult roots_of_unity_expansion(const ComplexMatrix &a, std::span<const std::size_t> multiplicities,
                                                std::optional<std::size_t> pin) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    if (multiplicities.empty()) {
        throw InvalidArgument("permanent_repeated: empty multiplicity list");
    }
    if (multiplicities.size() != cols) {
        throw InvalidArgument("permanent_repeated: one multiplicity per column required");
    }
    std::size_t total = 0;
    for (std::size_t m : multiplicities) {
        if (m == 0) {
            throw InvalidArgument("permanent_repeated: multiplicities must be at least 1");
        }
        total += m;
    }
    if (total != rows) {
        throw InvalidArgument("permanent_repeated: multiplicities must sum to the row count");
    }

    std::vector<std::size_t> free_cols;
    std::vector<std::size_t> moduli;
    std::vector<std::vector<Complex>> roots(cols);
    double normalisation = 1.0;
    uint64_t expected_states = 1;
    for (std::size_t c = 0; c < cols; ++c) {
        if (pin && *pin == c) {
            continue;
        }
        free_cols.push_back(c);
        moduli.push_back(multiplicities[c] + 1);
        roots[c] = roots_of_unity(multiplicities[c] + 1);
        normalisation *= static_cast<double>(multiplicities[c] + 1);
        expected_states *= multiplicities[c] + 1;
    }

    std::vector<Complex> row_sums(rows, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < rows; ++k) {
        for (std::size_t c = 0; c < cols; ++c) {
            row_sums[k] += a(k, c);
        }
    }
    std::vector<std::size_t> digit(cols, 0);
    Complex coefficient(1.0, 0.0);
    Complex acc = product(row_sums);

    MixedRadixGray gray(moduli);
    uint64_t steps = 0;
    while (auto step = gray.next()) {
        const std::size_t c = free_cols[step->position];
        const std::vector<Complex> &w = roots[c];
        const Complex delta = w[step->new_value] - w[digit[c]];
        coefficient *= w[step->new_value] * std::conj(w[digit[c]]);
        digit[c] = step->new_value;
        for (std::size_t k = 0; k < rows; ++k) {
            row_sums[k] += delta * a(k, c);
        }
        acc += coefficient * product(row_sums);
        ++steps;
    }
    if (steps + 1 != expected_states) {
        throw std::logic_error("roots_of_unity_expansion: Gray step count drifted from the cost model");
    }

    double factorials = 1.0;
    for (std::size_t m : multiplicities) {
        factorials *= factorial(m);
    }
    return {acc * (factorials / normalisation), steps};
}

}  // namespace detail

/// Sum over all N! permutations. Oracle only: refuses N > 10.
inline Complex permanent_naive(const ComplexMatrix &a) {
    detail::require_square(a, "permanent_naive");
    const std::size_t n = a.rows();
    if (n > 10) {
        throw TooLarge("permanent_naive: dimension above 10 is outside oracle scale");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Complex total(0.0, 0.0);
    do {
        Complex term(1.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            term *= a(i, perm[i]);
        }
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

/// Glynn's formula with +-1 variables in binary-reflected Gray order.
inline Complex permanent_glynn(const ComplexMatrix &a) {
    detail::require_square(a, "permanent_glynn");
    const std::size_t n = a.rows();
    if (n > 40) {
        throw TooLarge("permanent_glynn: dimension above 40 is infeasible");
    }
    std::vector<Complex> col_sums(n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            col_sums[j] += a(i, j);
        }
    }
    std::vector<int> sign(n, 1);
    int parity = 1;
    Complex acc = detail::product(col_sums);
    const uint64_t states = uint64_t{1} << (n - 1);
    for (uint64_t t = 1; t < states; ++t) {
        const std::size_t i = static_cast<std::size_t>(std::countr_zero(t)) + 1;
        const double flip = -2.0 * sign[i];
        sign[i] = -sign[i];
        parity = -parity;
        for (std::size_t j = 0; j < n; ++j) {
            col_sums[j] += flip * a(i, j);
        }
        acc += static_cast<double>(parity) * detail::product(col_sums);
    }
    return acc / static_cast<double>(states);
}

/// Ryser's inclusion-exclusion formula over column subsets in Gray order.
inline Complex permanent_ryser(const ComplexMatrix &a) {
    detail::require_square(a, "permanent_ryser");
    const std::size_t n = a.rows();
    if (n > 40) {
        throw TooLarge("permanent_ryser: dimension above 40 is infeasible");
    }
    std::vector<Complex> row_sums(n, Complex(0.0, 0.0));
    std::vector<bool> in_subset(n, false);
    std::size_t subset_size = 0;
    Complex acc(0.0, 0.0);
    const uint64_t subsets = uint64_t{1} << n;
    for (uint64_t t = 1; t < subsets; ++t) {
        const std::size_t j = static_cast<std::size_t>(std::countr_zero(t));
        const double s = in_subset[j] ? -1.0 : 1.0;
        in_subset[j] = !in_subset[j];
        subset_size = in_subset[j] ? subset_size + 1 : subset_size - 1;
        for (std::size_t i = 0; i < n; ++i) {
            row_sums[i] += s * a(i, j);
        }
        const Complex p = detail::product(row_sums);
        acc += ((n - subset_size) % 2 == 0) ? p : -p;
    }
    return acc;
}

/// Permanent of the N x N matrix formed by repeating column j of `rows`
/// multiplicities[j] times, via the reduced roots-of-unity expansion: the
/// variable of a minimal-multiplicity column is pinned, leaving
/// prod(m_j + 1) / min(m_j + 1) Gray states.
inline Complex permanent_repeated(const ComplexMatrix &rows, std::span<const std::size_t> multiplicities) {
    if (multiplicities.empty()) {
        throw InvalidArgument("permanent_repeated: empty multiplicity list");
    }
    return detail::roots_of_unity_expansion(rows, multiplicities, detail::pinned_column(multiplicities)).value;
}

/// Same permanent through the full expansion, every column's variable summed.
inline Complex permanent_repeated_full(const ComplexMatrix &rows, std::span<const std::size_t> multiplicities) {
    return detail::roots_of_unity_expansion(rows, multiplicities, std::nullopt).value;
}

/// Gray steps the reduced expansion takes: prod(m_j + 1) / min(m_j + 1) - 1.
inline uint64_t reduced_gray_steps(std::span<const std::size_t> multiplicities) {
    if (multiplicities.empty()) {
        return 0;
    }
    uint64_t prod = 1;
    for (std::size_t m : multiplicities) {
        prod *= m + 1;
    }
    return prod / (*std::min_element(multiplicities.begin(), multiplicities.end()) + 1) - 1;
}

/// Column-expanded N x N matrix (column j repeated multiplicities[j] times).
inline ComplexMatrix expand_columns(const ComplexMatrix &rows, std::span<const std::size_t> multiplicities) {
    detail::require(multiplicities.size() == rows.cols(), "expand_columns: one multiplicity per column");
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < multiplicities.size(); ++j) {
        cols.insert(cols.end(), multiplicities[j], j);
    }
    std::vector<std::size_t> all_rows(rows.rows());
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
    return submatrix(rows, all_rows, cols);
}

/// Operation count N * prod(m_l + 1) / min(m_l + 1) over occupied ports, exact.
struct CostEstimate {
    BigInt op_units;
    BigInt occupation_product;  // prod over occupied ports of (m_l + 1)
    BigInt min_factor;          // min over occupied ports of (m_l + 1)
    std::size_t bosons = 0;

    double log2_op_units() const {
        return std::log2(op_units.convert_to<double>());
    }
};

namespace detail {

struct ProductRatio {
    BigInt product;
    BigInt min_factor;
};

inline ProductRatio occupation_ratio(std::span<const std::size_t> counts) {
    ProductRatio r{1, 0};
    for (std::size_t m : counts) {
        if (m == 0) {
            continue;
        }
        r.product *= m + 1;
        if (r.min_factor == 0 || BigInt(m + 1) < r.min_factor) {
            r.min_factor = m + 1;
        }
    }
    return r;
}

}  // namespace detail

inline CostEstimate cost_estimate(const OutputConfiguration &m) {
    const std::size_t n = m.bosons();
    if (n == 0) {
        throw InvalidArgument("cost_estimate: configuration holds no bosons");
    }
    auto ratio = detail::occupation_ratio(m.occupations);
    CostEstimate out;
    out.bosons = n;
    out.op_units = BigInt(n) * ratio.product / ratio.min_factor;
    out.occupation_product = std::move(ratio.product);
    out.min_factor = std::move(ratio.min_factor);
    return out;
}

/// Cheaper of the row-based (input occupations s) and column-based (output
/// occupations m) expansions.
inline CostEstimate cost_estimate_fock(std::span<const std::size_t> input_occupations, const OutputConfiguration &m) {
    const std::size_t n = m.bosons();
    const std::size_t s_total = std::accumulate(input_occupations.begin(), input_occupations.end(), std::size_t{0});
    if (s_total != n) {
        throw InvalidArgument("cost_estimate_fock: input and output boson counts differ");
    }
    if (n == 0) {
        throw InvalidArgument("cost_estimate_fock: configuration holds no bosons");
    }
    auto in = detail::occupation_ratio(input_occupations);
    auto out = detail::occupation_ratio(m.occupations);
    // compare p_in/min_in against p_out/min_out without division
    const bool input_side = in.product * out.min_factor <= out.product * in.min_factor;
    auto &best = input_side ? in : out;
    CostEstimate est;
    est.bosons = n;
    est.op_units = BigInt(n) * best.product / best.min_factor;
    est.occupation_product = std::move(best.product);
    est.min_factor = std::move(best.min_factor);
    return est;
}

/// |per(U[inputs | l_1..l_N])|^2 / prod(m_l!).
inline double output_probability(const UnitaryMatrix &u, std::span<const std::size_t> input_ports,
                                 const OutputConfiguration &m) {
    const std::size_t modes = u.dim();
    if (m.modes() != modes) {
        throw InvalidArgument("output_probability: configuration length differs from the number of modes");
    }
    const std::size_t n = m.bosons();
    if (n == 0) {
        throw InvalidArgument("output_probability: configuration holds no bosons");
    }
    if (input_ports.size() != n) {
        throw InvalidArgument("output_probability: need one input port per boson");
    }
    std::vector<bool> used(modes, false);
    for (std::size_t k : input_ports) {
        if (k >= modes || used[k]) {
            throw InvalidArgument("output_probability: input ports must be distinct and in range");
        }
        used[k] = true;
    }
    const auto ports = m.occupied_ports();
    const auto mult = m.multiplicities();
    const ComplexMatrix rows = submatrix(u.matrix, input_ports, ports);
    const Complex per = permanent_repeated(rows, mult);
    double denom = 1.0;
    for (std::size_t k : mult) {
        denom *= detail::factorial(k);
    }
    return std::norm(per) / denom;
}

/// Inputs on ports 0..N-1.
inline double output_probability(const UnitaryMatrix &u, const OutputConfiguration &m) {
    std::vector<std::size_t> inputs(m.bosons());
    std::iota(inputs.begin(), inputs.end(), std::size_t{0});
    return output_probability(u, inputs, m);
}

}  // namespace bosonsim
