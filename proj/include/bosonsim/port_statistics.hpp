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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bosonsim/error.hpp"
#include "bosonsim/exact.hpp"

namespace bosonsim {

// Distribution of the number n of occupied output ports when all
// C(M+N-1, N) configurations are equally likely (the Haar average), and
// the binomial that dominates its tails.

struct PortRow {
    std::size_t n = 0;
    std::optional<Rational> p_exact;  // absent beyond the exact-arithmetic range
    double p = 0.0;
    double b = 0.0;  // binomial envelope at the same n
};

struct PortDistribution {
    std::size_t bosons = 0;
    std::size_t modes = 0;
    double x = 0.0;  // rho / (1 + rho)
    std::vector<PortRow> rows;
};

/// Exact rationals are used while N + M stays within this bound.
inline constexpr std::size_t kExactPortLimit = 400;

namespace detail {

inline double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double density(std::size_t n, std::size_t m) { return static_cast<double>(n) / static_cast<double>(m); }

inline void require_bosons_modes(std::size_t n, std::size_t m, const char *who) {
    if (n == 0 || m == 0) {
        throw InvalidArgument(std::string(who) + ": N and M must be at least 1");
    }
}

inline void require_regime(std::size_t n, std::size_t m, const char *who) {
    require_bosons_modes(n, m, who);
    if (n > m) {
        throw UnsupportedRegime(std::string(who) + ": N > M (rho > 1) has no tail crossings; need N <= M");
    }
}

inline void require_epsilon(double epsilon, const char *who) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidArgument(std::string(who) + ": epsilon must lie in (0, 1)");
    }
}

/// log2(2^a + 2^b)
inline double log2_add(double a, double b) {
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log2(1.0 + std::exp2(lo - hi));
}

}  // namespace detail

/// P(n) = C(M,n) C(N-1,n-1) / C(M+N-1,M-1), exact.
inline Rational port_count_probability_exact(std::size_t n_bosons, std::size_t modes, std::size_t n) {
    detail::require_bosons_modes(n_bosons, modes, "port_count_probability_exact");
    if (n == 0 || n > n_bosons || n > modes) {
        return Rational(0);
    }
    const auto N = static_cast<unsigned>(n_bosons);
    const auto M = static_cast<unsigned>(modes);
    const auto k = static_cast<unsigned>(n);
    return Rational(binomial(M, k) * binomial(N - 1, k - 1), binomial(M + N - 1, M - 1));
}

/// Binomial envelope B_n(x) = C(M,n) x^n (1-x)^(M-n), x = rho/(1+rho).
inline double binomial_envelope(std::size_t n_bosons, std::size_t modes, std::size_t n) {
    detail::require_bosons_modes(n_bosons, modes, "binomial_envelope");
    if (n > modes) {
        throw InvalidArgument("binomial_envelope: need 0 <= n <= M");
    }
    const double N = static_cast<double>(n_bosons);
    const double M = static_cast<double>(modes);
    const double k = static_cast<double>(n);
    // x = rho/(1+rho) = N/(N+M), 1-x = M/(N+M)
    const double log_x = std::log(N) - std::log(N + M);
    const double log_1mx = std::log(M) - std::log(N + M);
    return std::exp(detail::log_choose(M, k) + k * log_x + (M - k) * log_1mx);
}

inline PortDistribution port_count_pmf(std::size_t n_bosons, std::size_t modes) {
    detail::require_regime(n_bosons, modes, "port_count_pmf");
    PortDistribution dist;
    dist.bosons = n_bosons;
    dist.modes = modes;
    dist.x = static_cast<double>(n_bosons) / static_cast<double>(n_bosons + modes);
    const bool exact = n_bosons + modes <= kExactPortLimit;
    const double N = static_cast<double>(n_bosons);
    const double M = static_cast<double>(modes);
    for (std::size_t n = 1; n <= n_bosons; ++n) {
        PortRow row;
        row.n = n;
        if (exact) {
            row.p_exact = port_count_probability_exact(n_bosons, modes, n);
            row.p = row.p_exact->convert_to<double>();
        } else {
            const double k = static_cast<double>(n);
            row.p = std::exp(detail::log_choose(M, k) + detail::log_choose(N - 1, k - 1) -
                             detail::log_choose(M + N - 1, M - 1));
        }
        row.b = binomial_envelope(n_bosons, modes, n);
        dist.rows.push_back(std::move(row));
    }
    return dist;
}

/// <n> = MN / (M + N - 1)
inline Rational mean_occupied_exact(std::size_t n_bosons, std::size_t modes) {
    detail::require_bosons_modes(n_bosons, modes, "mean_occupied");
    return Rational(BigInt(modes) * n_bosons, BigInt(modes + n_bosons - 1));
}

inline double mean_occupied(std::size_t n_bosons, std::size_t modes) {
    return mean_occupied_exact(n_bosons, modes).convert_to<double>();
}

/// Binary entropy in nats; H(0) = H(1) = 0.
inline double entropy(double z) {
    if (!(z >= 0.0 && z <= 1.0)) {
        throw InvalidArgument("entropy: argument must lie in [0, 1]");
    }
    auto term = [](double t) { return t > 0.0 ? -t * std::log(t) : 0.0; };
    return term(z) + term(1.0 - z);
}

struct TailCrossings {
    double delta_minus = 0.0;
    double delta_plus = 0.0;
};

/// Roots of H((1 -+ delta)/(1 + rho)) = ln(1 + rho), one on each side of the
/// mode z = 1/(1+rho), found by bisection.
inline TailCrossings solve_tail_crossings(double rho) {
    if (!(rho > 0.0)) {
        throw InvalidArgument("solve_tail_crossings: rho must be positive");
    }
    if (rho > 1.0) {
        throw UnsupportedRegime("solve_tail_crossings: no solution for rho > 1");
    }
    if (rho == 1.0) {
        return {0.0, 0.0};
    }
    const double target = std::log1p(rho);
    const double mode = 1.0 / (1.0 + rho);
    auto residual = [target](double z) { return entropy(z) - target; };
    // residual < 0 at `below`, > 0 at `above`
    auto bisect = [&](double below, double above) {
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (below + above);
            if (mid == below || mid == above) {
                break;
            }
            const double r = residual(mid);
            if (r == 0.0) {
                return mid;
            }
            (r < 0.0 ? below : above) = mid;
        }
        return std::abs(residual(below)) < std::abs(residual(above)) ? below : above;
    };
    // H rises on (0, 1/2] and falls on [1/2, 1); H(mode) > ln(1+rho) for rho < 1.
    const double z_left = bisect(0.0, 0.5);
    const double z_right = bisect(1.0, mode);
    return {1.0 - z_left * (1.0 + rho), z_right * (1.0 + rho) - 1.0};
}

/// delta = 2 sqrt((1+rho)/N ln(2/eps)), i.e. 2 exp(-delta^2 N / (4(1+rho))) = eps.
inline double delta_for_epsilon(std::size_t n_bosons, double rho, double epsilon) {
    if (n_bosons == 0) {
        throw InvalidArgument("delta_for_epsilon: N must be at least 1");
    }
    detail::require_epsilon(epsilon, "delta_for_epsilon");
    return 2.0 * std::sqrt((1.0 + rho) / static_cast<double>(n_bosons) * std::log(2.0 / epsilon));
}

/// Approximate Prob(max_l m_l <= m) = [1 - (rho/(1+rho))^(m+1)]^M.
inline double bunching_cdf(std::size_t n_bosons, std::size_t modes, double m) {
    detail::require_bosons_modes(n_bosons, modes, "bunching_cdf");
    if (!(m >= 0.0)) {
        throw InvalidArgument("bunching_cdf: m must be non-negative");
    }
    const double x = static_cast<double>(n_bosons) / static_cast<double>(n_bosons + modes);
    return std::pow(1.0 - std::pow(x, m + 1.0), static_cast<double>(modes));
}

/// Occupation m below which the maximal bunching stays with probability 1 - eps:
/// ln(N/(rho eps)) / ln((1+rho)/rho).
inline double max_bunching_cutoff(std::size_t n_bosons, double rho, double epsilon) {
    if (n_bosons == 0) {
        throw InvalidArgument("max_bunching_cutoff: N must be at least 1");
    }
    if (!(rho > 0.0 && rho <= 1.0)) {
        throw InvalidArgument("max_bunching_cutoff: rho must lie in (0, 1]");
    }
    detail::require_epsilon(epsilon, "max_bunching_cutoff");
    return std::log(static_cast<double>(n_bosons) / (rho * epsilon)) / std::log((1.0 + rho) / rho);
}

/// Per-probability (and optionally per-sample) operation bounds that hold
/// with probability at least 1 - epsilon over Haar unitaries. Counts are in
/// log2 with all asymptotic constants set to 1.
struct BoundsReport {
    std::size_t bosons = 0;
    std::size_t modes = 0;
    double rho = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    TailCrossings crossings;
    double r = 1.0;
    double m_cut = 0.0;
    double n_minus = 0.0;
    double n_plus = 0.0;
    bool right_tail_absent = false;
    double c_prob_lower_log2 = 0.0;
    double c_prob_upper_log2 = 0.0;
    std::optional<double> c_sample_lower_log2;
    std::optional<double> c_sample_upper_log2;
    double n_equiv = 0.0;
};

inline BoundsReport theorem1_bounds(std::size_t n_bosons, std::size_t modes, double epsilon) {
    detail::require_regime(n_bosons, modes, "theorem1_bounds");
    detail::require_epsilon(epsilon, "theorem1_bounds");
    BoundsReport rep;
    rep.bosons = n_bosons;
    rep.modes = modes;
    rep.epsilon = epsilon;
    rep.rho = detail::density(n_bosons, modes);
    const double N = static_cast<double>(n_bosons);
    rep.delta = delta_for_epsilon(n_bosons, rep.rho, epsilon);
    rep.crossings = solve_tail_crossings(rep.rho);
    rep.r = std::max(1.0, (1.0 + rep.rho) / (1.0 + rep.delta));
    rep.right_tail_absent = rep.delta >= rep.rho;
    rep.m_cut = max_bunching_cutoff(n_bosons, rep.rho, epsilon);
    rep.n_minus = (1.0 - rep.delta) * N / (1.0 + rep.rho);
    rep.n_plus = (1.0 + rep.delta) * N / (1.0 + rep.rho);
    rep.c_prob_lower_log2 = std::log2(N) + (1.0 - rep.delta) * N / (1.0 + rep.rho);
    rep.c_prob_upper_log2 = std::log2(N) + (N / rep.r) * std::log2(1.0 + rep.r);
    // N M / (N + M) is exact whenever the quotient is representable
    rep.n_equiv = N * static_cast<double>(modes) / (N + static_cast<double>(modes));
    return rep;
}

inline BoundsReport theorem2_bounds(std::size_t n_bosons, std::size_t modes, double epsilon) {
    BoundsReport rep = theorem1_bounds(n_bosons, modes, epsilon);
    const double N = static_cast<double>(n_bosons);
    const double linear = std::log2(static_cast<double>(modes) * N * N);
    rep.c_sample_lower_log2 = detail::log2_add(rep.c_prob_lower_log2, linear);
    rep.c_sample_upper_log2 = detail::log2_add(std::log2(rep.m_cut + 2.0) + rep.c_prob_upper_log2, linear);
    return rep;
}

inline nlohmann::json to_json(const BoundsReport &rep) {
    nlohmann::json j = {
        {"N", rep.bosons},
        {"M", rep.modes},
        {"rho", rep.rho},
        {"epsilon", rep.epsilon},
        {"delta", rep.delta},
        {"delta_minus", rep.crossings.delta_minus},
        {"delta_plus", rep.crossings.delta_plus},
        {"r", rep.r},
        {"m_cut", rep.m_cut},
        {"n_minus", rep.n_minus},
        {"n_plus", rep.n_plus},
        {"right_tail_absent", rep.right_tail_absent},
        {"C_prob_lower_log2", rep.c_prob_lower_log2},
        {"C_prob_upper_log2", rep.c_prob_upper_log2},
        {"N_equiv", rep.n_equiv},
        {"expressions",
         {{"delta", "2*sqrt((1+rho)/N*ln(2/epsilon))"},
          {"r", "max(1,(1+rho)/(1+delta))"},
          {"m_cut", "ln(N/(rho*epsilon))/ln((1+rho)/rho)"},
          {"C_prob_lower", "N*2^((1-delta)*N/(1+rho))"},
          {"C_prob_upper", "N*(1+r)^(N/r)"},
          {"C_sample_lower", "N*2^((1-delta)*N/(1+rho))+M*N^2"},
          {"C_sample_upper", "(m_cut+2)*N*(1+r)^(N/r)+M*N^2"},
          {"N_equiv", "N/(1+rho)"}}},
    };
    if (rep.c_sample_lower_log2) {
        j["C_sample_lower_log2"] = *rep.c_sample_lower_log2;
    }
    if (rep.c_sample_upper_log2) {
        j["C_sample_upper_log2"] = *rep.c_sample_upper_log2;
    }
    return j;
}

}  // namespace bosonsim
