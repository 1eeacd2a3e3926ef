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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bosonsim/error.hpp"
#include "bosonsim/exact.hpp"
#include "bosonsim/matrix.hpp"
#include "bosonsim/permanent.hpp"
#include "bosonsim/port_statistics.hpp"
#include "bosonsim/rng.hpp"
#include "bosonsim/sampler.hpp"

namespace bosonsim {

enum class TraceContext { permanent, sample_step, full_sample };

/// Measured work of one evaluation. One op unit is a Gray state's row-sum
/// batch over all rows (one add and one multiply per row), so for a single
/// permanent row_ops = N * (gray_steps + 1), which is the cost model exactly.
struct OpTrace {
    TraceContext context = TraceContext::permanent;
    std::vector<std::size_t> configuration;  // multiplicities, or final occupations for samples
    uint64_t gray_steps = 0;
    uint64_t row_ops = 0;
    uint64_t weight_ops = 0;
    std::vector<uint64_t> step_gray_steps;  // samples only, indexed by K-1
    std::chrono::nanoseconds wall_time{0};

    uint64_t op_units() const { return row_ops + weight_ops; }
    double log2_op_units() const { return std::log2(static_cast<double>(op_units())); }
};

inline std::pair<Complex, OpTrace> trace_permanent(const ComplexMatrix &rows,
                                                   std::span<const std::size_t> multiplicities) {
    if (multiplicities.empty()) {
        throw InvalidArgument("trace_permanent: empty multiplicity list");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto result =
        detail::roots_of_unity_expansion(rows, multiplicities, detail::pinned_column(multiplicities));
    OpTrace trace;
    trace.context = TraceContext::permanent;
    trace.configuration.assign(multiplicities.begin(), multiplicities.end());
    trace.gray_steps = result.gray_steps;
    trace.row_ops = static_cast<uint64_t>(rows.rows()) * (result.gray_steps + 1);
    trace.wall_time = std::chrono::steady_clock::now() - start;
    return {result.value, trace};
}

/// Bounds on the total Gray steps of one chain-rule sample, given only its
/// final occupations.
///
/// lower: a prefix of length L drawn from a configuration with n occupied
///   ports has at least L - (N - n) distinct ports, and each step costs at
///   least 2^(s-1) - 1 Gray steps with s distinct prefix ports; the minimum is
///   reached when the repeated bosons come first.
/// upper: dropping the denominator, the step with prefix length L costs at most
///   prod_l(c_l + 1) <= ((m+1)/(m+2))^(N-L) prod_l(m_l + 1) with m the largest
///   occupation; the geometric sum is at most (m + 2) prod_l(m_l + 1).
struct SampleEnvelope {
    BigInt lower;
    BigInt upper;
};

inline SampleEnvelope sample_gray_envelope(const OutputConfiguration &final_config) {
    const std::size_t n_bosons = final_config.bosons();
    const std::size_t occupied = final_config.occupied_count();
    detail::require(n_bosons >= 1, "sample_gray_envelope: configuration holds no bosons");
    SampleEnvelope env{0, 1};
    for (std::size_t k = 2; k <= n_bosons; ++k) {
        const std::size_t prefix = k - 1;
        const std::size_t repeats = n_bosons - occupied;
        const std::size_t s = prefix > repeats ? std::max<std::size_t>(1, prefix - repeats) : 1;
        env.lower += (BigInt(1) << (s - 1)) - 1;
    }
    std::size_t largest = 0;
    for (std::size_t m : final_config.occupations) {
        env.upper *= m + 1;
        largest = std::max(largest, m);
    }
    env.upper *= largest + 2;
    return env;
}

/// Draws a sample while recording every step's counts, then checks them
/// against the cost model and the sample envelope (std::logic_error on a
/// violation, which would mean the instrumentation is wrong).
inline std::pair<PortSequence, OpTrace> trace_sample(const UnitaryMatrix &u, std::size_t n, Rng &rng) {
    const auto start = std::chrono::steady_clock::now();
    SampleCounters counters;
    PortSequence sample = draw_sample(u, n, rng, &counters);
    OpTrace trace;
    trace.context = TraceContext::full_sample;
    trace.wall_time = std::chrono::steady_clock::now() - start;
    trace.step_gray_steps = counters.gray_steps;
    trace.gray_steps = counters.total_gray_steps();
    trace.row_ops = counters.total_row_ops();
    trace.weight_ops = counters.total_weight_ops();
    const OutputConfiguration final_config = sample.collapse(u.dim());
    trace.configuration = final_config.occupations;

    for (std::size_t k = 1; k <= n; ++k) {
        const auto prefix = OutputConfiguration::from_ports(std::span(sample.ports).first(k - 1), u.dim());
        if (counters.gray_steps[k - 1] != reduced_gray_steps(prefix.multiplicities())) {
            throw std::logic_error("trace_sample: step Gray count differs from the cost model");
        }
    }
    const SampleEnvelope env = sample_gray_envelope(final_config);
    if (BigInt(trace.gray_steps) < env.lower || BigInt(trace.gray_steps) > env.upper) {
        throw std::logic_error("trace_sample: Gray steps escaped the sample envelope");
    }
    return {std::move(sample), std::move(trace)};
}

struct ScalingRow {
    std::size_t bosons = 0;
    std::size_t modes = 0;
    double rho = 0.0;
    double mean_log2_ops = 0.0;
    double max_log2_ops = 0.0;
    double t1_lower_log2 = 0.0;
    double t1_upper_log2 = 0.0;
    double t2_lower_log2 = 0.0;
    double t2_upper_log2 = 0.0;
    double baseline_log2 = 0.0;  // N 2^(N-1), the collision-free cost
};

/// Per-probability budget above which scaling_report refuses a point.
inline constexpr double kScalingLog2Limit = 26.0;

/// For every N: M = m_rule(N); draws `samples_per_point` Haar unitaries, one
/// sample from each, and traces the permanent of the sampled configuration.
inline std::vector<ScalingRow> scaling_report(std::span<const std::size_t> n_list,
                                              const std::function<std::size_t(std::size_t)> &m_rule,
                                              std::size_t samples_per_point, uint64_t seed, double epsilon = 0.1) {
    std::vector<ScalingRow> table;
    for (std::size_t point = 0; point < n_list.size(); ++point) {
        const std::size_t n = n_list[point];
        const std::size_t m = m_rule(n);
        if (n == 0 || m == 0) {
            throw InvalidArgument("scaling_report: N and M must be at least 1");
        }
        if (n > m) {
            throw UnsupportedRegime("scaling_report: N > M is outside the supported regime");
        }
        const auto worst = cost_estimate(OutputConfiguration{std::vector<std::size_t>(n, 1)});
        if (worst.log2_op_units() > kScalingLog2Limit) {
            throw TooLarge("scaling_report: N = " + std::to_string(n) + " may need up to 2^" +
                           std::to_string(worst.log2_op_units()) + " op units per probability");
        }
        const BoundsReport bounds = theorem2_bounds(n, m, epsilon);
        ScalingRow row;
        row.bosons = n;
        row.modes = m;
        row.rho = bounds.rho;
        row.t1_lower_log2 = bounds.c_prob_lower_log2;
        row.t1_upper_log2 = bounds.c_prob_upper_log2;
        row.t2_lower_log2 = *bounds.c_sample_lower_log2;
        row.t2_upper_log2 = *bounds.c_sample_upper_log2;
        row.baseline_log2 = worst.log2_op_units();
        row.max_log2_ops = samples_per_point ? -std::numeric_limits<double>::infinity() : 0.0;
        double sum = 0.0;
        for (std::size_t i = 0; i < samples_per_point; ++i) {
            const uint64_t stream = derive_seed(seed, point);
            const UnitaryMatrix u = haar_unitary(m, derive_seed(stream, 2 * i));
            Rng rng = make_rng(stream, 2 * i + 1);
            const PortSequence sample = draw_sample(u, n, rng);
            const OutputConfiguration config = sample.collapse(m);
            std::vector<std::size_t> inputs(n);
            std::iota(inputs.begin(), inputs.end(), std::size_t{0});
            const ComplexMatrix rows = submatrix(u.matrix, inputs, config.occupied_ports());
            const auto [value, trace] = trace_permanent(rows, config.multiplicities());
            const double ops = trace.log2_op_units();
            sum += ops;
            row.max_log2_ops = std::max(row.max_log2_ops, ops);
        }
        row.mean_log2_ops = samples_per_point ? sum / static_cast<double>(samples_per_point) : 0.0;
        table.push_back(row);
    }
    return table;
}

inline void write_scaling_csv(std::span<const ScalingRow> table, std::ostream &out) {
    out << "N,M,rho,mean_log2_ops,max_log2_ops,t1_lower_log2,t1_upper_log2,t2_lower_log2,t2_upper_log2,"
           "baseline_log2\n";
    const auto old_precision = out.precision(10);
    for (const ScalingRow &r : table) {
        out << r.bosons << ',' << r.modes << ',' << r.rho << ',' << r.mean_log2_ops << ',' << r.max_log2_ops << ','
            << r.t1_lower_log2 << ',' << r.t1_upper_log2 << ',' << r.t2_lower_log2 << ',' << r.t2_upper_log2 << ','
            << r.baseline_log2 << '\n';
    }
    out.precision(old_precision);
}

}  // namespace bosonsim
