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
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bosonsim/error.hpp"
#include "bosonsim/exact.hpp"
#include "bosonsim/gray_code.hpp"
#include "bosonsim/matrix.hpp"
#include "bosonsim/permanent.hpp"
#include "bosonsim/rng.hpp"

namespace bosonsim {

/// Output ports (zero-based) in the order they were drawn, with the input
/// permutation that produced them.
struct PortSequence {
    std::vector<std::size_t> ports;
    std::vector<std::size_t> permutation;
    uint64_t seed = 0;

    OutputConfiguration collapse(std::size_t modes) const { return OutputConfiguration::from_ports(ports, modes); }
};

/// Per-step instrumentation of one chain-rule sample. Step K (1-based) has
/// a prefix of K-1 ports; gray_steps[K-1] is the Gray step count of its
/// expansion.
struct SampleCounters {
    std::vector<uint64_t> gray_steps;
    std::vector<uint64_t> row_ops;     // rows updated (or initialised) per step
    std::vector<uint64_t> weight_ops;  // M * K Laplace terms per step

    uint64_t total_gray_steps() const { return std::accumulate(gray_steps.begin(), gray_steps.end(), uint64_t{0}); }
    uint64_t total_row_ops() const { return std::accumulate(row_ops.begin(), row_ops.end(), uint64_t{0}); }
    uint64_t total_weight_ops() const { return std::accumulate(weight_ops.begin(), weight_ops.end(), uint64_t{0}); }
};

/// Uniform permutation of 0..N-1 (Fisher-Yates).
inline std::vector<std::size_t> sample_permutation(std::size_t n, Rng &rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm[i - 1], perm[pick(rng)]);
    }
    return perm;
}

namespace detail {

struct WeightResult {
    std::vector<double> weights;
    uint64_t gray_steps = 0;
    uint64_t row_ops = 0;
};

/// Leave-one-row-out permanents per_alpha of U[pi(0..K-1) \ pi(alpha) | prefix]
/// for every alpha at once, from one Gray enumeration over the prefix's
/// distinct ports. Returns them scaled to the standard permanent.
inline std::vector<Complex> minor_permanents(const UnitaryMatrix &u, std::span<const std::size_t> rows,
                                             std::span<const std::size_t> prefix, uint64_t &gray_steps,
                                             uint64_t &row_ops) {
    const std::size_t k_rows = rows.size();
    std::vector<Complex> minors(k_rows, Complex(0.0, 0.0));
    if (prefix.empty()) {
        minors[0] = Complex(1.0, 0.0);
        return minors;
    }
    std::vector<std::size_t> ports(prefix.begin(), prefix.end());
    std::sort(ports.begin(), ports.end());
    std::vector<std::size_t> distinct;
    std::vector<std::size_t> counts;
    for (std::size_t p : ports) {
        if (distinct.empty() || distinct.back() != p) {
            distinct.push_back(p);
            counts.push_back(1);
        } else {
            ++counts.back();
        }
    }
    const std::size_t pin = pinned_column(counts);
    std::vector<std::size_t> free_cols;
    std::vector<std::size_t> moduli;
    std::vector<std::vector<Complex>> roots(distinct.size());
    double normalisation = 1.0;
    double factorials = 1.0;
    for (std::size_t j = 0; j < distinct.size(); ++j) {
        factorials *= factorial(counts[j]);
        if (j == pin) {
            continue;
        }
        free_cols.push_back(j);
        moduli.push_back(counts[j] + 1);
        roots[j] = roots_of_unity(counts[j] + 1);
        normalisation *= static_cast<double>(counts[j] + 1);
    }

    std::vector<Complex> sums(k_rows, Complex(0.0, 0.0));
    for (std::size_t a = 0; a < k_rows; ++a) {
        for (std::size_t p : distinct) {
            sums[a] += u(rows[a], p);
        }
    }
    std::vector<Complex> suffix(k_rows + 1);
    std::vector<std::size_t> digit(distinct.size(), 0);
    Complex coefficient(1.0, 0.0);

    auto accumulate = [&] {
        suffix[k_rows] = Complex(1.0, 0.0);
        for (std::size_t a = k_rows; a-- > 0;) {
            suffix[a] = suffix[a + 1] * sums[a];
        }
        Complex prefix_product = coefficient;
        for (std::size_t a = 0; a < k_rows; ++a) {
            minors[a] += prefix_product * suffix[a + 1];
            prefix_product *= sums[a];
        }
    };

    accumulate();
    row_ops += k_rows;
    MixedRadixGray gray(moduli);
    uint64_t steps = 0;
    while (auto step = gray.next()) {
        const std::size_t j = free_cols[step->position];
        const std::vector<Complex> &w = roots[j];
        const Complex delta = w[step->new_value] - w[digit[j]];
        coefficient *= w[step->new_value] * std::conj(w[digit[j]]);
        digit[j] = step->new_value;
        const std::size_t port = distinct[j];
        for (std::size_t a = 0; a < k_rows; ++a) {
            sums[a] += delta * u(rows[a], port);
        }
        accumulate();
        ++steps;
    }
    row_ops += steps * k_rows;
    gray_steps += steps;
    if (steps != reduced_gray_steps(counts)) {
        throw std::logic_error("minor_permanents: Gray step count drifted from the cost model");
    }
    const double scale = factorials / normalisation;
    for (Complex &m : minors) {
        m *= scale;
    }
    return minors;
}

inline WeightResult conditional_weights(const UnitaryMatrix &u, std::span<const std::size_t> permutation,
                                        std::span<const std::size_t> prefix) {
    const std::size_t modes = u.dim();
    const std::size_t n = permutation.size();
    if (prefix.size() + 1 > n) {
        throw InvalidArgument("conditional_weights: prefix must be shorter than the boson count");
    }
    for (std::size_t r : permutation) {
        if (r >= modes) {
            throw InvalidArgument("conditional_weights: permutation entry out of range");
        }
    }
    for (std::size_t p : prefix) {
        if (p >= modes) {
            throw InvalidArgument("conditional_weights: prefix port out of range");
        }
    }
    const std::size_t k = prefix.size() + 1;
    const auto rows = permutation.first(k);
    WeightResult out;
    const std::vector<Complex> minors = minor_permanents(u, rows, prefix, out.gray_steps, out.row_ops);
    out.weights.resize(modes);
    for (std::size_t l = 0; l < modes; ++l) {
        Complex per(0.0, 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            per += u(rows[a], l) * minors[a];
        }
        out.weights[l] = std::max(0.0, std::norm(per));
    }
    return out;
}

inline std::size_t sample_index(std::span<const double> weights, Rng &rng) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) {
        throw std::runtime_error("sampler: all conditional weights vanished");
    }
    std::uniform_real_distribution<double> unit(0.0, total);
    const double target = unit(rng);
    double running = 0.0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        running += weights[l];
        if (target < running) {
            return l;
        }
    }
    // round-off at the top end: last port with positive weight
    for (std::size_t l = weights.size(); l-- > 0;) {
        if (weights[l] > 0.0) {
            return l;
        }
    }
    return weights.size() - 1;
}

}  // namespace detail

/// Weights proportional to p(prefix, l | pi) for every candidate port l.
/// Only the first prefix.size()+1 entries of `permutation` are used. The
/// values equal |per(U[pi(1..K) | prefix, l])|^2, so dividing by K! gives the
/// conditional-joint probability itself.
inline std::vector<double> conditional_weights(const UnitaryMatrix &u, std::span<const std::size_t> permutation,
                                               std::span<const std::size_t> prefix) {
    return detail::conditional_weights(u, permutation, prefix).weights;
}

/// Draws one N-boson sample by the chain rule; inputs on ports 0..N-1.
inline PortSequence draw_sample(const UnitaryMatrix &u, std::size_t n, Rng &rng, SampleCounters *counters = nullptr) {
    const std::size_t modes = u.dim();
    if (n == 0) {
        throw InvalidArgument("draw_sample: need at least one boson");
    }
    if (n > modes) {
        throw UnsupportedRegime("draw_sample: N > M is outside the supported regime (need N <= M)");
    }
    PortSequence sample;
    sample.permutation = sample_permutation(n, rng);
    sample.ports.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        auto step = detail::conditional_weights(u, sample.permutation, sample.ports);
        sample.ports.push_back(detail::sample_index(step.weights, rng));
        if (counters) {
            counters->gray_steps.push_back(step.gray_steps);
            counters->row_ops.push_back(step.row_ops);
            counters->weight_ops.push_back(static_cast<uint64_t>(modes) * k);
        }
    }
    return sample;
}

/// Every configuration of N bosons in M modes, in lexicographic order.
inline std::vector<OutputConfiguration> enumerate_configurations(std::size_t n, std::size_t modes) {
    detail::require(modes >= 1, "enumerate_configurations: need at least one mode");
    std::vector<OutputConfiguration> out;
    std::vector<std::size_t> occ(modes, 0);
    auto recurse = [&](auto &self, std::size_t port, std::size_t left) -> void {
        if (port + 1 == modes) {
            occ[port] = left;
            out.push_back(OutputConfiguration{occ});
            return;
        }
        for (std::size_t c = left + 1; c-- > 0;) {
            occ[port] = c;
            self(self, port + 1, left - c);
        }
    };
    recurse(recurse, 0, n);
    std::sort(out.begin(), out.end());
    return out;
}

inline constexpr uint64_t kBruteForceLimit = 100000;

/// Exact output distribution over all C(M+N-1, N) configurations.
inline std::map<OutputConfiguration, double> brute_force_distribution(const UnitaryMatrix &u, std::size_t n) {
    const std::size_t modes = u.dim();
    if (n == 0) {
        throw InvalidArgument("brute_force_distribution: need at least one boson");
    }
    if (n > modes) {
        throw UnsupportedRegime("brute_force_distribution: N > M is outside the supported regime");
    }
    if (binomial(static_cast<unsigned>(modes + n - 1), static_cast<unsigned>(n)) > kBruteForceLimit) {
        throw TooLarge("brute_force_distribution: more than 1e5 configurations");
    }
    std::map<OutputConfiguration, double> dist;
    for (auto &m : enumerate_configurations(n, modes)) {
        const double p = output_probability(u, m);
        dist.emplace(std::move(m), p);
    }
    return dist;
}

struct SampleBatch {
    std::string unitary_hash;
    std::size_t bosons = 0;
    std::size_t modes = 0;
    uint64_t master_seed = 0;
    std::vector<PortSequence> samples;
    std::vector<uint64_t> gray_steps;  // per sample, total over all steps
};

/// `count` independent samples; sample i uses the stream derive_seed(master, i),
/// so the batch is identical for any thread count.
inline SampleBatch sample_batch(const UnitaryMatrix &u, std::size_t n, std::size_t count, uint64_t master_seed,
                                unsigned threads = 1) {
    if (n == 0) {
        throw InvalidArgument("sample_batch: need at least one boson");
    }
    if (n > u.dim()) {
        throw UnsupportedRegime("sample_batch: N > M is outside the supported regime (need N <= M)");
    }
    SampleBatch batch;
    batch.unitary_hash = content_hash(u.matrix);
    batch.bosons = n;
    batch.modes = u.dim();
    batch.master_seed = master_seed;
    batch.samples.resize(count);
    batch.gray_steps.resize(count);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const uint64_t seed = derive_seed(master_seed, i);
            Rng rng(seed);
            SampleCounters counters;
            batch.samples[i] = draw_sample(u, n, rng, &counters);
            batch.samples[i].seed = seed;
            batch.gray_steps[i] = counters.total_gray_steps();
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        work(0, count);
        return batch;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (count + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(count, t * chunk);
            const std::size_t end = std::min(count, begin + chunk);
            pool.emplace_back([&, t, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return batch;
}

/// JSON-lines: one header object, then one object per sample. Ports are
/// written one-based (1..M); "ops" is the sample's total Gray step count.
inline void write_jsonl(const SampleBatch &batch, std::ostream &out) {
    const nlohmann::json header = {{"unitary", batch.unitary_hash},
                                   {"N", batch.bosons},
                                   {"M", batch.modes},
                                   {"seed", batch.master_seed},
                                   {"count", batch.samples.size()}};
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < batch.samples.size(); ++i) {
        const PortSequence &s = batch.samples[i];
        std::vector<std::size_t> one_based(s.ports);
        for (std::size_t &p : one_based) {
            ++p;
        }
        const nlohmann::json line = {{"idx", i},
                                     {"ports", one_based},
                                     {"config", s.collapse(batch.modes).occupations},
                                     {"ops", batch.gray_steps[i]}};
        out << line.dump() << '\n';
    }
}

}  // namespace bosonsim
