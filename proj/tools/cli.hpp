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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bosonsim/bosonsim.hpp"

namespace bosonsim::cli {

// Exit codes: 0 success, 1 runtime or numeric failure, 2 usage or validation error.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

struct RunConfig {
    std::size_t bosons = 0;
    std::size_t modes = 0;
    std::size_t dim = 0;
    double epsilon = 0.05;
    uint64_t seed = 0;
    std::size_t count = 0;
    std::string matrix_path;
    std::string out_path;
    std::string plot_path;
    std::string format = "jsonl";
    std::string method = "repeated";
    std::vector<std::size_t> multiplicities;
    std::vector<std::size_t> bosons_list;
    double rho = 1.0;
    unsigned threads = 1;
};

/// I/O problems that are not the caller's fault map to exit code 1.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_complex(Complex z) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g%c%.17gi", z.real(), z.imag() < 0.0 ? '-' : '+', std::abs(z.imag()));
    return buf;
}

inline nlohmann::json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

/// Runs `emit` against --out when given, otherwise against `out`.
inline void with_output(const std::string &path, std::ostream &out, const std::function<void(std::ostream &)> &emit) {
    if (path.empty()) {
        emit(out);
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot write " + path);
    }
    emit(file);
    file.flush();
    if (!file) {
        throw IoError("write failed for " + path);
    }
}

inline void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidArgument("--epsilon must lie in (0, 1)");
    }
}

inline void require_regime(std::size_t n, std::size_t m) {
    if (n == 0 || m == 0) {
        throw InvalidArgument("--bosons and --modes must be at least 1");
    }
    if (n > m) {
        throw UnsupportedRegime("N > M is outside the supported regime (rho = N/M must be <= 1)");
    }
}

inline int cmd_haar(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    if (cfg.dim == 0) {
        throw InvalidArgument("--dim must be at least 1");
    }
    const UnitaryMatrix u = haar_unitary(cfg.dim, cfg.seed);
    const std::string text = to_json(u).dump(2) + "\n";
    with_output(cfg.out_path, out, [&](std::ostream &os) { os << text; });
    std::ostream &report = cfg.out_path.empty() ? err : out;
    report << "unitarity_defect " << std::setprecision(6) << unitarity_defect(u.matrix) << '\n';
    return kOk;
}

inline int cmd_permanent(const RunConfig &cfg, std::ostream &out) {
    const ComplexMatrix a = matrix_from_json(read_json_file(cfg.matrix_path));
    Complex value;
    std::optional<uint64_t> gray_steps;
    if (cfg.method == "naive") {
        value = permanent_naive(a);
    } else if (cfg.method == "ryser") {
        value = permanent_ryser(a);
    } else if (cfg.method == "glynn") {
        value = permanent_glynn(a);
    } else if (cfg.method == "repeated") {
        std::vector<std::size_t> mult = cfg.multiplicities;
        if (mult.empty()) {
            mult.assign(a.cols(), 1);
        }
        auto [v, trace] = trace_permanent(a, mult);
        value = v;
        gray_steps = trace.gray_steps;
    } else {
        throw InvalidArgument("unknown --method " + cfg.method);
    }
    out << "permanent " << format_complex(value) << '\n';
    if (gray_steps) {
        out << "gray_steps " << *gray_steps << '\n';
    }
    return kOk;
}

inline int cmd_sample(const RunConfig &cfg, std::ostream &out) {
    const UnitaryMatrix u = unitary_from_json(read_json_file(cfg.matrix_path));
    require_regime(cfg.bosons, u.dim());
    const SampleBatch batch = sample_batch(u, cfg.bosons, cfg.count, cfg.seed, cfg.threads);
    with_output(cfg.out_path, out, [&](std::ostream &os) { write_jsonl(batch, os); });
    return kOk;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline int cmd_dist(const RunConfig &cfg, std::ostream &out) {
    require_regime(cfg.bosons, cfg.modes);
    const PortDistribution dist = port_count_pmf(cfg.bosons, cfg.modes);
    with_output(cfg.out_path, out, [&](std::ostream &os) {
        os << "n,P_exact,P,B\n";
        for (const PortRow &row : dist.rows) {
            os << row.n << ',' << (row.p_exact ? row.p_exact->str() : std::string()) << ','
               << format_double(row.p) << ',' << format_double(row.b) << '\n';
        }
    });
    if (!cfg.plot_path.empty()) {
        // paired series over the binomial's full support 0..M
        with_output(cfg.plot_path, out, [&](std::ostream &os) {
            os << "n,P,B\n";
            for (std::size_t n = 0; n <= cfg.modes; ++n) {
                const double p = (n >= 1 && n <= dist.rows.size()) ? dist.rows[n - 1].p : 0.0;
                os << n << ',' << format_double(p) << ','
                   << format_double(binomial_envelope(cfg.bosons, cfg.modes, n)) << '\n';
            }
        });
    }
    return kOk;
}

inline int cmd_bounds(const RunConfig &cfg, std::ostream &out) {
    require_epsilon(cfg.epsilon);
    require_regime(cfg.bosons, cfg.modes);
    const BoundsReport rep = theorem2_bounds(cfg.bosons, cfg.modes, cfg.epsilon);
    with_output(cfg.out_path, out, [&](std::ostream &os) { os << to_json(rep).dump(2) << '\n'; });
    return kOk;
}

inline int cmd_verify(const RunConfig &cfg, std::ostream &out) {
    const UnitaryMatrix u = unitary_from_json(read_json_file(cfg.matrix_path));
    require_regime(cfg.bosons, u.dim());
    if (cfg.count == 0) {
        throw InvalidArgument("--count must be positive for verify");
    }
    const auto exact = brute_force_distribution(u, cfg.bosons);
    const SampleBatch batch = sample_batch(u, cfg.bosons, cfg.count, cfg.seed, cfg.threads);

    std::map<OutputConfiguration, uint64_t> counts;
    for (const PortSequence &s : batch.samples) {
        ++counts[s.collapse(u.dim())];
    }
    std::map<OutputConfiguration, double> empirical;
    std::vector<uint64_t> observed;
    std::vector<double> expected;
    for (const auto &[config, p] : exact) {
        const auto it = counts.find(config);
        const uint64_t c = it == counts.end() ? 0 : it->second;
        observed.push_back(c);
        expected.push_back(p);
        empirical[config] = static_cast<double>(c) / static_cast<double>(cfg.count);
    }
    const double tvd = total_variation(empirical, exact);
    const ChiSquareResult chi = chi_square_gof(observed, expected);
    const bool pass = tvd < 0.02 && chi.p_value > 0.001;
    out << std::setprecision(6);
    out << "configurations " << exact.size() << '\n';
    out << "samples " << cfg.count << '\n';
    out << "tvd " << tvd << '\n';
    out << "chi2 " << chi.statistic << " dof " << chi.dof << '\n';
    out << "p_value " << chi.p_value << '\n';
    out << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kOk : kFailure;
}

inline int cmd_bench(const RunConfig &cfg, std::ostream &out) {
    require_epsilon(cfg.epsilon);
    if (!(cfg.rho > 0.0 && cfg.rho <= 1.0)) {
        throw InvalidArgument("--rho must lie in (0, 1]");
    }
    const double rho = cfg.rho;
    auto m_rule = [rho](std::size_t n) {
        return static_cast<std::size_t>(std::ceil(static_cast<double>(n) / rho - 1e-9));
    };
    const auto table = scaling_report(cfg.bosons_list, m_rule, cfg.count, cfg.seed, cfg.epsilon);
    with_output(cfg.out_path, out, [&](std::ostream &os) { write_scaling_csv(table, os); });
    return kOk;
}

/// Entry point shared by the binary and the tests.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"bosonsim: boson sampling in the collision regime"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_nm = [&cfg](CLI::App *sub, bool modes) {
        sub->add_option("-n,--bosons", cfg.bosons, "number of bosons N")->required();
        if (modes) {
            sub->add_option("-m,--modes", cfg.modes, "number of modes M")->required();
        }
    };

    auto *haar = app.add_subcommand("haar", "generate a Haar-random unitary");
    haar->add_option("--dim", cfg.dim, "matrix dimension M")->required();
    haar->add_option("--seed", cfg.seed, "RNG seed");
    haar->add_option("--out", cfg.out_path, "output JSON file (stdout if omitted)");

    auto *perm = app.add_subcommand("permanent", "evaluate a matrix permanent");
    perm->add_option("matrix,--matrix", cfg.matrix_path, "matrix JSON file")->required();
    perm->add_option("--method", cfg.method, "naive | ryser | glynn | repeated")
        ->check(CLI::IsMember({"naive", "ryser", "glynn", "repeated"}));
    perm->add_option("--multiplicities", cfg.multiplicities, "column multiplicities for --method repeated")
        ->delimiter(',');

    auto *sample = app.add_subcommand("sample", "draw exact samples as JSON lines");
    sample->add_option("unitary,--unitary", cfg.matrix_path, "unitary JSON file")->required();
    add_nm(sample, false);
    sample->add_option("--count", cfg.count, "number of samples");
    sample->add_option("--seed", cfg.seed, "master seed");
    sample->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"jsonl"}));
    sample->add_option("--out", cfg.out_path, "output file (stdout if omitted)");
    sample->add_option("--threads", cfg.threads, "worker threads");

    auto *dist = app.add_subcommand("dist", "occupied-port distribution and binomial envelope (CSV)");
    add_nm(dist, true);
    dist->add_option("--out", cfg.out_path, "output CSV (stdout if omitted)");
    dist->add_option("--plot-data", cfg.plot_path, "also write the paired P/B series over n = 0..M");
    std::string dist_format = "csv";
    dist->add_option("--format", dist_format, "output format")->check(CLI::IsMember({"csv"}));

    auto *bounds = app.add_subcommand("bounds", "operation-count bounds report (JSON)");
    add_nm(bounds, true);
    bounds->add_option("--epsilon", cfg.epsilon, "failure probability over Haar unitaries");
    bounds->add_option("--out", cfg.out_path, "output JSON (stdout if omitted)");

    auto *verify = app.add_subcommand("verify", "compare sampler output with the exact distribution");
    verify->add_option("unitary,--unitary", cfg.matrix_path, "unitary JSON file")->required();
    add_nm(verify, false);
    verify->add_option("--count", cfg.count, "number of samples")->default_val(100000);
    verify->add_option("--seed", cfg.seed, "master seed");
    verify->add_option("--threads", cfg.threads, "worker threads");

    auto *bench = app.add_subcommand("bench", "measured op counts against the bounds (CSV)");
    bench->add_option("--bosons-list", cfg.bosons_list, "comma-separated N values")->delimiter(',')->required();
    bench->add_option("--rho", cfg.rho, "density N/M; M = ceil(N/rho)");
    bench->add_option("--count", cfg.count, "samples per point")->default_val(20);
    bench->add_option("--seed", cfg.seed, "master seed");
    bench->add_option("--epsilon", cfg.epsilon, "failure probability for the bounds")->default_val(0.1);
    bench->add_option("--out", cfg.out_path, "output CSV (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*haar) return cmd_haar(cfg, out, err);
        if (*perm) return cmd_permanent(cfg, out);
        if (*sample) return cmd_sample(cfg, out);
        if (*dist) return cmd_dist(cfg, out);
        if (*bounds) return cmd_bounds(cfg, out);
        if (*verify) return cmd_verify(cfg, out);
        if (*bench) return cmd_bench(cfg, out);
    } catch (const InvalidArgument &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UnsupportedRegime &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const TooLarge &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace bosonsim::cli
