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
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "bosonsim/error.hpp"
#include "bosonsim/rng.hpp"

namespace bosonsim {

using Complex = std::complex<double>;

/// Dense row-major complex matrix.
class ComplexMatrix {
  public:
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {
        detail::require(rows >= 1 && cols >= 1, "matrix dimensions must be at least 1x1");
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        detail::require(rows >= 1 && cols >= 1, "matrix dimensions must be at least 1x1");
        detail::require(data_.size() == rows * cols, "entry count does not match rows*cols");
    }

    /// Builds from nested rows; all rows must have equal length.
    static ComplexMatrix from_rows(const std::vector<std::vector<Complex>> &rows) {
        detail::require(!rows.empty() && !rows.front().empty(), "matrix must be non-empty");
        ComplexMatrix result(rows.size(), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            detail::require(rows[r].size() == result.cols_, "ragged matrix rows");
            std::copy(rows[r].begin(), rows[r].end(), result.data_.begin() + r * result.cols_);
        }
        return result;
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix result(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            result(i, i) = 1.0;
        }
        return result;
    }

    /// Permutation matrix P with P(perm[i], i) = 1, so (P*A) moves row i of A to row perm[i].
    static ComplexMatrix permutation(std::span<const std::size_t> perm) {
        ComplexMatrix result(perm.size(), perm.size());
        std::vector<bool> seen(perm.size(), false);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            detail::require(perm[i] < perm.size() && !seen[perm[i]], "not a permutation");
            seen[perm[i]] = true;
            result(perm[i], i) = 1.0;
        }
        return result;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<const Complex> entries() const { return data_; }

    ComplexMatrix transpose() const {
        ComplexMatrix result(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                result(c, r) = (*this)(r, c);
            }
        }
        return result;
    }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        detail::require(a.cols_ == b.rows_, "matrix product shape mismatch");
        ComplexMatrix result(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    result(i, j) += aik * b(k, j);
                }
            }
        }
        return result;
    }

    bool operator==(const ComplexMatrix &) const = default;

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> data_;
};

/// An M x M interferometer matrix. Construction does not re-verify
/// unitarity; use unitarity_defect when the source is untrusted.
struct UnitaryMatrix {
    ComplexMatrix matrix;
    std::optional<uint64_t> seed;

    std::size_t dim() const { return matrix.rows(); }
    const Complex &operator()(std::size_t r, std::size_t c) const { return matrix(r, c); }
};

/// max_ij |(A^dagger A - I)_ij|
inline double unitarity_defect(const ComplexMatrix &a) {
    detail::require(a.is_square(), "unitarity_defect needs a square matrix");
    const std::size_t n = a.rows();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Complex acc(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                acc += std::conj(a(k, i)) * a(k, j);
            }
            if (i == j) {
                acc -= 1.0;
            }
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// diag(R) pushed into Q. Deterministic for a given (dim, seed).
inline UnitaryMatrix haar_unitary(std::size_t dim, uint64_t seed) {
    if (dim == 0) {
        throw InvalidArgument("haar_unitary: dimension must be at least 1");
    }
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd z(dim, dim);
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd &r = qr.matrixQR();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        const Complex phase = mag > 0.0 ? d / mag : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }
    ComplexMatrix out(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            out(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return UnitaryMatrix{std::move(out), seed};
}

/// Rows `row_indices` of `u`, restricted to `columns` with repetition kept
/// in the listed order. Indices are zero-based.
inline ComplexMatrix submatrix(const ComplexMatrix &u, std::span<const std::size_t> row_indices,
                               std::span<const std::size_t> columns) {
    detail::require(!row_indices.empty() && !columns.empty(), "submatrix needs rows and columns");
    ComplexMatrix out(row_indices.size(), columns.size());
    for (std::size_t k = 0; k < row_indices.size(); ++k) {
        if (row_indices[k] >= u.rows()) {
            throw InvalidArgument("submatrix: row index out of range");
        }
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j] >= u.cols()) {
                throw InvalidArgument("submatrix: column index out of range");
            }
            out(k, j) = u(row_indices[k], columns[j]);
        }
    }
    return out;
}

inline ComplexMatrix submatrix(const UnitaryMatrix &u, std::span<const std::size_t> row_indices,
                               std::span<const std::size_t> port_multiset) {
    detail::require(std::is_sorted(port_multiset.begin(), port_multiset.end()),
                    "submatrix: port multiset must be sorted non-decreasing");
    return submatrix(u.matrix, row_indices, port_multiset);
}

/// FNV-1a over the raw IEEE-754 bytes of the entries, as 16 hex digits.
inline std::string content_hash(const ComplexMatrix &a) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void *p, std::size_t n) {
        const auto *bytes = static_cast<const unsigned char *>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const uint64_t shape[2] = {a.rows(), a.cols()};
    mix(shape, sizeof(shape));
    for (const Complex &z : a.entries()) {
        const double parts[2] = {z.real(), z.imag()};
        mix(parts, sizeof(parts));
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

// JSON layout: {"rows": r, "cols": c, "re": [[...]], "im": [[...]]}, plus
// {"seed": s} for generated unitaries.

inline nlohmann::json to_json(const ComplexMatrix &a) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        nlohmann::json re_row = nlohmann::json::array();
        nlohmann::json im_row = nlohmann::json::array();
        for (std::size_t c = 0; c < a.cols(); ++c) {
            re_row.push_back(a(r, c).real());
            im_row.push_back(a(r, c).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return {{"rows", a.rows()}, {"cols", a.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline nlohmann::json to_json(const UnitaryMatrix &u) {
    nlohmann::json j = to_json(u.matrix);
    if (u.seed) {
        j["seed"] = *u.seed;
    }
    return j;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json &j) {
    try {
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        const auto &re = j.at("re");
        const auto &im = j.at("im");
        detail::require(re.is_array() && im.is_array() && re.size() == rows && im.size() == rows,
                        "matrix JSON: re/im must have `rows` rows");
        ComplexMatrix out(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            detail::require(re[r].size() == cols && im[r].size() == cols,
                            "matrix JSON: row length differs from `cols`");
            for (std::size_t c = 0; c < cols; ++c) {
                out(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
            }
        }
        return out;
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("matrix JSON: ") + e.what());
    }
}

inline UnitaryMatrix unitary_from_json(const nlohmann::json &j) {
    ComplexMatrix m = matrix_from_json(j);
    detail::require(m.is_square(), "unitary JSON: matrix must be square");
    std::optional<uint64_t> seed;
    if (j.contains("seed")) {
        seed = j.at("seed").get<uint64_t>();
    }
    return UnitaryMatrix{std::move(m), seed};
}

}  // namespace bosonsim
