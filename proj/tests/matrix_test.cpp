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

#include "bosonsim/matrix.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace bosonsim;

TEST(matrix, haar_dim_one_is_unimodular) {
    const auto u = haar_unitary(1, 3);
    EXPECT_NEAR(std::abs(u(0, 0)), 1.0, 1e-15);
}

TEST(matrix, haar_zero_dim_rejected) { EXPECT_THROW(haar_unitary(0, 1), InvalidArgument); }

TEST(matrix, haar_is_deterministic_per_seed) {
    const auto a = haar_unitary(4, 11);
    const auto b = haar_unitary(4, 11);
    const auto c = haar_unitary(4, 12);
    EXPECT_EQ(a.matrix, b.matrix);
    EXPECT_NE(a.matrix, c.matrix);
    EXPECT_EQ(a.seed, 11u);
}

TEST(matrix, haar_is_unitary) {
    for (std::size_t dim : {1, 2, 5, 16, 60, 120}) {
        for (uint64_t seed = 0; seed < 3; ++seed) {
            EXPECT_LE(unitarity_defect(haar_unitary(dim, seed).matrix), 1e-12) << dim;
        }
    }
}

TEST(matrix, haar_first_entry_mean_is_one_over_dim) {
    constexpr int kDraws = 10000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double v = std::norm(haar_unitary(8, derive_seed(77, i))(0, 0));
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / kDraws;
    const double se = std::sqrt((sum_sq / kDraws - mean * mean) / kDraws);
    EXPECT_NEAR(mean, 1.0 / 8.0, 3.0 * se);
}

TEST(matrix, haar_left_permutation_invariance) {
    constexpr int kDraws = 10000;
    const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
    const auto p = ComplexMatrix::permutation(perm);
    std::vector<double> plain;
    std::vector<double> permuted;
    for (int i = 0; i < kDraws; ++i) {
        plain.push_back(std::norm(haar_unitary(5, derive_seed(1, i))(0, 0)));
        permuted.push_back(std::norm((p * haar_unitary(5, derive_seed(2, i)).matrix)(0, 0)));
    }
    EXPECT_GT(testutil::ks_two_sample_p(plain, permuted), 0.01);
}

TEST(matrix, submatrix_repeats_columns) {
    const auto u = haar_unitary(6, 5);
    const std::vector<std::size_t> rows{0, 1};
    const std::vector<std::size_t> ports{0, 0};
    const auto s = submatrix(u, rows, ports);
    ASSERT_EQ(s.rows(), 2u);
    ASSERT_EQ(s.cols(), 2u);
    for (std::size_t r = 0; r < 2; ++r) {
        EXPECT_EQ(s(r, 0), u(r, 0));
        EXPECT_EQ(s(r, 1), u(r, 0));
    }
}

TEST(matrix, submatrix_single_entry) {
    const auto u = haar_unitary(6, 5);
    const std::vector<std::size_t> rows{0};
    const std::vector<std::size_t> ports{2};
    const auto s = submatrix(u, rows, ports);
    EXPECT_EQ(s.rows(), 1u);
    EXPECT_EQ(s(0, 0), u(0, 2));
}

TEST(matrix, submatrix_keeps_listed_order_bit_exact) {
    const auto u = haar_unitary(6, 9);
    const std::vector<std::size_t> rows{0, 1, 2};
    const std::vector<std::size_t> ports{1, 1, 4};
    const auto s = submatrix(u, rows, ports);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            EXPECT_EQ(s(r, c), u(rows[r], ports[c]));
        }
    }
}

TEST(matrix, submatrix_errors) {
    const auto u = haar_unitary(3, 1);
    const std::vector<std::size_t> ok{0};
    const std::vector<std::size_t> bad{3};
    const std::vector<std::size_t> unsorted{2, 1};
    EXPECT_THROW(submatrix(u, bad, ok), InvalidArgument);
    EXPECT_THROW(submatrix(u, ok, bad), InvalidArgument);
    EXPECT_THROW(submatrix(u, ok, unsorted), InvalidArgument);
}

TEST(matrix, unitarity_defect_values) {
    EXPECT_EQ(unitarity_defect(ComplexMatrix::identity(3)), 0.0);
    // A^dagger A = [[2,2],[2,2]] for the all-ones 2x2, so A^dagger A - I has max entry 2
    const auto ones = ComplexMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
    EXPECT_EQ(unitarity_defect(ones), 2.0);
    EXPECT_THROW(unitarity_defect(ComplexMatrix(2, 3)), InvalidArgument);
}

TEST(matrix, json_round_trip_is_exact) {
    const auto u = haar_unitary(4, 21);
    const auto back = unitary_from_json(nlohmann::json::parse(to_json(u).dump()));
    EXPECT_EQ(back.matrix, u.matrix);
    EXPECT_EQ(back.seed, u.seed);
    EXPECT_EQ(content_hash(back.matrix), content_hash(u.matrix));
}

TEST(matrix, json_rejects_malformed) {
    EXPECT_THROW(matrix_from_json(nlohmann::json::parse(R"({"rows":2,"cols":1,"re":[[1]],"im":[[0]]})")),
                 InvalidArgument);
    EXPECT_THROW(matrix_from_json(nlohmann::json::parse(R"({"rows":1})")), InvalidArgument);
    EXPECT_THROW(unitary_from_json(nlohmann::json::parse(R"({"rows":1,"cols":2,"re":[[1,0]],"im":[[0,0]]})")),
                 InvalidArgument);
}
