// Copyright 2026 The zxw Authors
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

#include <gtest/gtest.h>

#include "zxw/matrix.hpp"

using namespace zxw;

TEST(Matrix, MatricesEqualIsScalarExact) {
    const Matrix id = Matrix::identity(2);
    EXPECT_TRUE(matrices_equal(id, id, 1e-12));
    EXPECT_FALSE(matrices_equal(id, id * Complex(2.0), 1e-9));
    EXPECT_FALSE(matrices_equal(id, Matrix::identity(3), 1e-9));
    EXPECT_THROW(matrices_equal(id, id, 0.0), std::invalid_argument);
}

TEST(Matrix, KronAndProduct) {
    Matrix a(2, 2, {1, 2, 3, 4});
    Matrix b(2, 1, {5, 6});
    const Matrix k = kron(a, b);
    ASSERT_EQ(k.rows(), 4u);
    ASSERT_EQ(k.cols(), 2u);
    EXPECT_EQ(k(1, 0), Complex(6));
    EXPECT_EQ(k(3, 1), Complex(24));
    const Matrix p = a * b;
    EXPECT_EQ(p(0, 0), Complex(17));
    EXPECT_EQ(p(1, 0), Complex(39));
}

TEST(Matrix, DigitsAreBigEndian) {
    EXPECT_EQ(index_digits(5, 3, 2), (std::vector<int>{1, 2}));
    EXPECT_EQ(digits_index({1, 2}, 3), 5u);
    EXPECT_EQ(mod(-1, 5), 4);
}

TEST(Dimension, RejectsBelowTwo) {
    EXPECT_THROW(Dimension(1), std::invalid_argument);
    EXPECT_EQ(Dimension(3).value(), 3);
}
