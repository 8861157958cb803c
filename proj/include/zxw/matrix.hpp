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

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace zxw {

using Complex = std::complex<double>;

/// Dimension of the calculus. Every wire carries a d-level system, d >= 2.
class Dimension {
public:
    constexpr Dimension() = default;
    explicit Dimension(int d) : d_(d) {
        if (d < 2) throw std::invalid_argument("dimension must be at least 2, got " + std::to_string(d));
    }
    constexpr int value() const { return d_; }
    constexpr operator int() const { return d_; }
    friend constexpr bool operator==(Dimension, Dimension) = default;

private:
    int d_ = 2;
};

/// Basis convention shared by every module: wire 0 is the most significant
/// digit of a flat basis index.
inline constexpr bool kLeftmostWireMostSignificant = true;

inline constexpr double kDefaultTolerance = 1e-9;

inline int mod(long long x, int d) {
    long long r = x % d;
    return static_cast<int>(r < 0 ? r + d : r);
}

inline std::size_t ipow(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
    return r;
}

/// omega^k with omega = exp(2 pi i / d).
inline Complex root_of_unity(int d, long long k) {
    const double angle = 2.0 * std::numbers::pi * mod(k, d) / d;
    return {std::cos(angle), std::sin(angle)};
}

/// Digits of a flat index over `count` wires, wire 0 first.
inline std::vector<int> index_digits(std::size_t index, int d, int count) {
    std::vector<int> digits(count);
    for (int k = count - 1; k >= 0; --k) {
        digits[k] = static_cast<int>(index % d);
        index /= d;
    }
    return digits;
}

inline std::size_t digits_index(const std::vector<int>& digits, int d) {
    std::size_t index = 0;
    for (int x : digits) index = index * d + static_cast<std::size_t>(x);
    return index;
}

/// Dense complex matrix, row-major. Rows index outputs, columns index inputs.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("matrix data size mismatch");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<Complex>& data() const { return data_; }
    std::vector<Complex>& data() { return data_; }

    /// Row-major flattening; for a state bent from a map this is the
    /// amplitude vector over [outputs..., inputs...].
    std::vector<Complex> vectorized() const { return data_; }

    Matrix operator*(const Matrix& rhs) const {
        if (cols_ != rhs.rows_) throw std::invalid_argument("matrix product shape mismatch");
        Matrix out(rows_, rhs.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Complex a = (*this)(i, k);
                if (a == Complex{}) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
            }
        return out;
    }

    Matrix operator*(Complex s) const {
        Matrix out = *this;
        for (auto& x : out.data_) x *= s;
        return out;
    }

    Matrix adjoint() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

/// Max-norm entrywise distance; infinity when shapes differ.
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) return INFINITY;
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const Matrix& a) {
    double m = 0.0;
    for (const auto& x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

/// Exact (not up-to-scalar) comparison: same shape and max-norm distance <= tol.
inline bool matrices_equal(const Matrix& a, const Matrix& b, double tol = kDefaultTolerance) {
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    return max_abs_diff(a, b) <= tol;
}

}  // namespace zxw
