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

#include <complex>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "zxw/matrix.hpp"

namespace zxw {

// Core generators.

/// Z box: sum_j a_j |j..j><j..j| with a_0 = 1 and phase = (a_1, ..., a_{d-1}).
struct ZBox {
    std::vector<Complex> phase;
    int inputs = 0;
    int outputs = 0;
};

struct Hadamard {};

/// The 1 -> 2 W node.
struct WNode {};

// Derived gadgets. Each has direct semantics and a defining expansion.

struct HadamardDagger {};

/// W node with `legs` outputs (or inputs, when transposed). One leg is the identity.
struct WNodeGeneral {
    int legs = 2;
    bool transpose = false;
};

/// Green circle spider with real angles; phase entries are exp(i alpha_j).
struct GreenSpider {
    std::vector<double> angles;
    int inputs = 0;
    int outputs = 0;
};

/// Z box with phase (0, ..., 0, x).
struct LabeledBox {
    Complex x;
    int inputs = 0;
    int outputs = 0;
};

/// Normalised pink spider with phase K_j.
struct PinkSpider {
    int phase_index = 0;
    int inputs = 0;
    int outputs = 0;
};

/// sum_i |i><-i|
struct Dualiser {};

/// sum_x |w x mod d><x|
struct Multiplier {
    int weight = 1;
};

/// I + sum_{i>0} |0><i|
struct Triangle {};

/// I - sum_{i>0} |0><i|
struct TriangleInverse {};

struct ScalarBox {
    Complex value{1.0, 0.0};
};

/// d-1 -> 1 box combining labelled-box states into one Z box state: input
/// wire i (1-based) passes through a weight -i multiplier before a W merge.
struct VBox {};

using GeneratorKind = std::variant<ZBox, Hadamard, WNode, HadamardDagger, WNodeGeneral, GreenSpider,
                                   LabeledBox, PinkSpider, Dualiser, Multiplier, Triangle,
                                   TriangleInverse, ScalarBox, VBox>;

struct Arity {
    int inputs = 0;
    int outputs = 0;
    friend bool operator==(const Arity&, const Arity&) = default;
};

inline bool is_core(const GeneratorKind& kind) {
    return std::holds_alternative<ZBox>(kind) || std::holds_alternative<Hadamard>(kind) ||
           std::holds_alternative<WNode>(kind);
}

inline std::string kind_name(const GeneratorKind& kind) {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZBox>) return "ZBox";
            else if constexpr (std::is_same_v<T, Hadamard>) return "Hadamard";
            else if constexpr (std::is_same_v<T, WNode>) return "WNode";
            else if constexpr (std::is_same_v<T, HadamardDagger>) return "HadamardDagger";
            else if constexpr (std::is_same_v<T, WNodeGeneral>) return "WNodeGeneral";
            else if constexpr (std::is_same_v<T, GreenSpider>) return "GreenSpider";
            else if constexpr (std::is_same_v<T, LabeledBox>) return "LabeledBox";
            else if constexpr (std::is_same_v<T, PinkSpider>) return "PinkSpider";
            else if constexpr (std::is_same_v<T, Dualiser>) return "Dualiser";
            else if constexpr (std::is_same_v<T, Multiplier>) return "Multiplier";
            else if constexpr (std::is_same_v<T, Triangle>) return "Triangle";
            else if constexpr (std::is_same_v<T, TriangleInverse>) return "TriangleInverse";
            else if constexpr (std::is_same_v<T, ScalarBox>) return "ScalarBox";
            else return "VBox";
        },
        kind);
}

inline Arity arity(const GeneratorKind& kind, int d) {
    return std::visit(
        [d](const auto& k) -> Arity {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZBox> || std::is_same_v<T, GreenSpider> ||
                          std::is_same_v<T, LabeledBox> || std::is_same_v<T, PinkSpider>)
                return {k.inputs, k.outputs};
            else if constexpr (std::is_same_v<T, WNode>) return {1, 2};
            else if constexpr (std::is_same_v<T, WNodeGeneral>)
                return k.transpose ? Arity{k.legs, 1} : Arity{1, k.legs};
            else if constexpr (std::is_same_v<T, ScalarBox>) return {0, 0};
            else if constexpr (std::is_same_v<T, VBox>) return {d - 1, 1};
            else return {1, 1};
        },
        kind);
}

/// Parameter problems of `kind` at dimension d; empty when consistent.
inline std::vector<std::string> kind_violations(const GeneratorKind& kind, int d) {
    std::vector<std::string> out;
    const std::string name = kind_name(kind);
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZBox>) {
                if (static_cast<int>(k.phase.size()) != d - 1)
                    out.push_back(name + ": phase vector has length " + std::to_string(k.phase.size()) +
                                  ", expected " + std::to_string(d - 1) + " (dimension mismatch)");
            } else if constexpr (std::is_same_v<T, GreenSpider>) {
                if (static_cast<int>(k.angles.size()) != d - 1)
                    out.push_back(name + ": angle vector has length " + std::to_string(k.angles.size()) +
                                  ", expected " + std::to_string(d - 1) + " (dimension mismatch)");
            } else if constexpr (std::is_same_v<T, WNodeGeneral>) {
                if (k.legs < 1) out.push_back(name + ": needs at least one leg");
            } else if constexpr (std::is_same_v<T, Multiplier>) {
                if (k.weight < 0 || k.weight >= d) out.push_back(name + ": weight not reduced mod d");
            } else if constexpr (std::is_same_v<T, PinkSpider>) {
                if (k.phase_index < 0 || k.phase_index >= d) out.push_back(name + ": phase index not reduced mod d");
            }
            if constexpr (requires { k.inputs; }) {
                if (k.inputs < 0 || k.outputs < 0) out.push_back(name + ": negative arity");
            }
        },
        kind);
    return out;
}

/// Reduces modular parameters (multiplier weight, pink phase index) into [0, d).
inline GeneratorKind reduce_mod_d(GeneratorKind kind, int d) {
    if (auto* m = std::get_if<Multiplier>(&kind)) m->weight = mod(m->weight, d);
    if (auto* p = std::get_if<PinkSpider>(&kind)) p->phase_index = mod(p->phase_index, d);
    return kind;
}

/// Phase entry a_j of a Z-type phase vector, with a_0 = 1 and j taken mod d.
inline Complex phase_entry(const std::vector<Complex>& phase, long long j, int d) {
    const int r = mod(j, d);
    return r == 0 ? Complex{1.0, 0.0} : phase[r - 1];
}

inline std::vector<Complex> ones_phase(int d) { return std::vector<Complex>(d - 1, Complex{1.0, 0.0}); }

/// K_j as a Z phase vector: entries omega^{k j}, k = 1..d-1.
inline std::vector<Complex> fourier_phase(int d, int j) {
    std::vector<Complex> p(d - 1);
    for (int k = 1; k < d; ++k) p[k - 1] = root_of_unity(d, static_cast<long long>(k) * j);
    return p;
}

inline std::vector<Complex> labeled_phase(int d, Complex x) {
    std::vector<Complex> p(d - 1, Complex{});
    p.back() = x;
    return p;
}

namespace detail {

template <typename Entry>
Matrix tabulate(int d, Arity a, Entry entry) {
    const std::size_t rows = ipow(d, a.outputs), cols = ipow(d, a.inputs);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto out = index_digits(r, d, a.outputs);
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = entry(out, index_digits(c, d, a.inputs));
    }
    return m;
}

inline bool all_equal(const std::vector<int>& xs, int v) {
    for (int x : xs)
        if (x != v) return false;
    return true;
}

// Value carried by a one-hot digit string: 0 for all zeros, v for a single
// nonzero v, -1 when two or more digits are nonzero.
inline int one_hot_value(const std::vector<int>& xs) {
    int v = 0;
    for (int x : xs) {
        if (x == 0) continue;
        if (v != 0) return -1;
        v = x;
    }
    return v;
}

inline Complex z_entry(const std::vector<Complex>& phase, int d, const std::vector<int>& out,
                       const std::vector<int>& in) {
    if (out.empty() && in.empty()) {
        Complex s = 1.0;
        for (const auto& a : phase) s += a;
        return s;
    }
    const int j = out.empty() ? in.front() : out.front();
    if (!all_equal(out, j) || !all_equal(in, j)) return 0.0;
    return phase_entry(phase, j, d);
}

}  // namespace detail

/// Standard interpretation of a single generator: a d^outputs x d^inputs matrix.
inline Matrix semantics(const GeneratorKind& kind, int d) {
    if (auto v = kind_violations(kind, d); !v.empty()) throw std::invalid_argument(v.front());
    const Arity a = arity(kind, d);
    using In = const std::vector<int>&;
    return std::visit(
        [&](const auto& k) -> Matrix {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZBox>) {
                return detail::tabulate(d, a, [&](In o, In i) { return detail::z_entry(k.phase, d, o, i); });
            } else if constexpr (std::is_same_v<T, GreenSpider>) {
                std::vector<Complex> phase;
                for (double alpha : k.angles) phase.push_back(std::polar(1.0, alpha));
                return detail::tabulate(d, a, [&](In o, In i) { return detail::z_entry(phase, d, o, i); });
            } else if constexpr (std::is_same_v<T, LabeledBox>) {
                const auto phase = labeled_phase(d, k.x);
                return detail::tabulate(d, a, [&](In o, In i) { return detail::z_entry(phase, d, o, i); });
            } else if constexpr (std::is_same_v<T, Hadamard> || std::is_same_v<T, HadamardDagger>) {
                const double norm = 1.0 / std::sqrt(static_cast<double>(d));
                const int sign = std::is_same_v<T, Hadamard> ? 1 : -1;
                return detail::tabulate(d, a, [&](In o, In i) {
                    return root_of_unity(d, sign * static_cast<long long>(o[0]) * i[0]) * norm;
                });
            } else if constexpr (std::is_same_v<T, WNode> || std::is_same_v<T, WNodeGeneral>) {
                // Transpose swaps the roles of the single leg and the fan.
                bool transpose = false;
                if constexpr (std::is_same_v<T, WNodeGeneral>) transpose = k.transpose;
                return detail::tabulate(d, a, [&](In o, In i) -> Complex {
                    const int single = transpose ? o[0] : i[0];
                    const int fan = detail::one_hot_value(transpose ? i : o);
                    return fan == single ? 1.0 : 0.0;
                });
            } else if constexpr (std::is_same_v<T, PinkSpider>) {
                return detail::tabulate(d, a, [&](In o, In i) -> Complex {
                    long long s = k.phase_index;
                    for (int x : o) s += x;
                    for (int x : i) s -= x;
                    return mod(s, d) == 0 ? 1.0 : 0.0;
                });
            } else if constexpr (std::is_same_v<T, Dualiser>) {
                return detail::tabulate(d, a, [&](In o, In i) -> Complex { return o[0] == mod(-i[0], d) ? 1.0 : 0.0; });
            } else if constexpr (std::is_same_v<T, Multiplier>) {
                return detail::tabulate(d, a, [&](In o, In i) -> Complex {
                    return o[0] == mod(static_cast<long long>(k.weight) * i[0], d) ? 1.0 : 0.0;
                });
            } else if constexpr (std::is_same_v<T, Triangle> || std::is_same_v<T, TriangleInverse>) {
                const double off = std::is_same_v<T, Triangle> ? 1.0 : -1.0;
                return detail::tabulate(d, a, [&](In o, In i) -> Complex {
                    if (o[0] == i[0]) return 1.0;
                    return (o[0] == 0 && i[0] != 0) ? off : 0.0;
                });
            } else if constexpr (std::is_same_v<T, ScalarBox>) {
                return Matrix(1, 1, {k.value});
            } else {
                static_assert(std::is_same_v<T, VBox>);
                return detail::tabulate(d, a, [&](In o, In i) -> Complex {
                    // Multipliers first; at most one nonzero wire survives the W merge.
                    std::vector<int> scaled(i.size());
                    for (std::size_t p = 0; p < i.size(); ++p)
                        scaled[p] = mod(-static_cast<long long>(p + 1) * i[p], d);
                    const int value = detail::one_hot_value(scaled);
                    if (value < 0) return 0.0;
                    return o[0] == value ? 1.0 : 0.0;
                });
            }
        },
        kind);
}

}  // namespace zxw
