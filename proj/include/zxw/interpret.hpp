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

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "zxw/diagram.hpp"
#include "zxw/generator.hpp"
#include "zxw/matrix.hpp"

namespace zxw {

namespace detail {

// Dense tensor with every leg of dimension d; data is big-endian over labels.
struct Tensor {
    std::vector<int> labels;
    std::vector<Complex> data;
};

inline constexpr std::size_t kMaxTensorEntries = std::size_t{1} << 26;

inline void check_size(int d, std::size_t rank) {
    if (rank > 64 || ipow(d, static_cast<int>(rank)) > kMaxTensorEntries)
        throw std::runtime_error("tensor contraction exceeds the dense size limit (rank " + std::to_string(rank) + ")");
}

// Sums out labels that occur twice in the same tensor.
inline Tensor trace_repeated(Tensor t, int d) {
    for (;;) {
        int a = -1, b = -1;
        for (std::size_t i = 0; i < t.labels.size() && a < 0; ++i)
            for (std::size_t j = i + 1; j < t.labels.size(); ++j)
                if (t.labels[i] == t.labels[j]) {
                    a = static_cast<int>(i);
                    b = static_cast<int>(j);
                    break;
                }
        if (a < 0) return t;
        const int rank = static_cast<int>(t.labels.size());
        Tensor out;
        for (int i = 0; i < rank; ++i)
            if (i != a && i != b) out.labels.push_back(t.labels[i]);
        out.data.assign(ipow(d, rank - 2), Complex{});
        for (std::size_t idx = 0; idx < t.data.size(); ++idx) {
            const auto digits = index_digits(idx, d, rank);
            if (digits[a] != digits[b]) continue;
            std::size_t o = 0;
            for (int i = 0; i < rank; ++i)
                if (i != a && i != b) o = o * d + digits[i];
            out.data[o] += t.data[idx];
        }
        t = std::move(out);
    }
}

inline Tensor contract_pair(const Tensor& x, const Tensor& y, int d) {
    std::vector<int> result;
    for (int l : x.labels)
        if (std::find(y.labels.begin(), y.labels.end(), l) == y.labels.end()) result.push_back(l);
    std::vector<int> y_free;
    for (int l : y.labels)
        if (std::find(x.labels.begin(), x.labels.end(), l) == x.labels.end()) y_free.push_back(l);
    const std::size_t x_free_count = result.size();
    result.insert(result.end(), y_free.begin(), y_free.end());
    check_size(d, result.size());

    const int xr = static_cast<int>(x.labels.size()), yr = static_cast<int>(y.labels.size());
    // For each leg of y: position in x (shared) or position among y_free.
    std::vector<int> y_from_x(yr, -1), y_from_free(yr, -1);
    for (int k = 0; k < yr; ++k) {
        auto it = std::find(x.labels.begin(), x.labels.end(), y.labels[k]);
        if (it != x.labels.end()) y_from_x[k] = static_cast<int>(it - x.labels.begin());
        else y_from_free[k] = static_cast<int>(std::find(y_free.begin(), y_free.end(), y.labels[k]) - y_free.begin());
    }
    std::vector<int> x_free_pos;
    for (int k = 0; k < xr; ++k)
        if (std::find(y.labels.begin(), y.labels.end(), x.labels[k]) == y.labels.end()) x_free_pos.push_back(k);

    Tensor out{result, std::vector<Complex>(ipow(d, static_cast<int>(result.size())))};
    const std::size_t free_count = ipow(d, static_cast<int>(y_free.size()));
    std::vector<int> yd(yr);
    for (std::size_t xi = 0; xi < x.data.size(); ++xi) {
        const Complex xv = x.data[xi];
        if (xv == Complex{}) continue;
        const auto xd = index_digits(xi, d, xr);
        std::size_t base = 0;
        for (int p : x_free_pos) base = base * d + xd[p];
        for (std::size_t fi = 0; fi < free_count; ++fi) {
            const auto fd = index_digits(fi, d, static_cast<int>(y_free.size()));
            std::size_t yi = 0;
            for (int k = 0; k < yr; ++k) yi = yi * d + (y_from_x[k] >= 0 ? xd[y_from_x[k]] : fd[y_from_free[k]]);
            const Complex yv = y.data[yi];
            if (yv == Complex{}) continue;
            out.data[base * free_count + fi] += xv * yv;
        }
    }
    (void)x_free_count;
    return out;
}

inline Tensor permuted(const Tensor& t, const std::vector<int>& order, int d) {
    const int rank = static_cast<int>(order.size());
    std::vector<int> pos(rank);
    for (int k = 0; k < rank; ++k)
        pos[k] = static_cast<int>(std::find(t.labels.begin(), t.labels.end(), order[k]) - t.labels.begin());
    Tensor out{order, std::vector<Complex>(t.data.size())};
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        const auto digits = index_digits(i, d, rank);
        std::size_t o = 0;
        for (int k = 0; k < rank; ++k) o = o * d + digits[pos[k]];
        out.data[o] = t.data[i];
    }
    return out;
}

inline Tensor tabulated(std::vector<int> labels, int d, auto entry) {
    Tensor t{std::move(labels), {}};
    const int rank = static_cast<int>(t.labels.size());
    t.data.resize(ipow(d, rank));
    for (std::size_t i = 0; i < t.data.size(); ++i) t.data[i] = entry(index_digits(i, d, rank));
    return t;
}

// Emits the tensors for one node. High-arity spiders are lowered into
// chains of rank-3 tensors, which is exact by spider fusion / W associativity.
inline void node_tensors(const GeneratorKind& kind, int d, const std::vector<int>& out_labels,
                         const std::vector<int>& in_labels, int& fresh, std::vector<Tensor>& sink) {
    std::vector<int> legs = out_labels;
    legs.insert(legs.end(), in_labels.begin(), in_labels.end());
    const int rank = static_cast<int>(legs.size());
    if (rank <= 3) {
        sink.push_back({legs, semantics(kind, d).data()});
        return;
    }
    std::vector<Complex> z_phase;
    if (auto* z = std::get_if<ZBox>(&kind)) z_phase = z->phase;
    else if (auto* g = std::get_if<GreenSpider>(&kind))
        for (double a : g->angles) z_phase.push_back(std::polar(1.0, a));
    else if (auto* lb = std::get_if<LabeledBox>(&kind)) z_phase = labeled_phase(d, lb->x);

    if (!z_phase.empty() || std::holds_alternative<ZBox>(kind)) {
        int prev = legs[0];
        for (int k = 1; k < rank - 1; ++k) {
            const bool last = k == rank - 2;
            const int next = last ? legs[rank - 1] : fresh++;
            const bool phased = k == 1;
            sink.push_back(tabulated({prev, legs[k], next}, d, [&](const std::vector<int>& x) -> Complex {
                if (x[0] != x[1] || x[1] != x[2]) return 0.0;
                return phased ? phase_entry(z_phase, x[0], d) : Complex{1.0};
            }));
            prev = next;
        }
        return;
    }
    if (auto* p = std::get_if<PinkSpider>(&kind)) {
        // Running sum y_k = y_{k-1} + s_k x_k; outputs count +, inputs -.
        const int m = static_cast<int>(out_labels.size());
        auto sign = [m](int k) { return k < m ? 1 : -1; };
        int prev = fresh++;
        sink.push_back(tabulated({legs[0], legs[1], prev}, d, [&](const std::vector<int>& x) -> Complex {
            return mod(sign(0) * x[0] + sign(1) * x[1], d) == x[2] ? 1.0 : 0.0;
        }));
        for (int k = 2; k < rank - 1; ++k) {
            const int next = fresh++;
            sink.push_back(tabulated({prev, legs[k], next}, d, [&](const std::vector<int>& x) -> Complex {
                return mod(x[0] + sign(k) * x[1], d) == x[2] ? 1.0 : 0.0;
            }));
            prev = next;
        }
        const int j = p->phase_index;
        sink.push_back(tabulated({prev, legs[rank - 1]}, d, [&](const std::vector<int>& x) -> Complex {
            return mod(x[0] + sign(rank - 1) * x[1] + j, d) == 0 ? 1.0 : 0.0;
        }));
        return;
    }
    if (auto* w = std::get_if<WNodeGeneral>(&kind)) {
        const int single = w->transpose ? out_labels[0] : in_labels[0];
        const std::vector<int>& fan = w->transpose ? in_labels : out_labels;
        const Matrix w2 = semantics(WNode{}, d);  // legs: out0, out1, in
        int prev = single;
        for (std::size_t k = 0; k + 1 < fan.size(); ++k) {
            const int rest = k + 2 == fan.size() ? fan.back() : fresh++;
            sink.push_back({{fan[k], rest, prev}, w2.data()});
            prev = rest;
        }
        return;
    }
    check_size(d, legs.size());
    sink.push_back({legs, semantics(kind, d).data()});
}

}  // namespace detail

/// The standard interpretation: a d^outputs x d^inputs matrix obtained by
/// contracting every node's tensor over the wire graph.
inline Matrix interpret(const Diagram& diagram) {
    require_valid(diagram);
    const int d = diagram.dimension();
    std::map<Endpoint, int> label_of;
    std::vector<detail::Tensor> tensors;
    int fresh = 0;
    for (const auto& w : diagram.wires()) {
        if (w.a.is_boundary() && w.b.is_boundary()) {
            const int la = fresh++, lb = fresh++;
            label_of[w.a] = la;
            label_of[w.b] = lb;
            tensors.push_back({{la, lb}, Matrix::identity(d).data()});
        } else {
            const int l = fresh++;
            label_of[w.a] = l;
            label_of[w.b] = l;
        }
    }
    for (const auto& [id, kind] : diagram.nodes()) {
        const Arity a = arity(kind, d);
        std::vector<int> outs, ins;
        for (int p = 0; p < a.outputs; ++p) outs.push_back(label_of.at(node_out(id, p)));
        for (int p = 0; p < a.inputs; ++p) ins.push_back(label_of.at(node_in(id, p)));
        std::vector<detail::Tensor> local;
        detail::node_tensors(kind, d, outs, ins, fresh, local);
        for (auto& t : local) tensors.push_back(detail::trace_repeated(std::move(t), d));
    }

    // Greedy: contract the connected pair with the smallest result rank.
    for (;;) {
        int bi = -1, bj = -1;
        long best = std::numeric_limits<long>::max();
        for (std::size_t i = 0; i < tensors.size(); ++i)
            for (std::size_t j = i + 1; j < tensors.size(); ++j) {
                int shared = 0;
                for (int l : tensors[i].labels)
                    shared += static_cast<int>(std::count(tensors[j].labels.begin(), tensors[j].labels.end(), l));
                if (shared == 0) continue;
                const long rank = static_cast<long>(tensors[i].labels.size() + tensors[j].labels.size()) - 2 * shared;
                const long grow = rank - static_cast<long>(std::max(tensors[i].labels.size(), tensors[j].labels.size()));
                const long score = grow * 1000 + rank;
                if (score < best) {
                    best = score;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        if (bi < 0) break;
        detail::Tensor merged = detail::contract_pair(tensors[bi], tensors[bj], d);
        tensors.erase(tensors.begin() + bj);
        tensors[bi] = std::move(merged);
    }
    // Remaining components are disconnected: outer product, smallest first.
    std::sort(tensors.begin(), tensors.end(),
              [](const auto& a, const auto& b) { return a.labels.size() < b.labels.size(); });
    detail::Tensor total{{}, {Complex{1.0}}};
    for (const auto& t : tensors) total = detail::contract_pair(total, t, d);

    std::vector<int> order;
    for (int p = 0; p < diagram.num_outputs(); ++p) order.push_back(label_of.at(boundary_out(p)));
    for (int p = 0; p < diagram.num_inputs(); ++p) order.push_back(label_of.at(boundary_in(p)));
    total = detail::permuted(total, order, d);
    return Matrix(ipow(d, diagram.num_outputs()), ipow(d, diagram.num_inputs()), std::move(total.data));
}

}  // namespace zxw
