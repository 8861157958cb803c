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
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zxw/derived.hpp"
#include "zxw/diagram.hpp"
#include "zxw/generator.hpp"
#include "zxw/interpret.hpp"
#include "zxw/matrix.hpp"

namespace zxw {

/// A state in normal form: amplitude i belongs to the basis state whose
/// d-ary digits (wire 0 most significant) spell i.
struct NormalForm {
    Dimension d;
    int m = 0;
    std::vector<Complex> amplitudes;
};

class NormalFormError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kEqualityTolerance = 1e-8;
inline constexpr double kStepTolerance = 1e-10;

inline NormalForm matrix_to_nf(std::vector<Complex> v, Dimension d, int m) {
    if (m < 0 || v.size() != ipow(d, m))
        throw NormalFormError("amplitude vector of length " + std::to_string(v.size()) + " is not d^" +
                              std::to_string(m));
    return {d, m, std::move(v)};
}

inline NormalForm scalar_nf(Dimension d, Complex s) { return {d, 0, {s}}; }

namespace detail {

// One Z box of a normal form: its amplitude and multiplier weights, one per output.
struct Branch {
    Complex amplitude;
    std::vector<int> weights;
};

inline std::size_t branch_key(const Branch& b, int d) { return digits_index(b.weights, d); }

// Root |1> -> W fan -> one Z box (1, a) per branch -> multipliers -> one
// pink collector per output.
inline Diagram build_spine(Dimension d, int m, const std::vector<Branch>& branches) {
    Diagram out(d, 0, m);
    if (branches.empty()) {
        out.add_node(ScalarBox{0.0});
        for (int k = 0; k < m; ++k) out.connect(node_out(out.add_node(PinkSpider{0, 0, 1}), 0), boundary_out(k));
        return out;
    }
    const int n = static_cast<int>(branches.size());
    std::vector<int> fan_in(m, 0);
    for (const auto& b : branches)
        for (int k = 0; k < m; ++k) fan_in[k] += b.weights[k] != 0;

    const int root = out.add_node(PinkSpider{d - 1, 0, 1});
    const int fan = out.add_node(WNodeGeneral{n, false});
    out.connect(node_out(root, 0), node_in(fan, 0));
    std::vector<int> collectors(m);
    for (int k = 0; k < m; ++k) {
        collectors[k] = out.add_node(PinkSpider{0, fan_in[k], 1});
        out.connect(node_out(collectors[k], 0), boundary_out(k));
    }
    std::vector<int> used(m, 0);
    for (int i = 0; i < n; ++i) {
        const Branch& b = branches[i];
        int legs = 0;
        for (int w : b.weights) legs += w != 0;
        std::vector<Complex> phase(d - 1, 0.0);
        phase[0] = b.amplitude;
        const int z = out.add_node(ZBox{phase, 1, legs});
        out.connect(node_out(fan, i), node_in(z, 0));
        int leg = 0;
        for (int k = 0; k < m; ++k) {
            if (b.weights[k] == 0) continue;
            const int mult = out.add_node(Multiplier{b.weights[k]});
            out.connect(node_out(z, leg++), node_in(mult, 0));
            out.connect(node_out(mult, 0), node_in(collectors[k], used[k]++));
        }
    }
    return out;
}

inline Endpoint require_peer(const Diagram& dgm, const Endpoint& e) {
    auto p = dgm.peer(e);
    if (!p) throw NormalFormError("not normal-form shaped: " + to_string(e) + " is unconnected");
    return *p;
}

// Reads back the branches of a spine built by build_spine, in their W-fan order.
inline std::vector<Branch> parse_spine(const Diagram& dgm) {
    const int d = dgm.dimension(), m = dgm.num_outputs();
    auto fail = [](const std::string& why) { return NormalFormError("not normal-form shaped: " + why); };
    if (dgm.num_inputs() != 0) throw fail("normal forms are states");
    for (const auto& [id, k] : dgm.nodes())
        if (auto* s = std::get_if<ScalarBox>(&k)) {
            if (std::abs(s->value) != 0.0 || static_cast<int>(dgm.nodes().size()) != m + 1)
                throw fail("unexpected scalar box");
            return {};
        }
    std::map<int, int> collector_position;  // collector node -> output position
    for (int k = 0; k < m; ++k) {
        const Endpoint e = require_peer(dgm, boundary_out(k));
        auto* p = e.is_boundary() ? nullptr : std::get_if<PinkSpider>(&dgm.node(e.node));
        if (!p || p->phase_index != 0 || p->outputs != 1) throw fail("output " + std::to_string(k) + " is not a collector");
        collector_position[e.node] = k;
    }
    std::optional<int> fan;
    for (const auto& [id, k] : dgm.nodes()) {
        auto* p = std::get_if<PinkSpider>(&k);
        if (p && p->inputs == 0 && p->outputs == 1 && p->phase_index == d - 1 && !collector_position.contains(id)) {
            const Endpoint next = require_peer(dgm, node_out(id, 0));
            auto* w = next.is_boundary() ? nullptr : std::get_if<WNodeGeneral>(&dgm.node(next.node));
            if (w && !w->transpose) fan = next.node;
        }
    }
    if (!fan) throw fail("no root feeding a W fan");
    const int n = std::get<WNodeGeneral>(dgm.node(*fan)).legs;
    std::vector<Branch> branches;
    std::size_t seen = 2 + collector_position.size();
    for (int i = 0; i < n; ++i) {
        const Endpoint ze = require_peer(dgm, node_out(*fan, i));
        auto* z = ze.is_boundary() ? nullptr : std::get_if<ZBox>(&dgm.node(ze.node));
        if (!z || z->inputs != 1 || ze.port != 0) throw fail("W leg " + std::to_string(i) + " does not feed a Z box");
        for (std::size_t j = 1; j < z->phase.size(); ++j)
            if (z->phase[j] != Complex{0.0}) throw fail("Z box phase has more than one entry");
        Branch b{z->phase[0], std::vector<int>(m, 0)};
        ++seen;
        for (int leg = 0; leg < z->outputs; ++leg) {
            const Endpoint me = require_peer(dgm, node_out(ze.node, leg));
            auto* mult = me.is_boundary() ? nullptr : std::get_if<Multiplier>(&dgm.node(me.node));
            if (!mult) throw fail("Z box leg is not a multiplier");
            const Endpoint ce = require_peer(dgm, node_out(me.node, 0));
            auto it = ce.is_boundary() ? collector_position.end() : collector_position.find(ce.node);
            if (it == collector_position.end() || mult->weight == 0 || b.weights[it->second] != 0)
                throw fail("multiplier does not reach a fresh collector");
            b.weights[it->second] = mult->weight;
            ++seen;
        }
        branches.push_back(std::move(b));
    }
    if (seen != dgm.nodes().size()) throw fail("stray nodes");
    return branches;
}

}  // namespace detail

/// The unique-form diagram of `nf`. Zero amplitudes have no Z box.
inline Diagram emit_diagram(const NormalForm& nf) {
    std::vector<detail::Branch> branches;
    for (std::size_t i = 0; i < nf.amplitudes.size(); ++i)
        if (nf.amplitudes[i] != Complex{0.0}) branches.push_back({nf.amplitudes[i], index_digits(i, nf.d, nf.m)});
    return detail::build_spine(nf.d, nf.m, branches);
}

/// Reorders the Z boxes of a normal-form diagram into unique form by
/// neighbouring swaps.
inline Diagram unique_sort(const Diagram& nf_diagram) {
    std::vector<detail::Branch> branches = detail::parse_spine(nf_diagram);
    const int d = nf_diagram.dimension();
    for (std::size_t pass = 0; pass + 1 < branches.size(); ++pass)
        for (std::size_t k = 0; k + 1 < branches.size() - pass; ++k)
            if (detail::branch_key(branches[k + 1], d) < detail::branch_key(branches[k], d))
                std::swap(branches[k], branches[k + 1]);
    return detail::build_spine(Dimension(d), nf_diagram.num_outputs(), branches);
}

/// Amplitudes of a normal-form diagram, read from its structure.
inline NormalForm read_nf(const Diagram& nf_diagram) {
    const Dimension d(nf_diagram.dimension());
    const int m = nf_diagram.num_outputs();
    std::vector<Complex> v(ipow(d, m), 0.0);
    for (const auto& b : detail::parse_spine(nf_diagram)) v[detail::branch_key(b, d)] += b.amplitude;
    return {d, m, std::move(v)};
}

namespace detail {

inline std::vector<Complex> z_state_amplitudes(const std::vector<Complex>& phase, int d, int legs) {
    std::vector<Complex> v(ipow(d, legs), 0.0);
    if (legs == 0) {
        for (int j = 0; j < d; ++j) v[0] += phase_entry(phase, j, d);
        return v;
    }
    const std::size_t diagonal_step = (ipow(d, legs) - 1) / (d - 1);  // index of |1...1>
    for (int j = 0; j < d; ++j) v[j * diagonal_step] = phase_entry(phase, j, d);
    return v;
}

}  // namespace detail

/// Normal form of a generator bent into a state with legs [outputs..., inputs...].
inline NormalForm generator_nf(const GeneratorKind& g, Dimension d) {
    const GeneratorKind kind = reduce_mod_d(g, d);
    const Arity a = arity(kind, d);
    const int m = a.inputs + a.outputs;
    if (auto v = kind_violations(kind, d); !v.empty()) throw NormalFormError(v.front());
    if (auto* z = std::get_if<ZBox>(&kind)) return {d, m, detail::z_state_amplitudes(z->phase, d, m)};
    if (std::holds_alternative<Hadamard>(kind)) {
        std::vector<Complex> v(d * d);
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) v[j * d + k] = root_of_unity(d, j * k) / std::sqrt(static_cast<double>(d));
        return {d, 2, std::move(v)};
    }
    if (std::holds_alternative<WNode>(kind)) {
        // |000> + sum_i (|0ii> + |i0i>)
        std::vector<Complex> v(ipow(d, 3), 0.0);
        v[0] = 1.0;
        for (int i = 1; i < d; ++i) {
            v[digits_index({0, i, i}, d)] = 1.0;
            v[digits_index({i, 0, i}, d)] = 1.0;
        }
        return {d, 3, std::move(v)};
    }
    detail::check_size(d, m);
    return {d, m, semantics(kind, d).vectorized()};
}

/// Amplitude i*d^{m_b} + j is a_i b_j.
inline NormalForm tensor_nf(const NormalForm& a, const NormalForm& b) {
    if (a.d != b.d) throw NormalFormError("dimension mismatch in tensor product");
    detail::check_size(a.d, a.m + b.m);
    std::vector<Complex> v;
    v.reserve(a.amplitudes.size() * b.amplitudes.size());
    for (const Complex& x : a.amplitudes)
        for (const Complex& y : b.amplitudes) v.push_back(x * y);
    return {a.d, a.m + b.m, std::move(v)};
}

/// Connects outputs s and t with a cup.
inline NormalForm partial_trace_nf(const NormalForm& nf, int s, int t) {
    if (s == t) throw NormalFormError("partial trace needs two distinct outputs");
    if (s < 0 || t < 0 || s >= nf.m || t >= nf.m) throw NormalFormError("partial trace index out of range");
    const int d = nf.d;
    std::vector<Complex> v(ipow(d, nf.m - 2), 0.0);
    for (std::size_t i = 0; i < nf.amplitudes.size(); ++i) {
        std::vector<int> e = index_digits(i, d, nf.m);
        if (e[s] != e[t]) continue;
        e.erase(e.begin() + std::max(s, t));
        e.erase(e.begin() + std::min(s, t));
        v[digits_index(e, d)] += nf.amplitudes[i];
    }
    return {nf.d, nf.m - 2, std::move(v)};
}

/// Output k of the result is output order[k] of `nf`.
inline NormalForm permute_nf(const NormalForm& nf, const std::vector<int>& order) {
    if (static_cast<int>(order.size()) != nf.m) throw NormalFormError("permutation length mismatch");
    std::vector<int> check = order;
    std::sort(check.begin(), check.end());
    for (int k = 0; k < nf.m; ++k)
        if (check[k] != k) throw NormalFormError("not a permutation");
    std::vector<Complex> v(nf.amplitudes.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::vector<int> e = index_digits(i, nf.d, nf.m);
        std::vector<int> old(nf.m);
        for (int k = 0; k < nf.m; ++k) old[order[k]] = e[k];
        v[i] = nf.amplitudes[digits_index(old, nf.d)];
    }
    return {nf.d, nf.m, std::move(v)};
}

namespace detail {

inline Diagram fold_merge(const Diagram& two_to_one, int n) {
    const Dimension d(two_to_one.dimension());
    if (n == 1) return identity(d);
    Diagram acc = two_to_one;
    for (int k = 3; k <= n; ++k) acc = compose_seq(compose_par(two_to_one, identity(d, k - 2)), acc);
    return acc;
}

inline Diagram fold_split(const Diagram& one_to_two, int m) {
    const Dimension d(one_to_two.dimension());
    if (m == 1) return identity(d);
    Diagram acc = one_to_two;
    for (int k = 3; k <= m; ++k) acc = compose_seq(acc, compose_par(identity(d, k - 2), one_to_two));
    return acc;
}

// merge (n -> 1), then `middle` (1 -> 1, or a state/effect when a side is empty), then split (1 -> m).
inline Diagram spider_chain(const Diagram& merge2, const Diagram& split2, const Diagram& middle_11,
                            const Diagram& middle_state, const Diagram& middle_effect, int n, int m) {
    if (n == 0) return compose_seq(middle_state, fold_split(split2, m));
    if (m == 0) return compose_seq(fold_merge(merge2, n), middle_effect);
    return seq(fold_merge(merge2, n), middle_11, fold_split(split2, m));
}

// A rank <= 3 decomposition of a high-arity spider or W node, if it has one.
inline std::optional<Diagram> lowered(const GeneratorKind& kind, Dimension d) {
    const Arity a = arity(kind, d);
    if (a.inputs + a.outputs <= 3) return std::nullopt;
    std::optional<std::vector<Complex>> z_phase;
    if (auto* z = std::get_if<ZBox>(&kind)) z_phase = z->phase;
    if (auto* g = std::get_if<GreenSpider>(&kind)) {
        z_phase.emplace();
        for (double x : g->angles) z_phase->push_back(std::polar(1.0, x));
    }
    if (auto* lb = std::get_if<LabeledBox>(&kind)) z_phase = labeled_phase(d, lb->x);
    if (z_phase)
        return spider_chain(z_ones(d, 2, 1), z_ones(d, 1, 2), z_box(d, *z_phase, 1, 1), z_box(d, *z_phase, 0, 1),
                            z_box(d, *z_phase, 1, 0), a.inputs, a.outputs);
    if (auto* p = std::get_if<PinkSpider>(&kind)) {
        const int j = p->phase_index;
        return spider_chain(pink(d, 0, 2, 1), pink(d, 0, 1, 2), pink(d, j, 1, 1), pink(d, j, 0, 1), pink(d, j, 1, 0),
                            a.inputs, a.outputs);
    }
    if (auto* w = std::get_if<WNodeGeneral>(&kind)) {
        if (w->transpose) return fold_merge(w_merge(d, 2), w->legs);
        return fold_split(w_node(d), w->legs);
    }
    return std::nullopt;
}

}  // namespace detail

/// Replaces every spider and W node with more than three legs by a chain of
/// small ones (spider fusion and W associativity).
inline Diagram lower_high_arity(const Diagram& diagram) {
    Diagram out = diagram;
    const Dimension d(diagram.dimension());
    for (const auto& [id, kind] : diagram.nodes())
        if (auto chain = detail::lowered(kind, d)) out = substitute_node(out, id, *chain);
    return out;
}

/// Node order used by normalize: one generator per layer.
struct LayerDecomposition {
    std::vector<std::vector<int>> layers;
};

namespace detail {

inline std::vector<Endpoint> node_legs(const Diagram& dgm, int id) {
    const Arity a = dgm.node_arity(id);
    std::vector<Endpoint> legs;
    for (int p = 0; p < a.outputs; ++p) legs.push_back(node_out(id, p));
    for (int p = 0; p < a.inputs; ++p) legs.push_back(node_in(id, p));
    return legs;
}

// The processed part of a state diagram as its own state; output k is open[k].
inline Diagram partial_diagram(const Diagram& state, const std::set<int>& done, const std::vector<Endpoint>& open) {
    Diagram out(Dimension(state.dimension()), 0, static_cast<int>(open.size()));
    for (int id : done) out.add_node(id, state.node(id));
    auto closed = [&](const Endpoint& e) {
        return !e.is_boundary() && done.contains(e.node) && std::find(open.begin(), open.end(), e) == open.end();
    };
    for (const auto& w : state.wires())
        if (closed(w.a) && closed(w.b)) out.connect(w.a, w.b);
    for (std::size_t k = 0; k < open.size(); ++k) {
        const Endpoint& e = open[k];
        if (e.is_boundary()) {
            // One side of a bare boundary wire: the wire becomes a cap between two outputs.
            const auto other = std::find(open.begin(), open.end(), *state.peer(e));
            if (other - open.begin() > static_cast<long>(k))
                out.connect(boundary_out(static_cast<int>(k)), boundary_out(static_cast<int>(other - open.begin())));
        } else {
            out.connect(e, boundary_out(static_cast<int>(k)));
        }
    }
    return out;
}

}  // namespace detail

/// Greedy order: next is the node that grows the set of open wires the
/// least. Ties go to the node touching the most recently absorbed one, which
/// sweeps chains in order instead of leaving many of them half open.
inline LayerDecomposition layerize(const Diagram& state) {
    std::map<Endpoint, Endpoint> peers;
    for (const auto& w : state.wires()) {
        peers[w.a] = w.b;
        peers[w.b] = w.a;
    }
    std::map<int, std::vector<int>> neighbours;  // node -> peer node per leg, -1 for boundary
    for (const auto& [id, k] : state.nodes())
        for (const Endpoint& leg : detail::node_legs(state, id)) {
            const Endpoint p = peers.at(leg);
            neighbours[id].push_back(p.is_boundary() ? -1 : p.node);
        }

    LayerDecomposition out;
    std::map<int, int> absorbed_at;
    std::set<int> remaining;
    for (const auto& [id, k] : state.nodes()) remaining.insert(id);
    while (!remaining.empty()) {
        int best = -1, best_growth = 0, best_recency = 0;
        for (int id : remaining) {
            int growth = 0, recency = -1;
            for (int nb : neighbours[id]) {
                if (nb == id) continue;
                auto it = absorbed_at.find(nb);
                if (it == absorbed_at.end()) {
                    ++growth;
                } else {
                    --growth;
                    recency = std::max(recency, it->second);
                }
            }
            if (best < 0 || growth < best_growth || (growth == best_growth && recency > best_recency)) {
                best = id;
                best_growth = growth;
                best_recency = recency;
            }
        }
        out.layers.push_back({best});
        absorbed_at[best] = static_cast<int>(out.layers.size());
        remaining.erase(best);
    }
    return out;
}

struct NormalizeOptions {
    bool check_steps = false;
    double step_tolerance = kStepTolerance;
};

/// The normal form of the bent diagram. With check_steps every tensor,
/// trace and permutation step is compared with the interpretation of the
/// part of the diagram absorbed so far.
inline NormalForm normalize(const Diagram& diagram, const NormalizeOptions& options = {}) {
    require_valid(diagram);
    const Dimension d(diagram.dimension());
    const Diagram state = lower_high_arity(bend_to_state(diagram));
    const int m = state.num_outputs();

    NormalForm nf = scalar_nf(d, 1.0);
    std::vector<Endpoint> open;
    std::set<int> done;
    auto check = [&](const char* step) {
        if (!options.check_steps) return;
        const Matrix expected = interpret(detail::partial_diagram(state, done, open));
        const double dev = max_abs_diff(expected.vectorized(), nf.amplitudes);
        if (!(dev <= options.step_tolerance))
            throw NormalFormError(std::string("normalization step '") + step + "' changed the interpretation by " +
                                  std::to_string(dev));
    };
    auto position = [&](const Endpoint& e) {
        return static_cast<int>(std::find(open.begin(), open.end(), e) - open.begin());
    };

    // Bare boundary wires are Bell states.
    for (int k = 0; k < m; ++k) {
        const Endpoint p = *state.peer(boundary_out(k));
        if (!p.is_boundary() || p.port < k) continue;
        nf = tensor_nf(nf, generator_nf(ZBox{ones_phase(d), 0, 2}, d));
        open.push_back(boundary_out(k));
        open.push_back(p);
        check("cap");
    }
    for (const auto& layer : layerize(state).layers)
        for (int id : layer) {
            const std::vector<Endpoint> legs = detail::node_legs(state, id);
            nf = tensor_nf(nf, generator_nf(state.node(id), d));
            open.insert(open.end(), legs.begin(), legs.end());
            done.insert(id);
            check("tensor");
            for (const Endpoint& leg : legs) {
                const int s = position(leg);
                if (s == static_cast<int>(open.size())) continue;  // already traced as a self-loop partner
                const Endpoint peer = *state.peer(leg);
                if (peer.is_boundary() || !done.contains(peer.node)) continue;
                const int t = position(peer);
                nf = partial_trace_nf(nf, s, t);
                open.erase(open.begin() + std::max(s, t));
                open.erase(open.begin() + std::min(s, t));
                check("trace");
            }
        }

    // Each open leg now ends on a boundary output; sort them into place.
    std::vector<int> order(m);
    for (std::size_t k = 0; k < open.size(); ++k) {
        const Endpoint& e = open[k];
        const Endpoint out = e.is_boundary() ? e : *state.peer(e);
        order[out.port] = static_cast<int>(k);
    }
    nf = permute_nf(nf, order);
    if (options.check_steps) {
        const double dev = max_abs_diff(interpret(state).vectorized(), nf.amplitudes);
        if (!(dev <= options.step_tolerance))
            throw NormalFormError("final permutation changed the interpretation by " + std::to_string(dev));
    }
    return nf;
}

inline bool amplitudes_equal(const NormalForm& a, const NormalForm& b, double tol = kEqualityTolerance) {
    return a.d == b.d && a.m == b.m && max_abs_diff(a.amplitudes, b.amplitudes) <= tol;
}

/// True iff both diagrams denote the same linear map.
inline bool decide_equal(const Diagram& a, const Diagram& b, double tol = kEqualityTolerance) {
    if (a.dimension() != b.dimension() || a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs())
        return false;
    return amplitudes_equal(normalize(a), normalize(b), tol);
}

}  // namespace zxw
