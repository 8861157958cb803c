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
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zxw/generator.hpp"

namespace zxw {

enum class PortRole { In, Out };

inline constexpr int kBoundary = -1;

/// One end of a wire: a node port, or a boundary position when node == kBoundary.
struct Endpoint {
    int node = kBoundary;
    PortRole role = PortRole::In;
    int port = 0;

    bool is_boundary() const { return node == kBoundary; }
    friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

inline Endpoint boundary_in(int position) { return {kBoundary, PortRole::In, position}; }
inline Endpoint boundary_out(int position) { return {kBoundary, PortRole::Out, position}; }
inline Endpoint node_in(int node, int port) { return {node, PortRole::In, port}; }
inline Endpoint node_out(int node, int port) { return {node, PortRole::Out, port}; }

inline std::string to_string(const Endpoint& e) {
    const std::string role = e.role == PortRole::In ? "in" : "out";
    const std::string who = e.is_boundary() ? "boundary" : "node " + std::to_string(e.node);
    return who + " " + role + " " + std::to_string(e.port);
}

/// Undirected connection between two endpoints.
struct Wire {
    Endpoint a;
    Endpoint b;
    friend auto operator<=>(const Wire&, const Wire&) = default;
    friend bool operator==(const Wire&, const Wire&) = default;
};

class DiagramError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered port-graph of generators over a fixed dimension. Boundary inputs
/// and outputs are positions 0..n-1 and 0..m-1. Swaps are not nodes; they
/// are whatever the wiring says.
class Diagram {
public:
    explicit Diagram(Dimension d, int inputs = 0, int outputs = 0) : d_(d), inputs_(inputs), outputs_(outputs) {}

    int dimension() const { return d_.value(); }
    int num_inputs() const { return inputs_; }
    int num_outputs() const { return outputs_; }
    Arity arity() const { return {inputs_, outputs_}; }
    const std::map<int, GeneratorKind>& nodes() const { return nodes_; }
    const std::vector<Wire>& wires() const { return wires_; }

    const GeneratorKind& node(int id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) throw DiagramError("no node with id " + std::to_string(id));
        return it->second;
    }

    int next_id() const { return nodes_.empty() ? 0 : nodes_.rbegin()->first + 1; }

    int add_node(GeneratorKind kind) { return add_node(next_id(), std::move(kind)); }

    int add_node(int id, GeneratorKind kind) {
        if (id < 0) throw DiagramError("node ids must be non-negative");
        if (!nodes_.emplace(id, reduce_mod_d(std::move(kind), d_)).second)
            throw DiagramError("duplicate node id " + std::to_string(id));
        return id;
    }

    void remove_node(int id) { nodes_.erase(id); }

    void connect(Endpoint a, Endpoint b) { wires_.push_back({a, b}); }

    void set_wires(std::vector<Wire> wires) { wires_ = std::move(wires); }

    /// The endpoint at the other end of the wire touching `e`.
    std::optional<Endpoint> peer(const Endpoint& e) const {
        for (const auto& w : wires_) {
            if (w.a == e) return w.b;
            if (w.b == e) return w.a;
        }
        return std::nullopt;
    }

    Arity node_arity(int id) const { return zxw::arity(node(id), d_); }

private:
    Dimension d_;
    int inputs_ = 0;
    int outputs_ = 0;
    std::map<int, GeneratorKind> nodes_;
    std::vector<Wire> wires_;
};

/// Every invariant violation of `diagram`; empty iff well formed.
inline std::vector<std::string> validate(const Diagram& diagram) {
    std::vector<std::string> out;
    const int d = diagram.dimension();
    std::map<Endpoint, int> uses;
    for (const auto& [id, kind] : diagram.nodes()) {
        for (const auto& v : kind_violations(kind, d)) out.push_back("node " + std::to_string(id) + ": " + v);
        const Arity a = arity(kind, d);
        for (int p = 0; p < a.inputs; ++p) uses[node_in(id, p)] = 0;
        for (int p = 0; p < a.outputs; ++p) uses[node_out(id, p)] = 0;
    }
    for (int p = 0; p < diagram.num_inputs(); ++p) uses[boundary_in(p)] = 0;
    for (int p = 0; p < diagram.num_outputs(); ++p) uses[boundary_out(p)] = 0;
    for (const auto& w : diagram.wires()) {
        for (const Endpoint& e : {w.a, w.b}) {
            auto it = uses.find(e);
            if (it == uses.end()) out.push_back("wire endpoint " + to_string(e) + " does not exist");
            else ++it->second;
        }
    }
    for (const auto& [e, n] : uses) {
        if (n == 0) out.push_back("dangling port: " + to_string(e));
        else if (n > 1) out.push_back("port used by " + std::to_string(n) + " wires: " + to_string(e));
    }
    return out;
}

inline void require_valid(const Diagram& diagram) {
    if (auto v = validate(diagram); !v.empty()) throw DiagramError("ill-formed diagram: " + v.front());
}

namespace detail {

inline constexpr int kJunction = -2;

inline Endpoint junction(int id) { return {kJunction, PortRole::In, id}; }

// Joins wires meeting at junction endpoints into single wires. Each junction
// must occur exactly twice. A closed loop becomes the scalar d.
inline void splice(Diagram& diagram, std::vector<Wire> wires) {
    std::vector<Wire> done;
    auto is_junction = [](const Endpoint& e) { return e.node == kJunction; };
    while (!wires.empty()) {
        Wire w = wires.back();
        wires.pop_back();
        if (!is_junction(w.a) && !is_junction(w.b)) {
            done.push_back(w);
            continue;
        }
        if (!is_junction(w.a)) std::swap(w.a, w.b);
        const Endpoint j = w.a;
        if (w.b == j) {
            diagram.add_node(ScalarBox{Complex(diagram.dimension(), 0.0)});
            continue;
        }
        auto it = std::find_if(wires.begin(), wires.end(), [&](const Wire& x) { return x.a == j || x.b == j; });
        if (it == wires.end()) throw DiagramError("unmatched junction while splicing");
        const Endpoint other = it->a == j ? it->b : it->a;
        wires.erase(it);
        wires.push_back({w.b, other});
    }
    std::sort(done.begin(), done.end());
    diagram.set_wires(std::move(done));
}

inline Endpoint shift_node(Endpoint e, int offset) {
    if (!e.is_boundary()) e.node += offset;
    return e;
}

}  // namespace detail

/// Single-node diagram for `kind`, boundary matching the kind's arity.
inline Diagram make_generator(const GeneratorKind& kind, Dimension d) {
    GeneratorKind k = reduce_mod_d(kind, d);
    if (auto v = kind_violations(k, d); !v.empty()) throw DiagramError(v.front());
    const Arity a = arity(k, d);
    Diagram out(d, a.inputs, a.outputs);
    const int id = out.add_node(std::move(k));
    for (int p = 0; p < a.inputs; ++p) out.connect(boundary_in(p), node_in(id, p));
    for (int p = 0; p < a.outputs; ++p) out.connect(node_out(id, p), boundary_out(p));
    return out;
}

/// n parallel bare wires.
inline Diagram identity(Dimension d, int n = 1) {
    Diagram out(d, n, n);
    for (int p = 0; p < n; ++p) out.connect(boundary_in(p), boundary_out(p));
    return out;
}

/// Wire permutation: input i is routed to output perm[i].
inline Diagram permutation(Dimension d, const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<int> seen(n, 0);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p]++) throw DiagramError("not a permutation");
    }
    Diagram out(d, n, n);
    for (int i = 0; i < n; ++i) out.connect(boundary_in(i), boundary_out(perm[i]));
    return out;
}

inline Diagram swap(Dimension d) { return permutation(d, {1, 0}); }

/// Sequential composition: outputs of `first` plugged positionally into inputs of `second`.
inline Diagram compose_seq(const Diagram& first, const Diagram& second) {
    if (first.dimension() != second.dimension()) throw DiagramError("dimension mismatch in sequential composition");
    if (first.num_outputs() != second.num_inputs())
        throw DiagramError("arity mismatch: " + std::to_string(first.num_outputs()) + " outputs into " +
                           std::to_string(second.num_inputs()) + " inputs");
    Diagram out(Dimension(first.dimension()), first.num_inputs(), second.num_outputs());
    const int offset = first.next_id();
    for (const auto& [id, k] : first.nodes()) out.add_node(id, k);
    for (const auto& [id, k] : second.nodes()) out.add_node(id + offset, k);
    std::vector<Wire> wires;
    auto from_first = [](Endpoint e) {
        return e.is_boundary() && e.role == PortRole::Out ? detail::junction(e.port) : e;
    };
    auto from_second = [offset](Endpoint e) {
        if (e.is_boundary()) return e.role == PortRole::In ? detail::junction(e.port) : e;
        return detail::shift_node(e, offset);
    };
    for (const auto& w : first.wires()) wires.push_back({from_first(w.a), from_first(w.b)});
    for (const auto& w : second.wires()) wires.push_back({from_second(w.a), from_second(w.b)});
    detail::splice(out, std::move(wires));
    return out;
}

/// Parallel composition: `left` next to `right`, boundaries concatenated.
inline Diagram compose_par(const Diagram& left, const Diagram& right) {
    if (left.dimension() != right.dimension()) throw DiagramError("dimension mismatch in parallel composition");
    Diagram out(Dimension(left.dimension()), left.num_inputs() + right.num_inputs(),
                left.num_outputs() + right.num_outputs());
    const int offset = left.next_id();
    for (const auto& [id, k] : left.nodes()) out.add_node(id, k);
    for (const auto& [id, k] : right.nodes()) out.add_node(id + offset, k);
    std::vector<Wire> wires = left.wires();
    auto shift = [&](Endpoint e) {
        if (!e.is_boundary()) return detail::shift_node(e, offset);
        e.port += e.role == PortRole::In ? left.num_inputs() : left.num_outputs();
        return e;
    };
    for (const auto& w : right.wires()) wires.push_back({shift(w.a), shift(w.b)});
    std::sort(wires.begin(), wires.end());
    out.set_wires(std::move(wires));
    return out;
}

/// Green cap sum_j |jj>, stored as a two-output Z box with all-one phases.
inline Diagram cap(Dimension d) { return make_generator(ZBox{ones_phase(d), 0, 2}, d); }

/// Green cup sum_j <jj|.
inline Diagram cup(Dimension d) { return make_generator(ZBox{ones_phase(d), 2, 0}, d); }

/// Attaches a cap to every input: the result has no inputs and outputs
/// [original outputs..., original inputs...]. Its interpretation is the
/// row-major flattening of the original matrix.
inline Diagram bend_to_state(const Diagram& diagram) {
    const int n = diagram.num_inputs();
    if (n == 0) return diagram;
    const Dimension d(diagram.dimension());
    Diagram caps(d, 0, 2 * n);
    for (int i = 0; i < n; ++i) {
        const int id = caps.add_node(ZBox{ones_phase(d), 0, 2});
        caps.connect(node_out(id, 0), boundary_out(i));
        caps.connect(node_out(id, 1), boundary_out(n + i));
    }
    return compose_seq(caps, compose_par(diagram, identity(d, n)));
}

/// Matrix transpose realised with green caps and cups: inputs become outputs
/// at the same positions and vice versa.
inline Diagram transpose(const Diagram& diagram) {
    const Dimension d(diagram.dimension());
    const int n = diagram.num_inputs(), m = diagram.num_outputs();
    // caps for the old inputs, then the diagram, then cups against the new inputs.
    Diagram front(d, m, 2 * n + m);
    for (int i = 0; i < n; ++i) {
        const int id = front.add_node(ZBox{ones_phase(d), 0, 2});
        front.connect(node_out(id, 0), boundary_out(i));
        front.connect(node_out(id, 1), boundary_out(n + m + i));
    }
    for (int j = 0; j < m; ++j) front.connect(boundary_in(j), boundary_out(n + j));
    Diagram middle = compose_par(compose_par(diagram, identity(d, m)), identity(d, n));
    Diagram back(d, 2 * m + n, n);
    for (int j = 0; j < m; ++j) {
        const int id = back.add_node(ZBox{ones_phase(d), 2, 0});
        back.connect(boundary_in(j), node_in(id, 0));
        back.connect(boundary_in(m + j), node_in(id, 1));
    }
    for (int i = 0; i < n; ++i) back.connect(boundary_in(2 * m + i), boundary_out(i));
    return compose_seq(compose_seq(front, middle), back);
}

/// Replaces the nodes in `removed` by `replacement`. `inputs[k]` / `outputs[k]`
/// name the removed-node port that replacement boundary input / output k takes over.
inline Diagram substitute(const Diagram& diagram, const std::set<int>& removed, const Diagram& replacement,
                          const std::vector<Endpoint>& inputs, const std::vector<Endpoint>& outputs) {
    if (replacement.dimension() != diagram.dimension()) throw DiagramError("dimension mismatch in substitution");
    if (static_cast<int>(inputs.size()) != replacement.num_inputs() ||
        static_cast<int>(outputs.size()) != replacement.num_outputs())
        throw DiagramError("replacement arity does not match the cut");
    std::map<Endpoint, int> cut;
    for (std::size_t k = 0; k < inputs.size(); ++k) cut[inputs[k]] = static_cast<int>(2 * k);
    for (std::size_t k = 0; k < outputs.size(); ++k) cut[outputs[k]] = static_cast<int>(2 * k + 1);

    Diagram out(Dimension(diagram.dimension()), diagram.num_inputs(), diagram.num_outputs());
    for (const auto& [id, k] : diagram.nodes())
        if (!removed.contains(id)) out.add_node(id, k);
    const int offset = std::max(diagram.next_id(), 0);
    for (const auto& [id, k] : replacement.nodes()) out.add_node(id + offset, k);

    std::vector<Wire> wires;
    auto inside = [&](const Endpoint& e) { return !e.is_boundary() && removed.contains(e.node); };
    auto relabel = [&](const Endpoint& e) {
        auto it = cut.find(e);
        if (it == cut.end()) throw DiagramError("port " + to_string(e) + " leaves the replaced region uncovered");
        return detail::junction(it->second);
    };
    for (const auto& w : diagram.wires()) {
        const bool ia = inside(w.a), ib = inside(w.b);
        if (ia && ib) {
            // Internal unless both ends are cut ports, e.g. a self-loop on a replaced node.
            if (cut.contains(w.a) && cut.contains(w.b)) wires.push_back({relabel(w.a), relabel(w.b)});
            continue;
        }
        wires.push_back({ia ? relabel(w.a) : w.a, ib ? relabel(w.b) : w.b});
    }
    for (const auto& w : replacement.wires()) {
        auto map = [&](Endpoint e) {
            if (!e.is_boundary()) return detail::shift_node(e, offset);
            return detail::junction(e.role == PortRole::In ? 2 * e.port : 2 * e.port + 1);
        };
        wires.push_back({map(w.a), map(w.b)});
    }
    detail::splice(out, std::move(wires));
    return out;
}

/// Replaces node `id` by a diagram of the same arity.
inline Diagram substitute_node(const Diagram& diagram, int id, const Diagram& replacement) {
    const Arity a = diagram.node_arity(id);
    std::vector<Endpoint> ins, outs;
    for (int p = 0; p < a.inputs; ++p) ins.push_back(node_in(id, p));
    for (int p = 0; p < a.outputs; ++p) outs.push_back(node_out(id, p));
    return substitute(diagram, {id}, replacement, ins, outs);
}

}  // namespace zxw
