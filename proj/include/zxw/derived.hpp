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
#include <vector>

#include "zxw/diagram.hpp"

namespace zxw {

// Small composition helpers used by gadget definitions and rule builders.

inline Diagram seq(const Diagram& a) { return a; }
template <typename... Rest>
Diagram seq(const Diagram& a, const Diagram& b, const Rest&... rest) {
    return seq(compose_seq(a, b), rest...);
}

inline Diagram par(const Diagram& a) { return a; }
template <typename... Rest>
Diagram par(const Diagram& a, const Diagram& b, const Rest&... rest) {
    return par(compose_par(a, b), rest...);
}

/// n-fold parallel copy of `piece`; the empty diagram when n == 0.
inline Diagram repeat(const Diagram& piece, int n) {
    Diagram out(Dimension(piece.dimension()));
    for (int i = 0; i < n; ++i) out = compose_par(out, piece);
    return out;
}

inline Diagram empty_diagram(Dimension d) { return Diagram(d); }

inline Diagram z_box(Dimension d, std::vector<Complex> phase, int inputs, int outputs) {
    return make_generator(ZBox{std::move(phase), inputs, outputs}, d);
}

inline Diagram z_ones(Dimension d, int inputs, int outputs) { return z_box(d, ones_phase(d), inputs, outputs); }

inline Diagram pink(Dimension d, int j, int inputs, int outputs) {
    return make_generator(PinkSpider{j, inputs, outputs}, d);
}

inline Diagram hadamard(Dimension d) { return make_generator(Hadamard{}, d); }
inline Diagram hadamard_dagger(Dimension d) { return make_generator(HadamardDagger{}, d); }
inline Diagram w_node(Dimension d) { return make_generator(WNode{}, d); }
inline Diagram w_fan(Dimension d, int legs) { return make_generator(WNodeGeneral{legs, false}, d); }
inline Diagram w_merge(Dimension d, int legs) { return make_generator(WNodeGeneral{legs, true}, d); }
inline Diagram multiplier(Dimension d, int w) { return make_generator(Multiplier{w}, d); }
inline Diagram dualiser(Dimension d) { return make_generator(Dualiser{}, d); }

/// Zero-legged Z box whose interpretation is the scalar s (phase (0, ..., 0, s - 1)).
inline Diagram scalar_z(Dimension d, Complex s) { return z_box(d, labeled_phase(d, s - 1.0), 0, 0); }

/// Defining composition of a derived gadget in terms of other generators.
/// Returns the node itself for core kinds. One level only; see expand_derived.
inline Diagram gadget_definition(const GeneratorKind& kind, Dimension d) {
    const int dd = d.value();
    if (is_core(kind)) return make_generator(kind, d);
    if (std::holds_alternative<HadamardDagger>(kind)) return seq(hadamard(d), hadamard(d), hadamard(d));
    if (auto* g = std::get_if<GreenSpider>(&kind)) {
        std::vector<Complex> phase;
        for (double a : g->angles) phase.push_back(std::polar(1.0, a));
        return z_box(d, phase, g->inputs, g->outputs);
    }
    if (auto* lb = std::get_if<LabeledBox>(&kind)) return z_box(d, labeled_phase(dd, lb->x), lb->inputs, lb->outputs);
    if (auto* s = std::get_if<ScalarBox>(&kind)) return scalar_z(d, s->value);
    if (auto* p = std::get_if<PinkSpider>(&kind)) {
        // H-dagger on every input, K_j Z box, H on every output, scalar d^{(m+n-2)/2}.
        const double u = std::pow(static_cast<double>(dd), (p->inputs + p->outputs - 2) / 2.0);
        Diagram core = seq(repeat(hadamard_dagger(d), p->inputs), z_box(d, fourier_phase(dd, p->phase_index), p->inputs, p->outputs),
                           repeat(hadamard(d), p->outputs));
        return compose_par(core, scalar_z(d, u));
    }
    if (std::holds_alternative<Dualiser>(kind)) {
        return seq(compose_par(cap(d), identity(d)), compose_par(identity(d), pink(d, 0, 2, 0)));
    }
    if (auto* m = std::get_if<Multiplier>(&kind)) {
        const int w = mod(m->weight, dd);
        return seq(z_ones(d, 1, w), pink(d, 0, w, 1));
    }
    if (std::holds_alternative<Triangle>(kind))
        return seq(w_node(d), compose_par(identity(d), z_ones(d, 1, 0)));
    if (std::holds_alternative<TriangleInverse>(kind))
        return seq(w_node(d), compose_par(identity(d), z_box(d, std::vector<Complex>(dd - 1, -1.0), 1, 0)));
    if (auto* w = std::get_if<WNodeGeneral>(&kind)) {
        if (w->transpose) return transpose(w_fan(d, w->legs));
        if (w->legs == 1) return identity(d);
        if (w->legs == 2) return w_node(d);
        return seq(w_node(d), compose_par(identity(d), w_fan(d, w->legs - 1)));
    }
    // VBox: weight -i multiplier on input i, then a (d-1)-leg W merge.
    Diagram mults(d);
    for (int i = 1; i < dd; ++i) mults = compose_par(mults, multiplier(d, dd - i));
    return seq(mults, w_merge(d, dd - 1));
}

/// Rewrites every derived gadget into core generators (Z box, Hadamard, W node,
/// wiring). The interpretation is unchanged.
inline Diagram expand_derived(const Diagram& diagram) {
    Diagram current = diagram;
    for (;;) {
        int target = -1;
        for (const auto& [id, kind] : current.nodes())
            if (!is_core(kind)) {
                target = id;
                break;
            }
        if (target < 0) return current;
        current = substitute_node(current, target, gadget_definition(current.node(target), Dimension(current.dimension())));
    }
}

}  // namespace zxw
