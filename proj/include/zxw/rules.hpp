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
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "zxw/derived.hpp"
#include "zxw/diagram.hpp"
#include "zxw/generator.hpp"
#include "zxw/interpret.hpp"
#include "zxw/matrix.hpp"
#include "zxw/normal_form.hpp"

namespace zxw {

/// Free parameters of one rule instance. What each slot means is given by
/// the rule's param_spec.
struct RuleParams {
    std::vector<std::vector<Complex>> phases;
    std::vector<Complex> scalars;
    std::vector<int> ints;
};

enum class RuleTier { Axiom, Derived };

inline std::string tier_name(RuleTier t) { return t == RuleTier::Axiom ? "axiom" : "derived"; }

struct RewriteRule {
    std::string name;
    RuleTier tier = RuleTier::Axiom;
    std::string param_spec;
    std::function<RuleParams(Dimension, std::mt19937_64&)> sample;
    std::function<Diagram(Dimension, const RuleParams&)> lhs;
    std::function<Diagram(Dimension, const RuleParams&)> rhs;
};

/// Draws rule parameters. Complex entries come from the unit disk, mixed
/// with 0, 1, -1 and omega.
class ParamDraw {
public:
    ParamDraw(Dimension d, std::mt19937_64& rng) : d_(d), rng_(rng) {}

    Complex entry(bool nonzero = false) {
        for (;;) {
            const int pick = std::uniform_int_distribution<int>(0, 9)(rng_);
            Complex x;
            switch (pick) {
                case 0: x = 0.0; break;
                case 1: x = 1.0; break;
                case 2: x = -1.0; break;
                case 3: x = root_of_unity(d_, 1); break;
                default: {
                    std::uniform_real_distribution<double> u(0.0, 1.0);
                    x = std::polar(std::sqrt(u(rng_)), 2.0 * std::numbers::pi * u(rng_));
                }
            }
            if (!nonzero || std::abs(x) >= 0.1) return x;
        }
    }

    std::vector<Complex> vector(std::size_t n, bool nonzero = false) {
        std::vector<Complex> v(n);
        for (auto& x : v) x = entry(nonzero);
        return v;
    }

    ParamDraw& phase(bool nonzero = false) {
        params_.phases.push_back(vector(d_ - 1, nonzero));
        return *this;
    }
    ParamDraw& amplitudes(int m) {
        params_.phases.push_back(vector(ipow(d_, m)));
        return *this;
    }
    ParamDraw& scalar(bool nonzero = false) {
        params_.scalars.push_back(entry(nonzero));
        return *this;
    }
    ParamDraw& integer(int lo, int hi) {
        params_.ints.push_back(uniform(lo, hi));
        return *this;
    }
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    RuleParams& params() { return params_; }
    RuleParams done() { return params_; }

private:
    Dimension d_;
    std::mt19937_64& rng_;
    RuleParams params_;
};

namespace rule_parts {

inline Diagram id(Dimension d, int n = 1) { return identity(d, n); }
inline Diagram scalar(Dimension d, Complex s) { return scalar_z(d, s); }
inline Diagram labeled(Dimension d, Complex x, int in, int out) { return make_generator(LabeledBox{x, in, out}, d); }
inline Diagram gen(Dimension d, GeneratorKind k) { return make_generator(std::move(k), d); }

inline Diagram bare_cap(Dimension d) {
    Diagram out(d, 0, 2);
    out.connect(boundary_out(0), boundary_out(1));
    return out;
}

inline Diagram bare_cup(Dimension d) {
    Diagram out(d, 2, 0);
    out.connect(boundary_in(0), boundary_in(1));
    return out;
}

inline std::vector<Complex> times(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

inline std::vector<Complex> plus(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

/// (a_{d-1}, ..., a_1)
inline std::vector<Complex> reversed(std::vector<Complex> a) {
    std::reverse(a.begin(), a.end());
    return a;
}

/// Phase vector with `value` in slot k (1-based) and zeros elsewhere.
inline std::vector<Complex> unit(Dimension d, int k, Complex value = 1.0) {
    std::vector<Complex> p(d - 1, 0.0);
    p[k - 1] = value;
    return p;
}

/// k_j(a): the phase shifted by j and normalised by a_{d-j}.
inline std::vector<Complex> shifted(Dimension d, const std::vector<Complex>& a, int j) {
    std::vector<Complex> out(d - 1);
    const Complex norm = phase_entry(a, d - j, d);
    for (int k = 1; k < d; ++k) out[k - 1] = phase_entry(a, k - j, d) / norm;
    return out;
}

inline Diagram fan_chain(Dimension d, int legs) {
    if (legs == 1) return id(d);
    return seq(w_node(d), par(id(d), fan_chain(d, legs - 1)));
}

/// Cup on outputs s and t of an m-output state, identity elsewhere.
inline Diagram cup_at(Dimension d, int m, int s, int t) {
    Diagram cut(d, m, m - 2);
    const int c = cut.add_node(ZBox{ones_phase(d), 2, 0});
    cut.connect(boundary_in(s), node_in(c, 0));
    cut.connect(boundary_in(t), node_in(c, 1));
    int next = 0;
    for (int k = 0; k < m; ++k)
        if (k != s && k != t) cut.connect(boundary_in(k), boundary_out(next++));
    return cut;
}

inline Diagram middle_swap(Dimension d) { return permutation(d, {0, 2, 1, 3}); }

}  // namespace rule_parts

namespace detail {

inline NormalForm nf_param(Dimension d, const RuleParams& p, std::size_t slot) {
    const std::size_t size = p.phases.at(slot).size();
    int m = 0;
    while (ipow(d, m) < size) ++m;
    return matrix_to_nf(p.phases.at(slot), d, m);
}

inline RewriteRule make_rule(std::string name, RuleTier tier, std::string spec,
                             std::function<RuleParams(Dimension, std::mt19937_64&)> sample,
                             std::function<Diagram(Dimension, const RuleParams&)> lhs,
                             std::function<Diagram(Dimension, const RuleParams&)> rhs) {
    return {std::move(name), tier, std::move(spec), std::move(sample), std::move(lhs), std::move(rhs)};
}

inline RuleParams no_params(Dimension, std::mt19937_64&) { return {}; }

}  // namespace detail

/// Every rewrite rule and derived rule of the calculus as a parameterised pair of
/// diagrams.
inline std::vector<RewriteRule> builtin_rules() {
    using namespace rule_parts;
    using detail::make_rule;
    using detail::no_params;
    using P = const RuleParams&;
    using Rng = std::mt19937_64;
    const RuleTier A = RuleTier::Axiom, L = RuleTier::Derived;
    std::vector<RewriteRule> r;

    // ZX part.
    r.push_back(make_rule(
        "S1", A, "phases a, b; ints n, m: Z(a) n->2 with Z(b) 1->m on its second output",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().phase().integer(0, 2).integer(0, 2).done(); },
        [](Dimension d, P p) {
            return seq(z_box(d, p.phases[0], p.ints[0], 2), par(id(d), z_box(d, p.phases[1], 1, p.ints[1])));
        },
        [](Dimension d, P p) { return z_box(d, times(p.phases[0], p.phases[1]), p.ints[0], 1 + p.ints[1]); }));
    r.push_back(make_rule(
        "S2", A, "none", no_params, [](Dimension d, P) { return z_ones(d, 1, 1); }, [](Dimension d, P) { return id(d); }));
    r.push_back(make_rule(
        "S3", A, "int t: 0 for the cap, 1 for the cup",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, 1).done(); },
        [](Dimension d, P p) { return p.ints[0] == 0 ? cap(d) : cup(d); },
        [](Dimension d, P p) { return p.ints[0] == 0 ? bare_cap(d) : bare_cup(d); }));
    r.push_back(make_rule(
        "S4", A, "phase a: a 1->1 Z box slides along the cup",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().done(); },
        [](Dimension d, P p) { return seq(par(z_box(d, p.phases[0], 1, 1), id(d)), cup(d)); },
        [](Dimension d, P p) { return seq(par(id(d), z_box(d, p.phases[0], 1, 1)), cup(d)); }));
    r.push_back(make_rule(
        "B1", A, "int m: pink K_0 1->m on the all-ones state",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(1, 3).done(); },
        [](Dimension d, P p) { return seq(z_ones(d, 0, 1), pink(d, 0, 1, p.ints[0])); },
        [](Dimension d, P p) { return repeat(z_ones(d, 0, 1), p.ints[0]); }));
    r.push_back(make_rule(
        "B2", A, "none", no_params,
        [](Dimension d, P) {
            return seq(par(z_ones(d, 1, 2), z_ones(d, 1, 2)), middle_swap(d), par(pink(d, 0, 2, 1), pink(d, 0, 2, 1)));
        },
        [](Dimension d, P) { return seq(pink(d, 0, 2, 1), z_ones(d, 1, 2)); }));
    r.push_back(make_rule(
        "K0", A, "ints j, m: green copy of the pink K_j state",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).integer(0, 3).done(); },
        [](Dimension d, P p) { return seq(pink(d, p.ints[0], 0, 1), z_ones(d, 1, p.ints[1])); },
        [](Dimension d, P p) { return repeat(pink(d, p.ints[0], 0, 1), p.ints[1]); }));
    r.push_back(make_rule(
        "P1", A, "int j, phase a with a_{d-j} != 0: pink K_{d-j} on a Z state",
        [](Dimension d, Rng& g) {
            ParamDraw draw(d, g);
            draw.integer(0, d - 1).phase();
            RuleParams p = draw.done();
            const int j = p.ints[0];
            if (j != 0) p.phases[0][d - j - 1] = draw.entry(true);
            return p;
        },
        [](Dimension d, P p) { return seq(z_box(d, p.phases[0], 0, 1), pink(d, d - p.ints[0], 1, 1)); },
        [](Dimension d, P p) {
            const int j = p.ints[0];
            return par(scalar(d, phase_entry(p.phases[0], d - j, d)), z_box(d, shifted(d, p.phases[0], j), 0, 1));
        }));
    r.push_back(make_rule(
        "Zer", A, "none", no_params, [](Dimension d, P) { return z_box(d, std::vector<Complex>(d - 1, 0.0), 0, 1); },
        [](Dimension d, P) { return pink(d, 0, 0, 1); }));
    r.push_back(make_rule(
        "Ept", A, "phase a", [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().done(); },
        [](Dimension d, P p) { return seq(pink(d, 0, 0, 1), z_box(d, p.phases[0], 1, 0)); },
        [](Dimension d, P) { return empty_diagram(d); }));
    r.push_back(make_rule(
        "Hopf", A, "none: green 1->d and pink d->1 joined by d wires", no_params,
        [](Dimension d, P) { return seq(z_ones(d, 1, d), pink(d, 0, d, 1)); },
        [](Dimension d, P) { return par(z_ones(d, 1, 0), pink(d, 0, 0, 1)); }));
    r.push_back(make_rule(
        "Hdag", A, "none", no_params, [](Dimension d, P) { return hadamard_dagger(d); },
        [](Dimension d, P) { return seq(hadamard(d), hadamard(d), hadamard(d)); }));
    r.push_back(make_rule(
        "HZ", A, "ints j, n, m: pink K_j n->m as H-conjugated Z(K_j) with scalar d^{(m+n-2)/2}",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).integer(0, 2).integer(0, 2).done(); },
        [](Dimension d, P p) { return pink(d, p.ints[0], p.ints[1], p.ints[2]); },
        [](Dimension d, P p) {
            const int n = p.ints[1], m = p.ints[2];
            return par(seq(repeat(hadamard_dagger(d), n), z_box(d, fourier_phase(d, p.ints[0]), n, m),
                           repeat(hadamard(d), m)),
                       scalar(d, std::pow(static_cast<double>(d), (m + n - 2) / 2.0)));
        }));
    r.push_back(make_rule(
        "HX", A, "ints j, n, m: the opposite colour change, up to dualisers",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).integer(0, 2).integer(0, 2).done(); },
        [](Dimension d, P p) {
            const int n = p.ints[1], m = p.ints[2];
            return seq(repeat(dualiser(d), n), pink(d, p.ints[0], n, m), repeat(dualiser(d), m));
        },
        [](Dimension d, P p) {
            const int n = p.ints[1], m = p.ints[2];
            return par(seq(repeat(hadamard(d), n), z_box(d, fourier_phase(d, p.ints[0]), n, m),
                           repeat(hadamard_dagger(d), m)),
                       scalar(d, std::pow(static_cast<double>(d), (m + n - 2) / 2.0)));
        }));
    r.push_back(make_rule(
        "Du", A, "none", no_params, [](Dimension d, P) { return dualiser(d); },
        [](Dimension d, P) { return seq(par(cap(d), id(d)), par(id(d), pink(d, 0, 2, 0))); }));
    r.push_back(make_rule(
        "Mu", A, "int w: multiplier as w parallel wires",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).done(); },
        [](Dimension d, P p) { return multiplier(d, p.ints[0]); },
        [](Dimension d, P p) { return seq(z_ones(d, 1, p.ints[0]), pink(d, 0, p.ints[0], 1)); }));
    r.push_back(make_rule(
        "YT", A, "int t: 0 for the triangle, 1 for its inverse",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, 1).done(); },
        [](Dimension d, P p) { return p.ints[0] == 0 ? gen(d, Triangle{}) : gen(d, TriangleInverse{}); },
        [](Dimension d, P p) {
            const std::vector<Complex> phase(d - 1, p.ints[0] == 0 ? 1.0 : -1.0);
            return seq(w_node(d), par(id(d), z_box(d, phase, 1, 0)));
        }));
    r.push_back(make_rule(
        "WN", A, "ints N, t: N-legged W node (t = 1 transposed) as a chain",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(1, 4).integer(0, 1).done(); },
        [](Dimension d, P p) { return p.ints[1] == 0 ? w_fan(d, p.ints[0]) : w_merge(d, p.ints[0]); },
        [](Dimension d, P p) {
            const Diagram chain = fan_chain(d, p.ints[0]);
            return p.ints[1] == 0 ? chain : transpose(chain);
        }));

    // ZW part.
    r.push_back(make_rule(
        "AD", A, "phases a, b; int m: W-transpose addition of two Z states copied m times",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().phase().integer(0, 2).done(); },
        [](Dimension d, P p) {
            return seq(par(z_box(d, p.phases[0], 0, 1), z_box(d, p.phases[1], 0, 1)), w_merge(d, 2),
                       z_ones(d, 1, p.ints[0]));
        },
        [](Dimension d, P p) { return z_box(d, plus(p.phases[0], p.phases[1]), 0, p.ints[0]); }));
    r.push_back(make_rule(
        "BZW", A, "phase a: W node after a 2->1 Z box",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().done(); },
        [](Dimension d, P p) { return seq(z_box(d, p.phases[0], 2, 1), w_node(d)); },
        [](Dimension d, P p) {
            return seq(par(w_node(d), w_node(d)), middle_swap(d),
                       par(z_box(d, p.phases[0], 2, 1), z_box(d, p.phases[0], 2, 1)));
        }));
    r.push_back(make_rule(
        "WA", A, "none", no_params, [](Dimension d, P) { return seq(w_node(d), par(w_node(d), id(d))); },
        [](Dimension d, P) { return seq(w_node(d), par(id(d), w_node(d))); }));
    r.push_back(make_rule(
        "WS", A, "none", no_params, [](Dimension d, P) { return seq(w_node(d), swap(d)); },
        [](Dimension d, P) { return w_node(d); }));
    r.push_back(make_rule(
        "WW", A, "none", no_params, [](Dimension d, P) { return seq(w_node(d), w_merge(d, 2), w_node(d)); },
        [](Dimension d, P) {
            return seq(w_node(d), par(w_node(d), w_node(d)), middle_swap(d), par(w_merge(d, 2), w_merge(d, 2)));
        }));

    // ZXW part.
    r.push_back(make_rule(
        "Bs0", A, "none", no_params, [](Dimension d, P) { return seq(pink(d, 0, 0, 1), w_node(d)); },
        [](Dimension d, P) { return par(pink(d, 0, 0, 1), pink(d, 0, 0, 1)); }));
    r.push_back(make_rule(
        "Bsj", A, "int j in 1..d-1: T_j has its 1 in slot d-j",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(1, d - 1).done(); },
        [](Dimension d, P p) {
            return seq(par(z_ones(d, 0, 1), id(d)), w_merge(d, 2), pink(d, d - p.ints[0], 1, 0));
        },
        [](Dimension d, P p) { return z_box(d, unit(d, d - p.ints[0]), 1, 0); }));
    r.push_back(make_rule(
        "TA", A, "phases a, b",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().phase().done(); },
        [](Dimension d, P p) {
            return seq(w_node(d), par(z_box(d, p.phases[0], 1, 1), z_box(d, p.phases[1], 1, 1)), pink(d, 0, 2, 1));
        },
        [](Dimension d, P p) {
            return seq(w_node(d), par(z_box(d, p.phases[0], 1, 1), z_box(d, p.phases[1], 1, 1)), w_merge(d, 2));
        }));
    r.push_back(make_rule(
        "KZ", A, "int n; ints e_1..e_n in 1..d-1",
        [](Dimension d, Rng& g) {
            ParamDraw draw(d, g);
            const int n = draw.uniform(1, 3);
            draw.params().ints.push_back(n);
            for (int i = 0; i < n; ++i) draw.integer(1, d - 1);
            return draw.done();
        },
        [](Dimension d, P p) { return par(pink(d, d - 1, 1, 0), repeat(pink(d, 0, 1, 0), p.ints[0])); },
        [](Dimension d, P p) {
            const int n = p.ints[0];
            std::vector<int> perm(2 * n + 1);
            for (int i = 1; i <= n; ++i) {
                perm[2 * i - 1] = i;
                perm[2 * i] = n + i;
            }
            Diagram weights = empty_diagram(d);
            for (int i = 1; i <= n; ++i) weights = par(weights, multiplier(d, p.ints[i]));
            return seq(par(id(d), repeat(z_ones(d, 1, 2), n)), permutation(d, perm),
                       par(seq(w_merge(d, n + 1), pink(d, d - 1, 1, 0)), seq(weights, pink(d, 0, n, 0))));
        }));
    r.push_back(make_rule(
        "HD", A, "none: Hadamard as its bent normal form with one leg bent back", no_params,
        [](Dimension d, P) { return hadamard(d); },
        [](Dimension d, P) {
            return seq(par(emit_diagram(generator_nf(Hadamard{}, d)), id(d)), par(id(d), cup(d)));
        }));
    r.push_back(make_rule(
        "VA", A, "phase a: d-1 labelled states into the V box",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().done(); },
        [](Dimension d, P p) {
            Diagram states = empty_diagram(d);
            for (const Complex& x : p.phases[0]) states = par(states, labeled(d, x, 0, 1));
            return seq(states, gen(d, VBox{}));
        },
        [](Dimension d, P p) { return z_box(d, p.phases[0], 0, 1); }));
    r.push_back(make_rule(
        "VW", A, "phases a, b: V box after pairwise W merges of labelled states",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().phase().done(); },
        [](Dimension d, P p) {
            Diagram states = empty_diagram(d);
            for (int i = 0; i < d - 1; ++i)
                states = par(states, labeled(d, p.phases[0][i], 0, 1), labeled(d, p.phases[1][i], 0, 1));
            return seq(states, repeat(w_merge(d, 2), d - 1), gen(d, VBox{}));
        },
        [](Dimension d, P p) {
            Diagram left = empty_diagram(d), right = empty_diagram(d);
            for (int i = 0; i < d - 1; ++i) {
                left = par(left, labeled(d, p.phases[0][i], 0, 1));
                right = par(right, labeled(d, p.phases[1][i], 0, 1));
            }
            return seq(par(seq(left, gen(d, VBox{})), seq(right, gen(d, VBox{}))), w_merge(d, 2));
        }));
    r.push_back(make_rule(
        "ZV", A, "phases a, b",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().phase().done(); },
        [](Dimension d, P p) {
            Diagram states = empty_diagram(d);
            for (const Complex& x : p.phases[0]) states = par(states, labeled(d, x, 0, 1));
            return seq(states, gen(d, VBox{}), z_box(d, p.phases[1], 1, 1));
        },
        [](Dimension d, P p) {
            Diagram states = empty_diagram(d);
            for (const Complex& x : times(p.phases[0], p.phases[1])) states = par(states, labeled(d, x, 0, 1));
            return seq(states, gen(d, VBox{}));
        }));

    // Normal-form construction.
    r.push_back(make_rule(
        "NfBranchSwap", L, "amplitudes (m = 1 or 2, all nonzero); int k: swap of neighbouring Z boxes k, k+1",
        [](Dimension d, Rng& g) {
            ParamDraw draw(d, g);
            const int m = draw.uniform(1, 2);
            draw.params().phases.push_back(draw.vector(ipow(d, m), true));
            draw.integer(0, static_cast<int>(ipow(d, m)) - 2);
            return draw.done();
        },
        [](Dimension d, P p) {
            const NormalForm nf = detail::nf_param(d, p, 0);
            std::vector<detail::Branch> branches;
            for (std::size_t i = 0; i < nf.amplitudes.size(); ++i)
                branches.push_back({nf.amplitudes[i], index_digits(i, d, nf.m)});
            std::swap(branches[p.ints[0]], branches[p.ints[0] + 1]);
            return detail::build_spine(d, nf.m, branches);
        },
        [](Dimension d, P p) { return emit_diagram(detail::nf_param(d, p, 0)); }));
    r.push_back(make_rule(
        "NfZBox", L, "phase a; ints n, m: bent Z box is a normal form",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().integer(0, 2).integer(0, 1).done(); },
        [](Dimension d, P p) { return bend_to_state(z_box(d, p.phases[0], p.ints[0], p.ints[1])); },
        [](Dimension d, P p) { return emit_diagram(generator_nf(ZBox{p.phases[0], p.ints[0], p.ints[1]}, d)); }));
    r.push_back(make_rule(
        "NfWNode", L, "none: bent W node is a normal form", no_params,
        [](Dimension d, P) { return bend_to_state(w_node(d)); },
        [](Dimension d, P) { return emit_diagram(generator_nf(WNode{}, d)); }));
    r.push_back(make_rule(
        "NfHadamard", L, "none: bent Hadamard box is a normal form", no_params,
        [](Dimension d, P) { return bend_to_state(hadamard(d)); },
        [](Dimension d, P) { return emit_diagram(generator_nf(Hadamard{}, d)); }));
    r.push_back(make_rule(
        "NfTrace", L, "amplitudes (m outputs); ints s, t: partial trace of a normal form",
        [](Dimension d, Rng& g) {
            ParamDraw draw(d, g);
            const int m = d <= 3 ? draw.uniform(2, 3) : 2;
            draw.amplitudes(m);
            const int s = draw.uniform(0, m - 1);
            draw.params().ints = {s, (s + draw.uniform(1, m - 1)) % m};
            return draw.done();
        },
        [](Dimension d, P p) {
            const NormalForm nf = detail::nf_param(d, p, 0);
            return seq(emit_diagram(nf), cup_at(d, nf.m, p.ints[0], p.ints[1]));
        },
        [](Dimension d, P p) {
            return emit_diagram(partial_trace_nf(detail::nf_param(d, p, 0), p.ints[0], p.ints[1]));
        }));
    r.push_back(make_rule(
        "NfTensor", L, "two amplitude vectors: tensor product of normal forms",
        [](Dimension d, Rng& g) {
            ParamDraw draw(d, g);
            const int top = d == 2 ? 2 : 1;
            return draw.amplitudes(draw.uniform(0, top)).amplitudes(draw.uniform(0, top)).done();
        },
        [](Dimension d, P p) { return par(emit_diagram(detail::nf_param(d, p, 0)), emit_diagram(detail::nf_param(d, p, 1))); },
        [](Dimension d, P p) {
            return emit_diagram(tensor_nf(detail::nf_param(d, p, 0), detail::nf_param(d, p, 1)));
        }));

    // Derived rules.
    r.push_back(make_rule(
        "PinkStateZEffect", L, "int j, phase a: pink K_j state into a Z effect",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).phase().done(); },
        [](Dimension d, P p) { return seq(pink(d, p.ints[0], 0, 1), z_box(d, p.phases[0], 1, 0)); },
        [](Dimension d, P p) { return scalar(d, phase_entry(p.phases[0], d - p.ints[0], d)); }));
    r.push_back(make_rule(
        "ScalarProduct", L, "scalars a, b",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).scalar().scalar().done(); },
        [](Dimension d, P p) { return par(scalar(d, p.scalars[0]), scalar(d, p.scalars[1])); },
        [](Dimension d, P p) { return scalar(d, p.scalars[0] * p.scalars[1]); }));
    r.push_back(make_rule(
        "ZeroLabelScalar", L, "none", no_params, [](Dimension d, P) { return labeled(d, 0.0, 0, 0); },
        [](Dimension d, P) { return empty_diagram(d); }));
    r.push_back(make_rule(
        "ScalarInverse", L, "nonzero scalar a",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).scalar(true).done(); },
        [](Dimension d, P p) { return par(scalar(d, p.scalars[0]), scalar(d, 1.0 / p.scalars[0])); },
        [](Dimension d, P) { return empty_diagram(d); }));
    r.push_back(make_rule(
        "HadamardInverse", L, "none: H then H-dagger, and H-dagger then H", no_params,
        [](Dimension d, P) {
            return par(seq(hadamard(d), hadamard_dagger(d)), seq(hadamard_dagger(d), hadamard(d)));
        },
        [](Dimension d, P) { return id(d, 2); }));
    r.push_back(make_rule(
        "HadamardSquare", L, "none", no_params, [](Dimension d, P) { return seq(hadamard(d), hadamard(d)); },
        [](Dimension d, P) { return dualiser(d); }));
    r.push_back(make_rule(
        "PinkFusion", L, "ints j, k, n, m: pink spider fusion",
        [](Dimension d, Rng& g) {
            return ParamDraw(d, g).integer(0, d - 1).integer(0, d - 1).integer(0, 2).integer(0, 2).done();
        },
        [](Dimension d, P p) {
            return seq(pink(d, p.ints[0], p.ints[2], 2), par(id(d), pink(d, p.ints[1], 1, p.ints[3])));
        },
        [](Dimension d, P p) { return pink(d, p.ints[0] + p.ints[1], p.ints[2], 1 + p.ints[3]); }));
    r.push_back(make_rule(
        "PinkIdentity", L, "none", no_params, [](Dimension d, P) { return pink(d, 0, 1, 1); },
        [](Dimension d, P) { return id(d); }));
    r.push_back(make_rule(
        "HadamardDaggerSquare", L, "none", no_params,
        [](Dimension d, P) { return seq(hadamard_dagger(d), hadamard_dagger(d)); },
        [](Dimension d, P) { return dualiser(d); }));
    r.push_back(make_rule(
        "DualiserInvolution", L, "none", no_params, [](Dimension d, P) { return seq(dualiser(d), dualiser(d)); },
        [](Dimension d, P) { return id(d); }));
    r.push_back(make_rule(
        "HadamardDualiser", L, "none", no_params, [](Dimension d, P) { return seq(hadamard(d), dualiser(d)); },
        [](Dimension d, P) { return hadamard_dagger(d); }));
    r.push_back(make_rule(
        "DualiserHadamardCommute", L, "none", no_params, [](Dimension d, P) { return seq(dualiser(d), hadamard(d)); },
        [](Dimension d, P) { return seq(hadamard(d), dualiser(d)); }));
    r.push_back(make_rule(
        "PinkStateDualiser", L, "int j", [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).done(); },
        [](Dimension d, P p) { return seq(pink(d, p.ints[0], 0, 1), dualiser(d)); },
        [](Dimension d, P p) { return pink(d, -p.ints[0], 0, 1); }));
    r.push_back(make_rule(
        "PinkStateHadamard", L, "int j", [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).done(); },
        [](Dimension d, P p) { return seq(pink(d, p.ints[0], 0, 1), hadamard(d)); },
        [](Dimension d, P p) {
            return par(scalar(d, 1.0 / std::sqrt(static_cast<double>(d))), z_box(d, fourier_phase(d, -p.ints[0]), 0, 1));
        }));
    r.push_back(make_rule(
        "PinkStateDiscard", L, "int j", [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).done(); },
        [](Dimension d, P p) { return seq(pink(d, p.ints[0], 0, 1), z_ones(d, 1, 0)); },
        [](Dimension d, P) { return empty_diagram(d); }));
    r.push_back(make_rule(
        "OnesPinkEffect", L, "none", no_params, [](Dimension d, P) { return seq(z_ones(d, 0, 1), pink(d, 0, 1, 0)); },
        [](Dimension d, P) { return empty_diagram(d); }));
    r.push_back(make_rule(
        "MultiplierOne", L, "none", no_params, [](Dimension d, P) { return multiplier(d, 1); },
        [](Dimension d, P) { return id(d); }));
    r.push_back(make_rule(
        "MultiplierProduct", L, "ints a, b",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).integer(0, d - 1).done(); },
        [](Dimension d, P p) { return seq(multiplier(d, p.ints[0]), multiplier(d, p.ints[1])); },
        [](Dimension d, P p) { return multiplier(d, p.ints[0] * p.ints[1]); }));
    r.push_back(make_rule(
        "MultiplierMinusOne", L, "none", no_params, [](Dimension d, P) { return multiplier(d, d - 1); },
        [](Dimension d, P) { return dualiser(d); }));
    r.push_back(make_rule(
        "ZStateDualiser", L, "phase a", [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().done(); },
        [](Dimension d, P p) { return seq(z_box(d, p.phases[0], 0, 1), dualiser(d)); },
        [](Dimension d, P p) { return z_box(d, reversed(p.phases[0]), 0, 1); }));
    r.push_back(make_rule(
        "DualiserZSlide", L, "phase a", [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().done(); },
        [](Dimension d, P p) { return seq(dualiser(d), z_box(d, p.phases[0], 1, 1)); },
        [](Dimension d, P p) { return seq(z_box(d, reversed(p.phases[0]), 1, 1), dualiser(d)); }));
    r.push_back(make_rule(
        "PinkPhaseAdd", L, "ints j, k",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).integer(0, d - 1).done(); },
        [](Dimension d, P p) { return seq(pink(d, p.ints[0], 1, 1), pink(d, p.ints[1], 1, 1)); },
        [](Dimension d, P p) { return pink(d, p.ints[0] + p.ints[1], 1, 1); }));
    r.push_back(make_rule(
        "HopfGeneral", L, "ints n, m: green n->d and pink d->m joined by d wires",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(1, 2).integer(1, 2).done(); },
        [](Dimension d, P p) { return seq(z_ones(d, p.ints[0], d), pink(d, 0, d, p.ints[1])); },
        [](Dimension d, P p) { return par(z_ones(d, p.ints[0], 0), pink(d, 0, 0, p.ints[1])); }));
    r.push_back(make_rule(
        "MultiplierSum", L, "ints a, b",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).integer(0, d - 1).done(); },
        [](Dimension d, P p) {
            return seq(z_ones(d, 1, 2), par(multiplier(d, p.ints[0]), multiplier(d, p.ints[1])), pink(d, 0, 2, 1));
        },
        [](Dimension d, P p) { return multiplier(d, p.ints[0] + p.ints[1]); }));
    r.push_back(make_rule(
        "PinkStateCopy", L, "int x, phase a, int m",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).phase().integer(1, 3).done(); },
        [](Dimension d, P p) { return seq(pink(d, p.ints[0], 0, 1), z_box(d, p.phases[0], 1, p.ints[1])); },
        [](Dimension d, P p) {
            return par(scalar(d, phase_entry(p.phases[0], -p.ints[0], d)), repeat(pink(d, p.ints[0], 0, 1), p.ints[1]));
        }));
    r.push_back(make_rule(
        "PinkStateSum", L, "ints x, y",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).integer(0, d - 1).done(); },
        [](Dimension d, P p) { return seq(par(pink(d, p.ints[0], 0, 1), pink(d, p.ints[1], 0, 1)), pink(d, 0, 2, 1)); },
        [](Dimension d, P p) { return pink(d, p.ints[0] + p.ints[1], 0, 1); }));
    r.push_back(make_rule(
        "MultiplierZero", L, "none", no_params, [](Dimension d, P) { return multiplier(d, 0); },
        [](Dimension d, P) { return par(z_ones(d, 1, 0), pink(d, 0, 0, 1)); }));
    r.push_back(make_rule(
        "PinkStateMultiplier", L, "ints w, x",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).integer(0, d - 1).done(); },
        [](Dimension d, P p) { return seq(pink(d, p.ints[1], 0, 1), multiplier(d, p.ints[0])); },
        [](Dimension d, P p) { return pink(d, p.ints[0] * p.ints[1], 0, 1); }));
    r.push_back(make_rule(
        "PinkStateZLeg", L, "int x, phase a: pink K_x state into one leg of a 2->0 Z box",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(0, d - 1).phase().done(); },
        [](Dimension d, P p) { return seq(par(pink(d, p.ints[0], 0, 1), id(d)), z_box(d, p.phases[0], 2, 0)); },
        [](Dimension d, P p) {
            return par(scalar(d, phase_entry(p.phases[0], -p.ints[0], d)), pink(d, -p.ints[0], 1, 0));
        }));
    r.push_back(make_rule(
        "TriangleCancel", L, "none", no_params,
        [](Dimension d, P) { return seq(gen(d, Triangle{}), gen(d, TriangleInverse{})); },
        [](Dimension d, P) { return id(d); }));
    r.push_back(make_rule(
        "TriangleZeroState", L, "none", no_params, [](Dimension d, P) { return seq(pink(d, 0, 0, 1), gen(d, Triangle{})); },
        [](Dimension d, P) { return pink(d, 0, 0, 1); }));
    r.push_back(make_rule(
        "TriangleState", L, "int j in 1..d-1",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(1, d - 1).done(); },
        [](Dimension d, P p) { return seq(pink(d, p.ints[0], 0, 1), gen(d, Triangle{})); },
        [](Dimension d, P p) { return z_box(d, unit(d, d - p.ints[0]), 0, 1); }));
    r.push_back(make_rule(
        "WPinkMerge", L, "int m >= 2", [](Dimension d, Rng& g) { return ParamDraw(d, g).integer(2, 4).done(); },
        [](Dimension d, P p) { return seq(w_fan(d, p.ints[0]), pink(d, 0, p.ints[0], 1)); },
        [](Dimension d, P p) { return seq(w_fan(d, p.ints[0]), w_merge(d, p.ints[0])); }));
    auto phase_layer = [](Dimension d, const RuleParams& p) {
        Diagram layer = empty_diagram(d);
        for (const auto& a : p.phases) layer = par(layer, z_box(d, a, 1, 1));
        return layer;
    };
    r.push_back(make_rule(
        "WPinkPhases", L, "m phases: W fan, one Z box per leg, pink merge",
        [](Dimension d, Rng& g) {
            ParamDraw draw(d, g);
            const int m = draw.uniform(2, 3);
            for (int i = 0; i < m; ++i) draw.phase();
            return draw.done();
        },
        [phase_layer](Dimension d, P p) {
            const int m = static_cast<int>(p.phases.size());
            return seq(w_fan(d, m), phase_layer(d, p), pink(d, 0, m, 1));
        },
        [phase_layer](Dimension d, P p) {
            const int m = static_cast<int>(p.phases.size());
            return seq(w_fan(d, m), phase_layer(d, p), w_merge(d, m));
        }));
    r.push_back(make_rule(
        "WPinkGroups", L, "ints g1, g2 (group sizes); g1 + g2 phases",
        [](Dimension d, Rng& g) {
            ParamDraw draw(d, g);
            draw.integer(1, 2).integer(1, 2);
            for (int i = 0; i < draw.params().ints[0] + draw.params().ints[1]; ++i) draw.phase();
            return draw.done();
        },
        [phase_layer](Dimension d, P p) {
            const int a = p.ints[0], b = p.ints[1];
            return seq(w_fan(d, a + b), phase_layer(d, p), par(pink(d, 0, a, 1), pink(d, 0, b, 1)));
        },
        [phase_layer](Dimension d, P p) {
            const int a = p.ints[0], b = p.ints[1];
            return seq(w_fan(d, a + b), phase_layer(d, p), par(w_merge(d, a), w_merge(d, b)));
        }));
    r.push_back(make_rule(
        "WZeroInput", L, "none", no_params,
        [](Dimension d, P) { return seq(par(pink(d, 0, 0, 1), id(d)), w_merge(d, 2)); },
        [](Dimension d, P) { return id(d); }));
    r.push_back(make_rule(
        "WZeroOutput", L, "none", no_params,
        [](Dimension d, P) { return seq(w_node(d), par(id(d), pink(d, 0, 1, 0))); },
        [](Dimension d, P) { return id(d); }));
    r.push_back(make_rule(
        "WFanChain", L, "none", no_params, [](Dimension d, P) { return w_fan(d, 3); },
        [](Dimension d, P) { return seq(w_node(d), par(id(d), w_node(d))); }));
    r.push_back(make_rule(
        "ZStateSplit", L, "phase a: Z state as a W merge of single-entry Z states",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().done(); },
        [](Dimension d, P p) { return z_box(d, p.phases[0], 0, 1); },
        [](Dimension d, P p) {
            Diagram states = empty_diagram(d);
            for (int i = 1; i < d; ++i) states = par(states, z_box(d, unit(d, i, p.phases[0][i - 1]), 0, 1));
            return seq(states, w_merge(d, d - 1));
        }));
    r.push_back(make_rule(
        "WPhaseAdd", L, "phases a, b",
        [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().phase().done(); },
        [](Dimension d, P p) {
            return seq(w_node(d), par(z_box(d, p.phases[0], 1, 1), z_box(d, p.phases[1], 1, 1)), w_merge(d, 2));
        },
        [](Dimension d, P p) { return z_box(d, plus(p.phases[0], p.phases[1]), 1, 1); }));
    r.push_back(make_rule(
        "HadamardPinkZero", L, "none: H on the pink K_0 state", no_params,
        [](Dimension d, P) { return seq(pink(d, 0, 0, 1), hadamard(d)); },
        [](Dimension d, P) { return par(scalar(d, 1.0 / std::sqrt(static_cast<double>(d))), z_ones(d, 0, 1)); }));
    r.push_back(make_rule(
        "ZCupClose", L, "phase a", [](Dimension d, Rng& g) { return ParamDraw(d, g).phase().done(); },
        [](Dimension d, P p) { return seq(z_box(d, p.phases[0], 0, 2), cup(d)); },
        [](Dimension d, P p) { return z_box(d, p.phases[0], 0, 0); }));
    return r;
}

inline const RewriteRule& find_rule(const std::vector<RewriteRule>& rules, const std::string& name) {
    for (const auto& rule : rules)
        if (rule.name == name) return rule;
    throw std::invalid_argument("unknown rule " + name);
}

struct SoundnessReport {
    std::string rule;
    int d = 0;
    int samples = 0;
    double max_deviation = 0.0;
    bool pass = false;
    std::string error;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

/// Interprets both sides for `samples` seeded parameter draws. Instantiation
/// problems are reported, not thrown.
inline SoundnessReport check_soundness(const RewriteRule& rule, Dimension d, int samples, std::uint64_t seed,
                                       double tol = kDefaultTolerance) {
    if (samples < 1) throw std::invalid_argument("samples must be at least 1");
    SoundnessReport report{rule.name, d, samples, 0.0, false, ""};
    const std::uint64_t h = detail::fnv1a(rule.name);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(d.value()), static_cast<std::uint32_t>(h),
                      static_cast<std::uint32_t>(h >> 32)};
    std::mt19937_64 rng(seq);
    try {
        for (int s = 0; s < samples; ++s) {
            const RuleParams params = rule.sample(d, rng);
            const Diagram lhs = rule.lhs(d, params), rhs = rule.rhs(d, params);
            if (lhs.arity() != rhs.arity()) {
                report.error = "sides have different arities";
                return report;
            }
            const double dev = max_abs_diff(interpret(lhs), interpret(rhs));
            if (!(dev <= report.max_deviation)) report.max_deviation = dev;
        }
    } catch (const std::exception& e) {
        report.error = e.what();
        return report;
    }
    report.pass = report.max_deviation <= tol;
    return report;
}

enum class Direction { Forward, Backward };

class RewriteError : public DiagramError {
public:
    using DiagramError::DiagramError;
};

struct ApplyOptions {
    bool verify = true;
    double tolerance = kDefaultTolerance;
};

namespace detail {

struct KindSignature {
    std::vector<Complex> values;
    std::vector<int> ints;
};

inline KindSignature signature(const GeneratorKind& kind) {
    return std::visit(
        [](const auto& k) -> KindSignature {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZBox>) return {k.phase, {k.inputs, k.outputs}};
            else if constexpr (std::is_same_v<T, WNodeGeneral>) return {{}, {k.legs, k.transpose ? 1 : 0}};
            else if constexpr (std::is_same_v<T, GreenSpider>) {
                KindSignature s{{}, {k.inputs, k.outputs}};
                for (double a : k.angles) s.values.push_back(a);
                return s;
            } else if constexpr (std::is_same_v<T, LabeledBox>) return {{k.x}, {k.inputs, k.outputs}};
            else if constexpr (std::is_same_v<T, PinkSpider>) return {{}, {k.phase_index, k.inputs, k.outputs}};
            else if constexpr (std::is_same_v<T, Multiplier>) return {{}, {k.weight}};
            else if constexpr (std::is_same_v<T, ScalarBox>) return {{k.value}, {}};
            else return {};
        },
        kind);
}

inline std::optional<std::string> kind_mismatch(const GeneratorKind& want, const GeneratorKind& got, double tol) {
    if (want.index() != got.index()) return "expected " + kind_name(want) + ", found " + kind_name(got);
    const KindSignature a = signature(want), b = signature(got);
    if (a.ints != b.ints) return kind_name(want) + " arity or index parameters differ";
    if (a.values.size() != b.values.size() || max_abs_diff(a.values, b.values) > tol)
        return kind_name(want) + " phase parameters differ";
    return std::nullopt;
}

inline Endpoint mapped(const Endpoint& e, const std::map<int, int>& anchor) { return {anchor.at(e.node), e.role, e.port}; }

}  // namespace detail

/// Replaces the occurrence of one side of `rule` that `anchor` (pattern node
/// id -> diagram node id) pins down by the other side.
inline Diagram apply_at(const Diagram& diagram, const RewriteRule& rule, const RuleParams& params,
                        const std::map<int, int>& anchor, Direction direction = Direction::Forward,
                        const ApplyOptions& options = {}) {
    const Dimension d(diagram.dimension());
    const Diagram lhs = rule.lhs(d, params), rhs = rule.rhs(d, params);
    const Diagram& pattern = direction == Direction::Forward ? lhs : rhs;
    const Diagram& replacement = direction == Direction::Forward ? rhs : lhs;
    auto fail = [&](const std::string& why) { return RewriteError(rule.name + ": " + why); };

    std::set<int> image;
    for (const auto& [pid, kind] : pattern.nodes()) {
        auto it = anchor.find(pid);
        if (it == anchor.end()) throw fail("anchor misses pattern node " + std::to_string(pid));
        if (!diagram.nodes().contains(it->second)) throw fail("anchor names missing node " + std::to_string(it->second));
        if (!image.insert(it->second).second) throw fail("anchor is not injective");
        if (auto why = detail::kind_mismatch(kind, diagram.node(it->second), options.tolerance))
            throw fail("node " + std::to_string(pid) + " -> " + std::to_string(it->second) + ": " + *why);
    }
    if (anchor.size() != pattern.nodes().size()) throw fail("anchor names nodes outside the pattern");

    std::vector<Endpoint> inputs(pattern.num_inputs()), outputs(pattern.num_outputs());
    for (const auto& w : pattern.wires()) {
        const bool ba = w.a.is_boundary(), bb = w.b.is_boundary();
        if (ba && bb) throw fail("the pattern has a bare wire and cannot be anchored");
        if (!ba && !bb) {
            const Endpoint x = detail::mapped(w.a, anchor), y = detail::mapped(w.b, anchor);
            if (diagram.peer(x) != y) throw fail("missing wire " + to_string(x) + " -- " + to_string(y));
            continue;
        }
        const Endpoint& boundary = ba ? w.a : w.b;
        const Endpoint inner = detail::mapped(ba ? w.b : w.a, anchor);
        const auto outside = diagram.peer(inner);
        if (outside && !outside->is_boundary() && image.contains(outside->node))
            throw fail(to_string(inner) + " is wired inside the occurrence but leaves the pattern");
        (boundary.role == PortRole::In ? inputs : outputs)[boundary.port] = inner;
    }

    Diagram out = substitute(diagram, image, replacement, inputs, outputs);
    if (options.verify && !matrices_equal(interpret(diagram), interpret(out), options.tolerance))
        throw fail("rewrite changed the interpretation");
    return out;
}

}  // namespace zxw
