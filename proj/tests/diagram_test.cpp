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

#include <random>

#include "test_util.hpp"
#include "zxw/derived.hpp"
#include "zxw/diagram.hpp"
#include "zxw/interpret.hpp"

using namespace zxw;

namespace {

const Dimension d2(2), d3(3);

bool has_violation_containing(const Diagram& diagram, const std::string& needle) {
    for (const auto& v : validate(diagram))
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST(MakeGenerator, Arities) {
    const Diagram id = identity(d3);
    EXPECT_EQ(id.num_inputs(), 1);
    EXPECT_EQ(id.num_outputs(), 1);
    EXPECT_TRUE(id.nodes().empty());
    ASSERT_EQ(id.wires().size(), 1u);

    const Diagram z = make_generator(ZBox{{0.5, 2.0}, 1, 1}, d3);
    EXPECT_EQ(z.arity(), (Arity{1, 1}));
    EXPECT_EQ(z.nodes().size(), 1u);

    const Diagram w = make_generator(WNode{}, d2);
    EXPECT_EQ(w.arity(), (Arity{1, 2}));
}

TEST(MakeGenerator, RejectsParameterMismatch) {
    EXPECT_THROW(make_generator(ZBox{{0.5}, 1, 1}, d3), DiagramError);
    EXPECT_THROW(make_generator(GreenSpider{{0.1, 0.2, 0.3}, 1, 1}, d3), DiagramError);
}

TEST(MakeGenerator, MultiplierWeightIsReducedModD) {
    const Diagram m = make_generator(Multiplier{7}, d3);
    EXPECT_EQ(std::get<Multiplier>(m.nodes().begin()->second).weight, 1);
    const Diagram neg = make_generator(Multiplier{-1}, d3);
    EXPECT_EQ(std::get<Multiplier>(neg.nodes().begin()->second).weight, 2);
}

TEST(ComposeSeq, IdentityChain) {
    const Diagram id = compose_seq(identity(d3), identity(d3));
    EXPECT_TRUE(id.nodes().empty());
    EXPECT_EQ(id.wires().size(), 1u);
    EXPECT_TRUE(validate(id).empty());
}

TEST(ComposeSeq, Errors) {
    EXPECT_THROW(compose_seq(w_node(d3), identity(d3)), DiagramError);
    EXPECT_THROW(compose_seq(identity(d2), identity(d3)), DiagramError);
    EXPECT_THROW(compose_par(identity(d2), identity(d3)), DiagramError);
}

TEST(ComposeSeq, ZBoxesMultiplyDiagonals) {
    const Diagram chain = compose_seq(z_box(d3, {2.0, 3.0}, 1, 1), z_box(d3, {5.0, 7.0}, 1, 1));
    EXPECT_EQ(chain.nodes().size(), 2u);
    const Matrix m = interpret(chain);
    EXPECT_NEAR(std::abs(m(1, 1) - Complex(10.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(m(2, 2) - Complex(21.0)), 0.0, 1e-12);
}

TEST(ComposeSeq, ClosedLoopBecomesScalarD) {
    const Diagram loop = compose_seq(cap(d3), cup(d3));
    EXPECT_EQ(loop.arity(), (Arity{0, 0}));
    EXPECT_NEAR(std::abs(interpret(loop)(0, 0) - Complex(3.0)), 0.0, 1e-12);
    // Bare wires only: the splice itself has to produce the scalar.
    Diagram bare_cap(d3, 0, 2), bare_cup(d3, 2, 0);
    bare_cap.connect(boundary_out(0), boundary_out(1));
    bare_cup.connect(boundary_in(0), boundary_in(1));
    const Diagram bare_loop = compose_seq(bare_cap, bare_cup);
    ASSERT_EQ(bare_loop.nodes().size(), 1u);
    EXPECT_NEAR(std::abs(interpret(bare_loop)(0, 0) - Complex(3.0)), 0.0, 1e-12);
}

TEST(ComposePar, Shapes) {
    const Diagram e = compose_par(empty_diagram(d2), hadamard(d2));
    EXPECT_EQ(e.arity(), (Arity{1, 1}));
    const Diagram two = compose_par(identity(d2), identity(d2));
    EXPECT_EQ(two.arity(), (Arity{2, 2}));
    EXPECT_TRUE(two.nodes().empty());
    const Diagram wh = compose_par(w_node(d2), hadamard(d2));
    EXPECT_EQ(wh.arity(), (Arity{2, 3}));
    EXPECT_TRUE(matrices_equal(interpret(wh), kron(semantics(WNode{}, 2), semantics(Hadamard{}, 2)), 1e-12));
}

TEST(BendToState, StateUnchanged) {
    const Diagram s = z_box(d3, {1.0, 2.0}, 0, 2);
    const Diagram b = bend_to_state(s);
    EXPECT_EQ(b.nodes().size(), s.nodes().size());
    EXPECT_EQ(b.wires(), s.wires());
}

TEST(BendToState, IdentityIsBellState) {
    for (int d = 2; d <= 4; ++d) {
        const Matrix v = interpret(bend_to_state(identity(Dimension(d))));
        ASSERT_EQ(v.rows(), static_cast<std::size_t>(d * d));
        ASSERT_EQ(v.cols(), 1u);
        for (int i = 0; i < d * d; ++i) EXPECT_NEAR(std::abs(v(i, 0) - Complex(i % (d + 1) == 0 ? 1.0 : 0.0)), 0.0, 1e-12);
    }
}

// Bent W: amplitude 1 at |000>, |0ii>, |i0i>, computed by enumeration.
TEST(BendToState, WNodeAmplitudes) {
    for (int d = 2; d <= 4; ++d) {
        const Matrix v = interpret(bend_to_state(w_node(Dimension(d))));
        ASSERT_EQ(v.rows(), ipow(d, 3));
        for (std::size_t idx = 0; idx < v.rows(); ++idx) {
            const auto e = index_digits(idx, d, 3);
            const bool hit = (e[0] == 0 && e[1] == 0 && e[2] == 0) || (e[2] != 0 && e[0] == 0 && e[1] == e[2]) ||
                             (e[2] != 0 && e[1] == 0 && e[0] == e[2]);
            EXPECT_NEAR(std::abs(v(idx, 0) - Complex(hit ? 1.0 : 0.0)), 0.0, 1e-12);
        }
    }
}

TEST(BendToState, Idempotent) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        const Diagram dgm = fixtures::random_diagram(3, rng);
        const Diagram once = bend_to_state(dgm);
        const Diagram twice = bend_to_state(once);
        EXPECT_EQ(once.wires(), twice.wires());
        EXPECT_EQ(once.nodes().size(), twice.nodes().size());
    }
}

TEST(Validate, WellFormed) {
    EXPECT_TRUE(validate(w_node(d2)).empty());
    EXPECT_TRUE(validate(identity(d2, 3)).empty());
    EXPECT_TRUE(validate(bend_to_state(hadamard(d3))).empty());
}

TEST(Validate, DanglingPort) {
    Diagram dgm(d2, 1, 1);
    const int id = dgm.add_node(Hadamard{});
    dgm.connect(boundary_in(0), node_in(id, 0));
    const auto v = validate(dgm);
    ASSERT_EQ(v.size(), 2u);  // node output and boundary output both dangle
    EXPECT_TRUE(has_violation_containing(dgm, "dangling port: node 0 out 0"));
}

TEST(Validate, DimensionMismatch) {
    Diagram dgm(d3, 0, 1);
    const int id = dgm.add_node(ZBox{{1.0}, 0, 1});  // a qubit phase vector
    dgm.connect(node_out(id, 0), boundary_out(0));
    EXPECT_TRUE(has_violation_containing(dgm, "dimension mismatch"));
    EXPECT_THROW(interpret(dgm), DiagramError);
}

TEST(Validate, ConstructorsProduceValidDiagrams) {
    std::mt19937_64 rng(11);
    for (int d = 2; d <= 4; ++d)
        for (int i = 0; i < 30; ++i) {
            const Diagram dgm = fixtures::random_diagram(d, rng);
            EXPECT_TRUE(validate(dgm).empty());
            EXPECT_TRUE(validate(bend_to_state(dgm)).empty());
            EXPECT_TRUE(validate(expand_derived(dgm)).empty());
        }
}

TEST(ExpandDerived, CoreOnlyUnchanged) {
    const Diagram dgm = seq(w_node(d3), compose_par(hadamard(d3), z_box(d3, {1.0, 2.0}, 1, 1)));
    const Diagram e = expand_derived(dgm);
    EXPECT_EQ(e.wires(), dgm.wires());
    EXPECT_EQ(e.nodes().size(), dgm.nodes().size());
}

TEST(ExpandDerived, EveryGadgetAgreesWithItsSemantics) {
    std::mt19937_64 rng(3);
    for (int d = 2; d <= 5; ++d)
        for (int rep = 0; rep < 4; ++rep)
            for (const auto& kind : fixtures::sample_kinds(d, rng)) {
                const Diagram e = expand_derived(make_generator(kind, Dimension(d)));
                for (const auto& [id, k] : e.nodes()) EXPECT_TRUE(is_core(k)) << kind_name(k);
                EXPECT_LE(max_abs_diff(semantics(reduce_mod_d(kind, d), d), interpret(e)), 1e-10)
                    << kind_name(kind) << " d=" << d;
            }
}

TEST(ExpandDerived, DualiserAndMultiplier) {
    for (int d = 2; d <= 5; ++d) {
        const Dimension dim(d);
        Matrix oracle(d, d);
        for (int i = 0; i < d; ++i) oracle(mod(-i, d), i) = 1.0;
        EXPECT_TRUE(matrices_equal(interpret(expand_derived(dualiser(dim))), oracle, 1e-10));
        for (int w = 0; w < d; ++w) {
            Matrix mult(d, d);
            for (int x = 0; x < d; ++x) mult(mod(w * x, d), x) = 1.0;
            EXPECT_TRUE(matrices_equal(interpret(expand_derived(multiplier(dim, w))), mult, 1e-10));
        }
    }
}

TEST(Composition, AssociativeUpToInterpretation) {
    std::mt19937_64 rng(5);
    const Dimension dim(3);
    for (int i = 0; i < 10; ++i) {
        const Diagram a = z_box(dim, fixtures::random_phase(3, rng), 1, 2);
        const Diagram b = compose_par(hadamard(dim), pink(dim, 1, 1, 1));
        const Diagram c = w_merge(dim, 2);
        EXPECT_TRUE(matrices_equal(interpret(seq(seq(a, b), c)), interpret(seq(a, seq(b, c))), 1e-10));
        EXPECT_TRUE(matrices_equal(interpret(par(par(a, b), c)), interpret(par(a, par(b, c))), 1e-10));
    }
}

TEST(Transpose, MatchesMatrixTranspose) {
    const Dimension dim(3);
    const Matrix w = interpret(transpose(w_node(dim)));
    const Matrix expected = semantics(WNodeGeneral{2, true}, 3);
    EXPECT_TRUE(matrices_equal(w, expected, 1e-12));
}

TEST(Substitute, KeepsSelfLoopsOnTheReplacedNode) {
    // A 2->2 pink spider with its inputs and its outputs joined: a scalar.
    const Dimension d(3);
    Diagram looped(d, 0, 0);
    const int p = looped.add_node(PinkSpider{1, 2, 2});
    looped.connect(node_in(p, 0), node_in(p, 1));
    looped.connect(node_out(p, 0), node_out(p, 1));
    ASSERT_TRUE(validate(looped).empty());
    const Diagram chain = seq(pink(d, 1, 2, 1), pink(d, 0, 1, 2));
    const Diagram out = substitute_node(looped, p, chain);
    EXPECT_TRUE(validate(out).empty());
    EXPECT_TRUE(matrices_equal(interpret(out), interpret(looped), 1e-10));
}
