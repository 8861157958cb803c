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

// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "test_util.hpp"
#include "zxw/io.hpp"
#include "zxw/normal_form.hpp"
#include "zxw/rules.hpp"

using namespace zxw;

namespace {

constexpr double kSoundnessTol = 1e-9;
constexpr double kGeneratorTol = 1e-10;
constexpr double kNormalizeTol = 1e-8;
constexpr double kEqualTol = 1e-8;
constexpr double kOracleTol = 1e-10;
constexpr double kPerturbation = 1e-3;

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = check();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s (%.1fs)%s%s\n", out.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
                out.detail.empty() ? "" : ": ", out.detail.c_str());
    std::fflush(stdout);
    failures += !out.pass;
}

std::string dstr(int d) { return "d=" + std::to_string(d); }

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", x);
    return buf;
}

// Dense oracles, built from matrices only.

Matrix hadamard_oracle(int d) {
    Matrix h(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) h(i, j) = root_of_unity(d, static_cast<long long>(i) * j) / std::sqrt(double(d));
    return h;
}

Matrix kron_power(const Matrix& m, int n) {
    Matrix out = Matrix::identity(1);
    for (int i = 0; i < n; ++i) out = kron(out, m);
    return out;
}

// H^{(x)m} Z(K_j) Hdag^{(x)n} d^{(m+n-2)/2}, with Z(K_j) diagonal in the copies.
Matrix pink_oracle(int d, int j, int n, int m) {
    Matrix z(ipow(d, m), ipow(d, n));
    for (int k = 0; k < d; ++k) {
        std::size_t r = 0, c = 0;
        for (int i = 0; i < m; ++i) r = r * d + k;
        for (int i = 0; i < n; ++i) c = c * d + k;
        z(r, c) += root_of_unity(d, static_cast<long long>(j) * k);
    }
    const Matrix h = hadamard_oracle(d);
    return kron_power(h, m) * z * kron_power(h.adjoint(), n) * std::pow(double(d), (m + n - 2) / 2.0);
}

std::vector<Complex> trace_oracle(const std::vector<Complex>& v, int d, int m, int s, int t) {
    std::vector<Complex> out(ipow(d, m - 2), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto digits = index_digits(i, d, m);
        if (digits[s] != digits[t]) continue;
        std::vector<int> rest;
        for (int k = 0; k < m; ++k)
            if (k != s && k != t) rest.push_back(digits[k]);
        out[digits_index(rest, d)] += v[i];
    }
    return out;
}

std::vector<Complex> kron_oracle(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> out;
    for (const Complex& x : a)
        for (const Complex& y : b) out.push_back(x * y);
    return out;
}

std::vector<Complex> basis(std::size_t n, std::size_t i) {
    std::vector<Complex> v(n, 0.0);
    v[i] = 1.0;
    return v;
}

bool oracle_equal(const Diagram& a, const Diagram& b) {
    if (a.dimension() != b.dimension() || a.arity() != b.arity()) return false;
    return matrices_equal(interpret(a), interpret(b), kEqualTol);
}

// `core` between random 1->1 Z boxes; the shift maps core's node ids into the host.
std::pair<Diagram, int> embed(const Diagram& core, std::mt19937_64& rng) {
    const Dimension d(core.dimension());
    Diagram before = empty_diagram(d), after = empty_diagram(d);
    for (int i = 0; i < core.num_inputs(); ++i) before = par(before, z_box(d, fixtures::random_phase(d.value(), rng), 1, 1));
    for (int i = 0; i < core.num_outputs(); ++i) after = par(after, z_box(d, fixtures::random_phase(d.value(), rng), 1, 1));
    return {seq(before, core, after), before.next_id()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome rule_soundness() {
    Outcome out;
    int checks = 0;
    for (const auto& rule : builtin_rules())
        for (int d = 2; d <= 5; ++d) {
            const auto r = check_soundness(rule, Dimension(d), 20, 20260101, kSoundnessTol);
            out.require(r.pass, rule.name + " " + dstr(d) + " max_dev " + sci(r.max_deviation) + " " + r.error);
            ++checks;
        }
    if (out.pass) out.detail = std::to_string(checks) + " rule/dimension checks, 20 draws each";
    return out;
}

Outcome generator_spot_checks() {
    Outcome out;
    auto near = [&](const Matrix& a, const Matrix& b, const std::string& what) {
        out.require(a.rows() == b.rows() && a.cols() == b.cols() && max_abs_diff(a, b) <= kGeneratorTol, what);
    };
    const double r = 1.0 / std::sqrt(2.0);
    near(interpret(hadamard(Dimension(2))), fixtures::matrix_from_rows({{r, r}, {r, -r}}), "Hadamard d=2");
    near(interpret(w_node(Dimension(2))), fixtures::matrix_from_rows({{1, 0}, {0, 1}, {0, 1}, {0, 0}}), "W node d=2");
    const Matrix du3 = interpret(dualiser(Dimension(3)));
    near(du3, fixtures::matrix_from_rows({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}), "Dualiser d=3");
    near(du3 * du3, Matrix::identity(3), "Dualiser d=3 squared");
    near(interpret(dualiser(Dimension(2))), Matrix::identity(2), "Dualiser d=2");
    near(interpret(make_generator(Triangle{}, Dimension(2))), fixtures::matrix_from_rows({{1, 1}, {0, 1}}), "Triangle d=2");
    int pinks = 0;
    for (int d = 2; d <= 4; ++d)
        for (int j = 0; j < d; ++j)
            for (int n = 0; n <= 3; ++n)
                for (int m = 0; m <= 3; ++m) {
                    near(interpret(pink(Dimension(d), j, n, m)), pink_oracle(d, j, n, m),
                         "pink K_" + std::to_string(j) + " " + std::to_string(n) + "->" + std::to_string(m) + " " + dstr(d));
                    ++pinks;
                }
    if (out.pass) out.detail = "6 fixed matrices, " + std::to_string(pinks) + " pink spiders";
    return out;
}

Outcome normalizer_oracle() {
    Outcome out;
    std::mt19937_64 rng(31337);
    int count = 0;
    double worst = 0.0;
    for (int d = 2; d <= 3; ++d)
        for (int i = 0; i < 110; ++i) {
            const Diagram D = fixtures::random_diagram(d, rng, 6, 4);
            const NormalForm nf = normalize(D, {.check_steps = true});
            const double dev = max_abs_diff(nf.amplitudes, interpret(bend_to_state(D)).vectorized());
            worst = std::max(worst, dev);
            out.require(dev <= kNormalizeTol, dstr(d) + " diagram " + std::to_string(i) + " deviation " + sci(dev));
            ++count;
        }
    if (out.pass) out.detail = std::to_string(count) + " diagrams, step checks on, worst deviation " + sci(worst);
    return out;
}

Outcome equality_decision() {
    Outcome out;
    std::mt19937_64 rng(4242);
    int agree = 0, total = 0, equal_seen = 0;
    auto tally = [&](const Diagram& a, const Diagram& b, const std::string& what, std::optional<bool> expected) {
        const bool decided = decide_equal(a, b, kEqualTol);
        const bool truth = oracle_equal(a, b);
        out.require(decided == truth, what + ": decided " + std::to_string(decided) + ", oracle " + std::to_string(truth));
        if (expected) out.require(truth == *expected, what + ": construction did not give the intended pair");
        agree += decided == truth;
        equal_seen += truth;
        ++total;
    };

    // (a) random pairs with matching arity; every fifth pair is a diagram
    // against itself composed with two dualisers.
    for (int i = 0; i < 100; ++i) {
        const int d = 2 + i % 2;
        const Dimension dim(d);
        const Diagram a = fixtures::random_diagram(d, rng, 5, 4);
        Diagram b = a;
        if (i % 5 == 0 && a.num_outputs() > 0) {
            b = seq(a, par(seq(dualiser(dim), dualiser(dim)), identity(dim, a.num_outputs() - 1)));
        } else {
            do b = fixtures::random_diagram(d, rng, 5, 4);
            while (b.arity() != a.arity());
        }
        tally(a, b, "random pair " + std::to_string(i), std::nullopt);
    }

    // (b) rewrite chains: two rule occurrences side by side, rewritten in turn.
    const std::vector<std::string> names{"S1", "S4", "B1", "K0", "P1", "Zer", "Ept", "Hdag", "Mu", "YT", "WA", "WS",
                                         "Bs0", "TA", "AD", "HadamardSquare", "DualiserInvolution", "HadamardDualiser", "DualiserHadamardCommute", "PinkStateDualiser",
                                         "MultiplierProduct", "ZStateDualiser", "DualiserZSlide", "PinkPhaseAdd", "PinkStateSum", "PinkStateMultiplier", "WZeroInput",
                                         "WZeroOutput", "WFanChain", "WPhaseAdd"};
    const auto rules = builtin_rules();
    int built = 0;
    while (built < 50) {
        const int d = 2 + built % 2;
        const Dimension dim(d);
        const auto& r1 = find_rule(rules, names[fixtures::uniform_int(rng, 0, int(names.size()) - 1)]);
        const auto& r2 = find_rule(rules, names[fixtures::uniform_int(rng, 0, int(names.size()) - 1)]);
        const RuleParams p1 = r1.sample(dim, rng), p2 = r2.sample(dim, rng);
        const Diagram l1 = r1.lhs(dim, p1), l2 = r2.lhs(dim, p2);
        if (l1.num_inputs() + l1.num_outputs() + l2.num_inputs() + l2.num_outputs() > 6) continue;
        const Diagram core = par(l1, l2);
        const auto [host, shift] = embed(core, rng);
        std::map<int, int> a1, a2;
        for (const auto& [id, k] : l1.nodes()) a1[id] = id + shift;
        for (const auto& [id, k] : l2.nodes()) a2[id] = id + shift + l1.next_id();
        const Diagram once = apply_at(host, r1, p1, a1);
        const Diagram twice = apply_at(once, r2, p2, a2);
        tally(host, twice, "chain " + r1.name + " then " + r2.name, true);
        ++built;
    }

    // (c) one Z-box phase entry shifted by 1e-3.
    int perturbed = 0;
    while (perturbed < 50) {
        const int d = 2 + perturbed % 2;
        Diagram a = fixtures::random_diagram(d, rng, 5, 4);
        std::vector<int> boxes;
        for (const auto& [id, k] : a.nodes())
            if (std::holds_alternative<ZBox>(k)) boxes.push_back(id);
        if (boxes.empty()) continue;
        const int target = boxes[fixtures::uniform_int(rng, 0, int(boxes.size()) - 1)];
        ZBox z = std::get<ZBox>(a.node(target));
        z.phase[fixtures::uniform_int(rng, 0, d - 2)] += kPerturbation;
        Diagram b = a;
        b.remove_node(target);
        b.add_node(target, z);
        if (oracle_equal(a, b)) continue;  // the box sits in a zero branch
        tally(a, b, "perturbed " + std::to_string(perturbed), false);
        ++perturbed;
    }
    if (out.pass)
        out.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree (" + std::to_string(equal_seen) +
                     " equal pairs)";
    return out;
}

Outcome algebraic_identities() {
    Outcome out;
    std::mt19937_64 rng(777);
    int cases = 0;
    auto check_tensor = [&](const std::vector<Complex>& a, int ma, const std::vector<Complex>& b, int mb, int d) {
        const NormalForm t = tensor_nf(matrix_to_nf(a, Dimension(d), ma), matrix_to_nf(b, Dimension(d), mb));
        out.require(t.m == ma + mb && max_abs_diff(t.amplitudes, kron_oracle(a, b)) <= kOracleTol,
                    "tensor " + dstr(d) + " m=" + std::to_string(ma) + "+" + std::to_string(mb));
        ++cases;
    };
    auto check_trace = [&](const std::vector<Complex>& v, int m, int s, int t, int d) {
        const NormalForm r = partial_trace_nf(matrix_to_nf(v, Dimension(d), m), s, t);
        out.require(max_abs_diff(r.amplitudes, trace_oracle(v, d, m, s, t)) <= kOracleTol,
                    "trace " + dstr(d) + " m=" + std::to_string(m) + " legs " + std::to_string(s) + "," + std::to_string(t));
        ++cases;
    };
    // Qubits: every basis pair and every leg pair, plus a dense vector each.
    for (int ma = 0; ma <= 3; ++ma)
        for (int mb = 0; ma + mb <= 3; ++mb) {
            const std::size_t na = ipow(2, ma), nb = ipow(2, mb);
            for (std::size_t i = 0; i < na; ++i)
                for (std::size_t j = 0; j < nb; ++j) check_tensor(basis(na, i), ma, basis(nb, j), mb, 2);
            check_tensor(fixtures::random_vector(na, rng), ma, fixtures::random_vector(nb, rng), mb, 2);
        }
    for (int m = 2; m <= 3; ++m)
        for (int s = 0; s < m; ++s)
            for (int t = 0; t < m; ++t) {
                if (s == t) continue;
                for (std::size_t i = 0; i < ipow(2, m); ++i) check_trace(basis(ipow(2, m), i), m, s, t, 2);
                check_trace(fixtures::random_vector(ipow(2, m), rng), m, s, t, 2);
            }
    for (int i = 0; i < 50; ++i) {
        const int ma = fixtures::uniform_int(rng, 0, 2), mb = fixtures::uniform_int(rng, 0, 2);
        check_tensor(fixtures::random_vector(ipow(3, ma), rng), ma, fixtures::random_vector(ipow(3, mb), rng), mb, 3);
        const int m = fixtures::uniform_int(rng, 2, 4);
        const int s = fixtures::uniform_int(rng, 0, m - 1);
        const int t = (s + fixtures::uniform_int(rng, 1, m - 1)) % m;
        check_trace(fixtures::random_vector(ipow(3, m), rng), m, s, t, 3);
    }

    // Hopf: disconnected (rank one, equal to effect times state) exactly at d wires.
    for (int d = 2; d <= 5; ++d) {
        const Dimension dim(d);
        const Matrix split = interpret(par(z_ones(dim, 1, 0), pink(dim, 0, 0, 1)));
        for (int k = 1; k <= d; ++k) {
            const Matrix m = interpret(seq(z_ones(dim, 1, k), pink(dim, 0, k, 1)));
            double minor = 0.0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    for (int c = 0; c < d; ++c)
                        for (int e = 0; e < d; ++e)
                            minor = std::max(minor, std::abs(m(a, c) * m(b, e) - m(a, e) * m(b, c)));
            const bool disconnected = minor <= kOracleTol && max_abs_diff(m, split) <= kOracleTol;
            out.require(disconnected == (k == d), "Hopf " + dstr(d) + " k=" + std::to_string(k));
        }
    }

    // W state on three qudits, up to the scalar sqrt(d) / (d - 1) * sqrt(3 (d - 1)).
    for (int d = 2; d <= 3; ++d) {
        const Dimension dim(d);
        const int n = 3;
        const Matrix v =
            interpret(seq(z_box(dim, std::vector<Complex>(d - 1, -1.0 / (d - 1)), 0, 1), hadamard(dim), w_fan(dim, n)));
        const double norm = std::sqrt(double(n * (d - 1)));
        const double scale = std::sqrt(double(d)) / (d - 1) * norm;
        double dev = 0.0;
        for (std::size_t idx = 0; idx < v.rows(); ++idx) {
            const auto digits = index_digits(idx, d, n);
            const int nonzero = static_cast<int>(std::count_if(digits.begin(), digits.end(), [](int x) { return x != 0; }));
            dev = std::max(dev, std::abs(v(idx, 0) - Complex(nonzero == 1 ? scale / norm : 0.0)));
        }
        out.require(dev <= kOracleTol, "W state " + dstr(d));
    }
    if (out.pass) out.detail = std::to_string(cases) + " tensor/trace cases, Hopf d=2..5, W state d=2,3";
    return out;
}

Outcome uniqueness() {
    Outcome out;
    std::mt19937_64 rng(90210);
    const std::vector<std::pair<int, int>> shapes{{2, 1}, {2, 2}, {2, 3}, {2, 4}, {3, 1}, {3, 2}, {4, 1}, {5, 1}};
    for (int i = 0; i < 50; ++i) {
        const auto [d, m] = shapes[i % shapes.size()];
        const auto v = fixtures::random_vector(ipow(d, m), rng);
        const NormalForm back = normalize(emit_diagram(matrix_to_nf(v, Dimension(d), m)));
        out.require(back.m == m && max_abs_diff(back.amplitudes, v) <= kNormalizeTol,
                    "round trip " + dstr(d) + " m=" + std::to_string(m));
    }
    for (int i = 0; i < 20; ++i) {
        const int d = 2 + i % 2, m = 1 + i % 2;
        const NormalForm nf = matrix_to_nf(fixtures::random_vector(ipow(d, m), rng), Dimension(d), m);
        std::vector<detail::Branch> branches;
        for (std::size_t k = 0; k < nf.amplitudes.size(); ++k)
            if (nf.amplitudes[k] != Complex(0.0)) branches.push_back({nf.amplitudes[k], index_digits(k, d, m)});
        const std::string canonical = serialize(emit_diagram(nf));
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            std::shuffle(branches.begin(), branches.end(), rng);
            const Diagram once = unique_sort(detail::build_spine(Dimension(d), m, branches));
            out.require(serialize(once) == canonical, "unique_sort depends on branch order");
            out.require(serialize(unique_sort(once)) == serialize(once), "unique_sort is not idempotent");
        }
    }
    if (out.pass) out.detail = "50 vectors round trip; 100 shuffled spines sort identically";
    return out;
}

Outcome io_round_trips() {
    Outcome out;
    int files = 0;
    for (const auto& e : std::filesystem::directory_iterator(ZXW_CORPUS_DIR)) {
        if (e.path().extension() != ".json") continue;
        const std::string text = slurp(e.path());
        const std::string again = serialize(parse(text));
        out.require(again == text, e.path().filename().string() + " not byte-stable");
        out.require(serialize(parse(again)) == again, e.path().filename().string() + " second pass differs");
        ++files;
    }
    out.require(files > 0, "empty corpus");

    const auto report_path = std::filesystem::temp_directory_path() / "zxw_acceptance_report.jsonl";
    const std::string cmd = std::string("\"") + ZXW_CLI + "\" verify-rules --dims 2,3 --samples 3 --seed 9 --report \"" +
                            report_path.string() + "\" > /dev/null";
    const int status = std::system(cmd.c_str());
    out.require(status == 0, "verify-rules exited with status " + std::to_string(status));
    const std::string text = slurp(report_path);
    const auto records = parse_reports(text);
    out.require(!records.empty() && serialize_reports(records) == text, "report does not parse back losslessly");
    std::filesystem::remove(report_path);
    if (out.pass)
        out.detail = std::to_string(files) + " corpus documents, " + std::to_string(records.size()) + " report records";
    return out;
}

}  // namespace

int main() {
    report(1, "rule soundness d=2..5", rule_soundness);
    report(2, "generator semantics spot checks", generator_spot_checks);
    report(3, "normalizer matches interpreter", normalizer_oracle);
    report(4, "equality decision agrees with oracle", equality_decision);
    report(5, "tensor, trace, Hopf and W-state identities", algebraic_identities);
    report(6, "normal-form round trip and unique_sort", uniqueness);
    report(7, "document and report round trips", io_round_trips);
    return failures == 0 ? 0 : 1;
}
