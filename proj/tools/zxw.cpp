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

// Command-line front end: interpret, normalize, equal, verify-rules, render.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "zxw/io.hpp"
#include "zxw/normal_form.hpp"
#include "zxw/rules.hpp"

namespace {

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

zxw::Diagram load(const std::string& path) { return zxw::parse(read_file(path)); }

std::string pair_text(zxw::Complex z, double tol) {
    auto snap = [tol](double x) { return std::abs(x) <= tol ? 0.0 : x; };
    char buf[64];
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", snap(z.real()), snap(z.imag()));
    return buf;
}

int run_interpret(const std::string& file, double tol) {
    const zxw::Matrix m = zxw::interpret(load(file));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) std::cout << (c ? " " : "") << pair_text(m(r, c), tol);
        std::cout << "\n";
    }
    return 0;
}

int run_normalize(const std::string& file, const std::string& emit) {
    const zxw::NormalForm nf = zxw::normalize(load(file));
    for (std::size_t i = 0; i < nf.amplitudes.size(); ++i) {
        std::string ket;
        for (int digit : zxw::index_digits(i, nf.d.value(), nf.m)) ket += std::to_string(digit);
        std::cout << "|" << ket << "> " << pair_text(nf.amplitudes[i], 0.0) << "\n";
    }
    if (!emit.empty()) write_file(emit, zxw::serialize(zxw::emit_diagram(nf)));
    return 0;
}

int run_equal(const std::string& a, const std::string& b, double tol) {
    const bool same = zxw::decide_equal(load(a), load(b), tol);
    std::cout << (same ? "equal" : "not equal") << "\n";
    return same ? 0 : 1;
}

int run_verify(const std::vector<int>& dims, int samples, std::uint64_t seed, const std::string& report) {
    for (int d : dims)
        if (d < 2) throw UsageError("dimensions must be at least 2");
    if (samples < 1) throw UsageError("--samples must be at least 1");
    const auto rules = zxw::builtin_rules();
    struct Job {
        const zxw::RewriteRule* rule;
        int d;
    };
    std::vector<Job> jobs;
    for (int d : dims)
        for (const auto& rule : rules) jobs.push_back({&rule, d});

    // Each check is pure and seeded, so the report does not depend on scheduling.
    std::vector<zxw::SoundnessReport> results(jobs.size());
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < jobs.size(); i += workers)
                results[i] = zxw::check_soundness(*jobs[i].rule, zxw::Dimension(jobs[i].d), samples, seed);
        }));
    for (auto& f : pool) f.get();

    int failed = 0;
    for (const auto& r : results) {
        if (!r.pass) ++failed;
        std::printf("%-4s %-8s d=%d max_dev=%.3g%s%s\n", r.pass ? "ok" : "FAIL", r.rule.c_str(), r.d, r.max_deviation,
                    r.error.empty() ? "" : "  ", r.error.c_str());
    }
    std::printf("%zu checks, %d failed\n", results.size(), failed);
    if (!report.empty()) write_file(report, zxw::serialize_reports(results));
    return failed == 0 ? 0 : 1;
}

int run_render(const std::string& file, const std::string& format) {
    if (format != "dot") throw UsageError("unsupported format " + format);
    std::cout << zxw::render_dot(load(file));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zxw: qudit ZXW diagrams"};
    app.require_subcommand(1);

    std::string file, other, emit, report, format = "dot";
    double tol = zxw::kEqualityTolerance;
    double print_tol = 0.0;
    std::vector<int> dims{2, 3, 4, 5};
    int samples = 20;
    std::uint64_t seed = 1;

    auto* interpret = app.add_subcommand("interpret", "print the matrix of a diagram");
    interpret->add_option("file", file, "diagram document")->required();
    interpret->add_option("--tol", print_tol, "print parts below this magnitude as 0");

    auto* normalize = app.add_subcommand("normalize", "print normal-form amplitudes");
    normalize->add_option("file", file, "diagram document")->required();
    normalize->add_option("--emit-diagram", emit, "write the normal-form diagram here");

    auto* equal = app.add_subcommand("equal", "exit 0 iff two diagrams are equal");
    equal->add_option("a", file, "first document")->required();
    equal->add_option("b", other, "second document")->required();
    equal->add_option("--tol", tol, "amplitude tolerance");

    auto* verify = app.add_subcommand("verify-rules", "check every rule numerically");
    verify->add_option("--dims", dims, "dimensions")->delimiter(',');
    verify->add_option("--samples", samples, "parameter draws per rule");
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--report", report, "write line-delimited records here");

    auto* render = app.add_subcommand("render", "print a drawing of a diagram");
    render->add_option("file", file, "diagram document")->required();
    render->add_option("--format", format, "output format (dot)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*interpret) return run_interpret(file, print_tol);
        if (*normalize) return run_normalize(file, emit);
        if (*equal) return run_equal(file, other, tol);
        if (*verify) return run_verify(dims, samples, seed, report);
        return run_render(file, format);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const zxw::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
