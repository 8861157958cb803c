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
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zxw/diagram.hpp"
#include "zxw/generator.hpp"
#include "zxw/rules.hpp"

namespace zxw {

/// Malformed document text. `field` is a JSON path such as nodes[2].params.phase.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

inline constexpr int kDocumentVersion = 1;

namespace detail {

using Json = nlohmann::json;

inline std::string number(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string complex_text(Complex z) { return "[" + number(z.real()) + ", " + number(z.imag()) + "]"; }

template <typename T, typename F>
std::string list_text(const std::vector<T>& items, F&& item) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + item(items[i]);
    return out + "]";
}

inline std::string endpoint_text(const Endpoint& e) {
    const std::string node = e.is_boundary() ? "\"boundary\"" : "\"" + std::to_string(e.node) + "\"";
    return "{\"node\": " + node + ", \"role\": \"" + (e.role == PortRole::In ? "in" : "out") +
           "\", \"port\": " + std::to_string(e.port) + "}";
}

inline std::string arity_text(int inputs, int outputs) {
    return "\"inputs\": " + std::to_string(inputs) + ", \"outputs\": " + std::to_string(outputs);
}

inline std::string params_text(const GeneratorKind& kind) {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZBox>)
                return "{\"phase\": " + list_text(k.phase, complex_text) + ", " + arity_text(k.inputs, k.outputs) + "}";
            else if constexpr (std::is_same_v<T, GreenSpider>)
                return "{\"angles\": " + list_text(k.angles, number) + ", " + arity_text(k.inputs, k.outputs) + "}";
            else if constexpr (std::is_same_v<T, LabeledBox>)
                return "{\"x\": " + complex_text(k.x) + ", " + arity_text(k.inputs, k.outputs) + "}";
            else if constexpr (std::is_same_v<T, PinkSpider>)
                return "{\"phase_index\": " + std::to_string(k.phase_index) + ", " + arity_text(k.inputs, k.outputs) +
                       "}";
            else if constexpr (std::is_same_v<T, WNodeGeneral>)
                return "{\"legs\": " + std::to_string(k.legs) + ", \"transpose\": " + (k.transpose ? "true" : "false") +
                       "}";
            else if constexpr (std::is_same_v<T, Multiplier>) return "{\"weight\": " + std::to_string(k.weight) + "}";
            else if constexpr (std::is_same_v<T, ScalarBox>) return "{\"value\": " + complex_text(k.value) + "}";
            else return "{}";
        },
        kind);
}

inline Wire oriented(Wire w) {
    if (w.b < w.a) std::swap(w.a, w.b);
    return w;
}

// Reading.

inline const Json& field(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + "." + key, "missing field");
    return *it;
}

inline int int_field(const Json& obj, const std::string& key, const std::string& path) {
    const Json& v = field(obj, key, path);
    if (!v.is_number_integer()) throw ParseError(path + "." + key, "expected an integer");
    return v.get<int>();
}

inline double real_value(const Json& v, const std::string& path) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number()) throw ParseError(path, "expected a number");
    return v.get<double>();
}

inline Complex complex_value(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw ParseError(path, "expected an [re, im] pair");
    return {real_value(v[0], path + "[0]"), real_value(v[1], path + "[1]")};
}

inline std::vector<Complex> complex_list(const Json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(path, "expected a list");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_value(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline GeneratorKind kind_value(const std::string& name, const Json& p, const std::string& path) {
    auto ins = [&] { return int_field(p, "inputs", path); };
    auto outs = [&] { return int_field(p, "outputs", path); };
    if (name == "ZBox") return ZBox{complex_list(field(p, "phase", path), path + ".phase"), ins(), outs()};
    if (name == "Hadamard") return Hadamard{};
    if (name == "WNode") return WNode{};
    if (name == "HadamardDagger") return HadamardDagger{};
    if (name == "WNodeGeneral") {
        const Json& t = field(p, "transpose", path);
        if (!t.is_boolean()) throw ParseError(path + ".transpose", "expected a boolean");
        return WNodeGeneral{int_field(p, "legs", path), t.get<bool>()};
    }
    if (name == "GreenSpider") {
        const Json& a = field(p, "angles", path);
        if (!a.is_array()) throw ParseError(path + ".angles", "expected a list");
        std::vector<double> angles;
        for (std::size_t i = 0; i < a.size(); ++i)
            angles.push_back(real_value(a[i], path + ".angles[" + std::to_string(i) + "]"));
        return GreenSpider{angles, ins(), outs()};
    }
    if (name == "LabeledBox") return LabeledBox{complex_value(field(p, "x", path), path + ".x"), ins(), outs()};
    if (name == "PinkSpider") return PinkSpider{int_field(p, "phase_index", path), ins(), outs()};
    if (name == "Dualiser") return Dualiser{};
    if (name == "Multiplier") return Multiplier{int_field(p, "weight", path)};
    if (name == "Triangle") return Triangle{};
    if (name == "TriangleInverse") return TriangleInverse{};
    if (name == "ScalarBox") return ScalarBox{complex_value(field(p, "value", path), path + ".value")};
    if (name == "VBox") return VBox{};
    throw ParseError(path.substr(0, path.rfind('.')) + ".kind", "unknown kind \"" + name + "\"");
}

inline Endpoint endpoint_value(const Json& v, const std::string& path) {
    const Json& node = field(v, "node", path);
    const Json& role = field(v, "role", path);
    Endpoint e;
    if (node.is_string() && node.get<std::string>() == "boundary") {
        e.node = kBoundary;
    } else {
        const std::string text = node.is_string() ? node.get<std::string>() : "";
        if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError(path + ".node", "expected a decimal id string or \"boundary\"");
        e.node = std::stoi(text);
    }
    if (role == "in") e.role = PortRole::In;
    else if (role == "out") e.role = PortRole::Out;
    else throw ParseError(path + ".role", "expected \"in\" or \"out\"");
    e.port = int_field(v, "port", path);
    return e;
}

}  // namespace detail

/// Canonical document text: nodes by id, wires oriented and sorted, one
/// value per line for the top-level lists. Byte-stable.
inline std::string serialize(const Diagram& diagram) {
    using namespace detail;
    std::vector<Wire> inner;
    std::vector<Endpoint> inputs(diagram.num_inputs()), outputs(diagram.num_outputs());
    for (const auto& w : diagram.wires()) {
        if (w.a.is_boundary()) (w.a.role == PortRole::In ? inputs : outputs)[w.a.port] = w.b;
        if (w.b.is_boundary()) (w.b.role == PortRole::In ? inputs : outputs)[w.b.port] = w.a;
        if (!w.a.is_boundary() && !w.b.is_boundary()) inner.push_back(oriented(w));
    }
    std::sort(inner.begin(), inner.end());

    std::string out = "{\n  \"version\": " + std::to_string(kDocumentVersion) +
                      ",\n  \"dimension\": " + std::to_string(diagram.dimension()) + ",\n  \"nodes\": [";
    bool first = true;
    for (const auto& [id, kind] : diagram.nodes()) {
        out += std::string(first ? "" : ",") + "\n    {\"id\": \"" + std::to_string(id) + "\", \"kind\": \"" +
               kind_name(kind) + "\", \"params\": " + params_text(kind) + "}";
        first = false;
    }
    out += std::string(first ? "" : "\n  ") + "],\n  \"wires\": [";
    for (std::size_t i = 0; i < inner.size(); ++i)
        out += std::string(i ? "," : "") + "\n    [" + endpoint_text(inner[i].a) + ", " + endpoint_text(inner[i].b) + "]";
    out += std::string(inner.empty() ? "" : "\n  ") + "],\n";
    auto boundary = [&](const std::string& key, const std::vector<Endpoint>& list, bool last) {
        out += "  \"" + key + "\": [";
        for (std::size_t i = 0; i < list.size(); ++i)
            out += std::string(i ? "," : "") + "\n    " + endpoint_text(list[i]);
        out += std::string(list.empty() ? "" : "\n  ") + "]" + (last ? "\n" : ",\n");
    };
    boundary("inputs", inputs, false);
    boundary("outputs", outputs, true);
    return out + "}\n";
}

/// Reads a document and validates the resulting diagram.
inline Diagram parse(const std::string& text) {
    using namespace detail;
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("", "expected a top-level object");
    const int version = int_field(doc, "version", "");
    if (version != kDocumentVersion) throw ParseError("version", "unsupported version " + std::to_string(version));
    const int d = int_field(doc, "dimension", "");
    if (d < 2) throw ParseError("dimension", "must be at least 2");

    const Json& ins = field(doc, "inputs", "");
    const Json& outs = field(doc, "outputs", "");
    if (!ins.is_array()) throw ParseError("inputs", "expected a list");
    if (!outs.is_array()) throw ParseError("outputs", "expected a list");
    Diagram out(Dimension(d), static_cast<int>(ins.size()), static_cast<int>(outs.size()));

    const Json& nodes = field(doc, "nodes", "");
    if (!nodes.is_array()) throw ParseError("nodes", "expected a list");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = "nodes[" + std::to_string(i) + "]";
        const Json& id = field(nodes[i], "id", path);
        const std::string id_text = id.is_string() ? id.get<std::string>() : "";
        if (id_text.empty() || id_text.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError(path + ".id", "expected a decimal id string");
        const Json& kind = field(nodes[i], "kind", path);
        if (!kind.is_string()) throw ParseError(path + ".kind", "expected a string");
        const Json& params = field(nodes[i], "params", path);
        try {
            out.add_node(std::stoi(id_text), kind_value(kind.get<std::string>(), params, path + ".params"));
        } catch (const DiagramError& e) {
            throw ParseError(path, e.what());
        }
    }

    std::set<Wire> wires;
    const Json& list = field(doc, "wires", "");
    if (!list.is_array()) throw ParseError("wires", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "wires[" + std::to_string(i) + "]";
        if (!list[i].is_array() || list[i].size() != 2) throw ParseError(path, "expected an endpoint pair");
        wires.insert(oriented({endpoint_value(list[i][0], path + "[0]"), endpoint_value(list[i][1], path + "[1]")}));
    }
    auto attach = [&](const Json& ends, PortRole role, const std::string& key) {
        for (std::size_t k = 0; k < ends.size(); ++k) {
            const Endpoint own{kBoundary, role, static_cast<int>(k)};
            wires.insert(oriented({own, endpoint_value(ends[k], key + "[" + std::to_string(k) + "]")}));
        }
    };
    attach(ins, PortRole::In, "inputs");
    attach(outs, PortRole::Out, "outputs");
    out.set_wires({wires.begin(), wires.end()});

    const auto problems = validate(out);
    if (!problems.empty()) {
        std::string message = "invalid diagram:";
        for (const auto& p : problems) message += " " + p + ";";
        throw ParseError("", message);
    }
    return out;
}

/// Structural equality up to wire order and orientation.
inline bool same_diagram(const Diagram& a, const Diagram& b) { return serialize(a) == serialize(b); }

/// Graphviz text. Boundary positions are point vertices; nodes appear in id
/// order, so normal forms keep their branch order.
inline std::string render_dot(const Diagram& diagram) {
    auto style = [](const GeneratorKind& kind) -> std::string {
        const std::string name = kind_name(kind);
        if (std::holds_alternative<ZBox>(kind) || std::holds_alternative<GreenSpider>(kind) ||
            std::holds_alternative<LabeledBox>(kind))
            return "shape=box, style=filled, fillcolor=\"#b8e6a0\", label=\"" + name + "\"";
        if (const auto* p = std::get_if<PinkSpider>(&kind))
            return "shape=circle, style=filled, fillcolor=\"#f4a6b8\", label=\"K" + std::to_string(p->phase_index) + "\"";
        if (std::holds_alternative<WNode>(kind) || std::holds_alternative<WNodeGeneral>(kind))
            return "shape=triangle, style=filled, fillcolor=black, fontcolor=white, label=\"W\"";
        if (std::holds_alternative<Hadamard>(kind) || std::holds_alternative<HadamardDagger>(kind))
            return "shape=box, style=filled, fillcolor=\"#ffe680\", label=\"" + name + "\"";
        if (const auto* m = std::get_if<Multiplier>(&kind))
            return "shape=box, label=\"x" + std::to_string(m->weight) + "\"";
        return "shape=box, label=\"" + name + "\"";
    };
    auto vertex = [](const Endpoint& e) {
        if (e.is_boundary()) return std::string(e.role == PortRole::In ? "in" : "out") + std::to_string(e.port);
        return "n" + std::to_string(e.node);
    };
    std::string out = "graph zxw {\n";
    if (diagram.num_inputs() + diagram.num_outputs() + diagram.nodes().size() > 0) out += "  rankdir=BT;\n";
    for (int k = 0; k < diagram.num_inputs(); ++k) out += "  in" + std::to_string(k) + " [shape=point];\n";
    for (const auto& [id, kind] : diagram.nodes()) out += "  n" + std::to_string(id) + " [" + style(kind) + "];\n";
    for (int k = 0; k < diagram.num_outputs(); ++k) out += "  out" + std::to_string(k) + " [shape=point];\n";
    std::vector<Wire> wires;
    for (const auto& w : diagram.wires()) wires.push_back(detail::oriented(w));
    std::sort(wires.begin(), wires.end());
    for (const auto& w : wires) out += "  " + vertex(w.a) + " -- " + vertex(w.b) + ";\n";
    return out + "}\n";
}

/// One JSON line per report: {rule, d, samples, max_dev, pass[, error]}.
inline std::string report_line(const SoundnessReport& r) {
    std::string out = "{\"rule\": " + detail::Json(r.rule).dump() + ", \"d\": " + std::to_string(r.d) +
                      ", \"samples\": " + std::to_string(r.samples) + ", \"max_dev\": " +
                      detail::number(r.max_deviation) + ", \"pass\": " + (r.pass ? "true" : "false");
    if (!r.error.empty()) out += ", \"error\": " + detail::Json(r.error).dump();
    return out + "}";
}

inline SoundnessReport parse_report_line(const std::string& line) {
    using namespace detail;
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error& e) {
        throw ParseError("", std::string("malformed report line: ") + e.what());
    }
    SoundnessReport r;
    const Json& rule = field(j, "rule", "");
    const Json& pass = field(j, "pass", "");
    if (!rule.is_string()) throw ParseError("rule", "expected a string");
    if (!pass.is_boolean()) throw ParseError("pass", "expected a boolean");
    r.rule = rule.get<std::string>();
    r.d = int_field(j, "d", "");
    r.samples = int_field(j, "samples", "");
    r.max_deviation = real_value(field(j, "max_dev", ""), "max_dev");
    r.pass = pass.get<bool>();
    if (auto it = j.find("error"); it != j.end()) {
        if (!it->is_string()) throw ParseError("error", "expected a string");
        r.error = it->get<std::string>();
    }
    return r;
}

inline std::string serialize_reports(const std::vector<SoundnessReport>& reports) {
    std::string out;
    for (const auto& r : reports) out += report_line(r) + "\n";
    return out;
}

inline std::vector<SoundnessReport> parse_reports(const std::string& text) {
    std::vector<SoundnessReport> out;
    std::istringstream in(text);
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_report_line(line));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(n) + (e.field().empty() ? "" : "." + e.field()), e.what());
        }
    }
    return out;
}

}  // namespace zxw
