#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgd/engine.hpp"
#include "cgd/graph.hpp"
#include "cgd/mutants.hpp"
#include "cgd/rules.hpp"
#include "cgd/verify.hpp"

namespace cgd {

// ---------------------------------------------------------------------------
// Text format
//
// Optional header lines, then one record per line:
//   sigma <s>...      declared vertex states
//   delta <s>...      declared edge states
//   pi <n>            port count
//   vertex <name> [<state>]
//   edge <name>:<i> -> <name>:<j> [<state>]
//   pointer <name>
// Blank lines and '#' comments are ignored. Without headers the alphabets
// are inferred from the records (pi from the largest port in use).
// ---------------------------------------------------------------------------

struct ParsedGraph {
    Graph graph;
    std::set<VertexName> pointers;

    bool pointed() const { return !pointers.empty(); }
    PointedGraph as_pointed() const { return PointedGraph{graph, pointers}; }
};

namespace detail {

struct RawEdge {
    Port a, b;
    std::optional<Symbol> state;
    int line;
};

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline int column_of(const std::string& line, const std::string& token, int occurrence = 1) {
    size_t pos = 0;
    for (int i = 0; i < occurrence; i++) {
        pos = line.find(token, i ? pos + 1 : 0);
        if (pos == std::string::npos) return 1;
    }
    return static_cast<int>(pos) + 1;
}

inline VertexName parse_name(const std::string& tok, int line_no, const std::string& line) {
    auto n = VertexName::parse(tok);
    if (!n) throw ParseError(line_no, column_of(line, tok), "bad vertex name '" + tok + "'");
    return *n;
}

inline Port parse_port(const std::string& tok, int line_no, const std::string& line) {
    size_t colon = tok.rfind(':');
    if (colon == std::string::npos || colon + 1 == tok.size())
        throw ParseError(line_no, column_of(line, tok), "expected <name>:<port>, got '" + tok + "'");
    std::string num = tok.substr(colon + 1);
    for (char c : num)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError(line_no, column_of(line, tok), "bad port index '" + num + "'");
    return Port{parse_name(tok.substr(0, colon), line_no, line), std::stoi(num)};
}

}  // namespace detail

inline ParsedGraph parse_graph(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int line_no = 0;

    std::optional<std::set<Symbol>> sigma_decl, delta_decl;
    std::optional<int> pi_decl;
    std::vector<std::pair<VertexName, std::optional<Symbol>>> verts;
    std::vector<detail::RawEdge> edges;
    std::set<VertexName> pointers;

    while (std::getline(is, line)) {
        line_no++;
        std::string body = line.substr(0, line.find('#'));
        auto toks = detail::split_ws(body);
        if (toks.empty()) continue;
        const std::string& kind = toks[0];
        if (kind == "sigma" || kind == "delta") {
            std::set<Symbol> syms(toks.begin() + 1, toks.end());
            (kind == "sigma" ? sigma_decl : delta_decl) = std::move(syms);
        } else if (kind == "pi") {
            if (toks.size() != 2)
                throw ParseError(line_no, 1, "pi takes exactly one argument");
            try {
                pi_decl = std::stoi(toks[1]);
            } catch (const std::exception&) {
                throw ParseError(line_no, detail::column_of(line, toks[1]),
                                 "bad port count '" + toks[1] + "'");
            }
        } else if (kind == "vertex") {
            if (toks.size() < 2 || toks.size() > 3)
                throw ParseError(line_no, 1, "expected: vertex <name> [<state>]");
            verts.push_back({detail::parse_name(toks[1], line_no, line),
                             toks.size() == 3 ? std::optional<Symbol>(toks[2]) : std::nullopt});
        } else if (kind == "edge") {
            if (toks.size() < 4 || toks.size() > 5 || toks[2] != "->")
                throw ParseError(line_no, 1,
                                 "expected: edge <name>:<i> -> <name>:<j> [<state>]");
            edges.push_back({detail::parse_port(toks[1], line_no, line),
                             detail::parse_port(toks[3], line_no, line),
                             toks.size() == 5 ? std::optional<Symbol>(toks[4]) : std::nullopt,
                             line_no});
        } else if (kind == "pointer") {
            if (toks.size() != 2) throw ParseError(line_no, 1, "expected: pointer <name>");
            pointers.insert(detail::parse_name(toks[1], line_no, line));
        } else {
            throw ParseError(line_no, detail::column_of(line, kind),
                             "unknown record '" + kind + "'");
        }
    }

    Alphabets alpha;
    if (sigma_decl) alpha.sigma = *sigma_decl;
    if (delta_decl) alpha.delta = *delta_decl;
    int max_port = 1;
    for (const auto& e : edges) max_port = std::max({max_port, e.a.index, e.b.index});
    for (const auto& [v, s] : verts)
        if (!sigma_decl && s) alpha.sigma.insert(*s);
    for (const auto& e : edges)
        if (!delta_decl) alpha.delta.insert(e.state.value_or("-"));
    if (!delta_decl && alpha.delta.empty() && !edges.empty()) alpha.delta.insert("-");
    alpha.pi = pi_decl.value_or(max_port);

    Graph g(alpha);
    for (const auto& [v, s] : verts) {
        if (s)
            g.add_vertex(v, *s);
        else
            g.add_vertex(v);
    }
    for (const auto& e : edges) {
        try {
            g.add_edge(e.a, e.b, e.state.value_or("-"));
        } catch (const Error& err) {
            throw InvariantViolation("edge record at line " + std::to_string(e.line) + " (" +
                                     e.a.str() + " -> " + e.b.str() + "): " + err.what());
        }
    }
    for (const auto& p : pointers)
        if (!g.has_vertex(p))
            throw InvariantViolation("pointer to unknown vertex " + p.str());
    return {std::move(g), std::move(pointers)};
}

inline ParsedGraph parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadParameters("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_graph(os.str());
}

inline std::string serialize_graph(const Graph& g, const std::set<VertexName>& pointers = {}) {
    std::ostringstream os;
    os << "sigma";
    for (const auto& s : g.alphabets().sigma) os << " " << s;
    os << "\ndelta";
    for (const auto& s : g.alphabets().delta) os << " " << s;
    os << "\npi " << g.pi() << "\n";
    for (const auto& v : g.vertices()) {
        os << "vertex " << v.str();
        if (auto s = g.state(v)) os << " " << *s;
        os << "\n";
    }
    for (const auto& [key, s] : g.delta())
        os << "edge " << key.first.str() << " -> " << key.second.str() << " " << s << "\n";
    for (const auto& p : pointers) os << "pointer " << p.str() << "\n";
    return os.str();
}

inline std::string export_dot(const Graph& g) {
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out + "\"";
    };
    std::ostringstream os;
    os << "graph G {\n";
    for (const auto& v : g.vertices()) {
        std::string label = v.str();
        if (auto s = g.state(v)) label += "\\n" + *s;
        os << "  " << quote(v.str()) << " [label=" << quote(label) << "];\n";
    }
    for (const auto& [key, s] : g.delta())
        os << "  " << quote(key.first.owner.str()) << " -- " << quote(key.second.owner.str())
           << " [label=" << quote(std::to_string(key.first.index) + ":" +
                                  std::to_string(key.second.index) + "/" + s)
           << "];\n";
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Family generators
// ---------------------------------------------------------------------------

inline Graph generate(const std::string& family, int n, std::vector<Symbol> states = {}) {
    if (n < 1) throw BadParameters("n must be at least 1");
    Symbol edge = "-";
    auto name = [](int i) { return VertexName("v" + std::to_string(i)); };
    auto state_of = [&states](int i) -> std::optional<Symbol> {
        if (states.empty()) return std::nullopt;
        return states[i % states.size()];
    };
    auto make_alpha = [&](int pi) {
        Alphabets a;
        a.pi = pi;
        a.delta = {edge};
        for (const auto& s : states) a.sigma.insert(s);
        return a;
    };

    if (family == "single") {
        Graph g(make_alpha(4));
        g.add_vertex(name(0));
        if (auto s = state_of(0)) g.set_state(name(0), *s);
        return g;
    }
    if (family == "line" || family == "cycle") {
        if (family == "cycle" && n < 3) throw BadParameters("cycle needs n >= 3");
        Graph g(make_alpha(2));
        for (int i = 0; i < n; i++) {
            g.add_vertex(name(i));
            if (auto s = state_of(i)) g.set_state(name(i), *s);
            if (i > 0) g.add_edge(Port{name(i - 1), 2}, Port{name(i), 1}, edge);
        }
        if (family == "cycle") g.add_edge(Port{name(n - 1), 2}, Port{name(0), 1}, edge);
        return g;
    }
    if (family == "grid") {
        Graph g(make_alpha(4));
        auto at = [&](int r, int c) { return name(r * n + c); };
        for (int r = 0; r < n; r++)
            for (int c = 0; c < n; c++) {
                g.add_vertex(at(r, c));
                if (auto s = state_of(r * n + c)) g.set_state(at(r, c), *s);
                if (c > 0) g.add_edge(Port{at(r, c - 1), 1}, Port{at(r, c), 3}, edge);
                if (r > 0) g.add_edge(Port{at(r - 1, c), 2}, Port{at(r, c), 4}, edge);
            }
        return g;
    }
    throw BadParameters("unknown family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Rule specs: <name>[:<key>=<value>;...]
// ---------------------------------------------------------------------------

namespace detail {

inline std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ';')) {
        if (item.empty()) continue;
        size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw BadParameters("rule parameter '" + item + "' is not key=value");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

inline CaTable ca_table_from_params(const std::map<std::string, std::string>& params) {
    auto h = params.find("h");
    auto q = params.find("q");
    if (h == params.end() && q == params.end()) return xor_table();
    if (h == params.end() || q == params.end())
        throw BadParameters("custom automaton needs both h= and q=");
    CaTable t;
    t.quiescent = q->second;
    std::istringstream is(h->second);
    std::string item;
    while (std::getline(is, item, ',')) {
        size_t colon = item.find(':');
        if (colon == std::string::npos || colon < 1)
            throw BadParameters("h entry '" + item + "' is not <ab>:<c>");
        std::string args = item.substr(0, colon);
        if (args.size() != 2)
            throw BadParameters("h entry '" + item + "' needs two single-character arguments");
        t.h[{std::string(1, args[0]), std::string(1, args[1])}] = item.substr(colon + 1);
    }
    if (t.h.empty()) throw BadParameters("empty h table");
    return t;
}

}  // namespace detail

/// Resolve a rule spec to a dynamics handle. Central registry for the CLI
/// and for tests that exercise the CLI surface.
inline DynamicsHandle resolve_rule(const std::string& spec) {
    size_t colon = spec.find(':');
    std::string name = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
    auto params =
        detail::parse_params(colon == std::string::npos ? "" : spec.substr(colon + 1));

    if (name == "identity") {
        Alphabets alpha{{"0", "1"}, {"-"}, 2};
        return dynamics(identity_rule(alpha));
    }
    if (name == "xor-ca") return dynamics(xor_ca_rule(detail::ca_table_from_params(params)));
    if (name == "xor-ca2") {
        // the additive automaton iterated twice, folded into one radius-2 rule
        LocalRule ca = xor_ca_rule(detail::ca_table_from_params(params));
        return dynamics(restrict_radius(compose(ca, ca), 2));
    }
    if (name == "grid") {
        std::string variant = params.count("variant") ? params.at("variant") : "plain";
        if (variant == "plain") return dynamics(inflating_grid_rule(GridVariant::plain));
        if (variant == "grey-black")
            return dynamics(inflating_grid_rule(GridVariant::grey_black));
        if (variant == "grey-white-black")
            return dynamics(inflating_grid_rule(GridVariant::grey_white_black));
        throw BadParameters("unknown grid variant '" + variant + "'");
    }
    if (name == "state-perm") {
        std::string spec_perm = params.count("perm") ? params.at("perm") : "0:1,1:0";
        std::map<Symbol, Symbol> perm;
        std::istringstream is(spec_perm);
        std::string item;
        while (std::getline(is, item, ',')) {
            size_t c = item.find(':');
            if (c == std::string::npos || c == 0 || c + 1 == item.size())
                throw BadParameters("perm entry '" + item + "' is not <from>:<to>");
            perm[item.substr(0, c)] = item.substr(c + 1);
        }
        Alphabets alpha{{}, {"-"}, 2};
        for (const auto& [from, to] : perm) alpha.sigma.insert(from);
        return dynamics(state_permutation_rule(perm, alpha));
    }
    if (name == "mutant-constant-name")
        return dynamics(constant_name_mutant(Alphabets{{"0", "1"}, {"-"}, 2}));
    if (name == "mutant-boundary-conflict")
        return dynamics(boundary_conflict_mutant(detail::ca_table_from_params(params)));
    if (name == "mutant-radius-cheat")
        return radius_cheat_mutant(detail::ca_table_from_params(params));
    throw BadParameters("unknown rule '" + name + "'");
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const VerificationReport& r) {
    nlohmann::json j;
    j["property"] = r.property;
    j["verdict"] = r.verdict == VerificationReport::Verdict::pass ? "pass"
                   : r.verdict == VerificationReport::Verdict::fail ? "fail"
                                                                    : "inconclusive";
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["detail"] = r.detail;
    j["artifacts"] = nlohmann::json::object();
    for (const auto& [label, text] : r.artifacts) j["artifacts"][label] = text;
    return j;
}

}  // namespace cgd
