#pragma once

#include <array>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cgd/graph.hpp"

namespace cgd {

/// A local rule: a consistent bounded function from radius-r disks to graphs.
/// Output vertex names are input names, possibly extended by up to
/// `suffix_depth` suffix segments with values below `bound`; that naming
/// discipline is what makes freshness and conjugacy hold structurally.
struct LocalRule {
    std::string name;
    int radius = 0;
    int bound = 1;
    int suffix_depth = 1;
    Alphabets in_alpha;
    Alphabets out_alpha;
    std::function<Graph(const Disk&)> apply;
    /// Deterministic generator of valid input graphs, used by the checkers.
    std::function<Graph(std::mt19937_64&)> sample_input;
};

// ---------------------------------------------------------------------------
// Identity
// ---------------------------------------------------------------------------

namespace detail {

/// Shared by the name-preserving radius-0 rules: the center vertex plus all
/// its incident edges, states mapped through `recolor`.
inline Graph copy_center(const Disk& d, const Alphabets& out_alpha,
                         const std::function<std::optional<Symbol>(std::optional<Symbol>)>& recolor) {
    const VertexName& c = d.center();
    Graph out(out_alpha);
    out.add_vertex(c);
    if (auto s = recolor(d.graph().state(c))) out.set_state(c, *s);
    for (const auto& [key, s] : d.graph().edges_at_vertex(c))
        out.add_edge(key.first, key.second, s);
    return out;
}

inline Graph sample_general_graph(std::mt19937_64& rng, const Alphabets& alpha,
                                  int max_vertices, const std::string& base = "v") {
    Graph g(alpha);
    int n = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_vertices));
    std::vector<VertexName> names;
    for (int i = 0; i < n; i++) {
        VertexName v(base + std::to_string(i));
        g.add_vertex(v);
        if (!alpha.sigma.empty() && rng() % 4 != 0) {
            auto it = alpha.sigma.begin();
            std::advance(it, rng() % alpha.sigma.size());
            g.set_state(v, *it);
        }
        names.push_back(v);
    }
    if (alpha.delta.empty()) return g;
    // Erdos-Renyi-flavoured port wiring with rejection to keep monogamy
    int attempts = n * alpha.pi;
    for (int t = 0; t < attempts; t++) {
        Port a{names[rng() % names.size()], 1 + static_cast<int>(rng() % alpha.pi)};
        Port b{names[rng() % names.size()], 1 + static_cast<int>(rng() % alpha.pi)};
        if (a == b || !g.port_free(a) || !g.port_free(b)) continue;
        auto it = alpha.delta.begin();
        std::advance(it, rng() % alpha.delta.size());
        g.add_edge(a, b, *it);
    }
    return g;
}

}  // namespace detail

/// Radius-0 rule whose induced dynamics is the identity.
inline LocalRule identity_rule(const Alphabets& alpha) {
    LocalRule rule;
    rule.name = "identity";
    rule.radius = 0;
    rule.bound = 1;
    rule.suffix_depth = 0;
    rule.in_alpha = rule.out_alpha = alpha;
    rule.apply = [alpha](const Disk& d) {
        return detail::copy_center(d, alpha, [](std::optional<Symbol> s) { return s; });
    };
    rule.sample_input = [alpha](std::mt19937_64& rng) {
        return detail::sample_general_graph(rng, alpha, 5);
    };
    return rule;
}

/// Radius-0 rule applying a bijective relabeling of vertex states; topology
/// and names are untouched, so the induced dynamics is invertible.
inline LocalRule state_permutation_rule(const std::map<Symbol, Symbol>& perm,
                                        const Alphabets& alpha) {
    std::set<Symbol> image;
    for (const auto& [from, to] : perm) {
        if (!alpha.sigma.count(from) || !alpha.sigma.count(to))
            throw BadParameters("state permutation over symbols outside sigma");
        image.insert(to);
    }
    if (image.size() != perm.size() || perm.size() != alpha.sigma.size())
        throw BadParameters("state permutation is not a bijection on sigma");
    LocalRule rule;
    rule.name = "state-perm";
    rule.radius = 0;
    rule.bound = 1;
    rule.suffix_depth = 0;
    rule.in_alpha = rule.out_alpha = alpha;
    rule.apply = [perm, alpha](const Disk& d) {
        return detail::copy_center(d, alpha, [&perm](std::optional<Symbol> s) -> std::optional<Symbol> {
            if (!s) return std::nullopt;
            return perm.at(*s);
        });
    };
    rule.sample_input = [alpha](std::mt19937_64& rng) {
        return detail::sample_general_graph(rng, alpha, 5);
    };
    return rule;
}

// ---------------------------------------------------------------------------
// Finite unbounded cellular automaton
// ---------------------------------------------------------------------------

/// Parameters of the one-dimensional CA rule: the local function h as an
/// explicit table over pairs of symbols, with quiescent symbol q.
struct CaTable {
    std::map<std::pair<Symbol, Symbol>, Symbol> h;
    Symbol quiescent;

    const Symbol& operator()(const Symbol& a, const Symbol& b) const {
        auto it = h.find({a, b});
        if (it == h.end())
            throw BadParameters("CA table has no entry for (" + a + "," + b + ")");
        return it->second;
    }

    std::set<Symbol> symbols() const {
        std::set<Symbol> out;
        out.insert(quiescent);
        for (const auto& [key, val] : h) {
            out.insert(key.first);
            out.insert(key.second);
            out.insert(val);
        }
        return out;
    }
};

inline CaTable xor_table() {
    return CaTable{{{{"0", "0"}, "0"}, {{"0", "1"}, "1"}, {{"1", "0"}, "1"}, {{"1", "1"}, "0"}},
                   "0"};
}

namespace detail {

struct CaLineView {
    std::optional<VertexName> left;   // neighbour through port 1
    std::optional<VertexName> right;  // neighbour through port 2
    Symbol edge_state_right;          // state of the outgoing right edge if any
};

/// Cells chain left-to-right through edges of the form a:2 -> b:1. Anything
/// else in the disk is a malformed encoding.
inline CaLineView ca_line_view(const Disk& d, const Symbol& default_edge) {
    const Graph& g = d.graph();
    const VertexName& c = d.center();
    for (const auto& [key, s] : g.delta()) {
        if (key.first.index != 2 || key.second.index != 1)
            throw MalformedDisk("CA disk edge " + edge_str(key) + " is not of the a:2 -> b:1 form");
        if (key.first.owner == key.second.owner)
            throw MalformedDisk("CA disk has a self-loop at " + key.first.owner.str());
    }
    CaLineView view;
    view.edge_state_right = default_edge;
    if (auto e = g.edge_at(Port{c, 1})) {
        if (e->first.second != Port{c, 1})
            throw MalformedDisk("edge into " + c.str() + ":1 oriented backwards");
        view.left = e->first.first.owner;
    }
    if (auto e = g.edge_at(Port{c, 2})) {
        if (e->first.first != Port{c, 2})
            throw MalformedDisk("edge out of " + c.str() + ":2 oriented backwards");
        view.right = e->first.second.owner;
        view.edge_state_right = e->second;
    }
    return view;
}

}  // namespace detail

/// Radius-1 rule on line encodings of one-dimensional configurations: cell
/// names chain through edges a:2 -> b:1, the new value of a cell is
/// h(left, self) with quiescent fed in at the borders, and the encoding
/// grows one cell at the right border when h(last, q) is not quiescent.
inline LocalRule xor_ca_rule(const CaTable& table, Symbol edge_symbol = "-") {
    if (table(table.quiescent, table.quiescent) != table.quiescent)
        throw BadParameters("CA table must satisfy h(q,q) = q");
    Alphabets alpha{table.symbols(), {edge_symbol}, 2};
    const Symbol q = table.quiescent;
    LocalRule rule;
    rule.name = "xor-ca";
    rule.radius = 1;
    rule.bound = 3;
    rule.suffix_depth = 1;
    rule.in_alpha = rule.out_alpha = alpha;
    rule.apply = [table, alpha, q, edge_symbol](const Disk& d) {
        const VertexName& c = d.center();
        auto view = detail::ca_line_view(d, edge_symbol);
        auto state_or_q = [&](const std::optional<VertexName>& v) -> Symbol {
            if (!v) return q;
            auto s = d.graph().state(*v);
            return s ? *s : q;
        };
        Symbol self = state_or_q(c);
        Graph out(alpha);
        out.add_vertex(c.child(0), table(state_or_q(view.left), self));
        if (view.right) {
            out.add_edge(Port{c.child(0), 2}, Port{view.right->child(0), 1},
                         view.edge_state_right);
        } else if (table(self, q) != q) {
            // growth at the right border
            out.add_vertex(c.child(1), table(self, q));
            out.add_edge(Port{c.child(0), 2}, Port{c.child(1), 1}, edge_symbol);
        }
        return out;
    };
    rule.sample_input = [alpha, q](std::mt19937_64& rng) {
        Graph g(alpha);
        int n = 1 + static_cast<int>(rng() % 6);
        std::vector<Symbol> syms(alpha.sigma.begin(), alpha.sigma.end());
        for (int i = 0; i < n; i++) {
            g.add_vertex(VertexName("v" + std::to_string(i)), syms[rng() % syms.size()]);
            if (i > 0)
                g.add_edge(Port{VertexName("v" + std::to_string(i - 1)), 2},
                           Port{VertexName("v" + std::to_string(i)), 1},
                           *alpha.delta.begin());
        }
        return g;
    };
    return rule;
}

// ---------------------------------------------------------------------------
// Inflating grid
// ---------------------------------------------------------------------------

enum class GridVariant { plain, grey_black, grey_white_black };

namespace detail {

// ports 1..4 = East, North, West, South; block cells 0=SW, 1=SE, 2=NW, 3=NE
inline const std::array<std::array<int, 2>, 5>& grid_side_cells() {
    static const std::array<std::array<int, 2>, 5> sides = {{
        {{0, 0}},  // unused (ports are 1-based)
        {{1, 3}},  // East side
        {{2, 3}},  // North side
        {{0, 2}},  // West side
        {{0, 1}},  // South side
    }};
    return sides;
}

inline std::vector<Symbol> grid_cluster_colors(GridVariant variant, const Symbol& s) {
    switch (variant) {
        case GridVariant::plain:
            break;
        case GridVariant::grey_black:
            if (s == "black") return {"black", "black", "black", "black"};
            if (s == "grey") return {"grey", "grey", "grey", "black"};
            break;
        case GridVariant::grey_white_black:
            if (s == "black") return {"black", "black", "black", "black"};
            if (s == "white") return {"white", "white", "white", "black"};
            if (s == "grey") return {"white", "white", "white", "white"};
            break;
    }
    throw MalformedDisk("grid rule cannot recolor state '" + s + "'");
}

}  // namespace detail

/// Radius-0 rule replacing every vertex by a 2x2 cluster, rewired to its
/// neighbours' clusters side by side. The sixteen border cases arise from
/// one uniform construction over whichever of the four neighbours exist.
inline LocalRule inflating_grid_rule(GridVariant variant, Symbol edge_symbol = "-") {
    Alphabets alpha;
    alpha.pi = 4;
    alpha.delta = {edge_symbol};
    switch (variant) {
        case GridVariant::plain: break;
        case GridVariant::grey_black: alpha.sigma = {"grey", "black"}; break;
        case GridVariant::grey_white_black: alpha.sigma = {"grey", "white", "black"}; break;
    }
    LocalRule rule;
    rule.name = "grid";
    rule.radius = 0;
    rule.bound = 4;
    rule.suffix_depth = 1;
    rule.in_alpha = rule.out_alpha = alpha;
    rule.apply = [variant, alpha, edge_symbol](const Disk& d) {
        const VertexName& c = d.center();
        const Graph& g = d.graph();
        Graph out(alpha);
        for (int k = 0; k < 4; k++) out.add_vertex(c.child(k));
        if (auto s = g.state(c)) {
            std::vector<Symbol> colors = detail::grid_cluster_colors(variant, *s);
            for (int k = 0; k < 4; k++) out.set_state(c.child(k), colors[k]);
        }
        // internal wiring: west->east and south->north
        out.add_edge(Port{c.child(0), 1}, Port{c.child(1), 3}, edge_symbol);
        out.add_edge(Port{c.child(2), 1}, Port{c.child(3), 3}, edge_symbol);
        out.add_edge(Port{c.child(0), 2}, Port{c.child(2), 4}, edge_symbol);
        out.add_edge(Port{c.child(1), 2}, Port{c.child(3), 4}, edge_symbol);
        // each incident edge u:i -> w:j becomes the two side-by-side edges
        // pairing the i-side cells of u's cluster with the j-side of w's
        for (const auto& [key, s] : g.edges_at_vertex(c)) {
            if (key.first.index > 4 || key.second.index > 4)
                throw MalformedDisk("grid rule on degree above 4: " + edge_str(key));
            const auto& side_a = detail::grid_side_cells()[key.first.index];
            const auto& side_b = detail::grid_side_cells()[key.second.index];
            for (int k = 0; k < 2; k++)
                out.add_edge(Port{key.first.owner.child(side_a[k]), key.first.index},
                             Port{key.second.owner.child(side_b[k]), key.second.index}, s);
        }
        return out;
    };
    rule.sample_input = [variant, alpha, edge_symbol](std::mt19937_64& rng) {
        // random colouring of a small grid patch
        int n = 1 + static_cast<int>(rng() % 3);
        Graph g(alpha);
        auto at = [n](int r, int c) { return VertexName("v" + std::to_string(r * n + c)); };
        std::vector<Symbol> syms(alpha.sigma.begin(), alpha.sigma.end());
        for (int r = 0; r < n; r++)
            for (int col = 0; col < n; col++) {
                g.add_vertex(at(r, col));
                if (!syms.empty()) g.set_state(at(r, col), syms[rng() % syms.size()]);
            }
        for (int r = 0; r < n; r++)
            for (int col = 0; col < n; col++) {
                if (col + 1 < n) g.add_edge(Port{at(r, col), 1}, Port{at(r, col + 1), 3}, edge_symbol);
                if (r + 1 < n) g.add_edge(Port{at(r, col), 2}, Port{at(r + 1, col), 4}, edge_symbol);
            }
        return g;
    };
    return rule;
}

}  // namespace cgd
