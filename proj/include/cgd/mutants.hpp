#pragma once

// Deliberately broken rules used to exercise the checkers: each violates
// exactly one of the properties the verification pass is supposed to catch.

#include "cgd/engine.hpp"
#include "cgd/rules.hpp"

namespace cgd {

/// Ignores its input's names and always emits the same vertex "x".
/// Disjointly named inputs therefore share an image vertex: fails freshness
/// (and conjugacy), while staying consistent and bounded.
inline LocalRule constant_name_mutant(Alphabets alpha) {
    LocalRule r;
    r.name = "mutant-constant-name";
    r.radius = 0;
    r.bound = 1;
    r.suffix_depth = 0;
    r.in_alpha = alpha;
    r.out_alpha = alpha;
    r.apply = [](const Disk& d) {
        d.pointed.validate(false);
        Graph out(d.graph().alphabets());
        out.add_vertex(VertexName("x"));
        return out;
    };
    r.sample_input = [alpha](std::mt19937_64& rng) {
        std::vector<Symbol> syms(alpha.sigma.begin(), alpha.sigma.end());
        Graph g(alpha);
        int n = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n; i++)
            g.add_vertex(VertexName("v" + std::to_string(i)), syms[rng() % syms.size()]);
        return g;
    };
    return r;
}

/// Like the additive automaton, but also writes a state onto the right
/// neighbour's successor. Two adjacent cells then claim that vertex with
/// different states: fails pairwise consistency (e.g. on the line "01").
inline LocalRule boundary_conflict_mutant(CaTable table, Symbol edge_symbol = "-") {
    LocalRule r = xor_ca_rule(std::move(table), std::move(edge_symbol));
    r.name = "mutant-boundary-conflict";
    auto base_apply = r.apply;
    r.apply = [base_apply](const Disk& d) {
        Graph out = base_apply(d);
        const VertexName c = d.center();
        auto right = d.graph().edge_at(Port{c, 2});
        if (right) {
            const VertexName rn = right->first.second.owner;
            auto self = d.graph().state(c);
            if (self) {
                Graph extra(out.alphabets());
                extra.add_vertex(rn.child(0), *self);
                out = union_graphs(out, extra);
            }
        }
        return out;
    };
    return r;
}

/// A genuine radius-2 rule wrapped in a handle that claims radius 1: the new
/// cell's state mixes in the left-left neighbour, which a radius-1 disk
/// cannot see. Fails uniform continuity at the claimed radius.
inline DynamicsHandle radius_cheat_mutant(CaTable table, Symbol edge_symbol = "-") {
    LocalRule r;
    r.name = "mutant-radius-cheat";
    r.radius = 2;
    r.bound = 1;
    r.suffix_depth = 1;
    Alphabets alpha{{}, {edge_symbol}, 2};
    for (const auto& [pair, s] : table.h) {
        alpha.sigma.insert(pair.first);
        alpha.sigma.insert(pair.second);
        alpha.sigma.insert(s);
    }
    r.in_alpha = alpha;
    r.out_alpha = alpha;
    Symbol q = table.quiescent;
    auto lookup = [table](const Symbol& a, const Symbol& b) { return table.h.at({a, b}); };
    r.apply = [lookup, q, edge_symbol](const Disk& d) {
        const VertexName c = d.center();
        const Graph& g = d.graph();
        auto state_or_q = [&](const std::optional<VertexName>& v) {
            if (!v) return q;
            auto s = g.state(*v);
            return s ? *s : q;
        };
        auto follow = [&](const VertexName& v, int out_port,
                          int in_port) -> std::optional<VertexName> {
            auto e = g.edge_at(Port{v, out_port});
            if (!e) return std::nullopt;
            const Port& far = out_port == 2 ? e->first.second : e->first.first;
            if (far.index != in_port) return std::nullopt;
            return far.owner;
        };
        auto left = follow(c, 1, 2);
        std::optional<VertexName> left_left;
        if (left) left_left = follow(*left, 1, 2);
        Graph out(g.alphabets());
        out.add_vertex(c.child(0), lookup(state_or_q(left_left), state_or_q(c)));
        auto right = follow(c, 2, 1);
        if (right)
            out.add_edge(Port{c.child(0), 2}, Port{right->child(0), 1}, edge_symbol);
        return out;
    };
    r.sample_input = [alpha, q, edge_symbol](std::mt19937_64& rng) {
        std::vector<Symbol> syms(alpha.sigma.begin(), alpha.sigma.end());
        Graph g(alpha);
        int n = 2 + static_cast<int>(rng() % 5);
        for (int i = 0; i < n; i++) {
            VertexName v("c" + std::to_string(i));
            g.add_vertex(v, syms[rng() % syms.size()]);
            if (i > 0)
                g.add_edge(Port{VertexName("c" + std::to_string(i - 1)), 2}, Port{v, 1},
                           edge_symbol);
        }
        return g;
    };
    return DynamicsHandle{std::move(r), 1};
}

}  // namespace cgd
