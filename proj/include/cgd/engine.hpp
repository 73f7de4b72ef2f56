#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cgd/graph.hpp"
#include "cgd/rules.hpp"

namespace cgd {

/// An evaluatable global dynamics F(G) = union of f(G^r_v) over all v.
/// `claimed_radius` is what the causality checkers test against; it defaults
/// to the rule's radius and only differs for deliberately broken handles.
struct DynamicsHandle {
    LocalRule rule;
    std::optional<int> claimed_radius;

    int radius_for_checks() const { return claimed_radius.value_or(rule.radius); }
};

inline DynamicsHandle dynamics(LocalRule rule) { return DynamicsHandle{std::move(rule), {}}; }

/// For each output vertex, the set of input centers whose image contains it.
struct Provenance {
    std::map<VertexName, std::set<VertexName>> origins;

    std::set<VertexName> antecedents(const VertexName& v) const {
        auto it = origins.find(v);
        if (it == origins.end()) throw UnknownVertex("no provenance for " + v.str());
        return it->second;
    }

    /// Output vertices generated from any center in A.
    std::set<VertexName> successors_of(const std::set<VertexName>& a) const {
        std::set<VertexName> out;
        for (const auto& [v, centers] : origins)
            for (const auto& c : centers)
                if (a.count(c)) {
                    out.insert(v);
                    break;
                }
        return out;
    }
};

struct EvalResult {
    Graph graph;
    Provenance provenance;
};

namespace detail {

inline void check_input(const LocalRule& rule, const Graph& g) {
    if (g.pi() != rule.in_alpha.pi)
        throw AlphabetMismatch("graph degree " + std::to_string(g.pi()) +
                               " does not match rule degree " + std::to_string(rule.in_alpha.pi));
    for (const auto& [v, s] : g.sigma())
        if (!rule.in_alpha.sigma.count(s))
            throw AlphabetMismatch("vertex state '" + s + "' outside the rule's alphabet");
    for (const auto& [key, s] : g.delta())
        if (!rule.in_alpha.delta.count(s))
            throw AlphabetMismatch("edge state '" + s + "' outside the rule's alphabet");
}

/// Union of per-center images in the given order. The merge is into ordered
/// maps, so any order of consistent operands yields the identical graph.
inline EvalResult evaluate_in_order(const DynamicsHandle& f, const Graph& g,
                                    const std::vector<VertexName>& order) {
    check_input(f.rule, g);
    Graph acc(f.rule.out_alpha);
    Provenance prov;
    std::map<VertexName, VertexName> first_center;  // per output vertex, for witnesses
    for (const VertexName& v : order) {
        Graph img = f.rule.apply(disk(g, v, f.rule.radius));
        if (static_cast<int>(img.vertices().size()) > f.rule.bound)
            throw EngineError("rule image at " + v.str() + " exceeds its bound");
        if (auto w = consistency_conflict_against(acc, img)) {
            VertexName other = v;
            VertexName probe = w->kind == ConsistencyWitness::vertex_state ? w->vertex
                                                                           : w->port.owner;
            if (auto it = first_center.find(probe); it != first_center.end()) other = it->second;
            throw InconsistentUnion("centers " + other.str() + " and " + v.str() + ": " +
                                    w->describe());
        }
        merge_into(acc, img);
        for (const auto& u : img.vertices()) {
            prov.origins[u].insert(v);
            first_center.emplace(u, v);
        }
    }
    if (!acc.closed())
        throw EngineError("evaluation left a dangling edge endpoint unresolved");
    return {std::move(acc), std::move(prov)};
}

}  // namespace detail

inline EvalResult evaluate(const DynamicsHandle& f, const Graph& g) {
    std::vector<VertexName> order(g.vertices().begin(), g.vertices().end());
    return detail::evaluate_in_order(f, g, order);
}

/// Trajectory [G, F(G), ..., F^steps(G)].
inline std::vector<Graph> run(const DynamicsHandle& f, const Graph& g, int steps) {
    if (steps < 0) throw BadParameters("run: negative step count");
    std::vector<Graph> out{g};
    for (int k = 0; k < steps; k++) {
        try {
            out.push_back(evaluate(f, out.back()).graph);
        } catch (const Error& e) {
            throw EngineError("step " + std::to_string(k + 1) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

/// Local rule inducing F2 after F1, of radius 2*r1*r2 + r1 + r2. The rule is
/// a closure over f1 and f2 rather than a tabulation: on a disk N it unions
/// the f1 images over all of N, then applies f2 around each vertex of the
/// center's f1 image.
inline LocalRule compose(const LocalRule& f1, const LocalRule& f2) {
    if (!f2.in_alpha.accepts(f1.out_alpha))
        throw AlphabetMismatch("compose: second rule does not accept the first rule's output");
    LocalRule g;
    g.name = f2.name + "*" + f1.name;
    g.radius = 2 * f1.radius * f2.radius + f1.radius + f2.radius;
    g.bound = f1.bound * f2.bound;
    g.suffix_depth = f1.suffix_depth + f2.suffix_depth;
    g.in_alpha = f1.in_alpha;
    g.out_alpha = f2.out_alpha;
    LocalRule r1 = f1, r2 = f2;
    g.apply = [r1, r2](const Disk& d) {
        const Graph& n = d.graph();
        const VertexName& center = d.center();
        Graph inner(r1.out_alpha);
        for (const auto& u : n.vertices())
            inner = union_graphs(inner, r1.apply(disk(n, u, r1.radius)));
        Graph center_img = r1.apply(disk(n, center, r1.radius));
        Graph out(r2.out_alpha);
        for (const auto& v : center_img.vertices())
            out = union_graphs(out, r2.apply(disk(inner, v, r2.radius)));
        return out;
    };
    g.sample_input = f1.sample_input;
    return g;
}

/// Re-declare a rule at a smaller radius. Only sound when the rule's output
/// genuinely depends on that smaller neighbourhood; the caller asserts it.
inline LocalRule restrict_radius(LocalRule rule, int radius) {
    if (radius < 0 || radius > rule.radius)
        throw BadParameters("restrict_radius: radius outside 0.." + std::to_string(rule.radius));
    rule.radius = radius;
    return rule;
}

// ---------------------------------------------------------------------------
// Radius-1 lift
// ---------------------------------------------------------------------------

/// A radius-2^l dynamics repackaged as a radius-1 dynamics over lifted
/// states: each vertex carries a step counter, the first l steps double the
/// visible neighbourhood by adding *-edges, and step l+1 applies the
/// original rule to the reconstructed disk.
struct LiftedDynamics {
    DynamicsHandle lifted;
    int levels = 0;  // l, so that F'^(l+1) = F
    std::function<Graph(const Graph&)> encode;
    std::function<Graph(const Graph&)> decode;
};

namespace detail {

constexpr const char* kLiftBlank = "_";
constexpr const char* kStarEdge = "*";

inline Symbol lift_state(const std::optional<Symbol>& s, int counter) {
    return (s ? *s : Symbol(kLiftBlank)) + "@" + std::to_string(counter);
}

inline std::pair<std::optional<Symbol>, int> unlift_state(const Symbol& s) {
    auto at = s.rfind('@');
    if (at == std::string::npos) throw MalformedDisk("lifted state '" + s + "' has no counter");
    Symbol orig = s.substr(0, at);
    int counter = std::stoi(s.substr(at + 1));
    if (orig == kLiftBlank) return {std::nullopt, counter};
    return {orig, counter};
}

inline Alphabets lift_alphabets(const Alphabets& alpha, int levels, int lifted_pi) {
    Alphabets out;
    out.pi = lifted_pi;
    out.delta = alpha.delta;
    out.delta.insert(kStarEdge);
    for (int c = 0; c <= levels; c++) {
        out.sigma.insert(lift_state(std::nullopt, c));
        for (const auto& s : alpha.sigma) out.sigma.insert(lift_state(s, c));
    }
    return out;
}

/// Port budget used through step i of the lift: pi^(2^i). Each *-edge port
/// packs (first-hop port, rank of second hop) over the previous budget, so
/// the budgets square at every step and land exactly on pi^r.
inline int64_t lift_port_budget(int pi, int step) {
    int64_t c = pi;
    for (int i = 0; i < step; i++) {
        if (c > 4096) throw PortBudgetExceeded("lifted degree above the 4096 port limit");
        c = c * c;
    }
    return c;
}

struct HalfEdge {
    Port mine;    // port on the vertex this half-edge is viewed from
    Port other;   // far endpoint
    Symbol state;
};

inline std::vector<HalfEdge> incident_halves(const Graph& g, const VertexName& v) {
    std::vector<HalfEdge> out;
    for (const auto& [key, s] : g.edges_at_vertex(v)) {
        if (key.first.owner == v) out.push_back({key.first, key.second, s});
        if (key.second.owner == v) out.push_back({key.second, key.first, s});
    }
    return out;
}

/// Packed port for the two-hop path leaving through `first_exit`, continuing
/// from the middle vertex through `second_exit`, having entered the middle
/// vertex at `middle_entry`. Ranges over (budget, budget^2].
inline int64_t lift_packed_port(int64_t budget, int64_t first_exit, int64_t middle_entry,
                                int64_t second_exit) {
    int64_t rank = second_exit - 1 - (second_exit > middle_entry ? 1 : 0);
    return budget + (first_exit - 1) * (budget - 1) + rank + 1;
}

}  // namespace detail

inline LiftedDynamics lift_radius_one(const DynamicsHandle& f) {
    int r = f.rule.radius;
    if (r < 1 || (r & (r - 1)) != 0)
        throw RadiusNotPowerOfTwo("lift requires radius a power of two, got " + std::to_string(r));
    int levels = 0;
    while ((1 << levels) < r) levels++;
    const Alphabets base = f.rule.in_alpha;
    if (f.rule.out_alpha.pi != base.pi)
        throw BadParameters("lift requires a degree-preserving dynamics");
    int64_t budget = detail::lift_port_budget(base.pi, levels);
    if (budget > 4096) throw PortBudgetExceeded("lifted degree above the 4096 port limit");
    Alphabets lifted_alpha = detail::lift_alphabets(base, levels, static_cast<int>(budget));
    // outputs re-enter the loop at counter zero, so out sigma uses the same set
    for (const auto& s : f.rule.out_alpha.sigma) lifted_alpha.sigma.insert(detail::lift_state(s, 0));

    LocalRule inner = f.rule;
    LocalRule lifted;
    lifted.name = f.rule.name + "-lifted";
    lifted.radius = 1;
    lifted.bound = std::max(1, f.rule.bound);
    lifted.suffix_depth = f.rule.suffix_depth;
    lifted.in_alpha = lifted.out_alpha = lifted_alpha;
    lifted.apply = [inner, lifted_alpha, levels, pi = base.pi](const Disk& d) {
        const Graph& g = d.graph();
        const VertexName& c = d.center();
        auto cs = g.state(c);
        if (!cs) throw MalformedDisk("lifted center " + c.str() + " has no counter state");
        auto [orig_state, counter] = detail::unlift_state(*cs);
        if (counter < levels) {
            // visibility-doubling step: keep everything, add *-edges to the
            // current distance-2 vertices
            int64_t budget = detail::lift_port_budget(pi, counter);
            Graph out(lifted_alpha);
            out.add_vertex(c, detail::lift_state(orig_state, counter + 1));
            for (const auto& [key, s] : g.edges_at_vertex(c)) out.add_edge(key.first, key.second, s);
            std::set<VertexName> adjacent;
            for (const auto& he : detail::incident_halves(g, c)) adjacent.insert(he.other.owner);
            for (const auto& e1 : detail::incident_halves(g, c)) {
                const VertexName& mid = e1.other.owner;
                for (const auto& e2 : detail::incident_halves(g, mid)) {
                    const VertexName& far = e2.other.owner;
                    if (far == c || adjacent.count(far)) continue;
                    int64_t my_port = detail::lift_packed_port(budget, e1.mine.index,
                                                               e1.other.index, e2.mine.index);
                    int64_t far_port = detail::lift_packed_port(budget, e2.other.index,
                                                                e2.mine.index, e1.other.index);
                    Port a{c, static_cast<int>(my_port)};
                    Port b{far, static_cast<int>(far_port)};
                    if (far < c) std::swap(a, b);
                    out.add_edge(a, b, detail::kStarEdge);
                }
            }
            return out;
        }
        // application step: reconstruct the original radius-r disk from the
        // non-* edges and the unlifted states, then run the inner rule
        Graph orig(inner.in_alpha);
        for (const auto& v : g.vertices()) orig.add_vertex(v);
        for (const auto& [v, s] : g.sigma()) {
            auto [os, cnt] = detail::unlift_state(s);
            if (cnt != levels)
                throw MalformedDisk("vertex " + v.str() + " is out of phase at counter " +
                                    std::to_string(cnt));
            if (os) orig.set_state(v, *os);
        }
        for (const auto& [key, s] : g.delta())
            if (s != detail::kStarEdge) orig.add_edge(key.first, key.second, s);
        Graph result = inner.apply(disk(orig, c, inner.radius));
        Graph out(lifted_alpha);
        for (const auto& v : result.vertices())
            out.add_vertex(v, detail::lift_state(result.state(v), 0));
        for (const auto& [key, s] : result.delta()) out.add_edge(key.first, key.second, s);
        return out;
    };
    lifted.sample_input = nullptr;

    LiftedDynamics out;
    out.lifted = dynamics(lifted);
    out.levels = levels;
    out.encode = [lifted_alpha](const Graph& g) {
        Graph enc(lifted_alpha);
        for (const auto& v : g.vertices()) enc.add_vertex(v, detail::lift_state(g.state(v), 0));
        for (const auto& [key, s] : g.delta()) enc.add_edge(key.first, key.second, s);
        return enc;
    };
    out.decode = [base_out = f.rule.out_alpha](const Graph& g) {
        Graph dec(base_out);
        for (const auto& v : g.vertices()) {
            dec.add_vertex(v);
            if (auto s = g.state(v)) {
                auto [os, cnt] = detail::unlift_state(*s);
                if (os) dec.set_state(v, *os);
            }
        }
        for (const auto& [key, s] : g.delta())
            if (s != detail::kStarEdge) dec.add_edge(key.first, key.second, s);
        return dec;
    };
    return out;
}

}  // namespace cgd
