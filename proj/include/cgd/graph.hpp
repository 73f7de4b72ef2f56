#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cgd/errors.hpp"
#include "cgd/names.hpp"

namespace cgd {

using Symbol = std::string;

struct Port {
    VertexName owner;
    int index = 1;  // 1..pi

    Port() = default;
    Port(VertexName owner, int index) : owner(std::move(owner)), index(index) {}

    auto operator<=>(const Port&) const = default;

    std::string str() const { return owner.str() + ":" + std::to_string(index); }
};

using EdgeKey = std::pair<Port, Port>;

inline std::string edge_str(const EdgeKey& e) {
    return e.first.str() + " -> " + e.second.str();
}

struct Alphabets {
    std::set<Symbol> sigma;
    std::set<Symbol> delta;
    int pi = 1;

    bool operator==(const Alphabets&) const = default;

    /// Whether `other` graphs can be fed where `this` is expected.
    bool accepts(const Alphabets& other) const {
        return pi == other.pi &&
               std::includes(sigma.begin(), sigma.end(), other.sigma.begin(), other.sigma.end()) &&
               std::includes(delta.begin(), delta.end(), other.delta.begin(), other.delta.end());
    }
};

/// A conflict found while checking two graphs for consistency. The first
/// conflict under the total name order, so error output is deterministic.
struct ConsistencyWitness {
    enum Kind { vertex_state, port_clash } kind = vertex_state;
    VertexName vertex;      // vertex_state
    Port port;              // port_clash
    std::string left, right;

    std::string describe() const {
        if (kind == vertex_state)
            return "vertex " + vertex.str() + " has states " + left + " vs " + right;
        return "port " + port.str() + " carries " + left + " vs " + right;
    }
};

/// Port graph with a partial vertex-state map and a partial port-edge map.
/// Each port appears at most once across the edge map (port monogamy). Edge
/// endpoints may dangle outside the vertex set; such graphs arise as local
/// rule images whose stubs are glued by the union. `closed()` tells whether
/// every endpoint is a vertex.
class Graph {
public:
    Graph() = default;
    explicit Graph(Alphabets alpha) : alpha_(std::move(alpha)) {}

    const Alphabets& alphabets() const { return alpha_; }
    Alphabets& alphabets() { return alpha_; }
    int pi() const { return alpha_.pi; }

    const std::set<VertexName>& vertices() const { return vertices_; }
    const std::map<VertexName, Symbol>& sigma() const { return sigma_; }
    const std::map<EdgeKey, Symbol>& delta() const { return delta_; }

    bool has_vertex(const VertexName& v) const { return vertices_.count(v) > 0; }

    std::optional<Symbol> state(const VertexName& v) const {
        auto it = sigma_.find(v);
        if (it == sigma_.end()) return std::nullopt;
        return it->second;
    }

    void add_vertex(const VertexName& v) { vertices_.insert(v); }

    void add_vertex(const VertexName& v, const Symbol& s) {
        vertices_.insert(v);
        set_state(v, s);
    }

    void set_state(const VertexName& v, const Symbol& s) {
        if (!alpha_.sigma.count(s))
            throw InvariantViolation("state '" + s + "' not in sigma alphabet");
        sigma_[v] = s;
    }

    void clear_state(const VertexName& v) { sigma_.erase(v); }

    void add_edge(const Port& a, const Port& b, const Symbol& s) {
        if (a.index < 1 || a.index > alpha_.pi || b.index < 1 || b.index > alpha_.pi)
            throw InvariantViolation("port index out of range 1.." + std::to_string(alpha_.pi) +
                                     " on edge " + edge_str({a, b}));
        if (!alpha_.delta.count(s))
            throw InvariantViolation("edge state '" + s + "' not in delta alphabet");
        if (a == b) throw InvariantViolation("edge endpoints share a port: " + a.str());
        EdgeKey key{a, b};
        auto existing = delta_.find(key);
        if (existing != delta_.end()) {
            if (existing->second != s)
                throw InvariantViolation("edge " + edge_str(key) + " added twice with different states");
            return;  // identical re-insertion is a no-op
        }
        for (const Port& p : {a, b}) {
            auto it = port_index_.find(p);
            if (it != port_index_.end())
                throw InvariantViolation("port monogamy violated at " + p.str() +
                                         " (already used by " + edge_str(it->second) + ")");
        }
        delta_.emplace(key, s);
        port_index_.emplace(a, key);
        port_index_.emplace(b, key);
    }

    void remove_edge(const EdgeKey& key) {
        auto it = delta_.find(key);
        if (it == delta_.end()) return;
        port_index_.erase(key.first);
        port_index_.erase(key.second);
        delta_.erase(it);
    }

    /// The unique edge using this port, if any.
    std::optional<std::pair<EdgeKey, Symbol>> edge_at(const Port& p) const {
        auto it = port_index_.find(p);
        if (it == port_index_.end()) return std::nullopt;
        return std::pair{it->second, delta_.at(it->second)};
    }

    bool port_free(const Port& p) const { return !port_index_.count(p); }

    std::vector<std::pair<EdgeKey, Symbol>> edges_at_vertex(const VertexName& v) const {
        std::vector<std::pair<EdgeKey, Symbol>> out;
        auto lo = port_index_.lower_bound(Port{v, 0});
        for (auto it = lo; it != port_index_.end() && it->first.owner == v; ++it) {
            const EdgeKey& key = it->second;
            // report each edge once even if both endpoints sit on v
            if (key.first.owner == v && key.second.owner == v && !(it->first == key.first)) continue;
            out.push_back({key, delta_.at(key)});
        }
        return out;
    }

    bool empty() const { return vertices_.empty() && delta_.empty(); }

    /// True when every edge endpoint is a vertex.
    bool closed() const {
        for (const auto& [key, s] : delta_)
            if (!has_vertex(key.first.owner) || !has_vertex(key.second.owner)) return false;
        return true;
    }

    /// Structural validity: states in alphabets, sigma domain inside the
    /// vertex set, every edge touching the vertex set on at least one side.
    /// With `require_closed`, both sides.
    void validate(bool require_closed) const {
        for (const auto& [v, s] : sigma_) {
            if (!has_vertex(v))
                throw InvariantViolation("state on non-vertex " + v.str());
            if (!alpha_.sigma.count(s))
                throw InvariantViolation("state '" + s + "' not in sigma alphabet");
        }
        for (const auto& [key, s] : delta_) {
            bool a = has_vertex(key.first.owner), b = has_vertex(key.second.owner);
            if (!a && !b)
                throw InvariantViolation("edge " + edge_str(key) + " touches no vertex");
            if (require_closed && (!a || !b))
                throw InvariantViolation("edge " + edge_str(key) + " has a dangling endpoint");
        }
    }

    /// Exact equality: names matter. Ambient alphabet sets are metadata and
    /// do not take part, but the degree does.
    bool operator==(const Graph& other) const {
        return alpha_.pi == other.alpha_.pi && vertices_ == other.vertices_ &&
               sigma_ == other.sigma_ && delta_ == other.delta_;
    }

    /// Every name occurring anywhere in the graph (vertices and edge owners).
    std::set<VertexName> all_names() const {
        std::set<VertexName> names = vertices_;
        for (const auto& [key, s] : delta_) {
            names.insert(key.first.owner);
            names.insert(key.second.owner);
        }
        return names;
    }

    /// Canonical single-line rendering (sorted records); used for table keys
    /// and debugging.
    std::string structure_key() const {
        std::ostringstream os;
        os << "pi=" << alpha_.pi << ";";
        for (const auto& v : vertices_) {
            os << "v " << v.str();
            if (auto s = state(v)) os << " " << *s;
            os << ";";
        }
        for (const auto& [key, s] : delta_) os << "e " << edge_str(key) << " " << s << ";";
        return os.str();
    }

private:
    Alphabets alpha_;
    std::set<VertexName> vertices_;
    std::map<VertexName, Symbol> sigma_;
    std::map<EdgeKey, Symbol> delta_;
    std::map<Port, EdgeKey> port_index_;  // derived: monogamy + partner lookup
};

struct PointedGraph {
    Graph graph;
    std::set<VertexName> pointers;

    bool operator==(const PointedGraph&) const = default;

    void validate(bool require_closed) const {
        graph.validate(require_closed);
        for (const auto& p : pointers)
            if (!graph.has_vertex(p))
                throw InvariantViolation("pointer " + p.str() + " is not a vertex");
    }
};

/// Envelope of a pointer set: the induced subgraph around its radius-r
/// neighbourhood, remembering center and radius.
struct Disk {
    PointedGraph pointed;
    int radius = 0;

    bool operator==(const Disk&) const = default;

    const Graph& graph() const { return pointed.graph; }

    /// Disks handed to local rules are centered on one vertex.
    const VertexName& center() const {
        if (pointed.pointers.size() != 1)
            throw MalformedDisk("expected a single-center disk, got " +
                                std::to_string(pointed.pointers.size()) + " pointers");
        return *pointed.pointers.begin();
    }
};

// ---------------------------------------------------------------------------
// Structural operations
// ---------------------------------------------------------------------------

/// Vertices reachable from A by an undirected path of length <= r. A vertex
/// counts as its own neighbour (k = 0), so envelopes contain their centers.
inline std::set<VertexName> neighbors(const Graph& g, const std::set<VertexName>& a, int r) {
    if (r < 0) throw BadParameters("neighbors: negative radius");
    std::map<VertexName, std::set<VertexName>> adj;
    for (const auto& [key, s] : g.delta()) {
        const VertexName& u = key.first.owner;
        const VertexName& v = key.second.owner;
        if (g.has_vertex(u) && g.has_vertex(v)) {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    std::set<VertexName> seen;
    std::deque<std::pair<VertexName, int>> queue;
    for (const auto& v : a)
        if (g.has_vertex(v)) {
            seen.insert(v);
            queue.push_back({v, 0});
        }
    while (!queue.empty()) {
        auto [v, d] = queue.front();
        queue.pop_front();
        if (d == r) continue;
        auto it = adj.find(v);
        if (it == adj.end()) continue;
        for (const auto& w : it->second)
            if (seen.insert(w).second) queue.push_back({w, d + 1});
    }
    return seen;
}

/// Induced subgraph around U: vertices within distance 1 of U' = U ∩ V(G),
/// states kept only on U', edges kept when touching U'.
inline Graph induced_subgraph(const Graph& g, const std::set<VertexName>& u) {
    std::set<VertexName> uprime;
    for (const auto& v : u)
        if (g.has_vertex(v)) uprime.insert(v);
    Graph out(g.alphabets());
    for (const auto& v : neighbors(g, uprime, 1)) out.add_vertex(v);
    for (const auto& v : uprime)
        if (auto s = g.state(v)) out.set_state(v, *s);
    for (const auto& [key, s] : g.delta()) {
        if (uprime.count(key.first.owner) || uprime.count(key.second.owner))
            out.add_edge(key.first, key.second, s);
    }
    return out;
}

inline Disk disk(const Graph& g, const std::set<VertexName>& a, int r) {
    if (r < 0) throw BadParameters("disk: negative radius");
    std::set<VertexName> nr = neighbors(g, a, r);
    std::set<VertexName> pointers;
    for (const auto& v : a)
        if (g.has_vertex(v)) pointers.insert(v);
    return Disk{PointedGraph{induced_subgraph(g, nr), std::move(pointers)}, r};
}

inline Disk disk(const Graph& g, const VertexName& v, int r) {
    return disk(g, std::set<VertexName>{v}, r);
}

/// First conflict between two graphs, or nothing if they are consistent:
/// states agree on common vertices where both defined, and no port shared
/// between the two edge maps connects to two different partners or carries
/// two different states.
inline std::optional<ConsistencyWitness> consistency_conflict(const Graph& g, const Graph& h) {
    if (g.pi() != h.pi())
        throw AlphabetMismatch("consistency check across different degrees");
    for (const auto& [v, s] : g.sigma()) {
        auto t = h.state(v);
        if (t && *t != s)
            return ConsistencyWitness{ConsistencyWitness::vertex_state, v, Port{}, s, *t};
    }
    // port-level delta agreement, first conflict in port order
    std::map<Port, std::pair<EdgeKey, Symbol>> ports_g;
    for (const auto& [key, s] : g.delta()) {
        ports_g.emplace(key.first, std::pair{key, s});
        ports_g.emplace(key.second, std::pair{key, s});
    }
    std::map<Port, std::pair<EdgeKey, Symbol>> ports_h;
    for (const auto& [key, s] : h.delta()) {
        ports_h.emplace(key.first, std::pair{key, s});
        ports_h.emplace(key.second, std::pair{key, s});
    }
    for (const auto& [p, eg] : ports_g) {
        auto it = ports_h.find(p);
        if (it == ports_h.end()) continue;
        const auto& eh = it->second;
        if (eg.first != eh.first || eg.second != eh.second)
            return ConsistencyWitness{ConsistencyWitness::port_clash, VertexName{}, p,
                                      edge_str(eg.first) + " " + eg.second,
                                      edge_str(eh.first) + " " + eh.second};
    }
    return std::nullopt;
}

inline bool consistent(const Graph& g, const Graph& h) {
    return !consistency_conflict(g, h).has_value();
}

/// Same conflicts as consistency_conflict, but probing `small` against
/// `big`'s indexes so the cost scales with the small operand only. Used by
/// the evaluator, whose accumulator grows large.
inline std::optional<ConsistencyWitness> consistency_conflict_against(const Graph& big,
                                                                      const Graph& small) {
    if (big.pi() != small.pi())
        throw AlphabetMismatch("consistency check across different degrees");
    for (const auto& [v, s] : small.sigma()) {
        auto t = big.state(v);
        if (t && *t != s)
            return ConsistencyWitness{ConsistencyWitness::vertex_state, v, Port{}, *t, s};
    }
    for (const auto& [key, s] : small.delta())
        for (const Port& p : {key.first, key.second})
            if (auto e = big.edge_at(p))
                if (e->first != key || e->second != s)
                    return ConsistencyWitness{ConsistencyWitness::port_clash, VertexName{}, p,
                                              edge_str(e->first) + " " + e->second,
                                              edge_str(key) + " " + s};
    return std::nullopt;
}

/// In-place union: merge `small` into `big`. The caller has already ruled
/// out conflicts with consistency_conflict_against.
inline void merge_into(Graph& big, const Graph& small) {
    for (const auto& s : small.alphabets().sigma) big.alphabets().sigma.insert(s);
    for (const auto& s : small.alphabets().delta) big.alphabets().delta.insert(s);
    for (const auto& v : small.vertices()) big.add_vertex(v);
    for (const auto& [v, s] : small.sigma()) big.set_state(v, s);
    for (const auto& [key, s] : small.delta()) big.add_edge(key.first, key.second, s);
}

/// Union of consistent graphs: vertex set, sigma, delta are unions of
/// domains, coinciding with the operands on their domains.
inline Graph union_graphs(const Graph& g, const Graph& h) {
    if (auto w = consistency_conflict(g, h)) throw InconsistentUnion(w->describe());
    Graph out(g.alphabets());
    for (const auto& s : h.alphabets().sigma) out.alphabets().sigma.insert(s);
    for (const auto& s : h.alphabets().delta) out.alphabets().delta.insert(s);
    for (const auto& v : g.vertices()) out.add_vertex(v);
    for (const auto& v : h.vertices()) out.add_vertex(v);
    for (const auto& [v, s] : g.sigma()) out.set_state(v, s);
    for (const auto& [v, s] : h.sigma()) out.set_state(v, s);
    for (const auto& [key, s] : g.delta()) out.add_edge(key.first, key.second, s);
    for (const auto& [key, s] : h.delta()) out.add_edge(key.first, key.second, s);
    return out;
}

/// Image of a graph under a renaming. The renaming must be injective over
/// all names occurring in the graph.
inline Graph rename(const Renaming& r, const Graph& g) {
    std::set<VertexName> names = g.all_names();
    if (!r.injective_over(names))
        throw NonInjectiveRenaming("renaming not injective over the names in use");
    Graph out(g.alphabets());
    for (const auto& v : g.vertices()) out.add_vertex(r(v));
    for (const auto& [v, s] : g.sigma()) out.set_state(r(v), s);
    for (const auto& [key, s] : g.delta())
        out.add_edge(Port{r(key.first.owner), key.first.index},
                     Port{r(key.second.owner), key.second.index}, s);
    return out;
}

inline PointedGraph rename(const Renaming& r, const PointedGraph& p) {
    PointedGraph out{rename(r, p.graph), {}};
    for (const auto& v : p.pointers) out.pointers.insert(r(v));
    return out;
}

inline Disk rename(const Renaming& r, const Disk& d) {
    return Disk{rename(r, d.pointed), d.radius};
}

// ---------------------------------------------------------------------------
// Small-graph isomorphism
// ---------------------------------------------------------------------------

namespace detail {

struct IsoState {
    const Graph* g;
    const Graph* h;
    std::map<VertexName, VertexName> fwd;
    std::map<VertexName, VertexName> bwd;

    bool assign(const VertexName& a, const VertexName& b);
    bool extend();
};

inline bool compatible(const Graph& g, const Graph& h, const VertexName& a, const VertexName& b) {
    if (g.state(a) != h.state(b)) return false;
    for (int i = 1; i <= g.pi(); i++) {
        bool ga = g.edge_at(Port{a, i}).has_value();
        bool hb = h.edge_at(Port{b, i}).has_value();
        if (ga != hb) return false;
    }
    return true;
}

inline bool IsoState::assign(const VertexName& a, const VertexName& b) {
    auto itf = fwd.find(a);
    if (itf != fwd.end()) return itf->second == b;
    auto itb = bwd.find(b);
    if (itb != bwd.end()) return false;
    if (!compatible(*g, *h, a, b)) return false;
    fwd[a] = b;
    bwd[b] = a;
    // propagate through ports: monogamy makes every neighbour forced
    for (int i = 1; i <= g->pi(); i++) {
        auto eg = g->edge_at(Port{a, i});
        auto eh = h->edge_at(Port{b, i});
        if (eg.has_value() != eh.has_value()) return false;
        if (!eg) continue;
        if (eg->second != eh->second) return false;
        bool a_is_first = eg->first.first == Port{a, i};
        bool b_is_first = eh->first.first == Port{b, i};
        if (a_is_first != b_is_first) return false;  // orientation preserved
        const Port& pa = a_is_first ? eg->first.second : eg->first.first;
        const Port& pb = b_is_first ? eh->first.second : eh->first.first;
        if (pa.index != pb.index) return false;
        if (!assign(pa.owner, pb.owner)) return false;
    }
    return true;
}

inline bool IsoState::extend() {
    // next unmapped vertex of g, in name order
    const VertexName* next = nullptr;
    for (const auto& v : g->vertices())
        if (!fwd.count(v)) {
            next = &v;
            break;
        }
    if (!next) return true;
    for (const auto& w : h->vertices()) {
        if (bwd.count(w)) continue;
        IsoState trial = *this;
        if (trial.assign(*next, w) && trial.extend()) {
            *this = trial;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Brute-force name-bijection search preserving states, ports and edge
/// orientation exactly. Guarded: intended for desk-scale graphs.
inline bool isomorphic(const Graph& g, const Graph& h, size_t guard = 64) {
    if (g.vertices().size() > guard || h.vertices().size() > guard)
        throw SizeGuardExceeded("isomorphism guard of " + std::to_string(guard) + " vertices");
    if (g.pi() != h.pi()) return false;
    if (g.vertices().size() != h.vertices().size()) return false;
    if (g.sigma().size() != h.sigma().size()) return false;
    if (g.delta().size() != h.delta().size()) return false;
    if (!g.closed() || !h.closed())
        throw BadParameters("isomorphism check requires closed graphs");
    detail::IsoState state{&g, &h, {}, {}};
    return state.extend();
}

/// Canonical key modulo isomorphism: the minimal structure key over all
/// assignments of standard names. Factorial in the vertex count; guarded.
inline std::string canonical_key(const Graph& g, size_t guard = 8) {
    size_t n = g.vertices().size();
    if (n > guard) throw SizeGuardExceeded("canonicalization guard of " + std::to_string(guard));
    std::vector<VertexName> names(g.vertices().begin(), g.vertices().end());
    std::vector<int> perm(n);
    for (size_t i = 0; i < n; i++) perm[i] = static_cast<int>(i);
    std::string best;
    do {
        Renaming r;
        for (size_t i = 0; i < n; i++) r.set(names[i], VertexName("c", {perm[i]}));
        std::string key = rename(r, g).structure_key();
        if (best.empty() || key < best) best = key;
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best.empty()) best = g.structure_key();  // empty graph
    return best;
}

}  // namespace cgd
