#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cgd/engine.hpp"
#include "cgd/graph.hpp"
#include "cgd/rules.hpp"

namespace cgd {

// ---------------------------------------------------------------------------
// Graph spaces
// ---------------------------------------------------------------------------

/// Finite enumerable stand-in for the set of all graphs: every graph over a
/// fixed name pool, up to the declared bounds, visited exactly once.
struct SpaceBounds {
    enum class Family { general, line, grid_patch };
    Family family = Family::general;
    int max_vertices = 3;
    Alphabets alpha{{"0", "1"}, {"-"}, 2};
    size_t guard = 500000;  // enumeration size cap
};

class GraphSpace {
public:
    explicit GraphSpace(SpaceBounds bounds) : bounds_(std::move(bounds)) {}

    const SpaceBounds& bounds() const { return bounds_; }

    /// Visit every graph; the visitor returns false to stop early.
    /// Returns false if stopped.
    bool for_each(const std::function<bool(const Graph&)>& visit) const {
        size_t count = 0;
        switch (bounds_.family) {
            case SpaceBounds::Family::general: return enumerate_general(visit, count);
            case SpaceBounds::Family::line: return enumerate_lines(visit, count);
            case SpaceBounds::Family::grid_patch: return enumerate_grid_patches(visit, count);
        }
        return true;
    }

    size_t size() const {
        size_t n = 0;
        for_each([&n](const Graph&) {
            n++;
            return true;
        });
        return n;
    }

private:
    SpaceBounds bounds_;

    void bump(size_t& count) const {
        if (++count > bounds_.guard)
            throw SpaceTooLarge("enumeration exceeded " + std::to_string(bounds_.guard) +
                                " graphs");
    }

    static VertexName pool_name(int i) { return VertexName("v" + std::to_string(i + 1)); }

    bool enumerate_general(const std::function<bool(const Graph&)>& visit, size_t& count) const {
        int n = bounds_.max_vertices;
        for (int mask = 0; mask < (1 << n); mask++) {
            std::vector<VertexName> verts;
            for (int i = 0; i < n; i++)
                if (mask & (1 << i)) verts.push_back(pool_name(i));
            Graph g(bounds_.alpha);
            for (const auto& v : verts) g.add_vertex(v);
            if (!enumerate_sigma(g, verts, 0, visit, count)) return false;
        }
        return true;
    }

    bool enumerate_sigma(Graph& g, const std::vector<VertexName>& verts, size_t i,
                         const std::function<bool(const Graph&)>& visit, size_t& count) const {
        if (i == verts.size()) {
            std::vector<Port> ports;
            for (const auto& v : verts)
                for (int p = 1; p <= bounds_.alpha.pi; p++) ports.push_back(Port{v, p});
            return enumerate_delta(g, ports, 0, visit, count);
        }
        g.clear_state(verts[i]);
        if (!enumerate_sigma(g, verts, i + 1, visit, count)) return false;
        for (const auto& s : bounds_.alpha.sigma) {
            g.set_state(verts[i], s);
            if (!enumerate_sigma(g, verts, i + 1, visit, count)) return false;
        }
        g.clear_state(verts[i]);
        return true;
    }

    bool enumerate_delta(Graph& g, const std::vector<Port>& ports, size_t i,
                         const std::function<bool(const Graph&)>& visit, size_t& count) const {
        while (i < ports.size() && !g.port_free(ports[i])) i++;
        if (i == ports.size()) {
            bump(count);
            return visit(g);
        }
        // ports[i] stays unused
        if (!enumerate_delta(g, ports, i + 1, visit, count)) return false;
        // or pairs with any later free port, in both orientations and states
        for (size_t j = i + 1; j < ports.size(); j++) {
            if (!g.port_free(ports[j])) continue;
            for (const auto& s : bounds_.alpha.delta) {
                for (bool flip : {false, true}) {
                    const Port& a = flip ? ports[j] : ports[i];
                    const Port& b = flip ? ports[i] : ports[j];
                    g.add_edge(a, b, s);
                    bool keep = enumerate_delta(g, ports, i + 1, visit, count);
                    g.remove_edge({a, b});
                    if (!keep) return false;
                }
            }
        }
        return true;
    }

    bool enumerate_lines(const std::function<bool(const Graph&)>& visit, size_t& count) const {
        std::vector<Symbol> syms(bounds_.alpha.sigma.begin(), bounds_.alpha.sigma.end());
        Symbol edge = *bounds_.alpha.delta.begin();
        for (int len = 1; len <= bounds_.max_vertices; len++) {
            std::vector<size_t> digits(len, 0);
            for (;;) {
                Graph g(bounds_.alpha);
                for (int i = 0; i < len; i++) {
                    g.add_vertex(pool_name(i), syms[digits[i]]);
                    if (i > 0) g.add_edge(Port{pool_name(i - 1), 2}, Port{pool_name(i), 1}, edge);
                }
                bump(count);
                if (!visit(g)) return false;
                int carry = len - 1;
                while (carry >= 0 && ++digits[carry] == syms.size()) digits[carry--] = 0;
                if (carry < 0) break;
            }
        }
        return true;
    }

    bool enumerate_grid_patches(const std::function<bool(const Graph&)>& visit,
                                size_t& count) const {
        std::vector<Symbol> syms(bounds_.alpha.sigma.begin(), bounds_.alpha.sigma.end());
        Symbol edge = *bounds_.alpha.delta.begin();
        int max_side = 2;
        for (int side = 1; side <= max_side; side++) {
            int cells = side * side;
            if (cells > bounds_.max_vertices + 1) break;
            std::vector<size_t> digits(cells, 0);
            for (;;) {
                Graph g(bounds_.alpha);
                auto at = [side](int r, int c) { return pool_name(r * side + c); };
                for (int r = 0; r < side; r++)
                    for (int c = 0; c < side; c++) {
                        g.add_vertex(at(r, c));
                        if (!syms.empty()) g.set_state(at(r, c), syms[digits[r * side + c]]);
                        if (c > 0) g.add_edge(Port{at(r, c - 1), 1}, Port{at(r, c), 3}, edge);
                        if (r > 0) g.add_edge(Port{at(r - 1, c), 2}, Port{at(r, c), 4}, edge);
                    }
                bump(count);
                if (!visit(g)) return false;
                if (syms.empty()) break;
                int carry = cells - 1;
                while (carry >= 0 && ++digits[carry] == syms.size()) digits[carry--] = 0;
                if (carry < 0) break;
            }
        }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct VerificationReport {
    enum class Verdict { pass, fail, inconclusive };
    std::string property;
    Verdict verdict = Verdict::inconclusive;
    long samples = 0;
    uint64_t seed = 0;
    std::string detail;
    /// Replayable counterexample: label -> serialized graph, filled on fail.
    std::vector<std::pair<std::string, std::string>> artifacts;

    bool passed() const { return verdict == Verdict::pass; }

    std::string to_line() const {
        std::ostringstream os;
        os << (verdict == Verdict::pass ? "PASS" : verdict == Verdict::fail ? "FAIL" : "INCONCLUSIVE")
           << " " << property << " samples=" << samples << " seed=" << seed;
        if (!detail.empty()) os << " :: " << detail;
        return os.str();
    }
};

namespace detail {

inline VerificationReport make_pass(std::string property, long samples, uint64_t seed,
                                    std::string detail = "") {
    return {std::move(property), VerificationReport::Verdict::pass, samples, seed,
            std::move(detail), {}};
}

inline VerificationReport make_fail(std::string property, long samples, uint64_t seed,
                                    std::string detail,
                                    std::vector<std::pair<std::string, std::string>> artifacts) {
    return {std::move(property), VerificationReport::Verdict::fail, samples, seed,
            std::move(detail), std::move(artifacts)};
}

inline std::pair<std::string, std::string> graph_artifact(const std::string& label,
                                                          const Graph& g) {
    return {label, g.structure_key()};
}

inline Renaming random_fresh_renaming(const std::set<VertexName>& names, std::mt19937_64& rng) {
    Renaming r;
    std::set<std::string> used;
    for (const auto& n : names) {
        std::string base;
        do {
            base = "r" + std::to_string(rng() % 1000);
        } while (!used.insert(base).second);
        r.set(n, VertexName(base));
    }
    return r;
}

inline Graph prefix_names(const Graph& g, const std::string& prefix) {
    Renaming r;
    for (const auto& n : g.all_names()) r.set(n, VertexName(prefix + n.base, n.path));
    return rename(r, g);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dynamics axioms: conjugacy and freshness
// ---------------------------------------------------------------------------

/// Samples random disks and renamings for conjugacy, and families of disks
/// with disjoint names for freshness. Freshness is tried at family sizes 2
/// and 3 and both results are recorded.
inline std::vector<VerificationReport> check_dynamics_axioms(const LocalRule& f, long samples,
                                                             uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<VerificationReport> out;
    if (!f.sample_input)
        return {{"dynamics.axioms", VerificationReport::Verdict::inconclusive, 0, seed,
                 "rule has no input sampler", {}}};

    // (i) conjugacy: f(R D) = R' f(D) with R' the segmentwise conjugate
    {
        bool failed = false;
        VerificationReport rep;
        for (long i = 0; i < samples && !failed; i++) {
            Graph g = f.sample_input(rng);
            if (g.vertices().empty()) continue;
            auto vit = g.vertices().begin();
            std::advance(vit, rng() % g.vertices().size());
            Disk d = disk(g, *vit, f.radius);
            Renaming r = detail::random_fresh_renaming(d.graph().all_names(), rng);
            Graph image = f.apply(d);
            Renaming conj = conjugate_renaming(r, image.all_names());
            Graph lhs = f.apply(rename(r, d));
            Graph rhs = rename(conj, image);
            if (!(lhs == rhs)) {
                rep = detail::make_fail("dynamics.conjugacy", i + 1, seed,
                                        "f(R D) differs from R' f(D) at center " + vit->str(),
                                        {detail::graph_artifact("input", g),
                                         detail::graph_artifact("f(RD)", lhs),
                                         detail::graph_artifact("R'f(D)", rhs)});
                failed = true;
            }
        }
        if (!failed) rep = detail::make_pass("dynamics.conjugacy", samples, seed);
        out.push_back(rep);
    }

    // (ii) freshness: families of inputs with no common name have images
    // with no common name
    for (int family : {2, 3}) {
        std::string prop = "dynamics.freshness.family" + std::to_string(family);
        bool failed = false;
        VerificationReport rep;
        for (long i = 0; i < samples && !failed; i++) {
            std::vector<Graph> images;
            std::vector<Graph> inputs;
            for (int k = 0; k < family; k++) {
                Graph g = detail::prefix_names(f.sample_input(rng),
                                               std::string(1, static_cast<char>('a' + k)));
                if (g.vertices().empty()) continue;
                auto vit = g.vertices().begin();
                std::advance(vit, rng() % g.vertices().size());
                inputs.push_back(g);
                images.push_back(f.apply(disk(g, *vit, f.radius)));
            }
            if (images.size() < 2) continue;
            std::set<VertexName> common = images[0].vertices();
            for (size_t k = 1; k < images.size(); k++) {
                std::set<VertexName> next;
                for (const auto& v : images[k].vertices())
                    if (common.count(v)) next.insert(v);
                common = std::move(next);
            }
            if (!common.empty()) {
                std::vector<std::pair<std::string, std::string>> artifacts;
                for (size_t k = 0; k < inputs.size(); k++)
                    artifacts.push_back(
                        detail::graph_artifact("input" + std::to_string(k), inputs[k]));
                rep = detail::make_fail(prop, i + 1, seed,
                                        "disjoint inputs share image vertex " +
                                            common.begin()->str(),
                                        std::move(artifacts));
                failed = true;
            }
        }
        if (!failed) rep = detail::make_pass(prop, samples, seed);
        out.push_back(rep);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local rule axioms: pairwise consistency and boundedness
// ---------------------------------------------------------------------------

inline VerificationReport check_local_rule(const LocalRule& f, const GraphSpace& space) {
    long graphs = 0;
    std::optional<VerificationReport> failure;
    space.for_each([&](const Graph& g) {
        graphs++;
        std::vector<std::pair<VertexName, Graph>> images;
        for (const auto& v : g.vertices()) {
            Graph img = f.apply(disk(g, v, f.radius));
            if (static_cast<int>(img.vertices().size()) > f.bound) {
                failure = detail::make_fail(
                    "local.bounded", graphs, 0,
                    "image at " + v.str() + " has " + std::to_string(img.vertices().size()) +
                        " vertices, bound is " + std::to_string(f.bound),
                    {detail::graph_artifact("input", g), detail::graph_artifact("image", img)});
                return false;
            }
            images.push_back({v, img});
        }
        for (size_t i = 0; i < images.size(); i++)
            for (size_t j = i + 1; j < images.size(); j++) {
                if (auto w = consistency_conflict(images[i].second, images[j].second)) {
                    failure = detail::make_fail(
                        "local.consistent", graphs, 0,
                        "disks at " + images[i].first.str() + " and " + images[j].first.str() +
                            ": " + w->describe(),
                        {detail::graph_artifact("input", g),
                         detail::graph_artifact("image_" + images[i].first.str(),
                                                images[i].second),
                         detail::graph_artifact("image_" + images[j].first.str(),
                                                images[j].second)});
                    return false;
                }
            }
        return true;
    });
    if (failure) return *failure;
    return detail::make_pass("local.rule", graphs, 0,
                             "consistency and bound over " + std::to_string(graphs) + " graphs");
}

// ---------------------------------------------------------------------------
// Causality
// ---------------------------------------------------------------------------

namespace detail {

/// Mutate g outside the radius-r disk around v: flip far states, attach far
/// vertices, drop far edges. The disk itself is preserved (asserted).
inline std::optional<Graph> mutate_outside_disk(const Graph& g, const VertexName& v, int r,
                                                std::mt19937_64& rng) {
    std::set<VertexName> core = neighbors(g, {v}, r);
    Graph h = g;
    bool changed = false;
    std::vector<VertexName> far;
    for (const auto& u : g.vertices())
        if (!core.count(u)) far.push_back(u);
    int edits = 1 + static_cast<int>(rng() % 3);
    for (int e = 0; e < edits; e++) {
        switch (rng() % 3) {
            case 0: {  // flip a far state
                if (far.empty() || h.alphabets().sigma.empty()) break;
                const VertexName& u = far[rng() % far.size()];
                std::vector<Symbol> syms(h.alphabets().sigma.begin(), h.alphabets().sigma.end());
                Symbol next = syms[rng() % syms.size()];
                if (h.state(u) != std::optional<Symbol>(next)) {
                    h.set_state(u, next);
                    changed = true;
                }
                break;
            }
            case 1: {  // graft a new vertex onto a far free port
                if (far.empty() || h.alphabets().delta.empty()) break;
                const VertexName& u = far[rng() % far.size()];
                int p = 1 + static_cast<int>(rng() % h.pi());
                if (!h.port_free(Port{u, p})) break;
                VertexName fresh("z" + std::to_string(rng() % 1000));
                if (h.has_vertex(fresh)) break;
                h.add_vertex(fresh);
                if (!h.alphabets().sigma.empty()) h.set_state(fresh, *h.alphabets().sigma.begin());
                h.add_edge(Port{u, p}, Port{fresh, 1}, *h.alphabets().delta.begin());
                changed = true;
                break;
            }
            case 2: {  // drop an edge between two far vertices
                std::vector<EdgeKey> candidates;
                for (const auto& [key, s] : h.delta())
                    if (!core.count(key.first.owner) && !core.count(key.second.owner))
                        candidates.push_back(key);
                if (candidates.empty()) break;
                h.remove_edge(candidates[rng() % candidates.size()]);
                changed = true;
                break;
            }
        }
    }
    if (!changed) return std::nullopt;
    if (!(disk(h, v, r) == disk(g, v, r))) return std::nullopt;  // mutation leaked inward
    return h;
}

}  // namespace detail

/// Causality condition (i), uniform continuity: pairs G, H agreeing on the
/// radius-r disk around v must agree on the output around every successor
/// of v. Condition (ii), boundedness: antecedent fan-out at most b.
inline std::vector<VerificationReport> check_causality(const DynamicsHandle& f, long samples,
                                                       uint64_t seed) {
    std::mt19937_64 rng(seed);
    int r = f.radius_for_checks();
    std::vector<VerificationReport> out;
    if (!f.rule.sample_input)
        return {{"causality", VerificationReport::Verdict::inconclusive, 0, seed,
                 "rule has no input sampler", {}}};

    {
        bool failed = false;
        VerificationReport rep;
        long tried = 0;
        for (long i = 0; i < samples && !failed; i++) {
            Graph g = f.rule.sample_input(rng);
            if (g.vertices().empty()) continue;
            auto vit = g.vertices().begin();
            std::advance(vit, rng() % g.vertices().size());
            const VertexName v = *vit;
            auto h = detail::mutate_outside_disk(g, v, r, rng);
            if (!h) continue;
            EvalResult eg = evaluate(f, g);
            std::optional<EvalResult> eh;
            try {
                eh = evaluate(f, *h);
            } catch (const MalformedDisk&) {
                continue;  // mutation left the rule's encoding domain
            }
            tried++;
            std::set<VertexName> succ = eg.provenance.successors_of({v});
            for (const auto& vp : succ) {
                Graph around_g = induced_subgraph(eg.graph, {vp});
                Graph around_h = induced_subgraph(eh->graph, {vp});
                if (!(around_g == around_h)) {
                    rep = detail::make_fail(
                        "causality.uniform_continuity", i + 1, seed,
                        "outputs around " + vp.str() + " differ although the radius-" +
                            std::to_string(r) + " disks at " + v.str() + " agree",
                        {detail::graph_artifact("G", g), detail::graph_artifact("H", *h),
                         detail::graph_artifact("F(G)_around", around_g),
                         detail::graph_artifact("F(H)_around", around_h)});
                    failed = true;
                    break;
                }
            }
        }
        if (!failed)
            rep = detail::make_pass("causality.uniform_continuity", tried, seed,
                                    std::to_string(tried) + " usable (G,H) pairs");
        out.push_back(rep);
    }

    {
        bool failed = false;
        VerificationReport rep;
        for (long i = 0; i < samples && !failed; i++) {
            Graph g = f.rule.sample_input(rng);
            EvalResult eg = evaluate(f, g);
            std::map<VertexName, int> fanout;
            for (const auto& [vp, centers] : eg.provenance.origins)
                for (const auto& c : centers) fanout[c]++;
            for (const auto& [c, n] : fanout)
                if (n > f.rule.bound) {
                    rep = detail::make_fail("causality.boundedness", i + 1, seed,
                                            "antecedent " + c.str() + " generates " +
                                                std::to_string(n) + " vertices, bound is " +
                                                std::to_string(f.rule.bound),
                                            {detail::graph_artifact("input", g)});
                    failed = true;
                    break;
                }
        }
        if (!failed) rep = detail::make_pass("causality.boundedness", samples, seed);
        out.push_back(rep);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Continuity as limit preservation
// ---------------------------------------------------------------------------

/// Builds the truncation family G(s) = disk(G, A, s) and checks that the
/// images converge to F(G) around the successors of A: for each r' there is
/// a stabilization index from which the radius-r' output disks agree.
inline VerificationReport check_limit_preservation(const DynamicsHandle& f, const Graph& g,
                                                   const std::set<VertexName>& a, int r_max) {
    EvalResult full = evaluate(f, g);
    std::set<VertexName> a_succ = full.provenance.successors_of(a);
    int s_max = static_cast<int>(g.vertices().size());
    std::vector<Graph> truncated_images;
    for (int s = 0; s <= s_max; s++) truncated_images.push_back(evaluate(f, disk(g, a, s).pointed.graph).graph);

    std::ostringstream indices;
    for (int rp = 0; rp <= r_max; rp++) {
        Disk want = disk(full.graph, a_succ, rp);
        int stable_from = -1;
        for (int s = s_max; s >= 0; s--) {
            if (disk(truncated_images[s], a_succ, rp) == want)
                stable_from = s;
            else
                break;
        }
        if (stable_from < 0)
            return detail::make_fail(
                "limits.preservation", s_max + 1, 0,
                "radius-" + std::to_string(rp) + " output disk never stabilizes",
                {detail::graph_artifact("input", g),
                 detail::graph_artifact("image", full.graph),
                 detail::graph_artifact("last_truncated_image", truncated_images[s_max])});
        indices << (rp ? " " : "") << "r'=" << rp << ":s=" << stable_from;
    }
    return detail::make_pass("limits.preservation", s_max + 1, 0, indices.str());
}

// ---------------------------------------------------------------------------
// Invertibility and reversibility
// ---------------------------------------------------------------------------

/// Outcome of tabulating F over a space, modulo isomorphism. Exact-name
/// tabulation would make any name-deriving dynamics trivially injective, so
/// images are keyed canonically.
struct InvertibilityResult {
    VerificationReport report;
    bool invertible = false;
    /// canonical image key -> preimage, defined on the image when invertible
    std::map<std::string, Graph> inverse;
};

inline InvertibilityResult check_invertibility(const DynamicsHandle& f, const GraphSpace& space) {
    InvertibilityResult result;
    std::map<std::string, Graph> table;  // canonical image -> preimage
    long graphs = 0;
    bool collided = false;
    space.for_each([&](const Graph& g) {
        graphs++;
        Graph image = evaluate(f, g).graph;
        std::string key = canonical_key(image);
        auto [it, fresh] = table.emplace(key, g);
        if (!fresh && !isomorphic(it->second, g)) {
            result.report = detail::make_fail(
                "invertibility", graphs, 0,
                "two preimages share one image (modulo isomorphism)",
                {detail::graph_artifact("preimage_a", it->second),
                 detail::graph_artifact("preimage_b", g), detail::graph_artifact("image", image)});
            collided = true;
            return false;
        }
        return true;
    });
    if (collided) {
        result.invertible = false;
        return result;
    }
    result.invertible = true;
    result.inverse = std::move(table);
    result.report = detail::make_pass("invertibility", graphs, 0,
                                      "injective over " + std::to_string(graphs) +
                                          " graphs; inverse tabulated");
    return result;
}

/// Searches radii 0..r_max at which the tabulated inverse satisfies the
/// uniform continuity condition over the space: whenever two images agree on
/// the radius-rho disk at a vertex, the preimages agree around it. Grouping
/// by disk rendering makes the pairwise condition a single pass. The inverse
/// table from check_invertibility is validated along the way: every image
/// must map back to its preimage.
inline VerificationReport check_reversibility(const DynamicsHandle& f,
                                              const std::map<std::string, Graph>& inverse,
                                              int r_max, const GraphSpace& space) {
    {
        std::optional<VerificationReport> bad;
        space.for_each([&](const Graph& g) {
            Graph image = evaluate(f, g).graph;
            auto it = inverse.find(canonical_key(image));
            if (it == inverse.end() || !isomorphic(it->second, g)) {
                bad = detail::make_fail(
                    "reversibility", 0, 0, "inverse table does not send the image back",
                    {detail::graph_artifact("input", g), detail::graph_artifact("image", image)});
                return false;
            }
            return true;
        });
        if (bad) return *bad;
    }
    for (int rho = 0; rho <= r_max; rho++) {
        bool violated = false;
        std::map<std::string, std::string> seen;  // output disk at v -> input around v
        std::vector<std::pair<std::string, std::string>> witness;
        space.for_each([&](const Graph& g) {
            Graph image = evaluate(f, g).graph;
            for (const auto& v : image.vertices()) {
                if (!g.has_vertex(v)) continue;  // name-preserving rules only
                std::string key = "v=" + v.str() + "|" +
                                  disk(image, v, rho).pointed.graph.structure_key();
                std::string val = induced_subgraph(g, {v}).structure_key();
                auto [it, fresh] = seen.emplace(key, val);
                if (!fresh && it->second != val) {
                    violated = true;
                    witness = {{"output_disk", key}, {"preimage_a", it->second},
                               {"preimage_b", val}};
                    return false;
                }
            }
            return true;
        });
        if (!violated)
            return detail::make_pass("reversibility", 0, 0,
                                     "inverse causal at radius " + std::to_string(rho));
    }
    return detail::make_fail("reversibility", 0, 0,
                             "no witnessing radius up to " + std::to_string(r_max), {});
}

}  // namespace cgd
