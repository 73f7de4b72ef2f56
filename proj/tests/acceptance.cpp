// Acceptance gate: one test case per criterion, one PASS/FAIL line each.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "cgd/engine.hpp"
#include "cgd/io.hpp"
#include "cgd/mutants.hpp"
#include "cgd/verify.hpp"

namespace fs = std::filesystem;
using namespace cgd;

namespace {

class CriterionReporter : public Catch::EventListenerBase {
public:
    using Catch::EventListenerBase::EventListenerBase;
    void testCaseEnded(const Catch::TestCaseStats& stats) override {
        std::cout << (stats.totals.assertions.allPassed() ? "PASS" : "FAIL") << " "
                  << stats.testInfo->name << "\n"
                  << std::flush;
    }
};
CATCH_REGISTER_LISTENER(CriterionReporter)

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

const Alphabets kBinary{{"0", "1"}, {"-"}, 2};

Graph encode_line(const std::string& bits) {
    Graph g(kBinary);
    for (size_t i = 0; i < bits.size(); i++) {
        VertexName v("v" + std::to_string(i));
        g.add_vertex(v, std::string(1, bits[i]));
        if (i > 0)
            g.add_edge(Port{VertexName("v" + std::to_string(i - 1)), 2}, Port{v, 1}, "-");
    }
    return g;
}

std::string random_bits(std::mt19937_64& rng, int max_len) {
    int n = 1 + static_cast<int>(rng() % max_len);
    std::string bits;
    for (int i = 0; i < n; i++) bits += rng() % 2 ? '1' : '0';
    return bits;
}

/// Rename the cells of a line graph to v0..v(n-1) in chain order.
Graph normalize_line_names(const Graph& g) {
    std::optional<VertexName> head;
    for (const auto& v : g.vertices())
        if (g.port_free(Port{v, 1})) head = v;
    REQUIRE(head);
    Renaming r;
    VertexName cur = *head;
    for (size_t i = 0; i < g.vertices().size(); i++) {
        r.set(cur, VertexName("v" + std::to_string(i)));
        auto e = g.edge_at(Port{cur, 2});
        if (!e) break;
        cur = e->first.second.owner;
    }
    return rename(r, g);
}

Graph build_square_grid(int n) {
    Graph g(Alphabets{{}, {"-"}, 4});
    auto at = [n](int r, int c) { return VertexName("g" + std::to_string(r * n + c)); };
    for (int r = 0; r < n; r++)
        for (int c = 0; c < n; c++) {
            g.add_vertex(at(r, c));
            if (c > 0) g.add_edge(Port{at(r, c - 1), 1}, Port{at(r, c), 3}, "-");
            if (r > 0) g.add_edge(Port{at(r - 1, c), 2}, Port{at(r, c), 4}, "-");
        }
    return g;
}

}  // namespace

TEST_CASE("criterion 1: one-step trace 10011 -> 110101 through the CLI") {
    Stopwatch watch;
    fs::path dir = fs::temp_directory_path() / "cgd_acceptance_c1";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path input = dir / "in.cgd";
    {
        std::ofstream out(input);
        out << serialize_graph(generate("line", 5, {"1", "0", "0", "1", "1"}));
    }
    std::string cmd = std::string("\"") + CGD_BIN_PATH + "\" run --rule xor-ca --input " +
                      input.string() + " --steps 1 --out " + dir.string() + " > " +
                      (dir / "stdout.txt").string() + " 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);

    Graph actual = parse_graph_file((dir / "step_1.cgd").string()).graph;
    Graph expected = generate("line", 6, {"1", "1", "0", "1", "0", "1"});
    CHECK(isomorphic(actual, expected));
    CHECK(normalize_line_names(actual) == expected);
    CHECK(watch.seconds() < 1.0);
}

TEST_CASE("criterion 2: inflating grid reaches 4^k vertices and the 8x8 grid") {
    Stopwatch watch;
    DynamicsHandle f = dynamics(inflating_grid_rule(GridVariant::plain));
    Graph g(f.rule.in_alpha);
    g.add_vertex(VertexName("v"));
    for (int k = 1; k <= 6; k++) {
        g = evaluate(f, g).graph;
        REQUIRE(g.vertices().size() == static_cast<size_t>(1) << (2 * k));
        g.validate(true);  // port monogamy and closure at every step
        if (k == 3) CHECK(isomorphic(g, build_square_grid(8), 128));
    }
    CHECK(watch.seconds() < 5.0);
}

TEST_CASE("criterion 3: grey seed yields three grey and one black") {
    DynamicsHandle f = dynamics(inflating_grid_rule(GridVariant::grey_black));
    Graph g(f.rule.in_alpha);
    g.add_vertex(VertexName("v"), "grey");
    Graph out = evaluate(f, g).graph;
    std::map<Symbol, int> count;
    for (const auto& v : out.vertices()) count[*out.state(v)]++;
    CHECK(count == std::map<Symbol, int>{{"grey", 3}, {"black", 1}});
}

TEST_CASE("criterion 4: composition equals sequential evaluation on 200 lines") {
    Stopwatch watch;
    LocalRule ca = xor_ca_rule(xor_table());
    LocalRule id = identity_rule(ca.in_alpha);
    LocalRule ca_ca = compose(ca, ca);
    LocalRule ca_id = compose(ca, id);
    // r'' = 2*r1*r2 + r1 + r2 with r1 = r2 = 1 (diameter 3 * diameter 3 = 9)
    CHECK(ca_ca.radius == 2 * 1 * 1 + 1 + 1);
    CHECK(ca_ca.radius == 4);

    DynamicsHandle f = dynamics(ca);
    std::mt19937_64 rng(20260824);
    for (int t = 0; t < 200; t++) {
        Graph in = encode_line(random_bits(rng, 50));
        Graph once = evaluate(f, in).graph;
        REQUIRE(evaluate(dynamics(ca_ca), in).graph == evaluate(f, once).graph);
        REQUIRE(evaluate(dynamics(ca_id), in).graph == once);
    }
    CHECK(watch.seconds() < 30.0);
}

TEST_CASE("criterion 5: two lifted radius-1 steps equal one radius-2 step on 100 lines") {
    Stopwatch watch;
    LocalRule ca = xor_ca_rule(xor_table());
    DynamicsHandle f = dynamics(restrict_radius(compose(ca, ca), 2));
    LiftedDynamics lifted = lift_radius_one(f);
    REQUIRE(lifted.levels == 1);
    REQUIRE(lifted.lifted.rule.radius == 1);

    std::mt19937_64 rng(20260824);
    for (int t = 0; t < 100; t++) {
        Graph g = encode_line(random_bits(rng, 20));
        Graph direct = evaluate(f, g).graph;
        Graph stepped = lifted.encode(g);
        stepped = evaluate(lifted.lifted, stepped).graph;
        stepped = evaluate(lifted.lifted, stepped).graph;
        REQUIRE(lifted.decode(stepped) == direct);
    }
    CHECK(watch.seconds() < 60.0);
}

TEST_CASE("criterion 6: checkers pass the built-ins and fail each mutant") {
    Stopwatch watch;

    SpaceBounds general;
    general.family = SpaceBounds::Family::general;
    general.max_vertices = 3;
    general.alpha = kBinary;
    SpaceBounds lines;
    lines.family = SpaceBounds::Family::line;
    lines.max_vertices = 4;
    lines.alpha = kBinary;
    SpaceBounds patches;
    patches.family = SpaceBounds::Family::grid_patch;
    patches.max_vertices = 3;
    patches.alpha = Alphabets{{"grey", "black"}, {"-"}, 4};

    LocalRule id = identity_rule(kBinary);
    LocalRule perm = state_permutation_rule({{"0", "1"}, {"1", "0"}}, kBinary);
    LocalRule ca = xor_ca_rule(xor_table());
    LocalRule grid = inflating_grid_rule(GridVariant::grey_black);

    auto all_pass = [](const std::vector<VerificationReport>& reports) {
        for (const auto& r : reports) {
            INFO(r.to_line());
            REQUIRE(r.passed());
        }
    };

    // built-ins: dynamics axioms, local rule axioms (exhaustive), causality
    for (const auto& rule : {id, perm, ca, grid})
        all_pass(check_dynamics_axioms(rule, 100, 2026));
    for (const auto& [rule, space] :
         std::vector<std::pair<LocalRule, SpaceBounds>>{
             {id, general}, {perm, general}, {ca, lines}, {grid, patches}})
        REQUIRE(check_local_rule(rule, GraphSpace(space)).passed());
    for (const auto& rule : {id, perm, ca, grid})
        all_pass(check_causality(dynamics(rule), 150, 2026));

    // built-ins: limit preservation on representative pointed inputs
    REQUIRE(check_limit_preservation(dynamics(ca), encode_line("1001101"), {VertexName("v0")}, 2)
                .passed());
    std::mt19937_64 rng(2026);
    for (const auto& rule : {id, perm, grid}) {
        Graph g = rule.sample_input(rng);
        while (g.vertices().empty()) g = rule.sample_input(rng);
        REQUIRE(check_limit_preservation(dynamics(rule), g, {*g.vertices().begin()}, 2).passed());
    }

    // constant-name mutant: freshness fails, with a counterexample
    {
        auto reports = check_dynamics_axioms(constant_name_mutant(kBinary), 100, 2026);
        bool fresh_failed = false;
        for (const auto& r : reports)
            if (r.property.rfind("dynamics.freshness", 0) == 0 && !r.passed()) {
                fresh_failed = true;
                REQUIRE_FALSE(r.artifacts.empty());
            }
        REQUIRE(fresh_failed);
    }
    // boundary-conflict mutant: pairwise consistency fails, with the inputs
    {
        VerificationReport r =
            check_local_rule(boundary_conflict_mutant(xor_table()), GraphSpace(lines));
        REQUIRE_FALSE(r.passed());
        REQUIRE(r.property == "local.consistent");
        REQUIRE_FALSE(r.artifacts.empty());
    }
    // radius-cheating mutant: uniform continuity fails with a (G, H) witness
    {
        auto reports = check_causality(radius_cheat_mutant(xor_table()), 300, 2026);
        bool cont_failed = false;
        for (const auto& r : reports)
            if (r.property == "causality.uniform_continuity" && !r.passed()) {
                cont_failed = true;
                REQUIRE(r.artifacts.size() >= 2);  // both G and H are reported
            }
        REQUIRE(cont_failed);
    }

    CHECK(watch.seconds() < 120.0);
}

TEST_CASE("criterion 7: automaton is non-injective, permutation has a causal inverse") {
    Stopwatch watch;

    SpaceBounds lines;
    lines.family = SpaceBounds::Family::line;
    lines.max_vertices = 4;
    lines.alpha = kBinary;
    InvertibilityResult ca_res =
        check_invertibility(dynamics(xor_ca_rule(xor_table())), GraphSpace(lines));
    REQUIRE_FALSE(ca_res.invertible);
    REQUIRE(ca_res.report.artifacts.size() == 3);  // two preimages plus the image
    CHECK(ca_res.report.artifacts[0].first == "preimage_a");
    CHECK(ca_res.report.artifacts[1].first == "preimage_b");

    SpaceBounds general;
    general.family = SpaceBounds::Family::general;
    general.max_vertices = 3;
    general.alpha = kBinary;
    GraphSpace space(general);
    DynamicsHandle perm =
        dynamics(state_permutation_rule({{"0", "1"}, {"1", "0"}}, kBinary));
    InvertibilityResult perm_res = check_invertibility(perm, space);
    REQUIRE(perm_res.invertible);
    VerificationReport rev = check_reversibility(perm, perm_res.inverse, 2, space);
    REQUIRE(rev.passed());
    CHECK(rev.detail.find("radius 0") != std::string::npos);

    CHECK(watch.seconds() < 120.0);
}
