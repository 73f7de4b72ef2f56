#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "cgd/engine.hpp"
#include "cgd/mutants.hpp"
#include "cgd/rules.hpp"

using namespace cgd;

namespace {

Graph encode_line(const std::string& bits) {
    Alphabets alpha{{"0", "1"}, {"-"}, 2};
    Graph g(alpha);
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

}  // namespace

TEST_CASE("evaluation is independent of the center order") {
    DynamicsHandle f = dynamics(xor_ca_rule(xor_table()));
    std::mt19937_64 rng(42);
    for (int t = 0; t < 50; t++) {
        Graph g = encode_line(random_bits(rng, 8));
        Graph reference = evaluate(f, g).graph;
        std::vector<VertexName> order(g.vertices().begin(), g.vertices().end());
        for (int shuffle = 0; shuffle < 5; shuffle++) {
            std::shuffle(order.begin(), order.end(), rng);
            CHECK(detail::evaluate_in_order(f, g, order).graph == reference);
        }
    }
}

TEST_CASE("evaluation rejects graphs outside the rule's alphabet") {
    DynamicsHandle f = dynamics(xor_ca_rule(xor_table()));
    Alphabets alpha{{"0", "1", "2"}, {"-"}, 2};
    Graph g(alpha);
    g.add_vertex(VertexName("v"), "2");
    CHECK_THROWS_AS(evaluate(f, g), AlphabetMismatch);

    Alphabets wide{{"0", "1"}, {"-"}, 3};
    Graph h(wide);
    h.add_vertex(VertexName("v"), "0");
    CHECK_THROWS_AS(evaluate(f, h), AlphabetMismatch);
}

TEST_CASE("inconsistent rule images abort the union with both centers named") {
    DynamicsHandle f = dynamics(boundary_conflict_mutant(xor_table()));
    Graph g = encode_line("01");
    try {
        evaluate(f, g);
        FAIL("expected InconsistentUnion");
    } catch (const InconsistentUnion& e) {
        std::string msg = e.what();
        CHECK(msg.find("v0") != std::string::npos);
        CHECK(msg.find("v1") != std::string::npos);
    }
}

TEST_CASE("run produces the whole trajectory and tags failing steps") {
    DynamicsHandle f = dynamics(xor_ca_rule(xor_table()));
    auto traj = run(f, encode_line("10011"), 3);
    REQUIRE(traj.size() == 4);
    CHECK(traj[0].vertices().size() == 5);
    CHECK(traj[1].vertices().size() == 6);
    CHECK_THROWS_AS(run(f, encode_line("1"), -1), BadParameters);

    DynamicsHandle broken = dynamics(boundary_conflict_mutant(xor_table()));
    try {
        run(broken, encode_line("01"), 2);
        FAIL("expected EngineError");
    } catch (const EngineError& e) {
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
}

TEST_CASE("provenance tracks which center generated each vertex") {
    DynamicsHandle f = dynamics(xor_ca_rule(xor_table()));
    EvalResult res = evaluate(f, encode_line("10011"));
    CHECK(res.provenance.antecedents(VertexName("v2", {0})) ==
          std::set<VertexName>{VertexName("v2")});
    CHECK(res.provenance.antecedents(VertexName("v4", {1})) ==
          std::set<VertexName>{VertexName("v4")});
    CHECK(res.provenance.successors_of({VertexName("v4")}) ==
          std::set<VertexName>{VertexName("v4", {0}), VertexName("v4", {1})});
    CHECK_THROWS_AS(res.provenance.antecedents(VertexName("nope")), UnknownVertex);
}

TEST_CASE("composition has the predicted radius and the sequential semantics") {
    LocalRule ca = xor_ca_rule(xor_table());
    LocalRule comp = compose(ca, ca);
    CHECK(comp.radius == 4);  // 2*1*1 + 1 + 1
    CHECK(comp.bound == 9);

    DynamicsHandle f = dynamics(ca);
    DynamicsHandle g = dynamics(comp);
    std::mt19937_64 rng(1234);
    for (int t = 0; t < 40; t++) {
        Graph in = encode_line(random_bits(rng, 12));
        Graph sequential = evaluate(f, evaluate(f, in).graph).graph;
        Graph composed = evaluate(g, in).graph;
        CHECK(composed == sequential);
    }
}

TEST_CASE("composing with the identity changes names but not structure") {
    LocalRule ca = xor_ca_rule(xor_table());
    LocalRule id = identity_rule(ca.in_alpha);
    DynamicsHandle f = dynamics(ca);
    DynamicsHandle ca_then_id = dynamics(compose(ca, id));
    DynamicsHandle id_then_ca = dynamics(compose(id, ca));
    CHECK(ca_then_id.rule.radius == 1);
    std::mt19937_64 rng(99);
    for (int t = 0; t < 25; t++) {
        Graph in = encode_line(random_bits(rng, 10));
        Graph direct = evaluate(f, in).graph;
        CHECK(evaluate(ca_then_id, in).graph == direct);
        CHECK(evaluate(id_then_ca, in).graph == direct);
    }
}

TEST_CASE("radius restriction validates its bounds") {
    LocalRule ca = xor_ca_rule(xor_table());
    CHECK(restrict_radius(ca, 1).radius == 1);
    CHECK_THROWS_AS(restrict_radius(ca, 2), BadParameters);
    CHECK_THROWS_AS(restrict_radius(ca, -1), BadParameters);
}

TEST_CASE("lift of a radius-1 rule is one-to-one in steps") {
    DynamicsHandle f = dynamics(xor_ca_rule(xor_table()));
    LiftedDynamics lifted = lift_radius_one(f);
    CHECK(lifted.levels == 0);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; t++) {
        Graph g = encode_line(random_bits(rng, 8));
        Graph direct = evaluate(f, g).graph;
        Graph round = lifted.decode(evaluate(lifted.lifted, lifted.encode(g)).graph);
        CHECK(round == direct);
    }
}

TEST_CASE("lift of a radius-2 rule halves the radius and doubles the steps") {
    LocalRule ca = xor_ca_rule(xor_table());
    DynamicsHandle f = dynamics(restrict_radius(compose(ca, ca), 2));
    LiftedDynamics lifted = lift_radius_one(f);
    CHECK(lifted.levels == 1);
    CHECK(lifted.lifted.rule.radius == 1);
    CHECK(lifted.lifted.rule.in_alpha.pi == 4);  // 2^(2^1)

    std::mt19937_64 rng(6);
    for (int t = 0; t < 30; t++) {
        Graph g = encode_line(random_bits(rng, 10));
        Graph direct = evaluate(f, g).graph;
        Graph stepped = lifted.encode(g);
        stepped = evaluate(lifted.lifted, stepped).graph;
        stepped = evaluate(lifted.lifted, stepped).graph;
        CHECK(lifted.decode(stepped) == direct);
    }
}

TEST_CASE("the doubling step wires exactly the distance-two pairs") {
    LocalRule ca = xor_ca_rule(xor_table());
    DynamicsHandle f = dynamics(restrict_radius(compose(ca, ca), 2));
    LiftedDynamics lifted = lift_radius_one(f);
    Graph g = encode_line("10011");
    Graph once = evaluate(lifted.lifted, lifted.encode(g)).graph;
    int stars = 0;
    for (const auto& [key, s] : once.delta()) {
        if (s != "*") continue;
        stars++;
        // endpoints are at distance two in the original line
        std::set<VertexName> reach = neighbors(g, {key.first.owner}, 2);
        std::set<VertexName> close = neighbors(g, {key.first.owner}, 1);
        CHECK(reach.count(key.second.owner));
        CHECK_FALSE(close.count(key.second.owner));
    }
    CHECK(stars == 3);  // v0-v2, v1-v3, v2-v4
}

TEST_CASE("lift rejects radii that are not powers of two") {
    LocalRule ca = xor_ca_rule(xor_table());
    LocalRule comp = compose(ca, ca);
    CHECK_THROWS_AS(lift_radius_one(dynamics(restrict_radius(comp, 3))), RadiusNotPowerOfTwo);
    CHECK_THROWS_AS(lift_radius_one(dynamics(restrict_radius(comp, 0))), RadiusNotPowerOfTwo);
}
