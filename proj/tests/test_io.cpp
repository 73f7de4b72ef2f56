#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cgd/io.hpp"

using namespace cgd;

namespace {

const Alphabets kBinary{{"0", "1"}, {"-"}, 2};

Graph random_graph(std::mt19937_64& rng) {
    Graph g(kBinary);
    int n = 1 + static_cast<int>(rng() % 5);
    std::vector<VertexName> names;
    for (int i = 0; i < n; i++) {
        VertexName v("v" + std::to_string(i), rng() % 2 ? std::vector<int>{static_cast<int>(rng() % 4)}
                                                        : std::vector<int>{});
        if (g.has_vertex(v)) continue;
        g.add_vertex(v);
        if (rng() % 3) g.set_state(v, rng() % 2 ? "1" : "0");
        names.push_back(v);
    }
    for (int t = 0; t < 2 * n; t++) {
        Port a{names[rng() % names.size()], 1 + static_cast<int>(rng() % 2)};
        Port b{names[rng() % names.size()], 1 + static_cast<int>(rng() % 2)};
        if (a == b || !g.port_free(a) || !g.port_free(b)) continue;
        g.add_edge(a, b, "-");
    }
    return g;
}

}  // namespace

TEST_CASE("documents parse into validated graphs") {
    std::string doc =
        "# the 10011 encoding\n"
        "sigma 0 1\n"
        "delta -\n"
        "pi 2\n"
        "vertex v0 1\n"
        "vertex v1 0\n"
        "vertex v2 0\n"
        "vertex v3 1\n"
        "vertex v4 1\n"
        "edge v0:2 -> v1:1 -\n"
        "edge v1:2 -> v2:1 -\n"
        "edge v2:2 -> v3:1 -\n"
        "edge v3:2 -> v4:1 -\n";
    ParsedGraph p = parse_graph(doc);
    CHECK_FALSE(p.pointed());
    CHECK(p.graph.vertices().size() == 5);
    CHECK(p.graph.pi() == 2);
    CHECK(p.graph.delta().size() == 4);
    CHECK(p.graph.state(VertexName("v0")) == std::optional<Symbol>("1"));

    CHECK(parse_graph("").graph.empty());

    ParsedGraph pointed = parse_graph("vertex a 0\npointer a\n");
    CHECK(pointed.pointed());
    CHECK(pointed.as_pointed().pointers == std::set<VertexName>{VertexName("a")});
}

TEST_CASE("duplicate port use is an invariant violation, not a parse error") {
    std::string doc =
        "vertex a 0\nvertex b 0\nvertex c 0\n"
        "edge a:2 -> b:1 -\n"
        "edge a:2 -> c:1 -\n";
    CHECK_THROWS_AS(parse_graph(doc), InvariantViolation);
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse_graph("vertex a 0\nedge a:1 => b:1 -\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
    try {
        parse_graph("vertex a 0\nvertex .bad 0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.column == 8);
    }
    CHECK_THROWS_AS(parse_graph("frobnicate a\n"), ParseError);
    CHECK_THROWS_AS(parse_graph("pointer ghost\nvertex a 0\n"), InvariantViolation);
}

TEST_CASE("serialization round-trips every graph exactly") {
    std::mt19937_64 rng(20260824);
    for (int t = 0; t < 200; t++) {
        Graph g = random_graph(rng);
        ParsedGraph back = parse_graph(serialize_graph(g));
        CHECK(back.graph == g);
        CHECK(back.graph.alphabets() == g.alphabets());
    }
}

TEST_CASE("serialization is canonical regardless of construction order") {
    Graph a(kBinary), b(kBinary);
    a.add_vertex(VertexName("x"), "0");
    a.add_vertex(VertexName("y"), "1");
    a.add_edge(Port{VertexName("x"), 1}, Port{VertexName("y"), 1}, "-");
    b.add_vertex(VertexName("y"), "1");
    b.add_vertex(VertexName("x"), "0");
    b.add_edge(Port{VertexName("x"), 1}, Port{VertexName("y"), 1}, "-");
    CHECK(serialize_graph(a) == serialize_graph(b));
}

TEST_CASE("dot export renders every vertex and edge") {
    DynamicsHandle f = dynamics(inflating_grid_rule(GridVariant::plain));
    Graph g(f.rule.in_alpha);
    g.add_vertex(VertexName("v"));
    Graph step2 = run(f, g, 2).back();
    CHECK(step2.vertices().size() == 16);
    std::string dot = export_dot(step2);
    size_t nodes = 0, edges = 0;
    for (size_t pos = 0; (pos = dot.find("label=", pos)) != std::string::npos; pos++) nodes++;
    for (size_t pos = 0; (pos = dot.find(" -- ", pos)) != std::string::npos; pos++) edges++;
    CHECK(nodes == 16 + step2.delta().size());
    CHECK(edges == step2.delta().size());
    CHECK(dot.rfind("graph G {", 0) == 0);
}

TEST_CASE("generators build the documented families") {
    Graph line = generate("line", 5, {"1", "0", "0", "1", "1"});
    CHECK(line.vertices().size() == 5);
    CHECK(line.pi() == 2);
    CHECK(line.state(VertexName("v0")) == std::optional<Symbol>("1"));
    CHECK(line.state(VertexName("v4")) == std::optional<Symbol>("1"));
    CHECK(line.edge_at(Port{VertexName("v0"), 2}));
    CHECK_FALSE(line.edge_at(Port{VertexName("v0"), 1}));

    Graph single = generate("single", 1, {"grey"});
    CHECK(single.vertices().size() == 1);
    CHECK(single.pi() == 4);
    CHECK(single.state(VertexName("v0")) == std::optional<Symbol>("grey"));

    Graph cycle = generate("cycle", 3);
    CHECK(cycle.vertices().size() == 3);
    for (const auto& v : cycle.vertices()) {
        CHECK(cycle.edge_at(Port{v, 1}));
        CHECK(cycle.edge_at(Port{v, 2}));
    }

    Graph grid = generate("grid", 3);
    CHECK(grid.vertices().size() == 9);
    CHECK(grid.pi() == 4);
    CHECK(grid.delta().size() == 12);

    CHECK_THROWS_AS(generate("line", 0), BadParameters);
    CHECK_THROWS_AS(generate("cycle", 2), BadParameters);
    CHECK_THROWS_AS(generate("pentagon", 3), BadParameters);
}

TEST_CASE("rule specs resolve through the registry") {
    CHECK(resolve_rule("xor-ca").rule.radius == 1);
    CHECK(resolve_rule("xor-ca2").rule.radius == 2);
    CHECK(resolve_rule("identity").rule.radius == 0);
    CHECK(resolve_rule("grid:variant=grey-black").rule.in_alpha.sigma.count("grey") == 1);
    CHECK(resolve_rule("state-perm:perm=a:b,b:a").rule.in_alpha.sigma ==
          std::set<Symbol>{"a", "b"});
    CHECK(resolve_rule("mutant-radius-cheat").radius_for_checks() == 1);
    CHECK(resolve_rule("xor-ca:h=00:0,01:1,10:1,11:0;q=0").rule.radius == 1);
    CHECK_THROWS_AS(resolve_rule("nonsense"), BadParameters);
    CHECK_THROWS_AS(resolve_rule("grid:variant=plaid"), BadParameters);
    CHECK_THROWS_AS(resolve_rule("xor-ca:h=00:0"), BadParameters);
}

TEST_CASE("reports serialize to structured records") {
    VerificationReport r{"p.q", VerificationReport::Verdict::fail, 3, 17, "boom",
                        {{"input", "vertex v\n"}}};
    nlohmann::json j = report_to_json(r);
    CHECK(j["property"] == "p.q");
    CHECK(j["verdict"] == "fail");
    CHECK(j["samples"] == 3);
    CHECK(j["seed"] == 17);
    CHECK(j["artifacts"]["input"] == "vertex v\n");
}
