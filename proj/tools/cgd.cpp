// Command-line front end: evolve graphs under a local rule, compose and lift
// rules, run the property checkers, and generate input families.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cgd/engine.hpp"
#include "cgd/io.hpp"
#include "cgd/verify.hpp"

namespace fs = std::filesystem;
using namespace cgd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEngine = 3;

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BadParameters("cannot write " + path.string());
    out << text;
}

std::vector<Symbol> parse_states_csv(const std::string& csv) {
    std::vector<Symbol> out;
    std::istringstream is(csv);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(item);
    return out;
}

SpaceBounds parse_space(const std::string& text) {
    SpaceBounds b;
    int sigma_count = 2;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw BadParameters("space entry '" + item + "' is not key=value");
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "n")
            b.max_vertices = std::stoi(val);
        else if (key == "sigma")
            sigma_count = std::stoi(val);
        else if (key == "pi")
            b.alpha.pi = std::stoi(val);
        else if (key == "family") {
            if (val == "general")
                b.family = SpaceBounds::Family::general;
            else if (val == "line")
                b.family = SpaceBounds::Family::line;
            else if (val == "grid")
                b.family = SpaceBounds::Family::grid_patch;
            else
                throw BadParameters("unknown space family '" + val + "'");
        } else
            throw BadParameters("unknown space key '" + key + "'");
    }
    b.alpha.sigma.clear();
    for (int i = 0; i < sigma_count; i++) b.alpha.sigma.insert(std::to_string(i));
    return b;
}

int cmd_run(const std::string& rule_spec, const std::string& input, int steps,
            const std::string& out_dir, bool dot, uint64_t /*seed: reserved, recorded only*/) {
    DynamicsHandle f = resolve_rule(rule_spec);
    Graph g = parse_graph_file(input).graph;
    fs::create_directories(out_dir);
    std::vector<Graph> trajectory = run(f, g, steps);
    for (size_t k = 0; k < trajectory.size(); k++) {
        fs::path base = fs::path(out_dir) / ("step_" + std::to_string(k));
        write_file(base.string() + ".cgd", serialize_graph(trajectory[k]));
        if (dot) write_file(base.string() + ".dot", export_dot(trajectory[k]));
    }
    std::cout << "wrote " << trajectory.size() << " steps to " << out_dir << "\n";
    return kExitOk;
}

int cmd_compose(const std::string& spec1, const std::string& spec2, const std::string& input,
                bool check_extensional) {
    DynamicsHandle f1 = resolve_rule(spec1);
    DynamicsHandle f2 = resolve_rule(spec2);
    LocalRule composed = compose(f1.rule, f2.rule);
    std::cout << "composed radius " << composed.radius << ", bound " << composed.bound << "\n";
    if (input.empty()) return kExitOk;
    Graph g = parse_graph_file(input).graph;
    Graph via_composed = evaluate(dynamics(composed), g).graph;
    std::cout << serialize_graph(via_composed);
    if (check_extensional) {
        Graph sequential = evaluate(f2, evaluate(f1, g).graph).graph;
        if (!(via_composed == sequential)) {
            std::cout << "MISMATCH: composed differs from sequential application\n";
            std::cout << "--- sequential ---\n" << serialize_graph(sequential);
            return kExitVerifyFail;
        }
        std::cout << "extensional check: composed equals sequential application\n";
    }
    return kExitOk;
}

int cmd_lift(const std::string& rule_spec, int l, const std::string& input, bool check) {
    DynamicsHandle f = resolve_rule(rule_spec);
    if (f.rule.radius != (1 << l))
        throw BadParameters("rule radius " + std::to_string(f.rule.radius) +
                            " does not match 2^" + std::to_string(l));
    LiftedDynamics lifted = lift_radius_one(f);
    std::cout << "lifted to radius 1: levels=" << lifted.levels
              << " pi=" << lifted.lifted.rule.in_alpha.pi
              << " sigma=" << lifted.lifted.rule.in_alpha.sigma.size() << "\n";
    Graph g = parse_graph_file(input).graph;
    Graph enc = lifted.encode(g);
    std::cout << "--- encoded ---\n" << serialize_graph(enc);
    if (check) {
        Graph direct = evaluate(f, g).graph;
        Graph stepped = enc;
        for (int i = 0; i <= lifted.levels; i++)
            stepped = evaluate(lifted.lifted, stepped).graph;
        Graph decoded = lifted.decode(stepped);
        if (!(decoded == direct)) {
            std::cout << "MISMATCH: decode(F'^" << lifted.levels + 1
                      << "(encode(G))) differs from F(G)\n";
            std::cout << "--- direct ---\n" << serialize_graph(direct);
            std::cout << "--- decoded ---\n" << serialize_graph(decoded);
            return kExitVerifyFail;
        }
        std::cout << "lift check: " << lifted.levels + 1
                  << " lifted steps reproduce one direct step\n";
    }
    return kExitOk;
}

int cmd_verify(const std::string& rule_spec, const std::string& properties, long samples,
               uint64_t seed, const std::string& space_spec) {
    DynamicsHandle f = resolve_rule(rule_spec);
    SpaceBounds bounds = parse_space(space_spec);
    // the space must speak the rule's alphabet, not the generic one
    bounds.alpha.sigma = f.rule.in_alpha.sigma;
    bounds.alpha.delta = f.rule.in_alpha.delta;
    bounds.alpha.pi = f.rule.in_alpha.pi;
    GraphSpace space(bounds);

    std::vector<VerificationReport> reports;
    auto want = [&properties](const std::string& p) {
        return properties == "all" || properties == p;
    };
    if (want("dynamics"))
        for (auto& r : check_dynamics_axioms(f.rule, samples, seed)) reports.push_back(r);
    if (want("local")) reports.push_back(check_local_rule(f.rule, space));
    if (want("causality"))
        for (auto& r : check_causality(f, samples, seed)) reports.push_back(r);
    if (want("limits")) {
        std::mt19937_64 rng(seed);
        if (f.rule.sample_input) {
            Graph g = f.rule.sample_input(rng);
            while (g.vertices().empty()) g = f.rule.sample_input(rng);
            reports.push_back(
                check_limit_preservation(f, g, {*g.vertices().begin()}, f.radius_for_checks() + 1));
        }
    }
    if (want("invertibility")) {
        InvertibilityResult inv = check_invertibility(f, space);
        reports.push_back(inv.report);
        if (inv.invertible)
            reports.push_back(check_reversibility(f, inv.inverse, f.radius_for_checks() + 1, space));
    }
    if (reports.empty()) throw BadParameters("unknown property set '" + properties + "'");

    bool any_fail = false;
    for (const auto& r : reports) {
        std::cout << r.to_line() << "\n";
        if (r.verdict == VerificationReport::Verdict::fail) {
            any_fail = true;
            std::cout << report_to_json(r).dump(2) << "\n";
        }
    }
    return any_fail ? kExitVerifyFail : kExitOk;
}

int cmd_gen(const std::string& family, int n, const std::string& states_csv,
            const std::string& out_file) {
    Graph g = generate(family, n,
                       states_csv.empty() ? std::vector<Symbol>{} : parse_states_csv(states_csv));
    std::string text = serialize_graph(g);
    if (out_file.empty() || out_file == "-")
        std::cout << text;
    else
        write_file(out_file, text);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal graph dynamics: local rules on bounded-degree port graphs"};
    app.require_subcommand(1);

    std::string rule, rule2, input, out, properties = "all", states, space = "n=3,sigma=2,pi=2";
    std::string family;
    int steps = 1, l = 1, n = 1;
    long samples = 200;
    uint64_t seed = 1;
    bool dot = false, check_ext = false, check = false;

    auto* run_cmd = app.add_subcommand("run", "evolve a graph for k steps");
    run_cmd->add_option("--rule", rule)->required();
    run_cmd->add_option("--input", input)->required();
    run_cmd->add_option("--steps", steps)->required();
    run_cmd->add_option("--out", out)->required();
    run_cmd->add_flag("--dot", dot);
    run_cmd->add_option("--seed", seed);

    auto* compose_cmd = app.add_subcommand("compose", "compose two rules");
    compose_cmd->add_option("--rule1", rule)->required();
    compose_cmd->add_option("--rule2", rule2)->required();
    compose_cmd->add_option("--input", input);
    compose_cmd->add_flag("--check-extensional", check_ext);

    auto* lift_cmd = app.add_subcommand("lift", "lift a radius-2^l rule to radius 1");
    lift_cmd->add_option("--rule", rule)->required();
    lift_cmd->add_option("--l", l)->required();
    lift_cmd->add_option("--input", input)->required();
    lift_cmd->add_flag("--check", check);

    auto* verify_cmd = app.add_subcommand("verify", "run property checkers on a rule");
    verify_cmd->add_option("--rule", rule)->required();
    verify_cmd->add_option("--properties", properties)
        ->check(CLI::IsMember({"all", "dynamics", "local", "causality", "limits",
                               "invertibility"}));
    verify_cmd->add_option("--samples", samples);
    verify_cmd->add_option("--seed", seed);
    verify_cmd->add_option("--space", space);

    auto* gen_cmd = app.add_subcommand("gen", "generate an input family");
    gen_cmd->add_option("--family", family)->required();
    gen_cmd->add_option("--n", n)->required();
    gen_cmd->add_option("--states", states);
    gen_cmd->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(rule, input, steps, out, dot, seed);
        if (compose_cmd->parsed()) return cmd_compose(rule, rule2, input, check_ext);
        if (lift_cmd->parsed()) return cmd_lift(rule, l, input, check);
        if (verify_cmd->parsed()) return cmd_verify(rule, properties, samples, seed, space);
        if (gen_cmd->parsed()) return cmd_gen(family, n, states, out);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const BadParameters& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return kExitEngine;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEngine;
    }
    return kExitUsage;
}
