#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "generators.hpp"

using namespace rsbm;
using namespace rsbm::testing;
using R = Relation;

namespace {

std::size_t count_syncs(const ScenarioScript& s) {
    return static_cast<std::size_t>(std::count_if(s.program().begin(), s.program().end(),
                                                  [](const Instr& i) { return i.op == Instr::Op::Sync; }));
}

std::size_t count_branches(const ScenarioScript& s) {
    return static_cast<std::size_t>(std::count_if(s.program().begin(), s.program().end(),
                                                  [](const Instr& i) { return i.op == Instr::Op::Branch; }));
}

ScenarioScript single(const std::string& body, const std::string& vars = "x") {
    Model m = parse_model("model { vars " + vars + "; object O { " + body + " } }");
    return *m.at("O").script();
}

/// Line and column of the parse failure, or {0, 0} if parsing succeeded.
std::pair<std::size_t, std::size_t> failure_at(const std::string& text) {
    try {
        parse_model(text);
    } catch (const ParseError& e) {
        return {e.line(), e.column()};
    }
    return {0, 0};
}

} // namespace

TEST_CASE("Object 3 parses to four syncs and one branch", "[dsl]") {
    Model m = load_model("drone.sbm");
    const auto& o3 = *m.at("Object3").script();
    CHECK(count_syncs(o3) == 4);
    CHECK(count_branches(o3) == 1);
    const auto& branch = *std::find_if(o3.program().begin(), o3.program().end(),
                                       [](const Instr& i) { return i.op == Instr::Op::Branch; });
    CHECK(branch.cond == canonicalize(b("h", R::Lt, 10)));
    CHECK(m.vars().names() == std::vector<std::string>{"h", "v"});
}

TEST_CASE("empty object body is a single end state", "[dsl]") {
    auto s = single("");
    REQUIRE(s.program().size() == 1);
    CHECK(s.program()[0].op == Instr::Op::End);
    CHECK(s.state_name(s.initial_pc()) == std::string(kEndState));
    CHECK(labels_at(s, initial_state(s)).request.is_false());
}

TEST_CASE("repeat is unrolled at parse time", "[dsl]") {
    Model m = load_model("watertap.sbm");
    const auto& hot = *m.at("AddHotWater").script();
    CHECK(count_syncs(hot) == 4);
    auto g = extract_graph(hot, m.vars());
    CHECK(g.states().size() == 4);

    auto r = single("loop { repeat 5 { sync(request = x >= 1); } }");
    CHECK(count_syncs(r) == 5);
    CHECK(extract_graph(r, VarSet{"x"}).states().size() == 5);
}

TEST_CASE("formula syntax covers precedence, arithmetic and constants", "[dsl]") {
    VarSet vars{"x", "y"};
    CHECK(canonicalize(parse_formula("x >= 1 || y < 2 && x == 3", vars)) ==
          canonicalize(b("x", R::Ge, 1) || (b("y", R::Lt, 2) && b("x", R::Eq, 3))));
    CHECK(canonicalize(parse_formula("!(x < 1)", vars)) == canonicalize(b("x", R::Ge, 1)));
    CHECK(canonicalize(parse_formula("x < 1 -> y < 1 -> x > 5", vars)) ==
          canonicalize(Formula::implication(b("x", R::Lt, 1), Formula::implication(b("y", R::Lt, 1), b("x", R::Gt, 5)))));
    auto lin = canonicalize(parse_formula("2*x + (y - 1)/2 <= 3.5", vars));
    REQUIRE(lin.kind() == Formula::Kind::Atom);
    // 2x + y/2 <= 4, normalized to x + y/4 <= 2.
    CHECK(lin.atom() == std::get<LinearAtom>(LinearAtom::make(
                            {{"x", Rational(1)}, {"y", make_rational(1, 4)}}, R::Le, Rational(2))));
    CHECK(canonicalize(parse_formula("(x + y) * 2 > 7/2", vars)).kind() == Formula::Kind::Atom);
    CHECK(parse_formula("true", vars).is_true());
    CHECK(canonicalize(parse_formula("x = 1", vars)) == canonicalize(b("x", R::Eq, 1)));
    CHECK(canonicalize(parse_formula("3 >= 2", vars)).is_true());
}

TEST_CASE("parse errors carry line and column", "[dsl]") {
    CHECK(failure_at("") == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(failure_at("model {\n  vars x;\n  object A { sync(request = y > 1); }\n}") ==
          std::pair<std::size_t, std::size_t>{3, 29});
    CHECK(failure_at("model { vars x; object A { sync(request = x > ); } }").first == 1);
    CHECK(failure_at("model { vars x; object A { sync(request = x * x > 1); } }").first == 1);
    CHECK(failure_at("model { vars x; object A { sync(request = x > 1) } }").first == 1);
    CHECK(failure_at("model { vars x, x; }").first == 1);
    CHECK(failure_at("model { vars x; object A { } object A { } }") == std::pair<std::size_t, std::size_t>{1, 37});
}

TEST_CASE("static checks reject ill-formed control flow", "[dsl]") {
    CHECK_THROWS_AS(single("loop { if (x > 1) { sync(); } }"), ParseError);
    CHECK_THROWS_AS(single("loop { }"), ParseError);
    CHECK_THROWS_AS(single("if (x > 1) { sync(); }"), ParseError);
    CHECK_THROWS_AS(single("goto nowhere;"), ParseError);
    CHECK_THROWS_AS(single("state a: sync(); state a: sync();"), ParseError);
    CHECK_THROWS_AS(single("repeat 2 { state a: sync(); }"), ParseError);
    CHECK_THROWS_AS(single("repeat 0 { sync(); }"), ParseError);
    CHECK_THROWS_AS(single("mark bad;"), ParseError);
    CHECK_NOTHROW(single("sync(); loop { if (x > 1) { sync(request = x > 1); } else { sync(request = x < 0); } }"));
    CHECK_NOTHROW(single("state a: sync(waitfor = true); if (x > 1) goto a; else if (x < 0) end; sync();"));
}

TEST_CASE("parse_objects reads fragments over known variables", "[dsl]") {
    auto objs = parse_objects("object P { sync(waitfor = v >= 4); loop { sync(); } }", VarSet{"v", "h"});
    REQUIRE(objs.size() == 1);
    CHECK(objs[0].name() == "P");
    CHECK_THROWS_AS(parse_objects("object P { sync(waitfor = z >= 4); }", VarSet{"v", "h"}), ParseError);
}

TEST_CASE("collect_predicates on Object 3 has the five expected atoms", "[dsl]") {
    Model m = load_model("drone.sbm");
    auto p = collect_predicates(*m.at("Object3").script());
    CHECK(p.size() == 5);
    for (const auto& f : {b("v", R::Ge, 2), b("h", R::Eq, 0), b("h", R::Ge, 10), b("v", R::Eq, 0), b("h", R::Lt, 0)}) {
        INFO(to_infix(f));
        CHECK(p.contains(f.atom()));
    }
}

TEST_CASE("collect_predicates edge cases", "[dsl]") {
    CHECK(collect_predicates(single("loop { sync(request = true); }")).size() == 0);
    auto both = collect_predicates(single("sync(request = x >= 10); if (x < 10) { sync(request = x >= 10); }"));
    CHECK(both.size() == 1);
    auto scaled = collect_predicates(single("sync(request = 2*x >= 20, block = !(x < 10));"));
    CHECK(scaled.size() == 1);
}

TEST_CASE("collect_predicates is invariant under canonicalization of the source", "[dsl][property]") {
    Gen gen(31);
    VarSet vars{"x", "y"};
    auto script = [](const Formula& r, const Formula& c) {
        return single("sync(request = " + to_infix(r) + "); loop { if (" + to_infix(c) +
                          ") { sync(); } else { sync(waitfor = true); } }",
                      "x, y");
    };
    for (int i = 0; i < 200; ++i) {
        Formula r = gen.formula(vars, 3);
        Formula c = gen.formula(vars, 3);
        INFO(to_infix(r) << " / " << to_infix(c));
        CHECK(collect_predicates(script(r, c)).atoms == collect_predicates(script(canonicalize(r), canonicalize(c))).atoms);
    }
}

TEST_CASE("emit_script prints a two-step patch as a chain", "[dsl][emit]") {
    VarSet vars{"v", "h"};
    ObjectGraph g("Patch");
    g.add_state("t0", {Formula::bottom(), Formula::bottom(), b("v", R::Ge, 4) && b("h", R::Eq, 0)});
    g.add_state("t1", {Formula::bottom(), b("h", R::Ge, 18), Formula::top()});
    g.add_state("t2");
    g.add_edge("t0", b("v", R::Ge, 4) && b("h", R::Eq, 0), "t1");
    g.add_edge("t1", Formula::top(), "t2");
    std::string text = emit_script(g, vars);
    CHECK(text == "object Patch {\n"
                  "  sync(waitfor = h == 0 && v >= 4);\n"
                  "  sync(waitfor = true, block = h >= 18);\n"
                  "  loop {\n"
                  "    sync(request = false);\n"
                  "  }\n"
                  "}\n");
    auto back = parse_objects(text, vars);
    REQUIRE(back.size() == 1);
    CHECK(isomorphic(extract_graph(back[0], vars), g, vars));
}

TEST_CASE("emit_script of a single idle state", "[dsl][emit]") {
    ObjectGraph g("Idle");
    g.add_state("q");
    CHECK(emit_script(g, VarSet{"x"}) == "object Idle {\n  loop {\n    sync(request = false);\n  }\n}\n");
}

TEST_CASE("emit_script rejects nondeterministic graphs", "[dsl][emit]") {
    ObjectGraph g("N");
    g.add_state("a", {Formula::top(), Formula::bottom(), Formula::bottom()});
    g.add_state("b");
    g.add_state("c");
    g.add_edge("a", b("x", R::Ge, 0), "b");
    g.add_edge("a", b("x", R::Le, 0), "c");
    CHECK_THROWS_AS(emit_script(g, VarSet{"x"}), EmissionError);
}

TEST_CASE("emit and re-extract every fixture object", "[dsl][emit]") {
    for (const auto& file : fixture_files()) {
        Model m = load_model(file);
        for (const auto& o : m.objects()) {
            INFO(file << " " << o.name);
            for (bool simplified : {false, true}) {
                ObjectGraph g = extract_graph(*o.script(), m.vars());
                if (simplified) {
                    g = simplify_graph(g, m.vars());
                }
                std::string text = emit_script(g, m.vars());
                INFO(text);
                auto back = parse_objects(text, m.vars());
                REQUIRE(back.size() == 1);
                CHECK(isomorphic(extract_graph(back[0], m.vars()), g, m.vars()));
                CHECK(emit_script(g, m.vars()) == text);
            }
        }
    }
}

TEST_CASE("goto form keeps state names and bad marks", "[dsl][emit]") {
    Model m = load_model("drone.sbm");
    auto g = simplify_graph(extract_graph(*m.at("Property").script(), m.vars()), m.vars());
    std::string text = emit_script(g, m.vars());
    CHECK(text.find("state P0:") != std::string::npos);
    CHECK(text.find("mark bad;") != std::string::npos);
    auto back = extract_graph(parse_objects(text, m.vars())[0], m.vars());
    CHECK(back.bad() == std::set<StateId>{"Bad"});
}
