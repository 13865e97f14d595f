#include <catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace rsbm;
using namespace rsbm::testing;
using R = Relation;

namespace {

ScenarioScript object(const std::string& text, const VarSet& vars) { return parse_objects(text, vars).at(0); }

StateLabels can_move() { return {Formula::top(), Formula::bottom(), Formula::bottom()}; }

} // namespace

TEST_CASE("drone violates the sharp-turn property in two steps", "[verify]") {
    Drone d;
    auto r = check_safety(d.model, d.property);
    REQUIRE(r.verdict == Verdict::BadReached);
    REQUIRE(r.trace.steps.size() == 2);
    CHECK(r.trace.initial == "s0⊗s0⊗S1⊗P0");
    CHECK(r.trace.steps[0].state == "s0⊗s0⊗S2⊗P1");
    CHECK(r.trace.steps[1].state == "s0⊗s0⊗S4⊗Bad");

    // Each step must be something the composite can actually do.
    auto product = property_product(d.model, d.property);
    StateId q = product.initial();
    for (const auto& s : r.trace.steps) {
        INFO(to_string(s.assignment));
        CHECK(evaluate(enabled_guard(product, q), s.assignment));
        CHECK(evaluate(sharp_turn(), s.assignment));
        CHECK_FALSE(evaluate(drone_limits(), s.assignment));
        q = product.step(q, s.assignment);
        CHECK(q == s.state);
    }
}

TEST_CASE("a property without bad states always holds", "[verify]") {
    Drone d;
    auto watch = object("object Watch { loop { sync(waitfor = true); } }", d.vars);
    CHECK(check_safety(d.model, watch).safe());
    auto r = repair(d.model, watch);
    REQUIRE(r.patch);
    CHECK(r.patch->identity());
    CHECK(verify_patch(d.model, *r.patch, watch).ok());
}

TEST_CASE("water tap needs Stability to avoid two hot additions in a row", "[verify]") {
    Model w = load_model("watertap.sbm");
    const auto& two_hot = *w.at("TwoHot").script();
    Model with = w.without("TwoHot");
    Model without = with.without("Stability");
    CHECK(check_safety(with, two_hot).safe());
    auto r = check_safety(without, two_hot);
    REQUIRE(r.verdict == Verdict::BadReached);
    CHECK(r.trace.steps.size() == 3);
    for (std::size_t i = 1; i < r.trace.steps.size(); ++i) {
        CHECK(r.trace.steps[i].assignment.at("x") == 1);
    }

    CHECK(check_safety(encoded_water_tap(true), two_hot).safe());
    CHECK_FALSE(check_safety(encoded_water_tap(false), two_hot).safe());
}

TEST_CASE("water tap deadlocks once both additions are done", "[verify]") {
    Model w = load_model("watertap.sbm").without("TwoHot");
    auto dead = find_deadlocks(compose_all(w), w.vars());
    REQUIRE(dead.size() == 1);
    CHECK(*dead.begin() == "s1⊗s0⊗s0⊗s0");
    auto exec = execution_graph(compose_all(w), w.vars());
    CHECK(exec.states().size() == 8);
}

TEST_CASE("attractor of a chain stops at a state with a way out", "[verify]") {
    VarSet vars{"x"};
    ObjectGraph g("chain");
    for (const char* q : {"i", "a", "b", "c"}) {
        g.add_state(q, can_move());
    }
    g.add_edge("i", b("x", R::Ge, 0), "a");
    g.add_edge("i", b("x", R::Lt, 0), "i");
    g.add_edge("a", Formula::top(), "b");
    g.add_edge("b", Formula::top(), "c");
    g.mark_bad("c");
    auto bad = compute_bad_attractor(g, {"c"}, vars);
    CHECK(bad.states == std::set<StateId>{"a", "b", "c"});

    auto p = synthesize_patch(g, bad, vars);
    REQUIRE(p.cut.size() == 1);
    CHECK(p.cut[0].from == "i");
    CHECK(p.cut[0].to == "a");
    CHECK(p.tracker.states() == std::vector<StateId>{"t0"});
    CHECK(equivalent(p.block_at.at("t0"), b("x", R::Ge, 0), vars));
    CHECK(p.new_deadlocks.empty());

    g.set_initial("a");
    CHECK_THROWS_AS(compute_bad_attractor(g, {"c"}, vars), UnrepairableError);
}

TEST_CASE("attractor of a diamond keeps the side with a choice", "[verify]") {
    VarSet vars{"x"};
    ObjectGraph g("diamond");
    for (const char* q : {"i", "l", "r", "bad"}) {
        g.add_state(q, can_move());
    }
    g.add_edge("i", b("x", R::Ge, 0), "l");
    g.add_edge("i", b("x", R::Lt, 0), "r");
    g.add_edge("l", Formula::top(), "bad");
    g.add_edge("r", b("x", R::Ge, 0), "bad");
    g.add_edge("r", b("x", R::Lt, 0), "i");
    g.add_edge("bad", Formula::top(), "bad");
    g.mark_bad("bad");
    auto bad = compute_bad_attractor(g, {"bad"}, vars);
    CHECK(bad.states == std::set<StateId>{"bad", "l"});
    auto p = synthesize_patch(g, bad, vars);
    CHECK(p.cut.size() == 2);
    CHECK(p.tracker.states().size() == 2);
}

TEST_CASE("deadlocked states are not pulled into the attractor", "[verify]") {
    VarSet vars{"x"};
    ObjectGraph g("stuck");
    g.add_state("i", can_move());
    g.add_state("dead");
    g.add_state("bad", can_move());
    g.add_edge("i", b("x", R::Ge, 0), "dead");
    g.add_edge("i", b("x", R::Lt, 0), "bad");
    g.mark_bad("bad");
    auto bad = compute_bad_attractor(g, {"bad"}, vars);
    CHECK(bad.states == std::set<StateId>{"bad"});
    CHECK(find_deadlocks(g, vars) == std::set<StateId>{"dead"});
}

TEST_CASE("drone repair cuts both violating steps and verifies", "[verify]") {
    Drone d;
    auto r = repair(d.model, d.property);
    REQUIRE(r.patch);
    const Patch& p = *r.patch;
    CHECK(p.bad.states == std::set<StateId>{"s0⊗s0⊗S4⊗Bad"});
    REQUIRE(p.cut.size() == 2);
    std::set<StateId> from;
    for (const auto& e : p.cut) {
        from.insert(e.from);
        CHECK(e.to == "s0⊗s0⊗S4⊗Bad");
    }
    CHECK(from == std::set<StateId>{"s0⊗s0⊗S2⊗P1", "s0⊗s0⊗S4⊗P1"});
    CHECK(p.tracker.states().size() == 5);
    CHECK(p.new_deadlocks.empty());

    auto rep = verify_patch(d.model, p, d.property);
    CHECK(rep.safe);
    CHECK(rep.no_new_deadlocks);
    CHECK(rep.runs_preserved);
    CHECK(check_safety(apply_patch(d.model, p), d.property).safe());
}

TEST_CASE("over-blocking patch breaks run preservation", "[verify]") {
    Drone d;
    auto r = repair(d.model, d.property);
    Patch p = *r.patch;
    // Forbid the very first climb outright.
    auto labels = p.tracker.labels("t0");
    labels.block = disj({labels.block, b("v", R::Ge, 3)});
    p.tracker.set_labels("t0", labels);
    auto rep = verify_patch(d.model, p, d.property, {}, false);
    CHECK(rep.safe);
    CHECK_FALSE(rep.runs_preserved);
    CHECK_FALSE(rep.witnesses.empty());
    CHECK_THROWS_AS(verify_patch(d.model, p, d.property), RepairUnsoundError);
}

TEST_CASE("under-blocking patch is caught as unsafe", "[verify]") {
    Drone d;
    auto r = repair(d.model, d.property);
    Patch p = *r.patch;
    for (const auto& t : p.tracker.states()) {
        auto labels = p.tracker.labels(t);
        labels.block = Formula::bottom();
        p.tracker.set_labels(t, labels);
    }
    auto rep = verify_patch(d.model, p, d.property, {}, false);
    CHECK_FALSE(rep.safe);
    CHECK_FALSE(rep.runs_preserved);
}

TEST_CASE("properties may not request or block", "[verify]") {
    Drone d;
    auto pushy = object("object P { sync(request = v >= 1); }", d.vars);
    auto blocking = object("object P { loop { sync(waitfor = true, block = h >= 3); } }", d.vars);
    CHECK_THROWS_AS(check_safety(d.model, pushy), InvalidPropertyError);
    CHECK_THROWS_AS(repair(d.model, blocking), InvalidPropertyError);
}

TEST_CASE("violation at the initial state cannot be repaired", "[verify]") {
    Drone d;
    auto doomed = object("object P { state Bad: sync(waitfor = true); mark bad; }", d.vars);
    CHECK(check_safety(d.model, doomed).verdict == Verdict::BadReached);
    CHECK(check_safety(d.model, doomed).trace.steps.empty());
    CHECK_THROWS_AS(repair(d.model, doomed), UnrepairableError);
}
