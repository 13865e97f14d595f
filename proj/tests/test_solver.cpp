#include <catch_amalgamated.hpp>

#include <optional>

#include "generators.hpp"
#include "oracles.hpp"
#include "rsbm/solver.hpp"

using namespace rsbm;
using R = Relation;
using testing::fm_oracle;

namespace {

const VarSet kDrone{"v", "h"};

Formula b(const char* var, R rel, long c) { return Formula::bound(var, rel, c); }

/// Hard limits of the drone's first two objects.
Formula hard_limits() {
    return b("h", R::Le, -20) || b("h", R::Ge, 20) || b("v", R::Le, -5) || b("v", R::Ge, 5);
}

std::optional<Assignment> grid_witness(const Formula& f, const VarSet& vars, long lo, long hi) {
    std::vector<long> cur(vars.size(), lo);
    for (;;) {
        Assignment a;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            a.set(vars.names()[i], Rational(cur[i]));
        }
        if (evaluate(f, a)) {
            return a;
        }
        std::size_t i = 0;
        while (i < cur.size() && cur[i] == hi) {
            cur[i++] = lo;
        }
        if (i == cur.size()) {
            return std::nullopt;
        }
        ++cur[i];
    }
}

} // namespace

TEST_CASE("check_sat finds models for satisfiable queries", "[solver]") {
    auto f = b("v", R::Ge, 2) && b("h", R::Eq, 0);
    auto r = check_sat(f, kDrone);
    REQUIRE(r.sat);
    CHECK(evaluate(f, r.model));
    CHECK(r.model.at("v") >= 2);
    CHECK(r.model.at("h") == 0);
}

TEST_CASE("check_sat detects contradictions", "[solver]") {
    CHECK_FALSE(is_sat(b("x", R::Lt, 5) && b("x", R::Ge, 5), VarSet{"x"}));
    CHECK_FALSE(is_sat(Formula::bottom(), VarSet{"x"}));
    auto sum = Formula::linear({{"x", Rational(1)}, {"y", Rational(1)}}, R::Gt, Rational(3));
    CHECK_FALSE(is_sat(sum && b("x", R::Le, 1) && b("y", R::Le, 2), VarSet{"x", "y"}));
}

TEST_CASE("check_sat model lies in the per-variable interval intersection", "[solver]") {
    auto f = b("h", R::Ge, 18) && b("h", R::Lt, 20) && b("v", R::Gt, -5) && b("v", R::Lt, 5) && b("v", R::Eq, 0);
    auto r = check_sat(f, kDrone);
    REQUIRE(r.sat);
    // Interval oracle: h in [18, 20), v in (-5, 5) intersected with {0}.
    CHECK(r.model.at("h") >= 18);
    CHECK(r.model.at("h") < 20);
    CHECK(r.model.at("v") == 0);
}

TEST_CASE("unconstrained variables are zero and strict bounds are strict", "[solver]") {
    auto r = check_sat(b("x", R::Gt, 5), VarSet{"x", "y"});
    REQUIRE(r.sat);
    CHECK(r.model.at("x") > 5);
    CHECK(r.model.at("y") == 0);

    auto tight = check_sat(b("x", R::Gt, 0) && Formula::atom(LinearAtom::bound("x", R::Lt, make_rational(1, 1000))), VarSet{"x"});
    REQUIRE(tight.sat);
    CHECK(tight.model.at("x") > 0);
    CHECK(tight.model.at("x") < make_rational(1, 1000));
}

TEST_CASE("disequalities are split", "[solver]") {
    VarSet x{"x"};
    auto r = check_sat(b("x", R::Ne, 0) && b("x", R::Ge, 0), x);
    REQUIRE(r.sat);
    CHECK(r.model.at("x") > 0);
    CHECK_FALSE(is_sat(b("x", R::Ne, 0) && b("x", R::Ge, 0) && b("x", R::Le, 0), x));
}

TEST_CASE("entails and equivalent", "[solver]") {
    CHECK(entails(b("h", R::Ge, 18), b("h", R::Ge, 10), kDrone));
    CHECK_FALSE(entails(b("h", R::Ge, 10), b("h", R::Ge, 18), kDrone));

    CHECK(equivalent(b("h", R::Ge, 10) || b("h", R::Ge, 18), b("h", R::Ge, 10), kDrone));
    CHECK(equivalent(Formula::top(), b("h", R::Lt, 0) || b("h", R::Ge, 0), kDrone));
    CHECK(equivalent(b("v", R::Ge, 2) && b("h", R::Eq, 0),
                     b("v", R::Ge, 2) && b("h", R::Le, 0) && b("h", R::Ge, 0), kDrone));
}

TEST_CASE("entailment under the drone block context agrees with a grid oracle", "[solver]") {
    auto f = b("v", R::Ge, 4) && b("h", R::Eq, 0);
    auto g = !b("v", R::Ge, 5);
    auto in_context = f && !hard_limits();

    // Grid oracle on integers v, h in [-25, 25].
    auto plain_witness = grid_witness(f && !g, kDrone, -25, 25);
    auto context_witness = grid_witness(in_context && !g, kDrone, -25, 25);
    REQUIRE(plain_witness.has_value());
    REQUIRE_FALSE(context_witness.has_value());

    CHECK_FALSE(entails(f, g, kDrone));
    CHECK(entails(in_context, g, kDrone));
}

TEST_CASE("equivalence agrees with a grid oracle on a split equality", "[solver]") {
    auto f = b("v", R::Ge, 2) && b("h", R::Eq, 0);
    auto g = b("v", R::Ge, 2) && b("h", R::Le, 0) && b("h", R::Ge, 0);
    auto differ = (f && !g) || (g && !f);
    REQUIRE_FALSE(grid_witness(differ, kDrone, -25, 25).has_value());
    CHECK(equivalent(f, g, kDrone));
}

TEST_CASE("check_sat is deterministic", "[solver]") {
    testing::Gen gen(7);
    for (int i = 0; i < 200; ++i) {
        VarSet vars = testing::vars_xyzw(1 + gen.index(4));
        Formula f = gen.formula(vars, 4);
        auto a = check_sat(f, vars);
        auto c = check_sat(f, vars);
        REQUIRE(a.sat == c.sat);
        REQUIRE(a.model == c.model);
    }
}

TEST_CASE("solver models satisfy random formulas", "[solver][property]") {
    testing::Gen gen(2024);
    int sat = 0;
    for (int i = 0; i < 2000; ++i) {
        VarSet vars = testing::vars_xyzw(1 + gen.index(4));
        Formula f = gen.formula(vars, 6);
        auto r = check_sat(f, vars);
        if (r.sat) {
            ++sat;
            INFO(to_infix(f));
            REQUIRE(r.model.covers(vars));
            REQUIRE(evaluate(f, r.model));
        }
    }
    CHECK(sat > 200);
}

TEST_CASE("conjunction verdicts agree with Fourier-Motzkin", "[solver][property]") {
    testing::Gen gen(99);
    for (int i = 0; i < 500; ++i) {
        VarSet vars = testing::vars_xyzw(1 + gen.index(4));
        std::vector<LinearAtom> atoms;
        std::vector<Formula> parts;
        std::size_t n = 1 + gen.index(8);
        for (std::size_t k = 0; k < n; ++k) {
            Formula a = gen.atom(vars);
            if (a.kind() == Formula::Kind::Atom) {
                atoms.push_back(a.atom());
                parts.push_back(a);
            }
        }
        INFO(to_infix(Formula::conjunction(parts)));
        REQUIRE(is_sat(Formula::conjunction(parts), vars) == fm_oracle(atoms, vars));
    }
}

TEST_CASE("SMT-LIB2 dump declares variables and asserts the query", "[solver]") {
    auto text = to_smtlib2(canonicalize(b("v", R::Ge, 2) && b("h", R::Eq, 0)), kDrone);
    CHECK(text == "(set-logic QF_LRA)\n(declare-fun h () Real)\n(declare-fun v () Real)\n"
                  "(assert (and (= h 0) (>= v 2)))\n(check-sat)\n(get-model)\n");
}
