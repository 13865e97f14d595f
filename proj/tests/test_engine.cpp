#include <catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace rsbm;
using namespace rsbm::testing;
using R = Relation;

TEST_CASE("select_event honors requests and blocks", "[engine]") {
    VarSet vars{"x"};
    std::mt19937_64 rng(1);
    std::vector<Declaration> decls = {{b("x", R::Ge, 1), Formula::bottom()}, {Formula::bottom(), b("x", R::Ge, 3)}};
    for (auto policy : {Policy::FirstModel, Policy::SeededRandomCell}) {
        for (int i = 0; i < 20; ++i) {
            auto a = select_event(decls, vars, policy, rng);
            REQUIRE(a);
            CHECK(a->at("x") >= 1);
            CHECK(a->at("x") < 3);
        }
    }
    decls.push_back({Formula::bottom(), b("x", R::Lt, 3)});
    CHECK_FALSE(select_event(decls, vars, Policy::FirstModel, rng));
    CHECK_FALSE(select_event({}, vars, Policy::SeededRandomCell, rng));
}

TEST_CASE("random cells reach both sides of a split", "[engine]") {
    VarSet vars{"x"};
    std::vector<Declaration> decls = {{b("x", R::Ge, 0) && b("x", R::Lt, 5), Formula::bottom()},
                                      {b("x", R::Gt, 5) && b("x", R::Le, 10), Formula::bottom()},
                                      {Formula::bottom(), b("x", R::Eq, 5)}};
    std::mt19937_64 rng(5);
    std::set<bool> below;
    for (int i = 0; i < 40; ++i) {
        auto a = select_event(decls, vars, Policy::SeededRandomCell, rng);
        REQUIRE(a);
        CHECK(a->at("x") != 5);
        below.insert(a->at("x") < 5);
    }
    CHECK(below.size() == 2);
}

TEST_CASE("drone run climbs then turns within limits", "[engine]") {
    Drone d;
    auto log = run(d.model, ExecutionConfig{5, 0, Policy::FirstModel});
    CHECK(log.stop == StopReason::MaxSteps);
    REQUIRE(log.entries.size() == 5);
    for (std::size_t i = 0; i < log.entries.size(); ++i) {
        CHECK(log.entries[i].step == i + 1);
        CHECK_FALSE(evaluate(drone_limits(), log.entries[i].assignment));
    }
    const auto& first = log.entries[0];
    CHECK(first.assignment.at("h") == 0);
    CHECK(first.assignment.at("v") >= 2);
    CHECK(first.woke == std::vector<std::string>{"Object3"});
    CHECK(log.entries[1].assignment.at("h") >= 10);
    CHECK(log.entries[1].assignment.at("v") == 0);
}

TEST_CASE("runs stop on deadlock and when every object ended", "[engine]") {
    auto empty = run(Model(VarSet{"x"}), ExecutionConfig{});
    CHECK(empty.stop == StopReason::Deadlock);
    CHECK(empty.entries.empty());

    auto ended = run(load_model("idle.sbm"), ExecutionConfig{});
    CHECK(ended.stop == StopReason::AllEnded);

    Model w = load_model("watertap.sbm").without("TwoHot");
    auto tap = run(w, ExecutionConfig{50, 0, Policy::FirstModel});
    CHECK(tap.stop == StopReason::Deadlock);
    REQUIRE(tap.entries.size() == 7);
    std::vector<long> xs;
    for (const auto& e : tap.entries) {
        xs.push_back(e.assignment.at("x").get_num().get_si());
    }
    CHECK(xs == std::vector<long>{0, 1, 2, 1, 2, 1, 2});

    CHECK_THROWS_AS(ExecutionConfig{0}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(parse_policy("greedy"), std::invalid_argument);
}

TEST_CASE("random runs are reproducible from the seed", "[engine]") {
    Model w = load_model("watertap.sbm").without("TwoHot").without("Stability");
    auto fingerprint = [&](std::uint64_t seed) {
        return log_jsonl(run(w, ExecutionConfig{8, seed, Policy::SeededRandomCell}));
    };
    CHECK(fingerprint(11) == fingerprint(11));
    std::set<std::string> distinct;
    for (std::uint64_t s = 1; s <= 6; ++s) {
        distinct.insert(fingerprint(s));
    }
    CHECK(distinct.size() > 1);
}

TEST_CASE("logged runs replay on the composite graph", "[engine]") {
    Model w = load_model("watertap.sbm");
    Drone d;
    for (const Model* m : {&d.model, &w}) {
        auto composite = compose_all(*m);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto log = run(*m, ExecutionConfig{12, seed, Policy::SeededRandomCell});
            StateId q = composite.initial();
            for (const auto& e : log.entries) {
                INFO("seed " << seed << " step " << e.step << " at " << q);
                CHECK(evaluate(enabled_guard(composite, q), e.assignment));
                q = composite.step(q, e.assignment);
            }
            if (log.stop == StopReason::Deadlock) {
                CHECK_FALSE(is_sat(enabled_guard(composite, q), m->vars()));
            }
        }
    }
}

TEST_CASE("graph objects run alongside scripts", "[engine]") {
    Model m = encoded_water_tap(true);
    auto log = run(m, ExecutionConfig{20, 3, Policy::SeededRandomCell});
    CHECK(log.stop == StopReason::Deadlock);
    REQUIRE(log.entries.size() == 7);
    CHECK(decode_event(water_events(), log.entries[0].assignment) == "WaterLow");
    CHECK(log.entries[0].woke ==
          std::vector<std::string>{"WaterSensor", "AddHotWater", "AddColdWater"});
}
