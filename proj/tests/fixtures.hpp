// Model fixtures shared by the test binaries.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rsbm/rsbm.hpp"

#ifndef RSBM_MODELS_DIR
#error "RSBM_MODELS_DIR must point at the models/ directory"
#endif

namespace rsbm::testing {

inline std::string model_path(const std::string& file) { return std::string(RSBM_MODELS_DIR) + "/" + file; }

inline std::string read_model_text(const std::string& file) {
    std::ifstream in(model_path(file));
    if (!in) {
        throw std::runtime_error("missing fixture " + file);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Model load_model(const std::string& file) { return parse_model(read_model_text(file)); }

inline const std::vector<std::string>& fixture_files() {
    static const std::vector<std::string> files = {"drone.sbm", "watertap.sbm", "interval.sbm", "idle.sbm"};
    return files;
}

/// The drone with its safety property split off.
struct Drone {
    Model full = load_model("drone.sbm");
    Model model = full.without("Property");
    const ScenarioScript& property = *full.at("Property").script();
    const VarSet& vars = full.vars();
};

inline Formula b(const char* var, Relation rel, long c) { return Formula::bound(var, rel, c); }

/// Hard limits blocked by Objects 1 and 2.
inline Formula drone_limits() {
    using R = Relation;
    return b("h", R::Le, -20) || b("h", R::Ge, 20) || b("v", R::Le, -5) || b("v", R::Ge, 5);
}

/// A sharp turn: |v| >= 4 or |h| >= 18.
inline Formula sharp_turn() {
    using R = Relation;
    return b("v", R::Ge, 4) || b("v", R::Le, -4) || b("h", R::Ge, 18) || b("h", R::Le, -18);
}

/// Water tap as classic event-based objects.
inline const std::vector<std::string>& water_events() {
    static const std::vector<std::string> events = {"WaterLow", "AddHot", "AddCold"};
    return events;
}

inline DiscreteGraph add_water(const std::string& name, const std::string& event) {
    DiscreteGraph d;
    d.name = name;
    d.states = {{"w0", {}, {"WaterLow"}, {}, false},
                {"a1", {event}, {}, {}, false},
                {"a2", {event}, {}, {}, false},
                {"a3", {event}, {}, {}, false}};
    d.edges = {{"w0", "WaterLow", "a1"}, {"a1", event, "a2"}, {"a2", event, "a3"}, {"a3", event, "w0"}};
    return d;
}

inline DiscreteGraph stability() {
    DiscreteGraph d;
    d.name = "Stability";
    d.states = {{"hot", {}, {"AddHot"}, {"AddCold"}, false}, {"cold", {}, {"AddCold"}, {"AddHot"}, false}};
    d.edges = {{"hot", "AddHot", "cold"}, {"cold", "AddCold", "hot"}};
    return d;
}

inline DiscreteGraph water_sensor() {
    DiscreteGraph d;
    d.name = "WaterSensor";
    d.states = {{"low", {"WaterLow"}, {}, {}, false}, {"idle", {}, {}, {}, false}};
    d.edges = {{"low", "WaterLow", "idle"}};
    return d;
}

inline Model encoded_water_tap(bool with_stability) {
    Model m(discrete_vars());
    m.add(encode_discrete(water_events(), water_sensor()));
    m.add(encode_discrete(water_events(), add_water("AddHotWater", "AddHot")));
    m.add(encode_discrete(water_events(), add_water("AddColdWater", "AddCold")));
    if (with_stability) {
        m.add(encode_discrete(water_events(), stability()));
    }
    return m;
}

} // namespace rsbm::testing
