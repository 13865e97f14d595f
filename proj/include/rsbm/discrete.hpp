#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rsbm/object_graph.hpp"

namespace rsbm {

/// Classic scenario object over named events.
struct DiscreteGraph {
    struct State {
        std::string name;
        std::set<std::string> request;
        std::set<std::string> waitfor;
        std::set<std::string> block;
        bool bad = false;
    };
    struct Transition {
        std::string from;
        std::string event;
        std::string to;
    };

    std::string name;
    std::vector<State> states; ///< The first state is initial.
    std::vector<Transition> edges;

    [[nodiscard]] const State& state(const std::string& id) const {
        for (const auto& s : states) {
            if (s.name == id) {
                return s;
            }
        }
        throw GraphError("unknown state '" + id + "' in '" + name + "'");
    }

    /// Successor on `event`: the first matching transition, or stay.
    [[nodiscard]] std::string step(const std::string& from, const std::string& event) const {
        for (const auto& e : edges) {
            if (e.from == from && e.event == event) {
                return e.to;
            }
        }
        return from;
    }
};

inline constexpr const char* kEventVariable = "x";

inline VarSet discrete_vars() { return VarSet{kEventVariable}; }

namespace detail {

inline long event_index(const std::vector<std::string>& events, const std::string& e) {
    auto it = std::find(events.begin(), events.end(), e);
    if (it == events.end()) {
        throw EncodingError("unknown event '" + e + "'");
    }
    return static_cast<long>(it - events.begin());
}

inline Formula event_set(const std::vector<std::string>& events, const std::set<std::string>& set) {
    std::vector<Formula> parts;
    for (const auto& e : set) {
        parts.push_back(Formula::bound(kEventVariable, Relation::Eq, event_index(events, e)));
    }
    return disj(std::move(parts));
}

} // namespace detail

/// Event i becomes the atom x = i; event sets become disjunctions.
inline ObjectGraph encode_discrete(const std::vector<std::string>& events, const DiscreteGraph& d) {
    std::set<std::string> unique(events.begin(), events.end());
    if (unique.size() != events.size()) {
        throw EncodingError("duplicate event names");
    }
    ObjectGraph g(d.name);
    for (const auto& s : d.states) {
        g.add_state(s.name, StateLabels{detail::event_set(events, s.request), detail::event_set(events, s.block),
                                        detail::event_set(events, s.waitfor)});
        if (s.bad) {
            g.mark_bad(s.name);
        }
    }
    for (const auto& e : d.edges) {
        g.add_edge(e.from, Formula::bound(kEventVariable, Relation::Eq, detail::event_index(events, e.event)), e.to);
    }
    return g;
}

/// Event name of an encoded assignment, if it denotes one.
inline std::optional<std::string> decode_event(const std::vector<std::string>& events, const Assignment& a) {
    const Rational& x = a.at(kEventVariable);
    if (x.get_den() != 1 || x < 0 || x >= static_cast<long>(events.size())) {
        return std::nullopt;
    }
    return events[x.get_num().get_si()];
}

} // namespace rsbm
