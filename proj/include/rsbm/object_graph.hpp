#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rsbm/error.hpp"
#include "rsbm/formula.hpp"

namespace rsbm {

using StateId = std::string;

/// Separator for composite state names, e.g. "s1⊗p0".
inline constexpr const char* kProductSeparator = "\xE2\x8A\x97";

struct StateLabels {
    Formula request = Formula::bottom();
    Formula block = Formula::bottom();
    Formula waitfor = Formula::bottom();
};

struct Edge {
    StateId from;
    Formula guard;
    StateId to;
};

/// Explicit transition graph of a scenario object: guard-labelled edges plus
/// per-state request/block/waitfor formulas. Assignments covered by no
/// explicit out-edge leave the state unchanged (the stutter remainder).
class ObjectGraph {
public:
    ObjectGraph() = default;
    explicit ObjectGraph(std::string name) : name_(std::move(name)) {}

    [[nodiscard]] const std::string& name() const { return name_; }
    void rename(std::string name) { name_ = std::move(name); }

    /// Adds a state; the first state added becomes the initial one.
    void add_state(const StateId& id, StateLabels labels = {}) {
        if (labels_.count(id) != 0) {
            throw GraphError("duplicate state '" + id + "'");
        }
        labels_.emplace(id, std::move(labels));
        states_.push_back(id);
        if (states_.size() == 1) {
            initial_ = id;
        }
    }

    void set_initial(const StateId& id) {
        require_state(id);
        initial_ = id;
    }

    void set_labels(const StateId& id, StateLabels labels) {
        require_state(id);
        labels_[id] = std::move(labels);
    }

    void add_edge(const StateId& from, Formula guard, const StateId& to) {
        require_state(from);
        require_state(to);
        out_[from].push_back(edges_.size());
        edges_.push_back(Edge{from, std::move(guard), to});
    }

    void mark_bad(const StateId& id) {
        require_state(id);
        bad_.insert(id);
    }

    [[nodiscard]] bool has_state(const StateId& id) const { return labels_.count(id) != 0; }
    [[nodiscard]] const std::vector<StateId>& states() const { return states_; }
    [[nodiscard]] const StateId& initial() const {
        if (states_.empty()) {
            throw GraphError("graph '" + name_ + "' has no states");
        }
        return initial_;
    }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const std::set<StateId>& bad() const { return bad_; }
    [[nodiscard]] bool is_bad(const StateId& id) const { return bad_.count(id) != 0; }

    [[nodiscard]] const StateLabels& labels(const StateId& id) const {
        auto it = labels_.find(id);
        if (it == labels_.end()) {
            throw GraphError("unknown state '" + id + "' in graph '" + name_ + "'");
        }
        return it->second;
    }

    [[nodiscard]] std::vector<Edge> out_edges(const StateId& id) const {
        require_state(id);
        std::vector<Edge> out;
        auto it = out_.find(id);
        if (it != out_.end()) {
            for (auto i : it->second) {
                out.push_back(edges_[i]);
            }
        }
        return out;
    }

    /// Marks that explicit edges cover every assignment at every state, so
    /// no stutter remainder exists.
    void set_total(bool total) { total_ = total; }
    [[nodiscard]] bool total() const { return total_; }

    /// Assignments for which the state has no explicit out-edge.
    [[nodiscard]] Formula stutter_guard(const StateId& id) const {
        if (total_) {
            require_state(id);
            return Formula::bottom();
        }
        std::vector<Formula> guards;
        for (const auto& e : out_edges(id)) {
            guards.push_back(e.guard);
        }
        return neg(Formula::disjunction(std::move(guards)));
    }

    /// Successor under a concrete assignment: the first matching explicit
    /// edge, otherwise the state itself. `moved` reports whether an explicit
    /// edge fired.
    [[nodiscard]] StateId step(const StateId& id, const Assignment& a, bool* moved = nullptr) const {
        for (const auto& e : out_edges(id)) {
            if (evaluate(e.guard, a)) {
                if (moved != nullptr) {
                    *moved = true;
                }
                return e.to;
            }
        }
        if (moved != nullptr) {
            *moved = false;
        }
        return id;
    }

private:
    void require_state(const StateId& id) const {
        if (labels_.count(id) == 0) {
            throw GraphError("unknown state '" + id + "' in graph '" + name_ + "'");
        }
    }

    std::string name_;
    std::vector<StateId> states_;
    std::map<StateId, StateLabels> labels_;
    StateId initial_;
    std::vector<Edge> edges_;
    std::map<StateId, std::vector<std::size_t>> out_;
    std::set<StateId> bad_;
    bool total_ = false;
};

/// Composite enabledness at a state: request and not block.
inline Formula enabled_guard(const ObjectGraph& g, const StateId& q) {
    const auto& l = g.labels(q);
    return canonicalize(Formula::conjunction({l.request, Formula::negation(l.block)}));
}

enum class Verdict { Safe, BadReached, Deadlock };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Safe: return "safe";
    case Verdict::BadReached: return "bad-reached";
    case Verdict::Deadlock: return "deadlock";
    }
    return "?";
}

struct TraceStep {
    StateId state; ///< Composite state entered after triggering `assignment`.
    Assignment assignment;
};

struct Trace {
    StateId initial;
    std::vector<TraceStep> steps;
    Verdict verdict = Verdict::Safe;
};

} // namespace rsbm
