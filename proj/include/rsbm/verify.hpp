#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rsbm/compose.hpp"
#include "rsbm/dsl/emit.hpp"
#include "rsbm/dsl/parser.hpp"
#include "rsbm/extract.hpp"
#include "rsbm/simplify.hpp"
#include "rsbm/solver.hpp"

namespace rsbm {

/// Composite states that are bad or forced into badness.
struct BadSet {
    std::set<StateId> states;

    [[nodiscard]] bool contains(const StateId& q) const { return states.count(q) != 0; }
};

struct SafetyResult {
    Verdict verdict = Verdict::Safe;
    Trace trace; ///< Shortest path to a bad state when `verdict` is BadReached.

    [[nodiscard]] bool safe() const { return verdict == Verdict::Safe; }
};

inline void validate_property(const ScenarioScript& property) {
    for (const auto& ins : property.program()) {
        if (ins.op != Instr::Op::Sync) {
            continue;
        }
        if (!ins.request.is_false() || !ins.block.is_false()) {
            throw InvalidPropertyError("property '" + property.name() + "' must neither request nor block (state '" +
                                       ins.name + "')");
        }
    }
}

/// Model composed with its property, as a raw reachable product.
inline ObjectGraph property_product(const Model& m, const ScenarioScript& property, const ComposeOptions& opts = {}) {
    validate_property(property);
    ObjectGraph prop = extract_graph(property, m.vars(), opts.extract);
    if (opts.simplify) {
        prop = simplify_graph(prop, m.vars());
    }
    if (m.objects().empty()) {
        return materialize_stutter(prop, m.vars());
    }
    return compose(compose_all(m, opts), prop, m.vars());
}

namespace detail {

/// Execution edges of `q` sorted by target name, then guard text.
inline std::vector<Edge> sorted_out(const ObjectGraph& g, const StateId& q) {
    auto out = g.out_edges(q);
    std::stable_sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
        if (a.to != b.to) {
            return a.to < b.to;
        }
        return to_sexpr(a.guard) < to_sexpr(b.guard);
    });
    return out;
}

} // namespace detail

/// Breadth-first search over an execution graph for a marked state.
inline SafetyResult find_bad_path(const ObjectGraph& exec, const VarSet& vars) {
    SafetyResult r;
    r.trace.initial = exec.initial();
    std::map<StateId, std::optional<Edge>> parent{{exec.initial(), std::nullopt}};
    std::deque<StateId> work{exec.initial()};
    std::optional<StateId> hit;
    if (exec.is_bad(exec.initial())) {
        hit = exec.initial();
    }
    while (!work.empty() && !hit) {
        StateId q = work.front();
        work.pop_front();
        for (const auto& e : detail::sorted_out(exec, q)) {
            if (parent.count(e.to) != 0) {
                continue;
            }
            parent.emplace(e.to, e);
            if (exec.is_bad(e.to)) {
                hit = e.to;
                break;
            }
            work.push_back(e.to);
        }
    }
    if (!hit) {
        return r;
    }
    std::vector<Edge> path;
    for (StateId q = *hit; parent.at(q).has_value(); q = parent.at(q)->from) {
        path.push_back(*parent.at(q));
    }
    std::reverse(path.begin(), path.end());
    for (const auto& e : path) {
        auto model = check_sat(e.guard, vars);
        if (!model.sat || !evaluate(e.guard, model.model)) {
            throw std::logic_error("unsatisfiable execution edge " + e.from + " -> " + e.to);
        }
        r.trace.steps.push_back(TraceStep{e.to, model.model});
    }
    r.verdict = Verdict::BadReached;
    r.trace.verdict = Verdict::BadReached;
    return r;
}

inline SafetyResult check_safety(const Model& m, const ScenarioScript& property, const ComposeOptions& opts = {}) {
    ObjectGraph product = property_product(m, property, opts);
    return find_bad_path(execution_graph(product, m.vars()), m.vars());
}

/// Reachable states (over execution steps) where nothing can be triggered.
inline std::set<StateId> find_deadlocks(const ObjectGraph& g, const VarSet& vars) {
    ObjectGraph exec = execution_graph(g, vars);
    std::set<StateId> out;
    for (const auto& q : exec.states()) {
        if (!is_sat(enabled_guard(exec, q), vars)) {
            out.insert(q);
        }
    }
    return out;
}

/// Least set containing `initial_bad` and every state whose execution steps
/// all lead into the set. Deadlocked states have no steps and are left out.
inline BadSet compute_bad_attractor(const ObjectGraph& g, const std::set<StateId>& initial_bad, const VarSet& vars) {
    ObjectGraph exec = execution_graph(g, vars);
    BadSet b;
    for (const auto& q : initial_bad) {
        if (!g.has_state(q)) {
            throw GraphError("unknown bad state '" + q + "'");
        }
        b.states.insert(q);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& q : exec.states()) {
            if (b.contains(q)) {
                continue;
            }
            auto out = exec.out_edges(q);
            if (out.empty()) {
                continue;
            }
            if (std::all_of(out.begin(), out.end(), [&](const Edge& e) { return b.contains(e.to); })) {
                b.states.insert(q);
                changed = true;
            }
        }
    }
    if (b.contains(g.initial())) {
        throw UnrepairableError("model is inherently violating: the initial state '" + g.initial() +
                                "' is forced into a bad state");
    }
    return b;
}

/// Marked states reachable by execution steps.
inline std::set<StateId> reachable_bad(const ObjectGraph& g, const VarSet& vars) {
    ObjectGraph exec = execution_graph(g, vars);
    return std::set<StateId>(exec.bad().begin(), exec.bad().end());
}

struct Patch {
    ObjectGraph tracker;                        ///< Patch object; labels carry waitfor and block.
    std::map<StateId, Formula> block_at;        ///< Tracker state -> blocked assignments.
    std::map<StateId, StateId> tracks;          ///< Tracker state -> composite state.
    std::vector<Edge> cut;                      ///< Composite edges into the bad set.
    std::vector<StateId> new_deadlocks;         ///< Tracker states left with nothing enabled.
    BadSet bad;

    [[nodiscard]] bool identity() const { return cut.empty(); }
};

/// `f` shrunk while keeping `f && care` unchanged.
inline Formula simplify_within(const Formula& f, const Formula& care, const VarSet& vars) {
    Formula cur = canonicalize(f);
    Formula target = conj({cur, care});
    if (!is_sat(target, vars)) {
        return Formula::bottom();
    }
    if (entails(care, cur, vars)) {
        return Formula::top();
    }
    bool changed = true;
    while (changed) {
        changed = false;
        std::size_t n = detail::node_count(cur);
        for (std::size_t pos = 0; pos < n && !changed; ++pos) {
            for (const Formula& rep : {Formula::top(), Formula::bottom()}) {
                std::size_t counter = 0;
                Formula cand = canonicalize(detail::replace_at(cur, pos, rep, counter));
                if (cand == cur || detail::node_count(cand) >= n) {
                    continue;
                }
                if (equivalent(conj({cand, care}), target, vars)) {
                    cur = cand;
                    changed = true;
                    break;
                }
            }
        }
    }
    return cur;
}

inline Patch synthesize_patch(const ObjectGraph& g, const BadSet& bad, const VarSet& vars,
                              const std::string& name = "Patch") {
    if (bad.contains(g.initial())) {
        throw UnrepairableError("initial state '" + g.initial() + "' is in the bad set");
    }
    ObjectGraph exec = execution_graph(g, vars);
    Patch p;
    p.bad = bad;
    p.tracker = ObjectGraph(name);

    std::map<StateId, StateId> tracker_of;
    std::vector<StateId> order;
    std::deque<StateId> work{exec.initial()};
    tracker_of[exec.initial()] = "t0";
    while (!work.empty()) {
        StateId q = work.front();
        work.pop_front();
        order.push_back(q);
        for (const auto& e : detail::sorted_out(exec, q)) {
            if (bad.contains(e.to) || tracker_of.count(e.to) != 0) {
                continue;
            }
            tracker_of[e.to] = "t" + std::to_string(tracker_of.size());
            work.push_back(e.to);
        }
    }
    std::sort(order.begin(), order.end(), [&](const StateId& a, const StateId& b) {
        return std::stoul(tracker_of.at(a).substr(1)) < std::stoul(tracker_of.at(b).substr(1));
    });
    for (const auto& q : order) {
        p.tracker.add_state(tracker_of.at(q));
        p.tracks[tracker_of.at(q)] = q;
    }

    for (const auto& q : order) {
        const StateId& t = tracker_of.at(q);
        Formula en = enabled_guard(exec, q);
        std::vector<StateId> targets;
        std::map<StateId, std::vector<Formula>> guards;
        std::vector<Formula> blocked;
        for (const auto& e : exec.out_edges(q)) {
            if (bad.contains(e.to)) {
                blocked.push_back(e.guard);
                p.cut.push_back(e);
                continue;
            }
            if (guards.count(e.to) == 0) {
                targets.push_back(e.to);
            }
            guards[e.to].push_back(e.guard);
        }
        // Guards are only consulted where the composite could fire, so they
        // are simplified relative to the enabled region.
        std::vector<std::pair<StateId, Formula>> exact;
        std::vector<std::pair<StateId, Formula>> small;
        for (const auto& to : targets) {
            Formula merged = disj(guards[to]);
            exact.emplace_back(to, merged);
            small.emplace_back(to, simplify_within(merged, en, vars));
        }
        bool disjoint = true;
        for (std::size_t i = 0; i < small.size() && disjoint; ++i) {
            for (std::size_t j = i + 1; j < small.size() && disjoint; ++j) {
                disjoint = !is_sat(conj({small[i].second, small[j].second}), vars);
            }
        }
        const auto& chosen = disjoint ? small : exact;
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            for (std::size_t j = i + 1; j < chosen.size(); ++j) {
                if (is_sat(conj({chosen[i].second, chosen[j].second}), vars)) {
                    throw Error("patch tracker is nondeterministic at '" + q + "'");
                }
            }
        }
        Formula block = simplify_within(disj(blocked), en, vars);
        std::vector<Formula> wake;
        for (const auto& [to, guard] : chosen) {
            p.tracker.add_edge(t, guard, tracker_of.at(to));
            wake.push_back(guard);
        }
        p.block_at[t] = block;
        Formula waitfor = disjoint ? simplify_within(disj(wake), en, vars) : disj(wake);
        p.tracker.set_labels(t, StateLabels{Formula::bottom(), block, waitfor});
        if (!is_sat(conj({en, neg(block)}), vars) && is_sat(en, vars)) {
            p.new_deadlocks.push_back(t);
        }
    }
    return p;
}

/// Model with the patch appended as a scripted object, via its emitted text.
inline Model apply_patch(const Model& m, const Patch& patch) {
    Model out = m;
    for (auto& s : parse_objects(emit_script(patch.tracker, m.vars()), m.vars())) {
        out.add(std::move(s));
    }
    return out;
}

struct VerifyReport {
    bool safe = false;             ///< (a) patched model satisfies the property.
    bool no_new_deadlocks = false; ///< (b)
    bool runs_preserved = false;   ///< (c) non-violating runs kept, nothing added.
    std::vector<std::string> witnesses;

    [[nodiscard]] bool ok() const { return safe && no_new_deadlocks && runs_preserved; }
};

/// Checks a patched model against the original one. The run comparison walks
/// both execution graphs in lockstep, so every pair of states reachable by a
/// common run is examined; the bad set refers to states of the original.
inline VerifyReport compare_patched(const Model& original, const Model& patched, const ScenarioScript& property,
                                    const BadSet& bad, const ComposeOptions& opts = {}) {
    const VarSet& vars = original.vars();
    VerifyReport r;
    ObjectGraph gm = execution_graph(property_product(original, property, opts), vars);
    ObjectGraph gp = execution_graph(property_product(patched, property, opts), vars);
    auto safety = find_bad_path(gp, vars);
    r.safe = safety.safe();
    if (!r.safe) {
        std::ostringstream os;
        os << "patched model reaches '" << safety.trace.steps.back().state << "'";
        r.witnesses.push_back(os.str());
    }
    r.no_new_deadlocks = true;
    r.runs_preserved = true;

    using Pair = std::pair<StateId, StateId>;
    std::set<Pair> seen{{gm.initial(), gp.initial()}};
    std::deque<Pair> work{{gm.initial(), gp.initial()}};
    while (!work.empty()) {
        auto [qm, qp] = work.front();
        work.pop_front();
        auto om = gm.out_edges(qm);
        auto op = gp.out_edges(qp);
        std::vector<Formula> all_m, all_p;
        for (const auto& e : om) {
            all_m.push_back(e.guard);
        }
        for (const auto& e : op) {
            all_p.push_back(e.guard);
        }
        Formula any_m = disj(all_m);
        Formula any_p = disj(all_p);
        if (op.empty() && !om.empty()) {
            r.no_new_deadlocks = false;
            r.witnesses.push_back("new deadlock at '" + qp + "' (original '" + qm + "')");
        }
        for (const auto& e : op) {
            auto extra = check_sat(conj({e.guard, neg(any_m)}), vars);
            if (extra.sat) {
                r.runs_preserved = false;
                r.witnesses.push_back("patched model triggers " + to_string(extra.model) + " at '" + qp +
                                      "', which the original cannot at '" + qm + "'");
            }
        }
        for (const auto& e : om) {
            auto lost = check_sat(conj({e.guard, neg(any_p)}), vars);
            if (lost.sat && !bad.contains(e.to)) {
                r.runs_preserved = false;
                r.witnesses.push_back("patched model removes the non-violating step " + to_string(lost.model) +
                                      " from '" + qm + "' to '" + e.to + "'");
            }
            for (const auto& f : op) {
                Formula both = conj({e.guard, f.guard});
                if (!is_sat(both, vars)) {
                    continue;
                }
                if (bad.contains(e.to)) {
                    r.runs_preserved = false;
                    r.witnesses.push_back("patched model keeps the violating step from '" + qm + "' to '" + e.to +
                                          "'");
                    continue;
                }
                Pair next{e.to, f.to};
                if (seen.insert(next).second) {
                    work.push_back(next);
                }
            }
        }
    }
    return r;
}

inline VerifyReport verify_patch(const Model& m, const Patch& patch, const ScenarioScript& property,
                                 const ComposeOptions& opts = {}, bool throw_on_failure = true) {
    Model patched = apply_patch(m, patch);
    VerifyReport r = compare_patched(m, patched, property, patch.bad, opts);
    if (!r.ok() && throw_on_failure) {
        std::string msg = "patch is unsound";
        for (const auto& w : r.witnesses) {
            msg += "; " + w;
        }
        throw RepairUnsoundError(msg);
    }
    return r;
}

struct RepairResult {
    SafetyResult check;
    std::optional<Patch> patch;
};

/// Model check, then (on a violation) compute the attractor and a patch.
inline RepairResult repair(const Model& m, const ScenarioScript& property, const ComposeOptions& opts = {}) {
    RepairResult r;
    ObjectGraph product = property_product(m, property, opts);
    r.check = find_bad_path(execution_graph(product, m.vars()), m.vars());
    BadSet bad = compute_bad_attractor(product, reachable_bad(product, m.vars()), m.vars());
    r.patch = synthesize_patch(product, bad, m.vars());
    return r;
}

} // namespace rsbm
