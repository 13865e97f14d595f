#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "rsbm/dsl/predicates.hpp"
#include "rsbm/object_graph.hpp"
#include "rsbm/script.hpp"
#include "rsbm/solver.hpp"

namespace rsbm {

/// A script paused at a sync (or at its end). The program counter alone
/// identifies the state because conditions only read the last assignment.
struct ScriptState {
    std::size_t pc = 0;

    friend bool operator==(const ScriptState&, const ScriptState&) = default;
    friend auto operator<=>(const ScriptState&, const ScriptState&) = default;
};

inline ScriptState initial_state(const ScenarioScript& s) { return ScriptState{s.initial_pc()}; }

inline StateLabels labels_at(const ScenarioScript& s, ScriptState st) {
    const auto& ins = s.program().at(st.pc);
    if (ins.op != Instr::Op::Sync) {
        return {};
    }
    return StateLabels{ins.request, ins.block, ins.waitfor};
}

inline bool wakes(const ScenarioScript& s, ScriptState st, const Assignment& a) {
    const auto& ins = s.program().at(st.pc);
    if (ins.op != Instr::Op::Sync) {
        return false;
    }
    return evaluate(ins.request, a) || evaluate(ins.waitfor, a);
}

/// Triggers `a` at `st`. An object that neither requested nor waited for
/// `a` stays where it is.
inline ScriptState step_script(const ScenarioScript& s, ScriptState st, const Assignment& a, bool* woke = nullptr) {
    bool w = wakes(s, st, a);
    if (woke != nullptr) {
        *woke = w;
    }
    if (!w) {
        return st;
    }
    return ScriptState{s.settle(st.pc + 1, &a)};
}

struct ExtractOptions {
    std::size_t max_predicates = 16;
};

struct ExtractStats {
    std::size_t predicates = 0;
    std::map<StateId, std::size_t> cells_examined;
    std::map<StateId, std::size_t> cells_sat;
};

/// Sign cell number `bits` over `atoms`: bit i set asserts atom i, clear asserts its negation.
inline Formula sign_cell(const std::vector<LinearAtom>& atoms, std::size_t bits) {
    std::vector<Formula> lits;
    lits.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        lits.push_back(Formula::atom((bits >> i) & 1U ? atoms[i] : atoms[i].negated()));
    }
    return conj(std::move(lits));
}

inline ObjectGraph extract_graph(const ScenarioScript& s, const VarSet& vars, const ExtractOptions& opts = {},
                                 ExtractStats* stats = nullptr) {
    PredicateSet preds = collect_predicates(s);
    if (preds.size() > opts.max_predicates) {
        throw ExtractionError("object '" + s.name() + "' has " + std::to_string(preds.size()) +
                              " predicates, above the limit of " + std::to_string(opts.max_predicates) +
                              "; reduce the number of distinct predicates");
    }
    if (stats != nullptr) {
        stats->predicates = preds.size();
    }
    const std::size_t ncells = std::size_t{1} << preds.size();

    // Cells do not depend on the state, so solve each once.
    std::vector<Formula> cells;
    std::vector<std::optional<Assignment>> witnesses;
    cells.reserve(ncells);
    for (std::size_t bits = 0; bits < ncells; ++bits) {
        cells.push_back(sign_cell(preds.atoms, bits));
        auto r = check_sat(cells.back(), vars);
        witnesses.push_back(r.sat ? std::optional<Assignment>(r.model) : std::nullopt);
    }

    ObjectGraph g(s.name());
    ScriptState q0 = initial_state(s);
    std::deque<ScriptState> work{q0};
    std::map<ScriptState, StateId> seen{{q0, s.state_name(q0.pc)}};
    g.add_state(s.state_name(q0.pc), labels_at(s, q0));
    if (s.program().at(q0.pc).bad) {
        g.mark_bad(s.state_name(q0.pc));
    }
    while (!work.empty()) {
        ScriptState q = work.front();
        work.pop_front();
        const StateId& from = seen.at(q);
        for (std::size_t bits = 0; bits < ncells; ++bits) {
            if (stats != nullptr) {
                ++stats->cells_examined[from];
            }
            if (!witnesses[bits]) {
                continue;
            }
            if (stats != nullptr) {
                ++stats->cells_sat[from];
            }
            bool woke = false;
            ScriptState next = step_script(s, q, *witnesses[bits], &woke);
            if (!woke) {
                continue;
            }
            auto it = seen.find(next);
            if (it == seen.end()) {
                StateId id = s.state_name(next.pc);
                it = seen.emplace(next, id).first;
                g.add_state(id, labels_at(s, next));
                if (s.program().at(next.pc).bad) {
                    g.mark_bad(id);
                }
                work.push_back(next);
            }
            g.add_edge(from, cells[bits], it->second);
        }
    }
    return g;
}

/// Extracted graphs of every object, in declaration order.
inline std::vector<ObjectGraph> extract_all(const Model& m, const ExtractOptions& opts = {}) {
    std::vector<ObjectGraph> out;
    for (const auto& o : m.objects()) {
        if (const auto* s = o.script()) {
            out.push_back(extract_graph(*s, m.vars(), opts));
        } else {
            out.push_back(*o.graph());
        }
    }
    return out;
}

/// Replaces each implicit stutter with an explicit self-loop (when satisfiable).
inline ObjectGraph materialize_stutter(const ObjectGraph& g, const VarSet& vars) {
    if (g.total()) {
        return g;
    }
    ObjectGraph out(g.name());
    for (const auto& q : g.states()) {
        out.add_state(q, g.labels(q));
        if (g.is_bad(q)) {
            out.mark_bad(q);
        }
    }
    out.set_initial(g.initial());
    for (const auto& q : g.states()) {
        for (const auto& e : g.out_edges(q)) {
            out.add_edge(e.from, e.guard, e.to);
        }
        Formula rest = g.stutter_guard(q);
        if (is_sat(rest, vars)) {
            out.add_edge(q, rest, q);
        }
    }
    out.set_total(true);
    return out;
}

} // namespace rsbm
