#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rsbm/extract.hpp"
#include "rsbm/script.hpp"
#include "rsbm/solver.hpp"

namespace rsbm {

enum class Policy { FirstModel, SeededRandomCell };

inline const char* to_string(Policy p) { return p == Policy::FirstModel ? "first" : "random"; }

inline Policy parse_policy(const std::string& s) {
    if (s == "first") {
        return Policy::FirstModel;
    }
    if (s == "random") {
        return Policy::SeededRandomCell;
    }
    throw std::invalid_argument("unknown policy '" + s + "' (expected 'first' or 'random')");
}

struct ExecutionConfig {
    std::size_t max_steps = 100;
    std::uint64_t seed = 0;
    Policy policy = Policy::FirstModel;

    void validate() const {
        if (max_steps < 1) {
            throw std::invalid_argument("max steps must be at least 1");
        }
    }
};

struct Declaration {
    Formula request = Formula::bottom();
    Formula block = Formula::bottom();
};

struct LogEntry {
    std::size_t step = 0;
    Assignment assignment;
    std::vector<std::string> woke;
};

enum class StopReason { MaxSteps, Deadlock, AllEnded };

inline const char* to_string(StopReason r) {
    switch (r) {
    case StopReason::MaxSteps: return "max-steps";
    case StopReason::Deadlock: return "deadlock";
    case StopReason::AllEnded: return "all-ended";
    }
    return "?";
}

struct EventLog {
    std::vector<LogEntry> entries;
    StopReason stop = StopReason::MaxSteps;
};

inline Formula selection_formula(const std::vector<Declaration>& decls) {
    std::vector<Formula> req;
    std::vector<Formula> blk;
    for (const auto& d : decls) {
        req.push_back(d.request);
        blk.push_back(d.block);
    }
    return conj({disj(req), neg(disj(blk))});
}

/// An assignment requested by someone and blocked by nobody, or nothing on
/// deadlock.
inline std::optional<Assignment> select_event(const std::vector<Declaration>& decls, const VarSet& vars,
                                              Policy policy, std::mt19937_64& rng) {
    Formula sel = selection_formula(decls);
    if (policy == Policy::FirstModel) {
        auto r = check_sat(sel, vars);
        return r.sat ? std::optional<Assignment>(r.model) : std::nullopt;
    }
    if (!is_sat(sel, vars)) {
        return std::nullopt;
    }
    std::set<LinearAtom> raw;
    collect_atoms(sel, raw);
    std::set<LinearAtom> bases;
    for (const auto& a : raw) {
        bases.insert(a.base());
    }
    std::vector<LinearAtom> atoms(bases.begin(), bases.end());
    // Fisher-Yates on raw engine output keeps runs identical across standard libraries.
    for (std::size_t i = atoms.size(); i > 1; --i) {
        std::swap(atoms[i - 1], atoms[rng() % i]);
    }
    Formula cell = sel;
    for (const auto& a : atoms) {
        bool positive = (rng() & 1U) != 0;
        Formula lit = Formula::atom(positive ? a : a.negated());
        Formula tried = conj({cell, lit});
        if (is_sat(tried, vars)) {
            cell = tried;
        } else {
            cell = conj({cell, Formula::atom(positive ? a.negated() : a)});
        }
    }
    auto r = check_sat(cell, vars);
    return r.model;
}

namespace detail {

struct RunningObject {
    const ModelObject* object;
    std::variant<ScriptState, StateId> at;

    [[nodiscard]] StateLabels labels() const {
        if (const auto* s = object->script()) {
            return labels_at(*s, std::get<ScriptState>(at));
        }
        return object->graph()->labels(std::get<StateId>(at));
    }

    [[nodiscard]] bool ended() const {
        const auto* s = object->script();
        return s != nullptr && s->program().at(std::get<ScriptState>(at).pc).op == Instr::Op::End;
    }

    bool step(const Assignment& a) {
        if (const auto* s = object->script()) {
            bool woke = false;
            at = step_script(*s, std::get<ScriptState>(at), a, &woke);
            return woke;
        }
        const auto* g = object->graph();
        const StateId& q = std::get<StateId>(at);
        const auto& l = g->labels(q);
        bool woke = evaluate(l.request, a) || evaluate(l.waitfor, a);
        at = g->step(q, a);
        return woke;
    }
};

} // namespace detail

/// Executes the model directly: each step selects an event from the current
/// declarations and broadcasts it to every object.
inline EventLog run(const Model& m, const ExecutionConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::vector<detail::RunningObject> objs;
    for (const auto& o : m.objects()) {
        if (const auto* s = o.script()) {
            objs.push_back({&o, initial_state(*s)});
        } else {
            objs.push_back({&o, o.graph()->initial()});
        }
    }
    EventLog log;
    for (std::size_t step = 1; step <= cfg.max_steps; ++step) {
        if (!objs.empty() && std::all_of(objs.begin(), objs.end(), [](const auto& o) { return o.ended(); })) {
            log.stop = StopReason::AllEnded;
            return log;
        }
        std::vector<Declaration> decls;
        for (const auto& o : objs) {
            auto l = o.labels();
            decls.push_back({l.request, l.block});
        }
        auto a = select_event(decls, m.vars(), cfg.policy, rng);
        if (!a) {
            log.stop = StopReason::Deadlock;
            return log;
        }
        LogEntry entry{step, *a, {}};
        for (auto& o : objs) {
            if (o.step(*a)) {
                entry.woke.push_back(o.object->name);
            }
        }
        log.entries.push_back(std::move(entry));
    }
    log.stop = StopReason::MaxSteps;
    return log;
}

} // namespace rsbm
