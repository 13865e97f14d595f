#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rsbm/formula.hpp"
#include "rsbm/solver/simplex.hpp"

namespace rsbm {

struct SatResult {
    bool sat = false;
    Assignment model; ///< Total over the queried VarSet when `sat`.

    explicit operator bool() const { return sat; }
};

/// SMT-LIB2 QF_LRA script for `f`, for cross-checking with external solvers.
inline std::string to_smtlib2(const Formula& f, const VarSet& vars) {
    std::string out = "(set-logic QF_LRA)\n";
    for (const auto& v : vars) {
        out += "(declare-fun " + v + " () Real)\n";
    }
    out += "(assert " + to_sexpr(f) + ")\n(check-sat)\n(get-model)\n";
    return out;
}

namespace solver {

/// Feasibility of a conjunction of atoms; disequalities are split into
/// `<` then `>`.
inline std::optional<Assignment> theory_check(const VarSet& vars, const std::vector<LinearAtom>& literals) {
    auto is_ne = [](const LinearAtom& a) { return a.relation() == Relation::Ne; };
    if (std::any_of(literals.begin(), literals.end(), is_ne)) {
        // Most disequalities hold in the model of the remaining constraints.
        std::vector<LinearAtom> rest;
        std::copy_if(literals.begin(), literals.end(), std::back_inserter(rest), [&](const auto& a) { return !is_ne(a); });
        auto relaxed = theory_check(vars, rest);
        if (!relaxed) {
            return std::nullopt;
        }
        if (std::all_of(literals.begin(), literals.end(), [&](const auto& a) { return a.holds(*relaxed); })) {
            return relaxed;
        }
    }
    for (std::size_t i = 0; i < literals.size(); ++i) {
        if (literals[i].relation() != Relation::Ne) {
            continue;
        }
        for (Relation side : {Relation::Lt, Relation::Gt}) {
            auto split = literals;
            split[i] = std::get<LinearAtom>(LinearAtom::make(
                LinearTerm(literals[i].coeffs().begin(), literals[i].coeffs().end()), side, literals[i].constant()));
            if (auto m = theory_check(vars, split)) {
                return m;
            }
        }
        return std::nullopt;
    }
    Simplex simplex(vars);
    for (const auto& lit : literals) {
        if (!simplex.assert_atom(lit)) {
            return std::nullopt;
        }
    }
    if (!simplex.check()) {
        return std::nullopt;
    }
    return simplex.model();
}

/// DPLL over a one-sided (Plaisted-Greenbaum) encoding of a canonical NNF
/// formula, with a simplex consistency check after every propagation round.
/// Atoms that stay unassigned are unconstrained, so the simplex keeps them at 0.
class DpllSolver {
public:
    DpllSolver(VarSet vars, const Formula& canonical) : vars_(std::move(vars)) {
        root_ = encode(canonical);
        // Encoding emits children before parents; decisions want parents first.
        std::reverse(clauses_.begin(), clauses_.end());
        clauses_.insert(clauses_.begin(), Clause{{Lit{root_, true}}});
    }

    std::optional<Assignment> solve() {
        assignment_.assign(num_vars_, Value::Unknown);
        trail_.clear();
        for (;;) {
            bool conflict = !propagate();
            std::optional<Assignment> model;
            if (!conflict) {
                model = theory();
                conflict = !model;
            }
            if (conflict) {
                if (!backtrack()) {
                    return std::nullopt;
                }
                continue;
            }
            auto decision = pick();
            if (!decision) {
                return model;
            }
            trail_.push_back({*decision, true, false});
            set(*decision);
        }
    }

private:
    enum class Value { Unknown, True, False };

    struct Lit {
        std::size_t var;
        bool positive;
    };
    struct Clause {
        std::vector<Lit> lits;
    };
    struct TrailEntry {
        Lit lit;
        bool decision;
        bool flipped;
    };

    std::size_t encode(const Formula& f) {
        using K = Formula::Kind;
        switch (f.kind()) {
        case K::True:
        case K::False: {
            std::size_t v = num_vars_++;
            clauses_.push_back(Clause{{Lit{v, f.kind() == K::True}}});
            return v;
        }
        case K::Atom: {
            LinearAtom base = f.atom().base();
            auto it = atom_var_.find(base);
            std::size_t v;
            if (it == atom_var_.end()) {
                v = num_vars_++;
                atom_var_.emplace(base, v);
                atoms_.emplace(v, base);
            } else {
                v = it->second;
            }
            if (f.atom() == base) {
                return v;
            }
            // Negative occurrence: introduce a node equivalent to !v.
            std::size_t n = num_vars_++;
            clauses_.push_back(Clause{{Lit{n, false}, Lit{v, false}}});
            return n;
        }
        case K::And:
        case K::Or: {
            std::size_t n = num_vars_++;
            std::vector<std::size_t> kids;
            for (const auto& c : f.children()) {
                kids.push_back(encode(c));
            }
            if (f.kind() == K::And) {
                for (auto k : kids) {
                    clauses_.push_back(Clause{{Lit{n, false}, Lit{k, true}}});
                }
            } else {
                Clause c{{Lit{n, false}}};
                for (auto k : kids) {
                    c.lits.push_back(Lit{k, true});
                }
                clauses_.push_back(std::move(c));
            }
            return n;
        }
        default: throw std::logic_error("solver expects a canonical formula");
        }
    }

    [[nodiscard]] Value value(const Lit& l) const {
        Value v = assignment_[l.var];
        if (v == Value::Unknown) {
            return v;
        }
        return (v == Value::True) == l.positive ? Value::True : Value::False;
    }

    void set(const Lit& l) { assignment_[l.var] = l.positive ? Value::True : Value::False; }

    bool propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& c : clauses_) {
                std::optional<Lit> unit;
                std::size_t unknown = 0;
                bool satisfied = false;
                for (const auto& l : c.lits) {
                    Value v = value(l);
                    if (v == Value::True) {
                        satisfied = true;
                        break;
                    }
                    if (v == Value::Unknown) {
                        ++unknown;
                        unit = l;
                    }
                }
                if (satisfied) {
                    continue;
                }
                if (unknown == 0) {
                    return false;
                }
                if (unknown == 1) {
                    trail_.push_back({*unit, false, false});
                    set(*unit);
                    changed = true;
                }
            }
        }
        return true;
    }

    std::optional<Assignment> theory() const {
        std::vector<LinearAtom> lits;
        for (const auto& [v, atom] : atoms_) {
            if (assignment_[v] == Value::True) {
                lits.push_back(atom);
            } else if (assignment_[v] == Value::False) {
                lits.push_back(atom.negated());
            }
        }
        return theory_check(vars_, lits);
    }

    /// First unsatisfied clause in top-down order: drop an unneeded node, or
    /// justify a needed one through its first open child.
    std::optional<Lit> pick() const {
        for (const auto& c : clauses_) {
            bool satisfied = false;
            for (const auto& l : c.lits) {
                if (value(l) == Value::True) {
                    satisfied = true;
                    break;
                }
            }
            if (satisfied) {
                continue;
            }
            for (const auto& l : c.lits) {
                if (value(l) == Value::Unknown) {
                    return l;
                }
            }
        }
        return std::nullopt;
    }

    bool backtrack() {
        while (!trail_.empty()) {
            TrailEntry e = trail_.back();
            trail_.pop_back();
            assignment_[e.lit.var] = Value::Unknown;
            if (e.decision && !e.flipped) {
                Lit flipped{e.lit.var, !e.lit.positive};
                trail_.push_back({flipped, true, true});
                set(flipped);
                return true;
            }
        }
        return false;
    }

    VarSet vars_;
    std::size_t num_vars_ = 0;
    std::size_t root_ = 0;
    std::vector<Clause> clauses_;
    std::map<LinearAtom, std::size_t> atom_var_;
    std::map<std::size_t, LinearAtom> atoms_;
    std::vector<Value> assignment_;
    std::vector<TrailEntry> trail_;
};

inline bool debug_dump_enabled() {
    const char* env = std::getenv("SBM_SOLVER_DEBUG");
    return env != nullptr && std::string(env) == "1";
}

} // namespace solver

/// Decides a QF-LRA formula over `vars`. Deterministic; unconstrained
/// variables are 0 in the model and strict bounds hold strictly.
inline SatResult check_sat(const Formula& f, const VarSet& vars) {
    require_vars(f, vars);
    Formula c = canonicalize(f);
    if (solver::debug_dump_enabled()) {
        std::cerr << "; rsbm solver query\n" << to_smtlib2(c, vars);
    }
    if (c.is_false()) {
        return {};
    }
    if (c.is_true()) {
        return {true, Assignment::zeros(vars)};
    }
    solver::DpllSolver dpll(vars, c);
    auto model = dpll.solve();
    if (!model) {
        return {};
    }
    if (!evaluate(c, *model)) {
        throw std::logic_error("solver produced a model that violates " + to_infix(c));
    }
    return {true, std::move(*model)};
}

inline bool is_sat(const Formula& f, const VarSet& vars) { return check_sat(f, vars).sat; }

inline bool entails(const Formula& f, const Formula& g, const VarSet& vars) {
    return !is_sat(Formula::conjunction({f, Formula::negation(g)}), vars);
}

inline bool equivalent(const Formula& f, const Formula& g, const VarSet& vars) {
    return entails(f, g, vars) && entails(g, f, vars);
}

} // namespace rsbm
