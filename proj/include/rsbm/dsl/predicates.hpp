#pragma once

#include <set>
#include <vector>

#include "rsbm/script.hpp"

namespace rsbm {

/// Canonical atoms of a script, one entry per atom/negation pair.
struct PredicateSet {
    std::vector<LinearAtom> atoms;

    [[nodiscard]] std::size_t size() const { return atoms.size(); }
    [[nodiscard]] bool contains(const LinearAtom& a) const {
        auto b = a.base();
        return std::find(atoms.begin(), atoms.end(), b) != atoms.end();
    }
};

inline void add_predicates(const Formula& f, std::set<LinearAtom>& out) {
    std::set<LinearAtom> raw;
    collect_atoms(canonicalize(f), raw);
    for (const auto& a : raw) {
        out.insert(a.base());
    }
}

inline PredicateSet collect_predicates(const ScenarioScript& s) {
    std::set<LinearAtom> found;
    for (const auto& ins : s.program()) {
        switch (ins.op) {
        case Instr::Op::Sync:
            add_predicates(ins.request, found);
            add_predicates(ins.waitfor, found);
            add_predicates(ins.block, found);
            break;
        case Instr::Op::Branch: add_predicates(ins.cond, found); break;
        default: break;
        }
    }
    return PredicateSet{std::vector<LinearAtom>(found.begin(), found.end())};
}

} // namespace rsbm
