#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "rsbm/object_graph.hpp"
#include "rsbm/solver.hpp"

namespace rsbm {

namespace detail {

inline std::size_t node_count(const Formula& f) {
    std::size_t n = 1;
    for (const auto& c : f.children()) {
        n += node_count(c);
    }
    return n;
}

/// `f` with the subtree at preorder position `pos` replaced by `rep`.
inline Formula replace_at(const Formula& f, std::size_t pos, const Formula& rep, std::size_t& counter) {
    if (counter++ == pos) {
        return rep;
    }
    if (f.children().empty()) {
        return f;
    }
    std::vector<Formula> kids;
    for (const auto& c : f.children()) {
        kids.push_back(replace_at(c, pos, rep, counter));
    }
    switch (f.kind()) {
    case Formula::Kind::And: return Formula::conjunction(std::move(kids));
    case Formula::Kind::Or: return Formula::disjunction(std::move(kids));
    case Formula::Kind::Not: return Formula::negation(kids[0]);
    case Formula::Kind::Implies: return Formula::implication(kids[0], kids[1]);
    default: return f;
    }
}

} // namespace detail

/// Greedily replaces subformulas by constants while the solver certifies the
/// result equivalent; stops at a fixpoint.
inline Formula simplify_formula(const Formula& input, const VarSet& vars) {
    Formula f = canonicalize(input);
    bool changed = true;
    while (changed) {
        changed = false;
        std::size_t n = detail::node_count(f);
        for (std::size_t pos = 0; pos < n && !changed; ++pos) {
            for (const Formula& rep : {Formula::top(), Formula::bottom()}) {
                std::size_t counter = 0;
                Formula cand = canonicalize(detail::replace_at(f, pos, rep, counter));
                if (cand == f || detail::node_count(cand) >= n) {
                    continue;
                }
                if (equivalent(cand, f, vars)) {
                    f = cand;
                    changed = true;
                    break;
                }
            }
        }
    }
    return f;
}

/// Merges parallel edges into one disjunctive guard and shrinks each guard.
inline ObjectGraph simplify_graph(const ObjectGraph& g, const VarSet& vars) {
    ObjectGraph out(g.name());
    for (const auto& q : g.states()) {
        out.add_state(q, g.labels(q));
        if (g.is_bad(q)) {
            out.mark_bad(q);
        }
    }
    out.set_initial(g.initial());
    out.set_total(g.total());
    for (const auto& q : g.states()) {
        std::vector<StateId> order;
        std::map<StateId, std::vector<Formula>> by_target;
        for (const auto& e : g.out_edges(q)) {
            if (by_target.count(e.to) == 0) {
                order.push_back(e.to);
            }
            by_target[e.to].push_back(e.guard);
        }
        for (const auto& to : order) {
            out.add_edge(q, simplify_formula(disj(by_target[to]), vars), to);
        }
    }
    return out;
}

} // namespace rsbm
