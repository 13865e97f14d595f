#pragma once

#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rsbm/extract.hpp"
#include "rsbm/object_graph.hpp"
#include "rsbm/simplify.hpp"
#include "rsbm/solver.hpp"

namespace rsbm {

namespace detail {

inline void require_graph_vars(const ObjectGraph& g, const VarSet& vars) {
    auto check = [&](const Formula& f) {
        for (const auto& v : variables_of(f)) {
            if (!vars.contains(v)) {
                throw CompositionError("graph '" + g.name() + "' mentions variable '" + v +
                                       "' outside the model's variable set");
            }
        }
    };
    for (const auto& q : g.states()) {
        const auto& l = g.labels(q);
        check(l.request);
        check(l.block);
        check(l.waitfor);
    }
    for (const auto& e : g.edges()) {
        check(e.guard);
    }
}

inline std::string product_name(const StateId& a, const StateId& b) { return a + kProductSeparator + b; }

} // namespace detail

/// Reachable product. Implicit stutters become explicit loops first, so an
/// edge pair exists for every assignment both components can react to.
inline ObjectGraph compose(const ObjectGraph& a, const ObjectGraph& b, const VarSet& vars) {
    detail::require_graph_vars(a, vars);
    detail::require_graph_vars(b, vars);
    ObjectGraph ga = materialize_stutter(a, vars);
    ObjectGraph gb = materialize_stutter(b, vars);

    ObjectGraph out(detail::product_name(a.name(), b.name()));
    using Pair = std::pair<StateId, StateId>;
    std::map<Pair, StateId> seen;
    std::deque<Pair> work;
    auto visit = [&](const Pair& p) -> const StateId& {
        auto it = seen.find(p);
        if (it != seen.end()) {
            return it->second;
        }
        StateId id = detail::product_name(p.first, p.second);
        const auto& la = ga.labels(p.first);
        const auto& lb = gb.labels(p.second);
        out.add_state(id, StateLabels{disj({la.request, lb.request}), disj({la.block, lb.block}),
                                      disj({la.waitfor, lb.waitfor})});
        if (ga.is_bad(p.first) || gb.is_bad(p.second)) {
            out.mark_bad(id);
        }
        work.push_back(p);
        return seen.emplace(p, std::move(id)).first->second;
    };
    visit({ga.initial(), gb.initial()});
    while (!work.empty()) {
        Pair p = work.front();
        work.pop_front();
        StateId from = seen.at(p);
        for (const auto& ea : ga.out_edges(p.first)) {
            for (const auto& eb : gb.out_edges(p.second)) {
                Formula guard = conj({ea.guard, eb.guard});
                if (!is_sat(guard, vars)) {
                    continue;
                }
                StateId to = visit({ea.to, eb.to});
                out.add_edge(from, std::move(guard), to);
            }
        }
    }
    out.set_total(true);
    return out;
}

struct ComposeOptions {
    bool simplify = true; ///< Simplify each component graph before the product.
    ExtractOptions extract;
};

/// Left fold of `compose` over the model's objects in declaration order.
inline ObjectGraph compose_all(const Model& m, const ComposeOptions& opts = {}) {
    auto graphs = extract_all(m, opts.extract);
    if (graphs.empty()) {
        ObjectGraph idle("idle");
        idle.add_state("idle");
        return idle;
    }
    if (opts.simplify) {
        for (auto& g : graphs) {
            g = simplify_graph(g, m.vars());
        }
    }
    ObjectGraph acc = materialize_stutter(graphs.front(), m.vars());
    for (std::size_t i = 1; i < graphs.size(); ++i) {
        acc = compose(acc, graphs[i], m.vars());
    }
    return acc;
}

/// Restriction of `g` to what an execution can actually traverse: each edge
/// guard is conjoined with its source's enabled guard, unsatisfiable edges are
/// dropped, and only states reachable that way are kept.
inline ObjectGraph execution_graph(const ObjectGraph& g, const VarSet& vars) {
    ObjectGraph out(g.name());
    std::deque<StateId> work;
    auto add = [&](const StateId& q) {
        if (!out.has_state(q)) {
            out.add_state(q, g.labels(q));
            if (g.is_bad(q)) {
                out.mark_bad(q);
            }
            work.push_back(q);
        }
    };
    add(g.initial());
    while (!work.empty()) {
        StateId q = work.front();
        work.pop_front();
        Formula en = enabled_guard(g, q);
        for (const auto& e : g.out_edges(q)) {
            Formula guard = conj({e.guard, en});
            if (!is_sat(guard, vars)) {
                continue;
            }
            add(e.to);
            out.add_edge(q, std::move(guard), e.to);
        }
        // Stutter is also an execution step when enabled.
        Formula stay = conj({g.stutter_guard(q), en});
        if (is_sat(stay, vars)) {
            out.add_edge(q, stay, q);
        }
    }
    return out;
}

} // namespace rsbm
