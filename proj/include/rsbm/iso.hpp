#pragma once

#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "rsbm/object_graph.hpp"
#include "rsbm/solver.hpp"

namespace rsbm {

using StateMap = std::map<StateId, StateId>;

namespace detail {

/// Per-state digest of a graph used by the matcher: merged guard per target.
struct IsoView {
    const ObjectGraph* g;
    std::map<StateId, std::map<StateId, Formula>> succ;

    explicit IsoView(const ObjectGraph& graph) : g(&graph) {
        std::map<StateId, std::map<StateId, std::vector<Formula>>> parts;
        for (const auto& e : graph.edges()) {
            parts[e.from][e.to].push_back(e.guard);
        }
        for (auto& [from, targets] : parts) {
            for (auto& [to, guards] : targets) {
                succ[from][to] = disj(std::move(guards));
            }
        }
    }

    [[nodiscard]] const std::map<StateId, Formula>& out(const StateId& q) const {
        static const std::map<StateId, Formula> none;
        auto it = succ.find(q);
        return it == succ.end() ? none : it->second;
    }
};

} // namespace detail

/// Finds a bijection between the states of `a` and `b` preserving the
/// initial state, bad marks, labels and merged edge guards, all up to
/// solver-checked equivalence.
inline std::optional<StateMap> find_isomorphism(const ObjectGraph& a, const ObjectGraph& b, const VarSet& vars) {
    if (a.states().size() != b.states().size()) {
        return std::nullopt;
    }
    detail::IsoView va(a);
    detail::IsoView vb(b);
    auto same_labels = [&](const StateId& p, const StateId& q) {
        if (a.is_bad(p) != b.is_bad(q) || va.out(p).size() != vb.out(q).size()) {
            return false;
        }
        const auto& lp = a.labels(p);
        const auto& lq = b.labels(q);
        return equivalent(lp.request, lq.request, vars) && equivalent(lp.block, lq.block, vars) &&
               equivalent(lp.waitfor, lq.waitfor, vars);
    };
    std::map<std::pair<StateId, StateId>, bool> compat;
    auto compatible = [&](const StateId& p, const StateId& q) {
        auto key = std::make_pair(p, q);
        auto it = compat.find(key);
        if (it == compat.end()) {
            it = compat.emplace(key, same_labels(p, q)).first;
        }
        return it->second;
    };

    StateMap fwd;
    std::set<StateId> used;
    const auto& order = a.states();
    auto consistent = [&](const StateId& p) {
        // Every already-mapped neighbour pair must agree in both directions.
        const StateId& q = fwd.at(p);
        for (const auto& [p2, q2] : fwd) {
            for (auto [x, y, x2, y2] : {std::tuple{p, q, p2, q2}, std::tuple{p2, q2, p, q}}) {
                const auto& ox = va.out(x);
                const auto& oy = vb.out(y);
                auto ix = ox.find(x2);
                auto iy = oy.find(y2);
                if ((ix == ox.end()) != (iy == oy.end())) {
                    return false;
                }
                if (ix != ox.end() && !equivalent(ix->second, iy->second, vars)) {
                    return false;
                }
            }
        }
        return true;
    };
    auto search = [&](auto&& self, std::size_t i) -> bool {
        if (i == order.size()) {
            return true;
        }
        const StateId& p = order[i];
        std::vector<StateId> candidates;
        if (p == a.initial()) {
            candidates.push_back(b.initial());
        } else {
            candidates = b.states();
        }
        for (const auto& q : candidates) {
            if (used.count(q) != 0 || (q == b.initial()) != (p == a.initial()) || !compatible(p, q)) {
                continue;
            }
            fwd[p] = q;
            used.insert(q);
            if (consistent(p) && self(self, i + 1)) {
                return true;
            }
            fwd.erase(p);
            used.erase(q);
        }
        return false;
    };
    if (!search(search, 0)) {
        return std::nullopt;
    }
    return fwd;
}

inline bool isomorphic(const ObjectGraph& a, const ObjectGraph& b, const VarSet& vars) {
    return find_isomorphism(a, b, vars).has_value();
}

} // namespace rsbm
