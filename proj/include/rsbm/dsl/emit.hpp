#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rsbm/dsl/parser.hpp"
#include "rsbm/object_graph.hpp"
#include "rsbm/solver.hpp"

namespace rsbm {

namespace detail {

inline bool is_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
        return false;
    }
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return !dsl::is_keyword(s);
}

inline std::string sync_line(const StateLabels& l) {
    std::vector<std::string> parts;
    if (!l.request.is_false()) {
        parts.push_back("request = " + to_infix(l.request));
    }
    if (!l.waitfor.is_false()) {
        parts.push_back("waitfor = " + to_infix(l.waitfor));
    }
    if (!l.block.is_false()) {
        parts.push_back("block = " + to_infix(l.block));
    }
    if (parts.empty()) {
        return "sync(request = false);";
    }
    std::string out = "sync(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i == 0 ? "" : ", ") + parts[i];
    }
    return out + ");";
}

inline StateLabels canonical_labels(const StateLabels& l) {
    return StateLabels{canonicalize(l.request), canonicalize(l.block), canonicalize(l.waitfor)};
}

inline Formula wake_formula(const StateLabels& l) { return disj({l.request, l.waitfor}); }

/// Successors of `q` with parallel edges merged, in first-seen order.
inline std::vector<std::pair<StateId, Formula>> merged_out(const ObjectGraph& g, const StateId& q) {
    std::vector<std::pair<StateId, Formula>> out;
    for (const auto& e : g.out_edges(q)) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == e.to; });
        if (it == out.end()) {
            out.emplace_back(e.to, canonicalize(e.guard));
        } else {
            it->second = disj({it->second, e.guard});
        }
    }
    return out;
}

/// States in chain order when `g` is a straight line that may end in a
/// self-loop, and every edge fires exactly when its source wakes.
inline std::optional<std::vector<StateId>> chain_order(const ObjectGraph& g, const VarSet& vars) {
    std::vector<StateId> order;
    std::set<StateId> seen;
    StateId q = g.initial();
    for (;;) {
        order.push_back(q);
        seen.insert(q);
        auto out = merged_out(g, q);
        Formula wake = wake_formula(g.labels(q));
        if (out.empty()) {
            if (is_sat(wake, vars)) {
                return std::nullopt;
            }
            break;
        }
        if (out.size() != 1 || !equivalent(out[0].second, wake, vars)) {
            return std::nullopt;
        }
        if (out[0].first == q) {
            break;
        }
        if (seen.count(out[0].first) != 0) {
            return std::nullopt;
        }
        q = out[0].first;
    }
    if (order.size() != g.states().size()) {
        return std::nullopt;
    }
    return order;
}

} // namespace detail

/// Prints a deterministic graph as a scenario object. Straight-line graphs
/// become a sequence of syncs ending in a loop; anything else uses labels
/// and gotos.
inline std::string emit_script(const ObjectGraph& g, const VarSet& vars) {
    for (const auto& q : g.states()) {
        auto out = detail::merged_out(g, q);
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (std::size_t j = i + 1; j < out.size(); ++j) {
                if (is_sat(conj({out[i].second, out[j].second}), vars)) {
                    throw EmissionError("graph '" + g.name() + "' is nondeterministic at state '" + q + "'");
                }
            }
        }
    }
    std::string name = detail::is_identifier(g.name()) ? g.name() : "Patch";
    std::ostringstream os;
    os << "object " << name << " {\n";
    auto bad_line = [&](const StateId& q, const std::string& indent) {
        if (g.is_bad(q)) {
            os << indent << "mark bad;\n";
        }
    };
    if (auto chain = detail::chain_order(g, vars)) {
        for (std::size_t i = 0; i < chain->size(); ++i) {
            const auto& q = (*chain)[i];
            auto labels = detail::canonical_labels(g.labels(q));
            if (i + 1 == chain->size()) {
                os << "  loop {\n    " << detail::sync_line(labels) << "\n";
                bad_line(q, "    ");
                os << "  }\n";
            } else {
                os << "  " << detail::sync_line(labels) << "\n";
                bad_line(q, "  ");
            }
        }
        os << "}\n";
        return os.str();
    }
    std::map<StateId, std::string> names;
    std::size_t counter = 0;
    for (const auto& q : g.states()) {
        names[q] = detail::is_identifier(q) && q != kEndState ? q : "q" + std::to_string(counter);
        ++counter;
    }
    std::vector<StateId> order{g.initial()};
    for (const auto& q : g.states()) {
        if (q != g.initial()) {
            order.push_back(q);
        }
    }
    for (const auto& q : order) {
        os << "  state " << names.at(q) << ":\n";
        os << "  " << detail::sync_line(detail::canonical_labels(g.labels(q))) << "\n";
        bad_line(q, "  ");
        for (const auto& [to, guard] : detail::merged_out(g, q)) {
            if (to != q) {
                os << "  if (" << to_infix(guard) << ") goto " << names.at(to) << ";\n";
            }
        }
        os << "  goto " << names.at(q) << ";\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace rsbm
