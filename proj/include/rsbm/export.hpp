#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rsbm/engine.hpp"
#include "rsbm/object_graph.hpp"

namespace rsbm {

using Json = nlohmann::ordered_json;

inline Json assignment_json(const Assignment& a) {
    Json j = Json::object();
    for (const auto& [name, value] : a.values()) {
        j[name] = to_string(value);
    }
    return j;
}

inline Json graph_json(const ObjectGraph& g) {
    Json j;
    j["name"] = g.name();
    j["states"] = g.states();
    j["initial"] = g.initial();
    Json labels = Json::object();
    for (const auto& q : g.states()) {
        const auto& l = g.labels(q);
        labels[q] = {{"request", to_sexpr(l.request)}, {"block", to_sexpr(l.block)}, {"waitfor", to_sexpr(l.waitfor)}};
    }
    j["labels"] = labels;
    Json edges = Json::array();
    for (const auto& e : g.edges()) {
        edges.push_back({{"from", e.from}, {"guard", to_sexpr(e.guard)}, {"to", e.to}});
    }
    j["edges"] = edges;
    j["bad"] = Json(std::vector<StateId>(g.bad().begin(), g.bad().end()));
    return j;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

} // namespace detail

/// Graphviz text: boxes list request and block, edges carry guards.
inline std::string graph_dot(const ObjectGraph& g) {
    std::string out = "digraph \"" + detail::dot_escape(g.name()) + "\" {\n";
    out += "  node [shape=box];\n";
    out += "  __start [shape=point];\n";
    out += "  __start -> \"" + detail::dot_escape(g.initial()) + "\";\n";
    for (const auto& q : g.states()) {
        const auto& l = g.labels(q);
        std::string label = detail::dot_escape(q) + "\\nRequest: " + detail::dot_escape(to_infix(l.request)) +
                            "\\nBlock: " + detail::dot_escape(to_infix(l.block));
        if (!l.waitfor.is_false()) {
            label += "\\nWait: " + detail::dot_escape(to_infix(l.waitfor));
        }
        out += "  \"" + detail::dot_escape(q) + "\" [label=\"" + label + "\"";
        if (g.is_bad(q)) {
            out += ", peripheries=2";
        }
        out += "];\n";
    }
    for (const auto& e : g.edges()) {
        out += "  \"" + detail::dot_escape(e.from) + "\" -> \"" + detail::dot_escape(e.to) + "\" [label=\"" +
               detail::dot_escape(to_infix(e.guard)) + "\"];\n";
    }
    return out + "}\n";
}

inline std::string log_jsonl(const EventLog& log) {
    std::string out;
    for (const auto& e : log.entries) {
        Json j;
        j["step"] = e.step;
        j["assignment"] = assignment_json(e.assignment);
        j["woke"] = e.woke;
        out += j.dump() + "\n";
    }
    return out;
}

inline std::string trace_jsonl(const Trace& t) {
    std::string out;
    std::size_t n = 0;
    for (const auto& s : t.steps) {
        Json j;
        j["step"] = ++n;
        j["state"] = s.state;
        j["assignment"] = assignment_json(s.assignment);
        out += j.dump() + "\n";
    }
    return out;
}

// --- s-expression import -----------------------------------------------------

class SexprReader {
public:
    SexprReader(std::string_view text, const VarSet& vars) : text_(text), vars_(vars) {}

    Formula formula() {
        Formula f = read_formula();
        skip();
        if (pos_ != text_.size()) {
            fail("trailing input");
        }
        return f;
    }

private:
    struct Lin {
        LinearTerm term;
        Rational constant = 0;
    };

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("s-expression: " + msg, 1, pos_ + 1);
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool open() {
        skip();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            return true;
        }
        return false;
    }

    bool close() {
        skip();
        if (pos_ < text_.size() && text_[pos_] == ')') {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string symbol() {
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
               text_[pos_] != ')') {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected a symbol");
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    Formula read_formula() {
        if (!open()) {
            std::string s = symbol();
            if (s == "true") {
                return Formula::top();
            }
            if (s == "false") {
                return Formula::bottom();
            }
            fail("unexpected symbol '" + s + "'");
        }
        std::string op = symbol();
        if (op == "and" || op == "or") {
            std::vector<Formula> kids;
            while (!close()) {
                kids.push_back(read_formula());
            }
            return op == "and" ? Formula::conjunction(std::move(kids)) : Formula::disjunction(std::move(kids));
        }
        if (op == "not") {
            Formula f = read_formula();
            expect_close();
            return Formula::negation(f);
        }
        if (op == "=>") {
            Formula a = read_formula();
            Formula b = read_formula();
            expect_close();
            return Formula::implication(a, b);
        }
        Relation rel;
        if (op == "<") {
            rel = Relation::Lt;
        } else if (op == "<=") {
            rel = Relation::Le;
        } else if (op == "=") {
            rel = Relation::Eq;
        } else if (op == "distinct") {
            rel = Relation::Ne;
        } else if (op == ">=") {
            rel = Relation::Ge;
        } else if (op == ">") {
            rel = Relation::Gt;
        } else {
            fail("unknown operator '" + op + "'");
        }
        Lin lhs = read_term();
        Lin rhs = read_term();
        expect_close();
        LinearTerm t = lhs.term;
        for (const auto& [v, c] : rhs.term) {
            t[v] -= c;
        }
        return Formula::linear(t, rel, rhs.constant - lhs.constant);
    }

    void expect_close() {
        if (!close()) {
            fail("expected ')'");
        }
    }

    static Lin scaled(Lin l, const Rational& k) {
        for (auto& [v, c] : l.term) {
            c *= k;
        }
        l.constant *= k;
        return l;
    }

    Lin read_term() {
        if (!open()) {
            std::string s = symbol();
            Lin l;
            if (std::isdigit(static_cast<unsigned char>(s[0]))) {
                l.constant = parse_rational(s);
            } else {
                if (!vars_.contains(s)) {
                    fail("undeclared variable '" + s + "'");
                }
                l.term[s] = 1;
            }
            return l;
        }
        std::string op = symbol();
        std::vector<Lin> args;
        while (!close()) {
            args.push_back(read_term());
        }
        if (args.empty()) {
            fail("operator '" + op + "' needs arguments");
        }
        Lin acc = args.front();
        if (op == "+") {
            for (std::size_t i = 1; i < args.size(); ++i) {
                for (const auto& [v, c] : args[i].term) {
                    acc.term[v] += c;
                }
                acc.constant += args[i].constant;
            }
            return acc;
        }
        if (op == "-") {
            if (args.size() == 1) {
                return scaled(acc, Rational(-1));
            }
            for (std::size_t i = 1; i < args.size(); ++i) {
                for (const auto& [v, c] : args[i].term) {
                    acc.term[v] -= c;
                }
                acc.constant -= args[i].constant;
            }
            return acc;
        }
        if (op == "*") {
            for (std::size_t i = 1; i < args.size(); ++i) {
                if (acc.term.empty()) {
                    acc = scaled(args[i], acc.constant);
                } else if (args[i].term.empty()) {
                    acc = scaled(acc, args[i].constant);
                } else {
                    fail("nonlinear product");
                }
            }
            return acc;
        }
        if (op == "/") {
            for (std::size_t i = 1; i < args.size(); ++i) {
                if (!args[i].term.empty() || args[i].constant == 0) {
                    fail("division must be by a nonzero constant");
                }
                acc = scaled(acc, 1 / args[i].constant);
            }
            return acc;
        }
        fail("unknown term operator '" + op + "'");
    }

    std::string_view text_;
    const VarSet& vars_;
    std::size_t pos_ = 0;
};

inline Formula parse_sexpr(std::string_view text, const VarSet& vars) { return SexprReader(text, vars).formula(); }

/// Inverse of `graph_json`.
inline ObjectGraph graph_from_json(const Json& j, const VarSet& vars) {
    try {
        ObjectGraph g(j.at("name").get<std::string>());
        for (const auto& q : j.at("states")) {
            const auto& l = j.at("labels").at(q.get<std::string>());
            g.add_state(q.get<std::string>(), StateLabels{parse_sexpr(l.at("request").get<std::string>(), vars),
                                                          parse_sexpr(l.at("block").get<std::string>(), vars),
                                                          parse_sexpr(l.at("waitfor").get<std::string>(), vars)});
        }
        g.set_initial(j.at("initial").get<std::string>());
        for (const auto& e : j.at("edges")) {
            g.add_edge(e.at("from").get<std::string>(), parse_sexpr(e.at("guard").get<std::string>(), vars),
                       e.at("to").get<std::string>());
        }
        for (const auto& q : j.at("bad")) {
            g.mark_bad(q.get<std::string>());
        }
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw GraphError(std::string("malformed graph JSON: ") + e.what());
    }
}

} // namespace rsbm
