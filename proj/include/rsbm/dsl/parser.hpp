#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rsbm/dsl/lexer.hpp"
#include "rsbm/script.hpp"

namespace rsbm {

namespace dsl {

inline bool is_keyword(const std::string& s) {
    static const std::set<std::string> kw = {"model", "vars",  "object", "sync",  "if",      "else",
                                             "loop",  "repeat", "state",  "goto",  "end",     "mark",
                                             "bad",   "true",  "false",  "request", "waitfor", "block"};
    return kw.count(s) != 0;
}

/// Recursive-descent parser for `.sbm` models.
///
///   model   := 'model' '{' ('vars' ident (',' ident)* ';')? object* '}'
///   object  := 'object' ident '{' stmt* '}'
///   stmt    := 'sync' '(' (part (',' part)*)? ')' ';' ('mark' 'bad' ';')?
///            | 'if' '(' formula ')' branch ('else' (branch | if))?
///            | 'loop' block | 'repeat' INT block
///            | 'state' ident ':' | 'goto' ident ';' | 'end' ';'
///   part    := ('request' | 'waitfor' | 'block') '=' formula
///   formula := disj ('->' formula)?   disj := conj ('||' conj)*
///   conj    := unary ('&&' unary)*    unary := '!' unary | 'true' | 'false'
///            | expr rel expr | '(' formula ')'
///   expr    := linear arithmetic over declared variables and rationals
class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    Model parse_model() {
        expect_keyword("model");
        expect(Tok::LBrace, "'{'");
        std::optional<VarSet> vars;
        if (peek_keyword("vars")) {
            const Token& kw = next();
            std::vector<std::string> names;
            do {
                const Token& id = expect(Tok::Ident, "variable name");
                if (is_keyword(id.text)) {
                    throw error("keyword '" + id.text + "' cannot be a variable", id);
                }
                names.push_back(id.text);
            } while (accept(Tok::Comma));
            expect(Tok::Semi, "';'");
            try {
                vars = VarSet(names);
            } catch (const DomainError& e) {
                throw error(e.what(), kw);
            }
        }
        if (!vars) {
            throw error("expected 'vars' declaration", peek());
        }
        vars_ = *vars;
        Model m(*vars);
        while (peek_keyword("object")) {
            add_object(m, parse_object());
        }
        expect(Tok::RBrace, "'}'");
        expect(Tok::Eof, "end of input");
        return m;
    }

    /// Standalone `object` blocks, e.g. an emitted patch, over known variables.
    std::vector<ScenarioScript> parse_objects(const VarSet& vars) {
        vars_ = vars;
        std::vector<ScenarioScript> out;
        while (peek_keyword("object")) {
            out.push_back(parse_object());
        }
        expect(Tok::Eof, "'object' or end of input");
        return out;
    }

    Formula parse_formula_only(const VarSet& vars) {
        vars_ = vars;
        Formula f = formula();
        expect(Tok::Eof, "end of formula");
        return f;
    }

private:
    struct Lin {
        LinearTerm term;
        Rational constant = 0;
        [[nodiscard]] bool is_constant() const { return term.empty(); }
    };

    static void add_object(Model& m, ScenarioScript s) { m.add(std::move(s)); }

    ScenarioScript parse_object() {
        const Token& kw = next();
        const Token& name = expect(Tok::Ident, "object name");
        if (is_keyword(name.text)) {
            throw error("keyword '" + name.text + "' cannot name an object", name);
        }
        if (!object_names_.insert(name.text).second) {
            throw error("duplicate object '" + name.text + "'", name);
        }
        SourceLoc loc{kw.line, kw.column};
        Body body = block();
        return ScenarioScript(name.text, std::move(body), loc);
    }

    Body block() {
        expect(Tok::LBrace, "'{'");
        Body body;
        while (!check(Tok::RBrace)) {
            if (check(Tok::Eof)) {
                throw error("unexpected end of input, expected '}'", peek());
            }
            statement(body);
        }
        next();
        return body;
    }

    void statement(Body& body) {
        const Token& t = peek();
        SourceLoc loc{t.line, t.column};
        if (t.kind != Tok::Ident) {
            throw error("expected a statement, found '" + t.text + "'", t);
        }
        if (t.text == "sync") {
            next();
            body.push_back(Statement{sync_statement(loc)});
        } else if (t.text == "if") {
            next();
            body.push_back(Statement{if_statement(loc)});
        } else if (t.text == "loop") {
            next();
            body.push_back(Statement{stmt::Loop{block(), loc}});
        } else if (t.text == "repeat") {
            next();
            const Token& n = expect(Tok::Number, "repeat count");
            long count = 0;
            try {
                count = std::stol(n.text);
            } catch (const std::exception&) {
                throw error("invalid repeat count '" + n.text + "'", n);
            }
            if (n.text.find('.') != std::string::npos || count < 1) {
                throw error("repeat count must be a positive integer", n);
            }
            Body inner = block();
            for (const auto& s : inner) {
                if (contains_label(s)) {
                    throw error("labels are not allowed inside 'repeat'", n);
                }
            }
            for (long i = 0; i < count; ++i) {
                body.insert(body.end(), inner.begin(), inner.end());
            }
        } else if (t.text == "state") {
            next();
            const Token& id = expect(Tok::Ident, "state name");
            if (is_keyword(id.text)) {
                throw error("keyword '" + id.text + "' cannot name a state", id);
            }
            expect(Tok::Colon, "':'");
            body.push_back(Statement{stmt::Label{id.text, loc}});
        } else if (t.text == "goto") {
            next();
            const Token& id = expect(Tok::Ident, "label");
            expect(Tok::Semi, "';'");
            body.push_back(Statement{stmt::Goto{id.text, loc}});
        } else if (t.text == "end") {
            next();
            expect(Tok::Semi, "';'");
            body.push_back(Statement{stmt::End{loc}});
        } else if (t.text == "mark") {
            throw error("'mark bad' must directly follow a sync", t);
        } else {
            throw error("unknown statement '" + t.text + "'", t);
        }
    }

    static bool contains_label(const Statement& s) {
        if (std::holds_alternative<stmt::Label>(s.node)) {
            return true;
        }
        auto any = [](const Body& b) {
            for (const auto& c : b) {
                if (contains_label(c)) {
                    return true;
                }
            }
            return false;
        };
        if (const auto* i = std::get_if<stmt::If>(&s.node)) {
            return any(i->then_body) || any(i->else_body);
        }
        if (const auto* l = std::get_if<stmt::Loop>(&s.node)) {
            return any(l->body);
        }
        return false;
    }

    stmt::Sync sync_statement(SourceLoc loc) {
        stmt::Sync s;
        s.loc = loc;
        expect(Tok::LParen, "'('");
        std::set<std::string> seen;
        if (!check(Tok::RParen)) {
            do {
                const Token& part = expect(Tok::Ident, "'request', 'waitfor' or 'block'");
                if (part.text != "request" && part.text != "waitfor" && part.text != "block") {
                    throw error("unknown sync part '" + part.text + "'", part);
                }
                if (!seen.insert(part.text).second) {
                    throw error("duplicate sync part '" + part.text + "'", part);
                }
                expect(Tok::Assign, "'='");
                Formula f = formula();
                (part.text == "request" ? s.request : part.text == "waitfor" ? s.waitfor : s.block) = f;
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        if (peek_keyword("mark")) {
            next();
            const Token& b = expect(Tok::Ident, "'bad'");
            if (b.text != "bad") {
                throw error("expected 'bad' after 'mark'", b);
            }
            expect(Tok::Semi, "';'");
            s.bad = true;
        }
        return s;
    }

    Body branch() {
        if (check(Tok::LBrace)) {
            return block();
        }
        Body single;
        statement(single);
        return single;
    }

    stmt::If if_statement(SourceLoc loc) {
        stmt::If s;
        s.loc = loc;
        expect(Tok::LParen, "'('");
        s.cond = formula();
        expect(Tok::RParen, "')'");
        s.then_body = branch();
        if (peek_keyword("else")) {
            next();
            if (peek_keyword("if")) {
                const Token& t = next();
                s.else_body.push_back(Statement{if_statement(SourceLoc{t.line, t.column})});
            } else {
                s.else_body = branch();
            }
        }
        return s;
    }

    // --- formulas ------------------------------------------------------------

    Formula formula() {
        Formula lhs = disjunction();
        if (accept(Tok::Arrow)) {
            return Formula::implication(lhs, formula());
        }
        return lhs;
    }

    Formula disjunction() {
        std::vector<Formula> parts{conjunction()};
        while (accept(Tok::OrOr)) {
            parts.push_back(conjunction());
        }
        return parts.size() == 1 ? parts.front() : Formula::disjunction(std::move(parts));
    }

    Formula conjunction() {
        std::vector<Formula> parts{unary()};
        while (accept(Tok::AndAnd)) {
            parts.push_back(unary());
        }
        return parts.size() == 1 ? parts.front() : Formula::conjunction(std::move(parts));
    }

    Formula unary() {
        if (accept(Tok::Bang)) {
            return Formula::negation(unary());
        }
        if (peek_keyword("true")) {
            next();
            return Formula::top();
        }
        if (peek_keyword("false")) {
            next();
            return Formula::bottom();
        }
        if (check(Tok::LParen)) {
            // Either an arithmetic group starting a comparison or a nested formula.
            std::size_t save = pos_;
            try {
                return comparison();
            } catch (const ParseError&) {
                pos_ = save;
            }
            next();
            Formula f = formula();
            expect(Tok::RParen, "')'");
            return f;
        }
        return comparison();
    }

    Formula comparison() {
        const Token& start = peek();
        Lin lhs = expr();
        const Token& op = next();
        Relation rel;
        switch (op.kind) {
        case Tok::Lt: rel = Relation::Lt; break;
        case Tok::Le: rel = Relation::Le; break;
        case Tok::Eq:
        case Tok::Assign: rel = Relation::Eq; break;
        case Tok::Ne: rel = Relation::Ne; break;
        case Tok::Ge: rel = Relation::Ge; break;
        case Tok::Gt: rel = Relation::Gt; break;
        default: throw error("expected a comparison operator, found '" + op.text + "'", op);
        }
        Lin rhs = expr();
        LinearTerm term = lhs.term;
        for (const auto& [v, c] : rhs.term) {
            term[v] -= c;
        }
        (void)start;
        return Formula::linear(term, rel, rhs.constant - lhs.constant);
    }

    Lin expr() {
        Lin acc = term();
        for (;;) {
            if (accept(Tok::Plus)) {
                add(acc, term(), 1);
            } else if (accept(Tok::Minus)) {
                add(acc, term(), -1);
            } else {
                return acc;
            }
        }
    }

    static void add(Lin& acc, const Lin& other, int sign) {
        for (const auto& [v, c] : other.term) {
            acc.term[v] += sign * c;
            if (acc.term[v] == 0) {
                acc.term.erase(v);
            }
        }
        acc.constant += sign * other.constant;
    }

    static Lin scale(Lin l, const Rational& k) {
        for (auto it = l.term.begin(); it != l.term.end();) {
            it->second *= k;
            it = it->second == 0 ? l.term.erase(it) : std::next(it);
        }
        l.constant *= k;
        return l;
    }

    Lin term() {
        Lin acc = factor();
        for (;;) {
            if (check(Tok::Star)) {
                const Token& op = next();
                Lin rhs = factor();
                if (acc.is_constant()) {
                    acc = scale(rhs, acc.constant);
                } else if (rhs.is_constant()) {
                    acc = scale(acc, rhs.constant);
                } else {
                    throw error("nonlinear product", op);
                }
            } else if (check(Tok::Slash)) {
                const Token& op = next();
                Lin rhs = factor();
                if (!rhs.is_constant() || rhs.constant == 0) {
                    throw error("division must be by a nonzero constant", op);
                }
                acc = scale(acc, 1 / rhs.constant);
            } else {
                return acc;
            }
        }
    }

    Lin factor() {
        if (accept(Tok::Minus)) {
            return scale(factor(), Rational(-1));
        }
        const Token& t = next();
        if (t.kind == Tok::Number) {
            Lin l;
            l.constant = parse_rational(t.text);
            return l;
        }
        if (t.kind == Tok::Ident && !is_keyword(t.text)) {
            if (!vars_.contains(t.text)) {
                throw error("undeclared variable '" + t.text + "'", t);
            }
            Lin l;
            l.term[t.text] = 1;
            return l;
        }
        if (t.kind == Tok::LParen) {
            Lin inner = expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        throw error("expected a number or variable, found '" + t.text + "'", t);
    }

    // --- token helpers ---------------------------------------------------------

    [[nodiscard]] const Token& peek() const { return toks_[pos_]; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (t.kind != Tok::Eof) {
            ++pos_;
        }
        return t;
    }
    [[nodiscard]] bool check(Tok k) const { return peek().kind == k; }
    bool accept(Tok k) {
        if (check(k)) {
            next();
            return true;
        }
        return false;
    }
    [[nodiscard]] bool peek_keyword(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }
    const Token& expect(Tok k, const std::string& what) {
        if (!check(k)) {
            const Token& t = peek();
            throw error("expected " + what + ", found " + (t.kind == Tok::Eof ? "end of input" : "'" + t.text + "'"),
                        t);
        }
        return next();
    }
    const Token& expect_keyword(const char* kw) {
        if (!peek_keyword(kw)) {
            const Token& t = peek();
            throw error(std::string("expected '") + kw + "', found " +
                            (t.kind == Tok::Eof ? "end of input" : "'" + t.text + "'"),
                        t);
        }
        return next();
    }
    static ParseError error(const std::string& msg, const Token& at) { return ParseError(msg, at.line, at.column); }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::set<std::string> object_names_;
    VarSet vars_;
};

} // namespace dsl

inline Model parse_model(std::string_view text) { return dsl::Parser(text).parse_model(); }

inline std::vector<ScenarioScript> parse_objects(std::string_view text, const VarSet& vars) {
    return dsl::Parser(text).parse_objects(vars);
}

inline Formula parse_formula(std::string_view text, const VarSet& vars) {
    return dsl::Parser(text).parse_formula_only(vars);
}

} // namespace rsbm
