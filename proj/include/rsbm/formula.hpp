#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rsbm/error.hpp"
#include "rsbm/rational.hpp"

namespace rsbm {

// ---------------------------------------------------------------------------
// Variables
// ---------------------------------------------------------------------------

/// Ordered set of real-valued variable names. Always sorted and duplicate-free.
class VarSet {
public:
    VarSet() = default;

    explicit VarSet(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.empty()) {
            throw DomainError("variable set must not be empty");
        }
        std::sort(names_.begin(), names_.end());
        auto dup = std::adjacent_find(names_.begin(), names_.end());
        if (dup != names_.end()) {
            throw DomainError("duplicate variable '" + *dup + "'");
        }
    }

    VarSet(std::initializer_list<std::string> names) : VarSet(std::vector<std::string>(names)) {}

    [[nodiscard]] bool contains(const std::string& name) const {
        return std::binary_search(names_.begin(), names_.end(), name);
    }
    [[nodiscard]] std::size_t size() const { return names_.size(); }
    [[nodiscard]] bool empty() const { return names_.empty(); }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] auto begin() const { return names_.begin(); }
    [[nodiscard]] auto end() const { return names_.end(); }

    friend bool operator==(const VarSet&, const VarSet&) = default;

private:
    std::vector<std::string> names_;
};

/// Total map from variable names to exact rationals.
class Assignment {
public:
    Assignment() = default;
    Assignment(std::initializer_list<std::pair<const std::string, Rational>> values) : values_(values) {}
    explicit Assignment(std::map<std::string, Rational> values) : values_(std::move(values)) {}

    static Assignment zeros(const VarSet& vars) {
        Assignment a;
        for (const auto& v : vars) {
            a.values_.emplace(v, Rational(0));
        }
        return a;
    }

    [[nodiscard]] const Rational& at(const std::string& name) const {
        auto it = values_.find(name);
        if (it == values_.end()) {
            throw DomainError("assignment has no value for variable '" + name + "'");
        }
        return it->second;
    }

    void set(const std::string& name, Rational value) { values_[name] = std::move(value); }

    [[nodiscard]] bool covers(const VarSet& vars) const {
        return values_.size() == vars.size() &&
               std::all_of(vars.begin(), vars.end(), [&](const auto& v) { return values_.count(v) != 0; });
    }

    [[nodiscard]] const std::map<std::string, Rational>& values() const { return values_; }

    friend bool operator==(const Assignment& a, const Assignment& b) { return a.values_ == b.values_; }

private:
    std::map<std::string, Rational> values_;
};

// ---------------------------------------------------------------------------
// Linear atoms
// ---------------------------------------------------------------------------

enum class Relation { Lt, Le, Eq, Ne, Ge, Gt };

inline Relation negate(Relation r) {
    switch (r) {
    case Relation::Lt: return Relation::Ge;
    case Relation::Le: return Relation::Gt;
    case Relation::Eq: return Relation::Ne;
    case Relation::Ne: return Relation::Eq;
    case Relation::Ge: return Relation::Lt;
    case Relation::Gt: return Relation::Le;
    }
    return r;
}

/// The relation obtained when both sides are multiplied by -1.
inline Relation mirror(Relation r) {
    switch (r) {
    case Relation::Lt: return Relation::Gt;
    case Relation::Le: return Relation::Ge;
    case Relation::Ge: return Relation::Le;
    case Relation::Gt: return Relation::Lt;
    default: return r;
    }
}

inline bool compare_holds(int sign, Relation r) {
    switch (r) {
    case Relation::Lt: return sign < 0;
    case Relation::Le: return sign <= 0;
    case Relation::Eq: return sign == 0;
    case Relation::Ne: return sign != 0;
    case Relation::Ge: return sign >= 0;
    case Relation::Gt: return sign > 0;
    }
    return false;
}

inline const char* infix_symbol(Relation r) {
    switch (r) {
    case Relation::Lt: return "<";
    case Relation::Le: return "<=";
    case Relation::Eq: return "==";
    case Relation::Ne: return "!=";
    case Relation::Ge: return ">=";
    case Relation::Gt: return ">";
    }
    return "?";
}

inline const char* sexpr_symbol(Relation r) {
    switch (r) {
    case Relation::Lt: return "<";
    case Relation::Le: return "<=";
    case Relation::Eq: return "=";
    case Relation::Ne: return "distinct";
    case Relation::Ge: return ">=";
    case Relation::Gt: return ">";
    }
    return "?";
}

/// Linear term: variable -> coefficient, zero coefficients removed.
using LinearTerm = std::map<std::string, Rational>;

/// `sum(c_i * x_i) REL constant`, normalized so the first coefficient (by
/// variable name) is exactly 1.
class LinearAtom {
public:
    /// Builds a normalized atom; returns the truth value instead when every
    /// coefficient is zero.
    static std::variant<LinearAtom, bool> make(const LinearTerm& term, Relation rel, const Rational& constant) {
        std::vector<std::pair<std::string, Rational>> coeffs;
        for (const auto& [name, c] : term) {
            if (c != 0) {
                coeffs.emplace_back(name, c);
            }
        }
        if (coeffs.empty()) {
            return compare_holds(compare(Rational(0), constant), rel);
        }
        Rational lead = coeffs.front().second;
        for (auto& [name, c] : coeffs) {
            c /= lead;
        }
        Rational k = constant / lead;
        if (lead < 0) {
            rel = mirror(rel);
        }
        return LinearAtom(std::move(coeffs), rel, std::move(k));
    }

    /// Single-variable shorthand, `x REL constant`.
    static LinearAtom bound(const std::string& var, Relation rel, const Rational& constant) {
        return std::get<LinearAtom>(make({{var, Rational(1)}}, rel, constant));
    }

    [[nodiscard]] const std::vector<std::pair<std::string, Rational>>& coeffs() const { return coeffs_; }
    [[nodiscard]] Relation relation() const { return rel_; }
    [[nodiscard]] const Rational& constant() const { return constant_; }

    [[nodiscard]] LinearAtom negated() const { return LinearAtom(coeffs_, negate(rel_), constant_); }

    /// Polarity representative: an atom and its negation share one base.
    [[nodiscard]] LinearAtom base() const {
        if (rel_ == Relation::Lt || rel_ == Relation::Gt || rel_ == Relation::Ne) {
            return negated();
        }
        return *this;
    }
    [[nodiscard]] bool is_base() const { return base() == *this; }

    [[nodiscard]] Rational lhs(const Assignment& a) const {
        Rational sum = 0;
        for (const auto& [name, c] : coeffs_) {
            sum += c * a.at(name);
        }
        return sum;
    }

    [[nodiscard]] bool holds(const Assignment& a) const { return compare_holds(compare(lhs(a), constant_), rel_); }

    /// Same left-hand side (coefficients), regardless of relation and constant.
    [[nodiscard]] bool same_term(const LinearAtom& other) const { return coeffs_ == other.coeffs_; }

    friend int compare(const LinearAtom& a, const LinearAtom& b) {
        std::size_t n = std::min(a.coeffs_.size(), b.coeffs_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (a.coeffs_[i].first != b.coeffs_[i].first) {
                return a.coeffs_[i].first < b.coeffs_[i].first ? -1 : 1;
            }
            if (int c = compare(a.coeffs_[i].second, b.coeffs_[i].second); c != 0) {
                return c;
            }
        }
        if (a.coeffs_.size() != b.coeffs_.size()) {
            return a.coeffs_.size() < b.coeffs_.size() ? -1 : 1;
        }
        if (int c = compare(a.constant_, b.constant_); c != 0) {
            return c;
        }
        if (a.rel_ != b.rel_) {
            return static_cast<int>(a.rel_) < static_cast<int>(b.rel_) ? -1 : 1;
        }
        return 0;
    }

    friend bool operator==(const LinearAtom& a, const LinearAtom& b) { return compare(a, b) == 0; }
    friend bool operator<(const LinearAtom& a, const LinearAtom& b) { return compare(a, b) < 0; }

private:
    LinearAtom(std::vector<std::pair<std::string, Rational>> coeffs, Relation rel, Rational constant)
        : coeffs_(std::move(coeffs)), rel_(rel), constant_(std::move(constant)) {}

    std::vector<std::pair<std::string, Rational>> coeffs_;
    Relation rel_;
    Rational constant_;
};

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

/// Immutable, shared Boolean formula over linear atoms.
class Formula {
public:
    enum class Kind { True, False, Atom, Not, And, Or, Implies };

    Formula() : Formula(Kind::False) {}

    static Formula top() { return Formula(Kind::True); }
    static Formula bottom() { return Formula(Kind::False); }
    static Formula constant(bool value) { return value ? top() : bottom(); }

    static Formula atom(LinearAtom a) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Atom;
        n->atom = std::move(a);
        return Formula(std::move(n));
    }

    /// Atom from an unnormalized term; degenerates to True/False when constant.
    static Formula linear(const LinearTerm& term, Relation rel, const Rational& constant) {
        auto made = LinearAtom::make(term, rel, constant);
        if (auto* b = std::get_if<bool>(&made)) {
            return constant_formula(*b);
        }
        return atom(std::get<LinearAtom>(std::move(made)));
    }

    static Formula bound(const std::string& var, Relation rel, long constant) {
        return atom(LinearAtom::bound(var, rel, Rational(constant)));
    }

    static Formula negation(Formula f) { return Formula(Kind::Not, {std::move(f)}); }
    static Formula conjunction(std::vector<Formula> fs) { return Formula(Kind::And, std::move(fs)); }
    static Formula disjunction(std::vector<Formula> fs) { return Formula(Kind::Or, std::move(fs)); }
    static Formula implication(Formula a, Formula b) { return Formula(Kind::Implies, {std::move(a), std::move(b)}); }

    [[nodiscard]] Kind kind() const { return node_->kind; }
    [[nodiscard]] bool is_true() const { return kind() == Kind::True; }
    [[nodiscard]] bool is_false() const { return kind() == Kind::False; }
    [[nodiscard]] const LinearAtom& atom() const { return *node_->atom; }
    [[nodiscard]] std::span<const Formula> children() const { return node_->children; }

    friend int compare(const Formula& a, const Formula& b) {
        if (a.node_ == b.node_) {
            return 0;
        }
        if (a.kind() != b.kind()) {
            return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
        }
        if (a.kind() == Kind::Atom) {
            return compare(a.atom(), b.atom());
        }
        auto ca = a.children();
        auto cb = b.children();
        std::size_t n = std::min(ca.size(), cb.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (int c = compare(ca[i], cb[i]); c != 0) {
                return c;
            }
        }
        if (ca.size() != cb.size()) {
            return ca.size() < cb.size() ? -1 : 1;
        }
        return 0;
    }

    friend bool operator==(const Formula& a, const Formula& b) { return compare(a, b) == 0; }
    friend bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

    friend Formula operator&&(Formula a, Formula b) { return conjunction({std::move(a), std::move(b)}); }
    friend Formula operator||(Formula a, Formula b) { return disjunction({std::move(a), std::move(b)}); }
    friend Formula operator!(Formula a) { return negation(std::move(a)); }

private:
    struct Node {
        Kind kind = Kind::False;
        std::optional<LinearAtom> atom;
        std::vector<Formula> children;
    };

    static Formula constant_formula(bool b) { return b ? top() : bottom(); }

    explicit Formula(Kind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        node_ = std::move(n);
    }
    Formula(Kind k, std::vector<Formula> children) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->children = std::move(children);
        node_ = std::move(n);
    }
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Semantics
// ---------------------------------------------------------------------------

inline bool evaluate(const Formula& f, const Assignment& a) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: return f.atom().holds(a);
    case K::Not: return !evaluate(f.children()[0], a);
    case K::And:
        return std::all_of(f.children().begin(), f.children().end(), [&](const Formula& c) { return evaluate(c, a); });
    case K::Or:
        return std::any_of(f.children().begin(), f.children().end(), [&](const Formula& c) { return evaluate(c, a); });
    case K::Implies: return !evaluate(f.children()[0], a) || evaluate(f.children()[1], a);
    }
    return false;
}

namespace detail {

inline Formula make_junction(Formula::Kind kind, std::vector<Formula> parts) {
    using K = Formula::Kind;
    const K identity = kind == K::And ? K::True : K::False;
    const K absorbing = kind == K::And ? K::False : K::True;
    std::vector<Formula> flat;
    for (auto& p : parts) {
        if (p.kind() == absorbing) {
            return Formula::constant(absorbing == K::True);
        }
        if (p.kind() == identity) {
            continue;
        }
        if (p.kind() == kind) {
            for (const auto& c : p.children()) {
                flat.push_back(c);
            }
        } else {
            flat.push_back(std::move(p));
        }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    // Complementary literals collapse the junction.
    std::set<LinearAtom> literals;
    for (const auto& c : flat) {
        if (c.kind() == K::Atom) {
            literals.insert(c.atom());
        }
    }
    for (const auto& lit : literals) {
        if (literals.count(lit.negated()) != 0) {
            return Formula::constant(absorbing == K::True);
        }
    }
    if (flat.empty()) {
        return Formula::constant(identity == K::True);
    }
    if (flat.size() == 1) {
        return flat.front();
    }
    return kind == K::And ? Formula::conjunction(std::move(flat)) : Formula::disjunction(std::move(flat));
}

inline Formula nnf(const Formula& f, bool negated) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True: return Formula::constant(!negated);
    case K::False: return Formula::constant(negated);
    case K::Atom: return Formula::atom(negated ? f.atom().negated() : f.atom());
    case K::Not: return nnf(f.children()[0], !negated);
    case K::And:
    case K::Or: {
        std::vector<Formula> parts;
        parts.reserve(f.children().size());
        for (const auto& c : f.children()) {
            parts.push_back(nnf(c, negated));
        }
        K k = f.kind();
        if (negated) {
            k = k == K::And ? K::Or : K::And;
        }
        return make_junction(k, std::move(parts));
    }
    case K::Implies: {
        const auto& a = f.children()[0];
        const auto& b = f.children()[1];
        if (negated) {
            return make_junction(K::And, {nnf(a, false), nnf(b, true)});
        }
        return make_junction(K::Or, {nnf(a, true), nnf(b, false)});
    }
    }
    return f;
}

} // namespace detail

/// Negation normal form with normalized atoms, flattened and sorted
/// junctions, and constant folding. Idempotent and evaluation-preserving.
inline Formula canonicalize(const Formula& f) { return detail::nnf(f, false); }

inline Formula conj(std::vector<Formula> fs) { return canonicalize(Formula::conjunction(std::move(fs))); }
inline Formula disj(std::vector<Formula> fs) { return canonicalize(Formula::disjunction(std::move(fs))); }
inline Formula neg(const Formula& f) { return canonicalize(Formula::negation(f)); }

inline void collect_atoms(const Formula& f, std::set<LinearAtom>& out) {
    if (f.kind() == Formula::Kind::Atom) {
        out.insert(f.atom());
        return;
    }
    for (const auto& c : f.children()) {
        collect_atoms(c, out);
    }
}

inline std::set<std::string> variables_of(const Formula& f) {
    std::set<LinearAtom> atoms;
    collect_atoms(f, atoms);
    std::set<std::string> vars;
    for (const auto& a : atoms) {
        for (const auto& [name, c] : a.coeffs()) {
            vars.insert(name);
        }
    }
    return vars;
}

inline void require_vars(const Formula& f, const VarSet& vars) {
    for (const auto& v : variables_of(f)) {
        if (!vars.contains(v)) {
            throw DomainError("formula mentions undeclared variable '" + v + "'");
        }
    }
}

inline std::size_t atom_count(const Formula& f) {
    if (f.kind() == Formula::Kind::Atom) {
        return 1;
    }
    std::size_t n = 0;
    for (const auto& c : f.children()) {
        n += atom_count(c);
    }
    return n;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

inline std::string to_infix(const LinearAtom& a) {
    std::string out;
    bool first = true;
    for (const auto& [name, c] : a.coeffs()) {
        Rational mag = abs(c);
        if (first) {
            if (c < 0) {
                out += "-";
            }
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (mag != 1) {
            out += to_string(mag) + "*";
        }
        out += name;
        first = false;
    }
    out += " ";
    out += infix_symbol(a.relation());
    out += " ";
    out += to_string(a.constant());
    return out;
}

namespace detail {

inline std::string infix(const Formula& f, int parent_prec) {
    using K = Formula::Kind;
    auto wrap = [&](std::string s, int prec) { return prec < parent_prec ? "(" + s + ")" : s; };
    switch (f.kind()) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Atom: return wrap(to_infix(f.atom()), 4);
    case K::Not: return "!" + infix(f.children()[0], 5);
    case K::And:
    case K::Or: {
        int prec = f.kind() == K::And ? 3 : 2;
        std::string sep = f.kind() == K::And ? " && " : " || ";
        std::string out;
        for (std::size_t i = 0; i < f.children().size(); ++i) {
            if (i != 0) {
                out += sep;
            }
            out += infix(f.children()[i], prec + 1);
        }
        return wrap(out, prec);
    }
    case K::Implies:
        return wrap(infix(f.children()[0], 2) + " -> " + infix(f.children()[1], 1), 1);
    }
    return "?";
}

inline std::string sexpr_number(const Rational& r) {
    Rational mag = abs(r);
    std::string s = mag.get_den() == 1 ? mag.get_num().get_str()
                                       : "(/ " + mag.get_num().get_str() + " " + mag.get_den().get_str() + ")";
    return r < 0 ? "(- " + s + ")" : s;
}

} // namespace detail

/// Infix text in the scenario-language syntax (`&&`, `||`, `!`, `->`).
inline std::string to_infix(const Formula& f) { return detail::infix(f, 0); }

inline std::string to_sexpr(const LinearAtom& a) {
    std::vector<std::string> terms;
    for (const auto& [name, c] : a.coeffs()) {
        terms.push_back(c == 1 ? name : "(* " + detail::sexpr_number(c) + " " + name + ")");
    }
    std::string lhs = terms.size() == 1 ? terms.front() : "(+";
    if (terms.size() > 1) {
        for (const auto& t : terms) {
            lhs += " " + t;
        }
        lhs += ")";
    }
    return std::string("(") + sexpr_symbol(a.relation()) + " " + lhs + " " + detail::sexpr_number(a.constant()) + ")";
}

/// S-expression text compatible with SMT-LIB2 term syntax.
inline std::string to_sexpr(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Atom: return to_sexpr(f.atom());
    case K::Not:
    case K::And:
    case K::Or:
    case K::Implies: {
        std::string op = f.kind() == K::Not ? "not" : f.kind() == K::And ? "and" : f.kind() == K::Or ? "or" : "=>";
        std::string out = "(" + op;
        for (const auto& c : f.children()) {
            out += " " + to_sexpr(c);
        }
        return out + ")";
    }
    }
    return "?";
}

inline std::string to_string(const Assignment& a) {
    std::string out = "{";
    bool first = true;
    for (const auto& [name, value] : a.values()) {
        if (!first) {
            out += ", ";
        }
        out += name + ": " + to_string(value);
        first = false;
    }
    return out + "}";
}

} // namespace rsbm
