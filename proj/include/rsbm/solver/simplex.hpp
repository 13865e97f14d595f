#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rsbm/formula.hpp"
#include "rsbm/solver/delta_rational.hpp"

namespace rsbm::solver {

/// General simplex over delta-rationals for conjunctions of `<, <=, =, >=, >`
/// bounds on linear terms. Each multi-variable term gets a slack row; Bland's
/// rule picks both the leaving and the entering variable.
class Simplex {
public:
    explicit Simplex(const VarSet& vars) : vars_(vars) {
        for (const auto& v : vars_) {
            index_.emplace(v, columns_);
            add_column();
        }
    }

    /// Adds the bound. Returns false when it contradicts an earlier bound on
    /// the same term.
    bool assert_atom(const LinearAtom& atom) {
        if (atom.relation() == Relation::Ne) {
            throw std::logic_error("disequalities must be split before reaching simplex");
        }
        std::size_t column = column_for(atom);
        const Rational& k = atom.constant();
        switch (atom.relation()) {
        case Relation::Lt: return tighten_upper(column, DeltaRational(k, -1));
        case Relation::Le: return tighten_upper(column, DeltaRational(k));
        case Relation::Eq: return tighten_upper(column, DeltaRational(k)) && tighten_lower(column, DeltaRational(k));
        case Relation::Ge: return tighten_lower(column, DeltaRational(k));
        case Relation::Gt: return tighten_lower(column, DeltaRational(k, 1));
        case Relation::Ne: break;
        }
        return false;
    }

    bool check() {
        for (std::size_t j = 0; j < columns_; ++j) {
            if (row_of_[j]) {
                continue;
            }
            if (lower_[j] && value_[j] < *lower_[j]) {
                update_nonbasic(j, *lower_[j]);
            } else if (upper_[j] && value_[j] > *upper_[j]) {
                update_nonbasic(j, *upper_[j]);
            }
        }
        for (;;) {
            std::optional<std::size_t> leaving;
            for (std::size_t j = 0; j < columns_ && !leaving; ++j) {
                if (row_of_[j] && violated(j)) {
                    leaving = j;
                }
            }
            if (!leaving) {
                return true;
            }
            std::size_t b = *leaving;
            const auto& row = rows_[*row_of_[b]];
            bool raise = lower_[b] && value_[b] < *lower_[b];
            std::optional<std::size_t> entering;
            for (std::size_t j = 0; j < columns_ && !entering; ++j) {
                if (row_of_[j] || row.coeffs[j] == 0) {
                    continue;
                }
                bool positive = row.coeffs[j] > 0;
                bool can_increase = !upper_[j] || value_[j] < *upper_[j];
                bool can_decrease = !lower_[j] || value_[j] > *lower_[j];
                if (raise ? (positive ? can_increase : can_decrease) : (positive ? can_decrease : can_increase)) {
                    entering = j;
                }
            }
            if (!entering) {
                return false;
            }
            pivot_and_update(b, *entering, raise ? *lower_[b] : *upper_[b]);
        }
    }

    /// Concrete model after a successful `check`: delta is chosen as half the
    /// smallest slack that keeps every strict bound strict (capped at 1).
    [[nodiscard]] Assignment model() const {
        std::optional<Rational> limit;
        auto consider = [&](const Rational& gap, const Rational& rate) {
            if (gap > 0 && rate > 0) {
                Rational r = gap / rate;
                if (!limit || r < *limit) {
                    limit = r;
                }
            }
        };
        for (std::size_t j = 0; j < columns_; ++j) {
            if (lower_[j]) {
                consider(value_[j].standard - lower_[j]->standard, lower_[j]->infinitesimal - value_[j].infinitesimal);
            }
            if (upper_[j]) {
                consider(upper_[j]->standard - value_[j].standard, value_[j].infinitesimal - upper_[j]->infinitesimal);
            }
        }
        Rational delta = 1;
        if (limit) {
            Rational half = *limit / 2;
            if (half < delta) {
                delta = half;
            }
        }
        Assignment a;
        for (const auto& v : vars_) {
            a.set(v, value_[index_.at(v)].concretize(delta));
        }
        return a;
    }

private:
    struct Row {
        std::size_t basic;
        std::vector<Rational> coeffs;
    };

    void add_column() {
        ++columns_;
        value_.emplace_back();
        lower_.emplace_back();
        upper_.emplace_back();
        row_of_.emplace_back();
        for (auto& r : rows_) {
            r.coeffs.emplace_back(0);
        }
    }

    std::size_t column_for(const LinearAtom& atom) {
        const auto& coeffs = atom.coeffs();
        if (coeffs.size() == 1) {
            auto it = index_.find(coeffs.front().first);
            if (it == index_.end()) {
                throw DomainError("unknown variable '" + coeffs.front().first + "'");
            }
            return it->second;
        }
        auto found = slack_.find(coeffs);
        if (found != slack_.end()) {
            return found->second;
        }
        std::size_t s = columns_;
        add_column();
        Row row{s, std::vector<Rational>(columns_, Rational(0))};
        DeltaRational value;
        for (const auto& [name, c] : coeffs) {
            auto it = index_.find(name);
            if (it == index_.end()) {
                throw DomainError("unknown variable '" + name + "'");
            }
            std::size_t j = it->second;
            if (row_of_[j]) {
                // Substitute the basic variable's row.
                const auto& sub = rows_[*row_of_[j]];
                for (std::size_t k = 0; k < columns_; ++k) {
                    row.coeffs[k] += c * sub.coeffs[k];
                }
            } else {
                row.coeffs[j] += c;
            }
            value += c * value_[j];
        }
        value_[s] = value;
        row_of_[s] = rows_.size();
        rows_.push_back(std::move(row));
        slack_.emplace(coeffs, s);
        return s;
    }

    bool tighten_lower(std::size_t j, const DeltaRational& b) {
        if (!lower_[j] || b > *lower_[j]) {
            lower_[j] = b;
        }
        return !upper_[j] || *lower_[j] <= *upper_[j];
    }
    bool tighten_upper(std::size_t j, const DeltaRational& b) {
        if (!upper_[j] || b < *upper_[j]) {
            upper_[j] = b;
        }
        return !lower_[j] || *lower_[j] <= *upper_[j];
    }

    [[nodiscard]] bool violated(std::size_t j) const {
        return (lower_[j] && value_[j] < *lower_[j]) || (upper_[j] && value_[j] > *upper_[j]);
    }

    void update_nonbasic(std::size_t j, const DeltaRational& v) {
        DeltaRational diff = v - value_[j];
        for (auto& r : rows_) {
            if (r.coeffs[j] != 0) {
                value_[r.basic] += r.coeffs[j] * diff;
            }
        }
        value_[j] = v;
    }

    void pivot_and_update(std::size_t b, std::size_t j, const DeltaRational& target) {
        std::size_t ri = *row_of_[b];
        Rational a = rows_[ri].coeffs[j];
        DeltaRational theta = Rational(1 / a) * (target - value_[b]);
        value_[b] = target;
        value_[j] += theta;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (k != ri && rows_[k].coeffs[j] != 0) {
                value_[rows_[k].basic] += rows_[k].coeffs[j] * theta;
            }
        }
        // Solve row ri for column j.
        Row pivot{j, std::vector<Rational>(columns_, Rational(0))};
        for (std::size_t k = 0; k < columns_; ++k) {
            if (k != j) {
                pivot.coeffs[k] = -rows_[ri].coeffs[k] / a;
            }
        }
        pivot.coeffs[b] = 1 / a;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (k == ri) {
                continue;
            }
            Rational c = rows_[k].coeffs[j];
            if (c == 0) {
                continue;
            }
            rows_[k].coeffs[j] = 0;
            for (std::size_t m = 0; m < columns_; ++m) {
                if (pivot.coeffs[m] != 0) {
                    rows_[k].coeffs[m] += c * pivot.coeffs[m];
                }
            }
        }
        rows_[ri] = std::move(pivot);
        row_of_[b].reset();
        row_of_[j] = ri;
    }

    VarSet vars_;
    std::map<std::string, std::size_t> index_;
    std::map<std::vector<std::pair<std::string, Rational>>, std::size_t> slack_;
    std::size_t columns_ = 0;
    std::vector<DeltaRational> value_;
    std::vector<std::optional<DeltaRational>> lower_;
    std::vector<std::optional<DeltaRational>> upper_;
    std::vector<std::optional<std::size_t>> row_of_;
    std::vector<Row> rows_;
};

} // namespace rsbm::solver
