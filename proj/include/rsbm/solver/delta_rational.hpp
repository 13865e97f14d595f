#pragma once

#include "rsbm/rational.hpp"

namespace rsbm::solver {

/// `standard + infinitesimal * delta` for a symbolic delta > 0.
struct DeltaRational {
    Rational standard = 0;
    Rational infinitesimal = 0;

    DeltaRational() = default;
    DeltaRational(Rational s, Rational k = 0) : standard(std::move(s)), infinitesimal(std::move(k)) {}

    friend DeltaRational operator+(const DeltaRational& a, const DeltaRational& b) {
        return {a.standard + b.standard, a.infinitesimal + b.infinitesimal};
    }
    friend DeltaRational operator-(const DeltaRational& a, const DeltaRational& b) {
        return {a.standard - b.standard, a.infinitesimal - b.infinitesimal};
    }
    friend DeltaRational operator*(const Rational& c, const DeltaRational& a) {
        return {c * a.standard, c * a.infinitesimal};
    }
    DeltaRational& operator+=(const DeltaRational& o) {
        standard += o.standard;
        infinitesimal += o.infinitesimal;
        return *this;
    }

    friend int compare(const DeltaRational& a, const DeltaRational& b) {
        if (int c = rsbm::compare(a.standard, b.standard); c != 0) {
            return c;
        }
        return rsbm::compare(a.infinitesimal, b.infinitesimal);
    }
    friend bool operator<(const DeltaRational& a, const DeltaRational& b) { return compare(a, b) < 0; }
    friend bool operator>(const DeltaRational& a, const DeltaRational& b) { return compare(a, b) > 0; }
    friend bool operator<=(const DeltaRational& a, const DeltaRational& b) { return compare(a, b) <= 0; }
    friend bool operator>=(const DeltaRational& a, const DeltaRational& b) { return compare(a, b) >= 0; }
    friend bool operator==(const DeltaRational& a, const DeltaRational& b) { return compare(a, b) == 0; }

    [[nodiscard]] Rational concretize(const Rational& delta) const { return standard + infinitesimal * delta; }
};

} // namespace rsbm::solver
