#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "rsbm/error.hpp"

namespace rsbm {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "3", "-7/2" or "0.25" into an exact rational.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) {
        throw Error("empty rational literal");
    }
    auto dot = s.find('.');
    Rational r;
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac = s.size() - dot - 1;
        mpz_class den = 1;
        for (std::size_t i = 0; i < frac; ++i) {
            den *= 10;
        }
        mpz_class num;
        if (num.set_str(digits, 10) != 0) {
            throw Error("malformed decimal literal '" + s + "'");
        }
        r = Rational(num, den);
    } else if (r.set_str(s, 10) != 0) {
        throw Error("malformed rational literal '" + s + "'");
    }
    if (r.get_den() == 0) {
        throw Error("zero denominator in '" + s + "'");
    }
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline int compare(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    return (c > 0) - (c < 0);
}

} // namespace rsbm
