#pragma once

#include <gmpxx.h>

#include <string>

#include "fedoq/errors.hpp"

namespace fedoq {

// Exact rational scalar. mpq_class keeps values canonical: reduced to lowest
// terms, denominator positive, zero stored as 0/1.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Accepts "p", "-p" or "p/q" with q > 0.
inline Rational parse_rational(const std::string& text, std::size_t pos_offset = 0) {
    mpq_class q;
    if (q.set_str(text, 10) != 0)
        throw ParseError("invalid rational literal '" + text + "'", pos_offset);
    if (q.get_den() == 0)
        throw ParseError("zero denominator in '" + text + "'", pos_offset);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

} // namespace fedoq
