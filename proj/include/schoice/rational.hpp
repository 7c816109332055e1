#pragma once

#include <cctype>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "schoice/errors.hpp"

namespace schoice {

// All probabilities are exact rationals: denominators grow as products of
// factorials, and the equality checks in this library are exact, so floating
// point is never used for probability mass.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Renders a rational as "num/den", or just "num" when the denominator is 1.
inline std::string rational_to_string(const Rational& value) {
    return value.str();
}

/// Parses "num/den" or a plain integer string. Whitespace is not allowed.
inline Rational parse_rational(const std::string& text) {
    auto fail = [&]() -> ValidationError {
        return {ValidationCode::ParseError, "not a rational: \"" + text + "\""};
    };
    std::size_t pos = 0;
    auto read_integer = [&]() -> BigInt {
        std::size_t start = pos;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+'))
            ++pos;
        std::size_t digits_start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
        if (pos == digits_start)
            throw fail();
        return BigInt(text.substr(start, pos - start));
    };
    BigInt num = read_integer();
    BigInt den = 1;
    if (pos < text.size()) {
        if (text[pos] != '/')
            throw fail();
        ++pos;
        den = read_integer();
        if (pos != text.size())
            throw fail();
        if (den == 0)
            throw ValidationError(ValidationCode::ParseError,
                                  "zero denominator: \"" + text + "\"");
    }
    return Rational(num, den);
}

inline BigInt factorial(int n) {
    BigInt out = 1;
    for (int t = 2; t <= n; ++t)
        out *= t;
    return out;
}

} // namespace schoice
