#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace srgeo {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Errors of the "bad input / hypothesis failed" kind; the CLI maps these to exit 1.
class domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parses "p", "-p" or "p/q" (optionally signed numerator). No decimals: the
// symbolic layer is exact by design.
inline Rational parse_rational(std::string_view s) {
    if (s.empty()) throw domain_error("empty rational literal");
    const auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) return Rational(BigInt(std::string(s)));
        BigInt num{std::string(s.substr(0, slash))};
        BigInt den{std::string(s.substr(slash + 1))};
        if (den == 0) throw domain_error("zero denominator in rational literal");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw domain_error("malformed rational literal: '" + std::string(s) + "'");
    }
}

// Canonical "p" / "p/q" form (cpp_rational keeps gcd-reduced, positive denominator).
inline std::string format_rational(const Rational& r) {
    std::string out = numerator(r).str();
    if (denominator(r) != 1) {
        out += '/';
        out += denominator(r).str();
    }
    return out;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Compact double rendering for diagnostics and error messages.
inline std::string format_double_brief(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// λ^e for integer e of either sign (λ ≠ 0 when e < 0).
inline Rational rational_pow(const Rational& lam, long e) {
    if (e == 0) return Rational(1);
    Rational base = lam;
    if (e < 0) {
        if (lam == 0) throw domain_error("0 cannot be raised to a negative power");
        base = Rational(1) / lam;
        e = -e;
    }
    Rational acc(1);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

}  // namespace srgeo
