#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bdtile {

// Exact arithmetic carriers. All geometry runs on Rational; counting runs on
// BigInt; only report columns that are inherently inexact (eigen data for
// non-rational spectra, growth-rate bounds) use Real.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Real = boost::multiprecision::cpp_bin_float_50;

// Error taxonomy. The CLI maps these onto its exit-code contract.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline BigInt bigint_pow(const BigInt& base, std::uint64_t e) {
    BigInt acc(1), b = base;
    while (e != 0) {
        if (e & 1u) acc *= b;
        b *= b;
        e >>= 1u;
    }
    return acc;
}

inline Rational rational_pow(const Rational& base, std::uint64_t e) {
    return Rational(bigint_pow(numerator(base), e), bigint_pow(denominator(base), e));
}

// Largest integer n with n <= q.
inline BigInt rational_floor(const Rational& q) {
    BigInt n = numerator(q) / denominator(q);
    if (numerator(q) < 0 && n * denominator(q) != numerator(q)) --n;
    return n;
}

inline BigInt rational_ceil(const Rational& q) { return -rational_floor(-q); }

inline Real to_real(const Rational& q) {
    return Real(numerator(q)) / Real(denominator(q));
}

// Exact square root when the rational is a perfect square.
inline std::optional<Rational> rational_sqrt_exact(const Rational& q) {
    if (q < 0) return std::nullopt;
    BigInt n = sqrt(numerator(q)), d = sqrt(denominator(q));
    if (n * n == numerator(q) && d * d == denominator(q)) return Rational(n, d);
    return std::nullopt;
}

// Canonical text form: "p" when the denominator is 1, else "p/q".
inline std::string format_rational(const Rational& q) {
    std::ostringstream os;
    os << numerator(q);
    if (denominator(q) != 1) os << "/" << denominator(q);
    return os.str();
}

// Accepts optional sign, "p" or "p/q". Lowest terms are restored by the
// Rational constructor.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw ParseError("empty rational literal");
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(text));
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + text + "'");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw ParseError("malformed rational literal '" + text + "'");
    }
}

// Deterministic 12-significant-digit rendering for report columns.
template <typename Number>
std::string format_decimal12(const Number& x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace bdtile
