#pragma once

/** \file scalar.hpp
 *
 * Scalar types used throughout:
 *  - Int / Rational: exact integers and rationals on top of GMP,
 *  - Real: arbitrary-precision floating point on top of MPFR.
 *
 * Expression templates are switched off so the types behave like plain
 * value types inside our own templates.
 */

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <string>

#include "errors.hpp"

namespace fingap {

using Int = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                          boost::multiprecision::et_off>;
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                  boost::multiprecision::et_off>;
using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0,
                                              boost::multiprecision::allocate_dynamic>,
    boost::multiprecision::et_off>;

/** Scoped working precision (decimal digits) for Real.
 *
 * MPFR precision is a process default in Boost.Multiprecision; library
 * entry points install one of these so that all temporaries produced while
 * it is alive carry the requested precision.
 */
class precision_guard {
  public:
    explicit precision_guard(unsigned digits10) : m_saved(Real::default_precision()) {
        Real::default_precision(digits10);
    }
    ~precision_guard() { Real::default_precision(m_saved); }
    precision_guard(const precision_guard &) = delete;
    precision_guard &operator=(const precision_guard &) = delete;

  private:
    unsigned m_saved;
};

/// n.1_K for any field K, via binary expansion of n.
template <class K> K field_from_long(long n) {
    bool neg = n < 0;
    unsigned long m = static_cast<unsigned long>(neg ? -n : n);
    K acc{};
    K bit(1);
    while (m != 0) {
        if (m & 1UL) {
            acc += bit;
        }
        bit += bit;
        m >>= 1UL;
    }
    return neg ? K{} - acc : acc;
}

/// Exact integer power with negative exponents allowed (for rationals).
inline Rational pow_int(const Rational &base, long e) {
    if (e == 0) {
        return Rational(1);
    }
    if (base == 0 && e < 0) {
        throw Error("pow_int: zero base with negative exponent");
    }
    Rational b = e > 0 ? base : Rational(1) / base;
    unsigned long n = static_cast<unsigned long>(e > 0 ? e : -e);
    Rational acc(1);
    while (n != 0) {
        if (n & 1UL) {
            acc *= b;
        }
        b *= b;
        n >>= 1UL;
    }
    return acc;
}

/// Parse "p", "-p", or "p/q" into a rational (GMP accepts this syntax).
inline Rational parse_rational(const std::string &s) {
    try {
        Rational r(s);
        return r;
    } catch (const std::exception &) {
        throw UnsupportedFormat("parse_rational: cannot parse '" + s + "'");
    }
}

/// Canonical "p/q" or "p" string for serialization.
inline std::string format_rational(const Rational &r) {
    if (denominator(r) == 1) {
        return numerator(r).str();
    }
    return numerator(r).str() + "/" + denominator(r).str();
}

/// Convert an exact rational to a Real at the current working precision.
inline Real to_real(const Rational &r) {
    return Real(numerator(r)) / Real(denominator(r));
}

/// Round a Real to the nearest integer (as long).
inline long lround_real(const Real &x) {
    Real r = floor(x + Real(1) / 2);
    return static_cast<long>(r);
}

/// 10^k as a Real (callers pass negative k for tolerances).
inline Real pow10(long k) {
    return pow(Real(10), static_cast<int>(k));
}

} // namespace fingap
