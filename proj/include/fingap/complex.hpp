#pragma once

/** \file complex.hpp
 *
 * Minimal complex arithmetic over an arbitrary real type.  std::complex is
 * only specified for built-in floating point, so multiprecision work needs
 * its own type.  Only the operations the library actually uses are
 * provided.
 */

#include <string>

#include "scalar.hpp"

namespace fingap {

template <class R> struct complex_t {
    R re{};
    R im{};

    complex_t() = default;
    complex_t(const R &r) : re(r), im(R(0)) {}
    complex_t(const R &r, const R &i) : re(r), im(i) {}

    complex_t &operator+=(const complex_t &o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    complex_t &operator-=(const complex_t &o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    complex_t &operator*=(const complex_t &o) {
        R r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    complex_t &operator/=(const complex_t &o) {
        // NOTE: Smith's algorithm; avoids overflow for extreme magnitudes.
        using std::abs;
        if (abs(o.re) >= abs(o.im)) {
            R q = o.im / o.re;
            R d = o.re + o.im * q;
            R r = (re + im * q) / d;
            im = (im - re * q) / d;
            re = r;
        } else {
            R q = o.re / o.im;
            R d = o.re * q + o.im;
            R r = (re * q + im) / d;
            im = (im * q - re) / d;
            re = r;
        }
        return *this;
    }

    friend complex_t operator+(complex_t a, const complex_t &b) { return a += b; }
    friend complex_t operator-(complex_t a, const complex_t &b) { return a -= b; }
    friend complex_t operator*(complex_t a, const complex_t &b) { return a *= b; }
    friend complex_t operator/(complex_t a, const complex_t &b) { return a /= b; }
    friend complex_t operator-(const complex_t &a) { return {-a.re, -a.im}; }
    friend bool operator==(const complex_t &a, const complex_t &b) {
        return a.re == b.re && a.im == b.im;
    }
};

using Complex = complex_t<Real>;

template <class R> complex_t<R> conj(const complex_t<R> &z) { return {z.re, -z.im}; }

template <class R> R norm(const complex_t<R> &z) { return z.re * z.re + z.im * z.im; }

template <class R> R abs(const complex_t<R> &z) {
    using std::hypot;
    return hypot(z.re, z.im);
}

template <class R> R arg(const complex_t<R> &z) {
    using std::atan2;
    return atan2(z.im, z.re);
}

/// Principal square root.
template <class R> complex_t<R> sqrt(const complex_t<R> &z) {
    using std::abs;
    using std::sqrt;
    R a = fingap::abs(z);
    if (a == 0) {
        return {R(0), R(0)};
    }
    if (z.re >= 0) {
        R u = sqrt((a + z.re) / 2);
        return {u, z.im / (2 * u)};
    }
    R v = sqrt((a - z.re) / 2);
    if (z.im < 0) {
        v = -v;
    }
    return {z.im / (2 * v), v};
}

template <class R> complex_t<R> exp(const complex_t<R> &z) {
    using std::cos;
    using std::exp;
    using std::sin;
    R m = exp(z.re);
    return {m * cos(z.im), m * sin(z.im)};
}

/// Principal logarithm.
template <class R> complex_t<R> log(const complex_t<R> &z) {
    using std::log;
    return {log(fingap::abs(z)), arg(z)};
}

template <class R> complex_t<R> pow_int(complex_t<R> base, long e) {
    complex_t<R> acc{R(1), R(0)};
    if (e == 0) {
        return acc;
    }
    bool invert = e < 0;
    unsigned long n = static_cast<unsigned long>(invert ? -e : e);
    while (n != 0) {
        if (n & 1UL) {
            acc *= base;
        }
        base *= base;
        n >>= 1UL;
    }
    if (invert) {
        return complex_t<R>{R(1), R(0)} / acc;
    }
    return acc;
}

inline Complex to_complex(const Rational &r) { return Complex(to_real(r)); }

/// Decimal string "re+imj" style pair used by the JSON emitters.
inline std::string format_real(const Real &x, unsigned digits10) {
    return x.str(digits10);
}

} // namespace fingap
