#pragma once

/** \file rational_function.hpp
 *
 * Rational functions over a field K, kept in canonical form: numerator and
 * denominator coprime, denominator monic.  With K exact these form an exact
 * field, used both as Q(E) (coefficients depending on the spectral
 * parameter) and as the coefficient ring in z of the half-power algebra.
 */

#include <utility>

#include "polynomial.hpp"

namespace fingap {

template <class K> class RationalFunction {
  public:
    using Poly = Polynomial<K>;

    RationalFunction() : m_num(), m_den(K(1)) {}
    RationalFunction(const K &c) : m_num(c), m_den(K(1)) {}
    RationalFunction(Poly num) : m_num(std::move(num)), m_den(K(1)) {}
    RationalFunction(Poly num, Poly den) : m_num(std::move(num)), m_den(std::move(den)) {
        if (m_den.is_zero()) {
            throw Error("RationalFunction: zero denominator");
        }
        reduce();
    }

    static RationalFunction variable() {
        return RationalFunction(Poly::monomial(K(1), 1));
    }

    const Poly &num() const { return m_num; }
    const Poly &den() const { return m_den; }
    bool is_zero() const { return m_num.is_zero(); }
    bool is_polynomial() const { return m_den.degree() == 0; }

    friend RationalFunction operator+(const RationalFunction &a,
                                      const RationalFunction &b) {
        return RationalFunction(a.m_num * b.m_den + b.m_num * a.m_den,
                                a.m_den * b.m_den);
    }
    friend RationalFunction operator-(const RationalFunction &a,
                                      const RationalFunction &b) {
        return RationalFunction(a.m_num * b.m_den - b.m_num * a.m_den,
                                a.m_den * b.m_den);
    }
    friend RationalFunction operator*(const RationalFunction &a,
                                      const RationalFunction &b) {
        return RationalFunction(a.m_num * b.m_num, a.m_den * b.m_den);
    }
    friend RationalFunction operator/(const RationalFunction &a,
                                      const RationalFunction &b) {
        if (b.is_zero()) {
            throw Error("RationalFunction: division by zero");
        }
        return RationalFunction(a.m_num * b.m_den, a.m_den * b.m_num);
    }
    friend RationalFunction operator-(const RationalFunction &a) {
        RationalFunction r = a;
        r.m_num = -r.m_num;
        return r;
    }
    RationalFunction &operator+=(const RationalFunction &o) { return *this = *this + o; }
    RationalFunction &operator-=(const RationalFunction &o) { return *this = *this - o; }
    RationalFunction &operator*=(const RationalFunction &o) { return *this = *this * o; }
    RationalFunction &operator/=(const RationalFunction &o) { return *this = *this / o; }

    friend bool operator==(const RationalFunction &a, const RationalFunction &b) {
        return a.m_num == b.m_num && a.m_den == b.m_den;
    }

    /// Formal derivative (quotient rule).
    RationalFunction derivative() const {
        return RationalFunction(
            m_num.derivative() * m_den - m_num * m_den.derivative(),
            m_den * m_den);
    }

    K eval(const K &x) const {
        K d = m_den.eval(x);
        if (d == K(0)) {
            throw Error("RationalFunction::eval: pole at evaluation point");
        }
        return m_num.eval(x) / d;
    }

  private:
    void reduce() {
        if (m_num.is_zero()) {
            m_den = Poly(K(1));
            return;
        }
        Poly g = gcd_poly(m_num, m_den);
        if (g.degree() > 0) {
            m_num = divide_exact(m_num, g);
            m_den = divide_exact(m_den, g);
        }
        const K lc = m_den.leading();
        if (!(lc == K(1))) {
            m_num /= lc;
            m_den /= lc;
        }
    }

    Poly m_num;
    Poly m_den;
};

} // namespace fingap
