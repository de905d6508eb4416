#pragma once

/** \file polynomial.hpp
 *
 * Dense univariate polynomials over a field K, coefficients stored in
 * ascending order.  K must be a field: default construction gives 0, K(1)
 * gives one, and +,-,*,/ and == behave as usual.  Everything here is exact;
 * no normalization ever rounds.
 */

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace fingap {

template <class K> class Polynomial {
  public:
    Polynomial() = default;
    Polynomial(const K &c) {
        if (!(c == K(0))) {
            m_c.push_back(c);
        }
    }
    explicit Polynomial(std::vector<K> coeffs) : m_c(std::move(coeffs)) { trim(); }

    /// c * X^n
    static Polynomial monomial(const K &c, std::size_t n) {
        if (c == K(0)) {
            return {};
        }
        std::vector<K> v(n + 1, K(0));
        v[n] = c;
        return Polynomial(std::move(v));
    }

    bool is_zero() const { return m_c.empty(); }
    /// Degree; -1 for the zero polynomial.
    long degree() const { return static_cast<long>(m_c.size()) - 1; }
    const std::vector<K> &coeffs() const { return m_c; }

    /// Coefficient of X^i (0 beyond the degree).
    const K &operator[](std::size_t i) const {
        static const K zero{};
        return i < m_c.size() ? m_c[i] : zero;
    }

    const K &leading() const {
        if (m_c.empty()) {
            throw Error("Polynomial::leading: zero polynomial");
        }
        return m_c.back();
    }

    Polynomial &operator+=(const Polynomial &o) {
        if (m_c.size() < o.m_c.size()) {
            m_c.resize(o.m_c.size(), K(0));
        }
        for (std::size_t i = 0; i < o.m_c.size(); ++i) {
            m_c[i] += o.m_c[i];
        }
        trim();
        return *this;
    }
    Polynomial &operator-=(const Polynomial &o) {
        if (m_c.size() < o.m_c.size()) {
            m_c.resize(o.m_c.size(), K(0));
        }
        for (std::size_t i = 0; i < o.m_c.size(); ++i) {
            m_c[i] -= o.m_c[i];
        }
        trim();
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial &b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial &b) { return a -= b; }
    friend Polynomial operator-(const Polynomial &a) {
        Polynomial r = a;
        for (auto &c : r.m_c) {
            c = -c;
        }
        return r;
    }

    friend Polynomial operator*(const Polynomial &a, const Polynomial &b) {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<K> r(a.m_c.size() + b.m_c.size() - 1, K(0));
        for (std::size_t i = 0; i < a.m_c.size(); ++i) {
            if (a.m_c[i] == K(0)) {
                continue;
            }
            for (std::size_t j = 0; j < b.m_c.size(); ++j) {
                r[i + j] += a.m_c[i] * b.m_c[j];
            }
        }
        return Polynomial(std::move(r));
    }
    Polynomial &operator*=(const Polynomial &o) { return *this = *this * o; }

    Polynomial &operator*=(const K &s) {
        for (auto &c : m_c) {
            c *= s;
        }
        trim();
        return *this;
    }
    friend Polynomial operator*(Polynomial a, const K &s) { return a *= s; }
    friend Polynomial operator*(const K &s, Polynomial a) { return a *= s; }
    Polynomial &operator/=(const K &s) {
        for (auto &c : m_c) {
            c = c / s;
        }
        return *this;
    }
    friend Polynomial operator/(Polynomial a, const K &s) { return a /= s; }

    friend bool operator==(const Polynomial &a, const Polynomial &b) {
        return a.m_c == b.m_c;
    }

    /// Quotient and remainder of *this by d (d nonzero).
    std::pair<Polynomial, Polynomial> divmod(const Polynomial &d) const {
        if (d.is_zero()) {
            throw Error("Polynomial::divmod: division by zero polynomial");
        }
        Polynomial r = *this;
        if (r.degree() < d.degree()) {
            return {Polynomial{}, r};
        }
        std::vector<K> q(static_cast<std::size_t>(r.degree() - d.degree()) + 1, K(0));
        const K &lc = d.leading();
        while (!r.is_zero() && r.degree() >= d.degree()) {
            std::size_t shift = static_cast<std::size_t>(r.degree() - d.degree());
            K f = r.leading() / lc;
            q[shift] = f;
            // r -= f * X^shift * d
            for (std::size_t i = 0; i < d.m_c.size(); ++i) {
                r.m_c[i + shift] -= f * d.m_c[i];
            }
            r.trim();
        }
        return {Polynomial(std::move(q)), r};
    }

    K eval(const K &x) const {
        K acc{};
        for (std::size_t i = m_c.size(); i-- > 0;) {
            acc = acc * x + m_c[i];
        }
        return acc;
    }

    /// Horner evaluation in any commutative ring R, given an embedding of K.
    template <class R, class EmbedFn>
    R eval_in(const R &x, const R &one, EmbedFn embed) const {
        R acc = embed(K(0));
        (void)one;
        for (std::size_t i = m_c.size(); i-- > 0;) {
            acc = acc * x + embed(m_c[i]);
        }
        return acc;
    }

    Polynomial derivative() const {
        if (m_c.size() <= 1) {
            return {};
        }
        std::vector<K> d(m_c.size() - 1);
        for (std::size_t i = 1; i < m_c.size(); ++i) {
            d[i - 1] = m_c[i] * field_from_long<K>(static_cast<long>(i));
        }
        return Polynomial(std::move(d));
    }

    /// Substitute X -> p(X).
    Polynomial compose(const Polynomial &p) const {
        Polynomial acc;
        for (std::size_t i = m_c.size(); i-- > 0;) {
            acc = acc * p + Polynomial(m_c[i]);
        }
        return acc;
    }

    Polynomial monic() const {
        if (is_zero()) {
            throw Error("Polynomial::monic: zero polynomial");
        }
        return *this / leading();
    }

  private:
    void trim() {
        while (!m_c.empty() && m_c.back() == K(0)) {
            m_c.pop_back();
        }
    }
    std::vector<K> m_c;
};

/// Monic gcd by the Euclidean algorithm; gcd(0,0) = 0.
template <class K>
Polynomial<K> gcd_poly(Polynomial<K> a, Polynomial<K> b) {
    while (!b.is_zero()) {
        auto [q, r] = a.divmod(b);
        (void)q;
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) {
        return a;
    }
    return a.monic();
}

/// Exact division; throws if the remainder is nonzero.
template <class K>
Polynomial<K> divide_exact(const Polynomial<K> &a, const Polynomial<K> &b) {
    auto [q, r] = a.divmod(b);
    if (!r.is_zero()) {
        throw Error("divide_exact: nonzero remainder");
    }
    return q;
}

/** Square-free decomposition over a field of characteristic zero (Yun).
 *
 * Returns factors f_1, f_2, ... with input = prod_i f_i^i up to the leading
 * coefficient; each f_i is monic and square-free.
 */
template <class K>
std::vector<Polynomial<K>> squarefree_decomposition(const Polynomial<K> &p) {
    std::vector<Polynomial<K>> out;
    if (p.degree() <= 0) {
        return out;
    }
    Polynomial<K> a = p.monic();
    Polynomial<K> d = a.derivative();
    Polynomial<K> g = gcd_poly(a, d);
    if (g.degree() == 0) {
        out.push_back(a);
        return out;
    }
    Polynomial<K> w = divide_exact(a, g);
    Polynomial<K> y = divide_exact(d, g);
    Polynomial<K> z = y - w.derivative();
    while (!z.is_zero()) {
        Polynomial<K> f = gcd_poly(w, z);
        out.push_back(f.is_zero() ? Polynomial<K>(K(1)) : f);
        w = divide_exact(w, f);
        y = divide_exact(z, f);
        z = y - w.derivative();
    }
    out.push_back(w);
    return out;
}

/** Lagrange interpolation: the unique polynomial of degree < points.size()
 * passing through the given (x, y) pairs.  The abscissae must be distinct.
 */
template <class K>
Polynomial<K> interpolate(const std::vector<std::pair<K, K>> &points) {
    Polynomial<K> acc;
    for (std::size_t i = 0; i < points.size(); ++i) {
        Polynomial<K> term(points[i].second);
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) {
                continue;
            }
            const K dx = points[i].first - points[j].first;
            if (dx == K(0)) {
                throw Error("interpolate: repeated abscissa");
            }
            term *= Polynomial<K>(std::vector<K>{-points[j].first / dx, K(1) / dx});
        }
        acc += term;
    }
    return acc;
}

} // namespace fingap
