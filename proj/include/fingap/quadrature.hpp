#pragma once

/** \file quadrature.hpp
 *
 * Gauss-Legendre quadrature at arbitrary working precision with adaptive
 * panel bisection, for complex line integrals along segments and polylines.
 * Nodes and weights come from Newton iteration on the Legendre polynomial
 * and are cached per (order, precision).
 */

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "errors.hpp"

namespace fingap {

struct GaussRule {
    std::vector<Real> nodes;   ///< interior points of (-1, 1)
    std::vector<Real> weights; ///< positive, summing to 2
};

namespace detail {

/// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<Real, Real> legendre_pair(unsigned n, const Real &x) {
    Real pm(1);
    Real p = x;
    for (unsigned k = 2; k <= n; ++k) {
        Real pk = (Real(2 * k - 1) * x * p - Real(k - 1) * pm) / Real(k);
        pm = p;
        p = pk;
    }
    Real dp = Real(n) * (x * p - pm) / (x * x - 1);
    return {p, dp};
}

} // namespace detail

/// The n-point Gauss-Legendre rule, correct to the requested precision.
inline const GaussRule &gauss_legendre(unsigned n, unsigned digits10) {
    static std::map<std::pair<unsigned, unsigned>, GaussRule> cache;
    static std::mutex lock;
    std::lock_guard<std::mutex> guard_lock(lock);
    auto it = cache.find({n, digits10});
    if (it != cache.end()) {
        return it->second;
    }
    precision_guard guard(digits10 + 10);
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const Real pi = 4 * atan(Real(1));
    const Real tol = pow10(-static_cast<long>(digits10) - 5);
    using std::abs;
    using std::cos;
    for (unsigned i = 0; i < n; ++i) {
        Real x = cos(pi * (Real(i) + Real(3) / 4) / (Real(n) + Real(1) / 2));
        Real p = 0, dp = 1;
        for (int iter = 0; iter < 200; ++iter) {
            std::tie(p, dp) = detail::legendre_pair(n, x);
            Real dx = p / dp;
            x -= dx;
            if (abs(dx) < tol) {
                break;
            }
            if (iter == 199) {
                throw NonConvergence("gauss_legendre: Newton did not converge");
            }
        }
        std::tie(p, dp) = detail::legendre_pair(n, x);
        rule.nodes[i] = x;
        rule.weights[i] = 2 / ((1 - x * x) * dp * dp);
    }
    return cache.emplace(std::make_pair(n, digits10), std::move(rule)).first->second;
}

/// One fixed Gauss-Legendre panel of f along the segment [a, b].
template <class F>
Complex gauss_panel(const F &f, const Complex &a, const Complex &b,
                    const GaussRule &rule) {
    const Complex mid = (a + b) * Complex(Real(1) / 2);
    const Complex half = (b - a) * Complex(Real(1) / 2);
    Complex acc{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        acc += Complex(rule.weights[i]) * f(mid + Complex(rule.nodes[i]) * half);
    }
    return acc * half;
}

namespace detail {

template <class F>
Complex integrate_adaptive(const F &f, const Complex &a, const Complex &b,
                           const Complex &whole, const Real &tol,
                           const GaussRule &rule, int depth) {
    if (depth > 40) {
        throw NonConvergence("integrate_segment: panel subdivision exhausted");
    }
    const Complex mid = (a + b) * Complex(Real(1) / 2);
    const Complex left = gauss_panel(f, a, mid, rule);
    const Complex right = gauss_panel(f, mid, b, rule);
    if (fingap::abs(left + right - whole) <= tol) {
        return left + right;
    }
    const Real half_tol = tol / 2;
    return integrate_adaptive(f, a, mid, left, half_tol, rule, depth + 1) +
           integrate_adaptive(f, mid, b, right, half_tol, rule, depth + 1);
}

} // namespace detail

/** Adaptive integral of f along the straight segment from a to b, to the
 * absolute tolerance tol.  f maps Complex -> Complex and must be analytic
 * on a neighbourhood of the segment for the error estimate (difference of
 * one panel against its two halves) to be meaningful.
 */
template <class F>
Complex integrate_segment(const F &f, const Complex &a, const Complex &b,
                          const Real &tol, unsigned digits10) {
    const GaussRule &rule = gauss_legendre(15, digits10);
    const Complex whole = gauss_panel(f, a, b, rule);
    return detail::integrate_adaptive(f, a, b, whole, tol, rule, 0);
}

/// Adaptive integral along the polyline through the given points.
template <class F>
Complex integrate_polyline(const F &f, const std::vector<Complex> &points,
                           const Real &tol, unsigned digits10) {
    if (points.size() < 2) {
        return Complex{};
    }
    Complex acc{};
    const Real leg_tol = tol / Real(static_cast<long>(points.size() - 1));
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        acc += integrate_segment(f, points[i], points[i + 1], leg_tol, digits10);
    }
    return acc;
}

} // namespace fingap
