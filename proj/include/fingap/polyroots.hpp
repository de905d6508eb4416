#pragma once

/** \file polyroots.hpp
 *
 * Roots of exact rational polynomials: Yun square-free splitting first,
 * exact extraction of rational roots (divisor candidates, synthetic
 * division), then simultaneous Aberth-Ehrlich refinement of whatever
 * remains, at a caller-chosen precision.  Spectral polynomials have exact
 * rational roots precisely at the distinguished energies, so keeping those
 * exact (and flagged) matters downstream.
 */

#include <vector>

#include "complex.hpp"
#include "polynomial.hpp"

namespace fingap {

struct PolyRoot {
    Complex value;
    int multiplicity = 1;
    bool exact = false;     ///< true when the root is a recognized rational
    Rational exact_value{}; ///< meaningful only when exact
};

namespace detail {

/// Divisors of |n|, ascending; empty when |n| exceeds the trial-division cap.
inline std::vector<Int> divisors_capped(Int n) {
    std::vector<Int> out;
    if (n < 0) {
        n = -n;
    }
    if (n == 0) {
        return out;
    }
    const Int cap("1000000000000"); // 1e12 keeps trial division bounded
    if (n > cap) {
        return out;
    }
    std::vector<Int> high;
    for (Int t = 1; t * t <= n; ++t) {
        if (n % t == 0) {
            out.push_back(t);
            if (t * t != n) {
                high.push_back(n / t);
            }
        }
    }
    for (auto it = high.rbegin(); it != high.rend(); ++it) {
        out.push_back(*it);
    }
    return out;
}

/// Divide p exactly by (x - r); remainder must vanish.
inline Polynomial<Rational> deflate(const Polynomial<Rational> &p, const Rational &r) {
    auto [q, rem] =
        p.divmod(Polynomial<Rational>(std::vector<Rational>{-r, Rational(1)}));
    if (!rem.is_zero()) {
        throw Error("deflate: claimed root is not a root");
    }
    return q;
}

} // namespace detail

/// Exact rational roots (with multiplicity) plus the rational-root-free cofactor.
struct RationalRootSplit {
    std::vector<std::pair<Rational, int>> roots;
    Polynomial<Rational> remaining;
};

inline RationalRootSplit rational_root_split(Polynomial<Rational> p) {
    if (p.is_zero()) {
        throw Error("rational_root_split: zero polynomial");
    }
    RationalRootSplit out;
    // roots at the origin
    int zero_mult = 0;
    while (p.degree() > 0 && p[0] == 0) {
        p = detail::deflate(p, Rational(0));
        ++zero_mult;
    }
    if (zero_mult > 0) {
        out.roots.emplace_back(Rational(0), zero_mult);
    }
    if (p.degree() > 0) {
        // integer model: scale out the lcm of coefficient denominators
        Int scale = 1;
        for (int i = 0; i <= p.degree(); ++i) {
            scale = lcm(scale, denominator(p[i]));
        }
        const Int a0 = numerator(p[0] * Rational(scale));
        const Int an = numerator(p.leading() * Rational(scale));
        const auto num_div = detail::divisors_capped(a0);
        const auto den_div = detail::divisors_capped(an);
        for (const Int &dn : num_div) {
            for (const Int &dd : den_div) {
                if (gcd(dn, dd) != 1) {
                    continue;
                }
                for (int sign = 0; sign < 2; ++sign) {
                    Rational cand = Rational(dn) / Rational(dd);
                    if (sign == 1) {
                        cand = -cand;
                    }
                    int mult = 0;
                    while (p.degree() > 0 && p.eval(cand) == 0) {
                        p = detail::deflate(p, cand);
                        ++mult;
                    }
                    if (mult > 0) {
                        out.roots.emplace_back(cand, mult);
                    }
                }
            }
        }
    }
    out.remaining = p;
    return out;
}

/** Aberth-Ehrlich simultaneous iteration on a polynomial assumed square-free;
 * `digits10` controls both working precision and the convergence target.
 * Throws NonConvergence if the iteration stalls.
 */
inline std::vector<Complex> aberth_roots(const Polynomial<Rational> &p,
                                         unsigned digits10) {
    const int n = p.degree();
    if (n <= 0) {
        return {};
    }
    precision_guard guard(digits10 + 10);
    std::vector<Complex> c;
    c.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        c.push_back(to_complex(p[i]));
    }
    // Cauchy-style inclusion radius
    Real radius(0);
    for (int i = 0; i < n; ++i) {
        Real q = fingap::abs(c[static_cast<std::size_t>(i)] /
                             c[static_cast<std::size_t>(n)]);
        if (q > radius) {
            radius = q;
        }
    }
    radius += 1;
    const Real pi = 4 * atan(Real(1));
    std::vector<Complex> z;
    z.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Real ang = (2 * pi * i) / n + Real("0.4"); // irrational-ish offset
        z.emplace_back(radius * cos(ang), radius * sin(ang));
    }
    auto eval_pd = [&](const Complex &x) {
        Complex pv{}, dv{};
        for (int i = n; i >= 0; --i) {
            dv = dv * x + pv;
            pv = pv * x + c[static_cast<std::size_t>(i)];
        }
        return std::pair<Complex, Complex>(pv, dv);
    };
    const Real eps = pow10(-static_cast<long>(digits10));
    for (int iter = 0; iter < 500; ++iter) {
        Real worst(0);
        for (int i = 0; i < n; ++i) {
            auto [pv, dv] = eval_pd(z[static_cast<std::size_t>(i)]);
            if (fingap::abs(pv) == 0) {
                continue;
            }
            Complex ratio = pv / dv;
            Complex s{};
            for (int j = 0; j < n; ++j) {
                if (j != i) {
                    s += Complex(Real(1)) / (z[static_cast<std::size_t>(i)] -
                                             z[static_cast<std::size_t>(j)]);
                }
            }
            Complex w = ratio / (Complex(Real(1)) - ratio * s);
            z[static_cast<std::size_t>(i)] -= w;
            Real step = fingap::abs(w) /
                        (1 + fingap::abs(z[static_cast<std::size_t>(i)]));
            if (step > worst) {
                worst = step;
            }
        }
        if (worst <= eps) {
            return z;
        }
    }
    throw NonConvergence("aberth_roots: iteration did not converge");
}

/** All roots of an exact polynomial: square-free split, exact rationals, then
 * Aberth for the irrational/complex remainder.
 */
inline std::vector<PolyRoot> poly_roots(const Polynomial<Rational> &p,
                                        unsigned digits10) {
    if (p.is_zero()) {
        throw Error("poly_roots: zero polynomial");
    }
    std::vector<PolyRoot> out;
    const auto squarefree = squarefree_decomposition(p);
    for (std::size_t fi = 0; fi < squarefree.size(); ++fi) {
        const auto &factor = squarefree[fi];
        const int mult = static_cast<int>(fi) + 1;
        if (factor.degree() <= 0) {
            continue;
        }
        auto split = rational_root_split(factor);
        for (const auto &[r, m] : split.roots) {
            PolyRoot pr;
            pr.value = to_complex(r);
            pr.multiplicity = mult * m; // m == 1 for a square-free factor
            pr.exact = true;
            pr.exact_value = r;
            out.push_back(pr);
        }
        if (split.remaining.degree() > 0) {
            for (const Complex &zr : aberth_roots(split.remaining, digits10)) {
                PolyRoot pr;
                pr.value = zr;
                pr.multiplicity = mult;
                out.push_back(pr);
            }
        }
    }
    return out;
}

} // namespace fingap
