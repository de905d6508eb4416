#pragma once

/** \file monodromy.hpp
 *
 * Numerical evaluation of the Baker-Akhiezer eigenfunction
 *
 *   Lambda(x, E) = sqrt(Xi(x, E)) * exp( int_{x0}^x sqrt(-Q(E)) / Xi dx )
 *
 * and the multiplier B(E) with Lambda(x + 2 w_k, E) = B(E) Lambda(x, E),
 * computed along two independent routes:
 *
 *   - ode:      the 2x2 transfer matrix of -f'' + u f = E f over one period,
 *   - integral: (-1)^{q_k} exp( -1/2 int_{E0}^{E}
 *                   (-2 eta_k a(t) + 2 w_k c(t)) / sqrt(-Q(t)) dt ),
 *     where E0 is a zero of Q, q_k in {0, 1} is the period parity of
 *     Lambda(., E0), and a, c are the exact period polynomials of Xi
 *     (int_period Xi dx = 2 w_k c(E) - 2 eta_k a(E)).
 *
 * A third route (from a Bethe configuration) lives in bethe.hpp.  The two
 * square roots make every multiplier defined up to B <-> 1/B, which swaps
 * Lambda(x) and Lambda(-x); routes are therefore compared as unordered
 * pairs {B, 1/B} (multiplier_set_distance).
 */

#include <algorithm>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"
#include "ode.hpp"
#include "polyroots.hpp"
#include "quadrature.hpp"
#include "spectral.hpp"

namespace fingap {

// ---------------------------------------------------------------------------
// pointwise evaluation helpers
// ---------------------------------------------------------------------------

/// Horner evaluation of an exact polynomial at a complex point.
inline Complex eval_at(const Polynomial<Rational> &p, const Complex &z) {
    Complex acc{};
    for (long j = p.degree(); j >= 0; --j) {
        acc = acc * z + to_complex(p[static_cast<std::size_t>(j)]);
    }
    return acc;
}

/// sum_j |p_j| max(1, |z|)^j, the natural magnitude against which a value
/// of p(z) is judged small.
inline Real eval_scale(const Polynomial<Rational> &p, const Complex &z) {
    using std::abs;
    Real m = fingap::abs(z);
    if (m < 1) {
        m = 1;
    }
    Real acc = 0, mp = 1;
    for (long j = 0; j <= p.degree(); ++j) {
        acc += abs(to_real(p[static_cast<std::size_t>(j)])) * mp;
        mp *= m;
    }
    return acc;
}

/// Xi and its first two x-derivatives at one point, plus the term-magnitude
/// scale used to decide whether Xi is "small" there.
struct XiValues {
    Complex xi, dxi, d2xi;
    Real scale;
};

inline XiValues xi_values(const XiData &xi, const Lattice &lat,
                          const Complex &x, const Complex &E) {
    precision_guard guard(lat.work_digits());
    XiValues out;
    out.xi = eval_at(xi.c0, E);
    out.scale = fingap::abs(out.xi);
    const Real half_g2 = lat.g2().re / 2;
    for (const auto &[key, poly] : xi.b) {
        const auto [i, k] = key;
        const Complex shift = (i == 0) ? Complex{} : lat.omega(i);
        const Complex p = lat.wp(x + shift);
        const Complex dp = lat.wp_prime(x + shift);
        const Complex d2p = Complex(6) * p * p - Complex(half_g2);
        const Complex coef = eval_at(poly, E);
        Complex pk1(Real(1)); // p^(k-1)
        for (int m = 1; m < k; ++m) {
            pk1 *= p;
        }
        const Complex pk = pk1 * p;
        out.xi += coef * pk;
        out.dxi += coef * Complex(Real(k)) * pk1 * dp;
        Complex d2 = pk1 * d2p;
        if (k > 1) {
            Complex pk2(Real(1)); // p^(k-2)
            for (int m = 2; m < k; ++m) {
                pk2 *= p;
            }
            d2 += Complex(Real(k - 1)) * pk2 * dp * dp;
        }
        out.d2xi += coef * Complex(Real(k)) * d2;
        out.scale += fingap::abs(coef * pk);
    }
    return out;
}

/// The potential sum_i l_i (l_i + 1) wp(x + w_i), w_0 = 0.
inline Complex potential_value(const CouplingVector &l, const Lattice &lat,
                               const Complex &x) {
    precision_guard guard(lat.work_digits());
    Complex u{};
    for (int i = 0; i < 4; ++i) {
        if (l[i] == 0) {
            continue;
        }
        const Complex shift = (i == 0) ? Complex{} : lat.omega(i);
        u += Complex(Real(l[i] * (l[i] + 1))) * lat.wp(x + shift);
    }
    return u;
}

// ---------------------------------------------------------------------------
// results
// ---------------------------------------------------------------------------

enum class MonodromyRoute { integral, bethe, ode };

inline std::string route_name(MonodromyRoute r) {
    switch (r) {
    case MonodromyRoute::integral: return "integral";
    case MonodromyRoute::bethe: return "bethe";
    default: return "ode";
    }
}

/** The multiplier of one eigenfunction branch under x -> x + 2 w_k.  The
 * companion branch Lambda(-x) always carries 1/multiplier, so multiplier
 * and 1/multiplier describe the same energy.
 */
struct MonodromyResult {
    int k = 1;                 ///< period index (1 or 3)
    Complex multiplier;
    MonodromyRoute route = MonodromyRoute::ode;
    int q_k = -1;              ///< parity at the base energy; -1 if unused
    Complex base_energy;       ///< E0 of the integral route
    std::vector<Complex> path; ///< E-plane waypoints (integral route)
    unsigned work = 0;         ///< integrand evaluations or accepted steps
    Real det_defect = Real(0); ///< |det T - 1| of the transfer matrix
};

namespace detail {

inline Real cdist(const Complex &a, const Complex &b) { return fingap::abs(a - b); }

/// Distance from point p to the segment [a, b].
inline Real segment_distance(const Complex &a, const Complex &b, const Complex &p) {
    const Complex d = b - a;
    const Real dd = fingap::norm(d);
    if (dd == 0) {
        return cdist(a, p);
    }
    // real projection parameter of p onto the segment
    Real t = ((p.re - a.re) * d.re + (p.im - a.im) * d.im) / dd;
    if (t < 0) {
        t = 0;
    }
    if (t > 1) {
        t = 1;
    }
    return cdist(a + Complex(t) * d, p);
}

} // namespace detail

/** Distance between two multipliers regarded as unordered pairs {B, 1/B}:
 * the smaller over the two pairings of max relative deviation.
 */
inline Real multiplier_set_distance(const Complex &a, const Complex &b) {
    const Complex one(Real(1));
    auto rho = [&](const Complex &u, const Complex &v) {
        Real m = 1;
        if (fingap::abs(u) > m) {
            m = fingap::abs(u);
        }
        if (fingap::abs(v) > m) {
            m = fingap::abs(v);
        }
        return fingap::abs(u - v) / m;
    };
    const Complex ia = one / a, ib = one / b;
    const Real straight = std::max(rho(a, b), rho(ia, ib));
    const Real swapped = std::max(rho(a, ib), rho(ia, b));
    return std::min(straight, swapped);
}

// ---------------------------------------------------------------------------
// Lambda(x, E) by direct evaluation
// ---------------------------------------------------------------------------

struct LambdaValue {
    Complex value; ///< Lambda(x, E), normalized by Lambda(x0) = sqrt(Xi(x0))
    Complex dlog;  ///< Lambda'(x, E) / Lambda(x, E)
};

namespace detail {

/// Throw PathPole unless every sampled point of [a, b] keeps the required
/// clearance from all potential/Xi poles (lattice translates of -w_i).
inline void check_x_path(const Lattice &lat, const CouplingVector &l,
                         const Complex &a, const Complex &b, const Real &clearance,
                         int samples, const char *who) {
    for (int s = 0; s <= samples; ++s) {
        const Complex t = a + Complex(Real(s) / Real(samples)) * (b - a);
        for (int i = 0; i < 4; ++i) {
            if (l[i] == 0) {
                continue;
            }
            const Complex shift = (i == 0) ? Complex{} : lat.omega(i);
            if (lat.lattice_distance(t + shift) < clearance) {
                throw PathPole(std::string(who) +
                               ": path passes too close to a potential pole");
            }
        }
    }
}

} // namespace detail

/** Evaluate Lambda(x, E) along the straight path from x0 = w_1 to x.
 *
 * The square root of Xi is continued continuously along the path (sign
 * flips of the principal branch are tracked at 64 way stations); sqrt(-Q)
 * is the principal branch, which fixes which of the two branches
 * Lambda(+-x) is returned.  Throws EdgeEnergy when Q(E) vanishes to 1e-10
 * (the two branches merge there) and PathPole when the path comes closer
 * than 0.05 |w_1| to a pole, or Xi vanishes on it.
 */
inline LambdaValue lambda_eval(const SpectralData &S, const Lattice &lat,
                               const Complex &x, const Complex &E) {
    precision_guard guard(lat.work_digits());
    const Complex x0 = lat.omega1();
    const Real q_mag = fingap::abs(eval_at(S.Q, E));
    if (q_mag < pow10(-10) * eval_scale(S.Q, E)) {
        throw EdgeEnergy("lambda_eval: E is a band edge (Q(E) = 0)");
    }
    const Real clearance = fingap::abs(x0) * Real(5) / 100;
    detail::check_x_path(lat, S.l, x0, x, clearance, 64, "lambda_eval");

    const Complex root_mq = fingap::sqrt(-eval_at(S.Q, E));
    const Real xi_floor = pow10(-static_cast<long>(lat.precision()) + 6);
    auto xi_at = [&](const Complex &t) {
        const XiValues v = xi_values(S.xi, lat, t, E);
        if (fingap::abs(v.xi) < xi_floor * v.scale) {
            throw PathPole("lambda_eval: Xi vanishes on the integration path");
        }
        return v;
    };

    // Track the continuous branch of sqrt(Xi) from x0 to x.
    Real sign = 1;
    Complex w_prev = fingap::sqrt(xi_at(x0).xi);
    for (int s = 1; s <= 64; ++s) {
        const Complex t = x0 + Complex(Real(s) / 64) * (x - x0);
        const Complex w = fingap::sqrt(xi_at(t).xi);
        if (fingap::abs(Complex(sign) * w - w_prev) >
            fingap::abs(Complex(sign) * w + w_prev)) {
            sign = -sign;
        }
        w_prev = Complex(sign) * w;
    }

    const Real tol = pow10(-static_cast<long>(lat.precision()) - 2);
    const Complex integral = integrate_segment(
        [&](const Complex &t) { return root_mq / xi_at(t).xi; }, x0, x, tol,
        lat.work_digits());

    const XiValues end = xi_at(x);
    LambdaValue out;
    out.value = w_prev * fingap::exp(integral);
    out.dlog = end.dxi / (Complex(Real(2)) * end.xi) + root_mq / end.xi;
    return out;
}

/** The eigen-equation defect |u(x) - E - (phi' + phi^2)| of the logarithmic
 * derivative phi = Xi' / (2 Xi) + sqrt(-Q) / Xi of Lambda at one point; it
 * vanishes identically in exact arithmetic.
 */
inline Real lambda_residual(const SpectralData &S, const Lattice &lat,
                            const Complex &x, const Complex &E) {
    precision_guard guard(lat.work_digits());
    const XiValues v = xi_values(S.xi, lat, x, E);
    const Real xi_floor = pow10(-static_cast<long>(lat.precision()) + 6);
    if (fingap::abs(v.xi) < xi_floor * v.scale) {
        throw PathPole("lambda_residual: Xi vanishes at the sample point");
    }
    const Complex root_mq = fingap::sqrt(-eval_at(S.Q, E));
    const Complex two(Real(2));
    const Complex phi = v.dxi / (two * v.xi) + root_mq / v.xi;
    const Complex dphi = v.d2xi / (two * v.xi) -
                         v.dxi * v.dxi / (two * v.xi * v.xi) -
                         root_mq * v.dxi / (v.xi * v.xi);
    const Complex u = potential_value(S.l, lat, x);
    return fingap::abs(u - E - (dphi + phi * phi));
}

// ---------------------------------------------------------------------------
// route 1: the transfer matrix of -f'' + u f = E f over one period
// ---------------------------------------------------------------------------

/** Multiplier of Lambda under x -> x + 2 w_k from the ODE transfer matrix.
 *
 * Integrates the equation along a straight period segment based near
 * (w_1 + w_3) / 2 (shifted among a fixed list of offsets until the path
 * keeps 0.1 min(|2 w_j|) clearance from every pole; PolePath if none
 * works).  The two eigenvalues of the unit-determinant transfer matrix are
 * the multipliers of Lambda(x) and Lambda(-x); the one with |B| >= 1 is
 * reported.  A determinant defect beyond 1e-6 throws NonConvergence.
 */
inline MonodromyResult monodromy_ode(const CouplingVector &l, const Lattice &lat,
                                     const Complex &E, int k,
                                     const OdeOptions &opt = {}) {
    if (k < 1 || k > 3) {
        throw Error("monodromy_ode: period index must be 1, 2 or 3");
    }
    precision_guard guard(lat.work_digits());
    const Complex period = Complex(Real(2)) * lat.omega(k);

    Real min_period = fingap::abs(Complex(Real(2)) * lat.omega1());
    for (int j = 2; j <= 3; ++j) {
        min_period = std::min(min_period,
                              fingap::abs(Complex(Real(2)) * lat.omega(j)));
    }
    const Real clearance = min_period / 10;

    const Complex base = (lat.omega1() + lat.omega3()) / Complex(Real(2));
    const std::array<std::pair<Rational, int>, 9> offsets{{
        {Rational(0), 3},
        {Rational(11, 100), 3},
        {Rational(-11, 100), 3},
        {Rational(23, 100), 3},
        {Rational(-23, 100), 3},
        {Rational(37, 100), 3},
        {Rational(21, 100), 1},
        {Rational(-21, 100), 1},
        {Rational(37, 100), 1},
    }};
    Complex x0;
    bool found = false;
    for (const auto &[frac, dir] : offsets) {
        const Complex cand = base + to_complex(frac) * lat.omega(dir);
        try {
            detail::check_x_path(lat, l, cand, cand + period, clearance, 256,
                                 "monodromy_ode");
            x0 = cand;
            found = true;
            break;
        } catch (const PathPole &) {
            continue;
        }
    }
    if (!found) {
        throw PolePath("monodromy_ode: no period segment clears the poles");
    }

    // y = (f1, f1', f2, f2') along x(s) = x0 + s * 2 w_k, s in [0, 1].
    auto rhs = [&](const Real &s, const std::vector<Complex> &y,
                   std::vector<Complex> &dy) {
        const Complex x = x0 + Complex(s) * period;
        const Complex w = potential_value(l, lat, x) - E;
        dy[0] = period * y[1];
        dy[1] = period * (w * y[0]);
        dy[2] = period * y[3];
        dy[3] = period * (w * y[2]);
    };
    const std::vector<Complex> y0{Complex(Real(1)), Complex{}, Complex{},
                                  Complex(Real(1))};
    const OdeResult sol = ode_solve(rhs, Real(0), Real(1), y0, opt);

    // columns of T are the transported basis solutions
    const Complex t11 = sol.y[0], t21 = sol.y[1], t12 = sol.y[2], t22 = sol.y[3];
    const Complex det = t11 * t22 - t12 * t21;
    MonodromyResult out;
    out.k = k;
    out.route = MonodromyRoute::ode;
    out.work = sol.steps;
    out.det_defect = fingap::abs(det - Complex(Real(1)));
    if (out.det_defect > pow10(-6)) {
        throw NonConvergence("monodromy_ode: transfer matrix determinant defect " +
                             out.det_defect.str(6));
    }
    const Complex tr = t11 + t22;
    const Complex disc = fingap::sqrt(tr * tr - Complex(Real(4)));
    const Complex half(Real(1) / 2);
    Complex lam = (tr + disc) * half;
    if (fingap::abs(lam) < 1) {
        lam = (tr - disc) * half;
    }
    out.multiplier = lam;
    out.path = {x0, x0 + period};
    return out;
}

// ---------------------------------------------------------------------------
// route 2: the energy-plane period integral
// ---------------------------------------------------------------------------

namespace detail {

/** Sign table for one leg of the sqrt(-Q) continuation: sigma(s) is
 * piecewise constant on [0, 1], flipping wherever the principal branch
 * jumps.  Built by marching; read by binary search.
 */
struct BranchTable {
    std::vector<Real> breaks;  ///< ascending flip points
    Real first_sign = 1;       ///< sigma on [0, breaks[0])

    Real sign_at(const Real &s) const {
        Real sign = first_sign;
        for (const Real &b : breaks) {
            if (s >= b) {
                sign = -sign;
            } else {
                break;
            }
        }
        return sign;
    }
};

/** March w(s) = sigma(s) sqrt(-Q(map(s))) continuously from s = s_begin
 * (value w_prev, sign sigma) to s = 1, recording flips of the principal
 * branch.  Steps are halved until the argument of w moves by at most pi/2
 * per step (BranchAmbiguity if halving cannot achieve that), and each flip
 * point is then located by bisection down to working precision: the frozen
 * table must label every later quadrature node with the correct sign, and
 * with exactly placed breaks the labelled integrand is analytic across
 * them (only the principal-branch label jumps, not the continued value).
 */
template <class Map>
void march_branch(const Map &value_at, const Real &s_begin, Real sigma,
                  Complex w_prev, BranchTable &table, unsigned &work) {
    table.first_sign = sigma;
    const Real quarter = 2 * atan(Real(1)); // pi / 2
    const Real locate_tol =
        pow10(-static_cast<long>(Real::default_precision()) + 4);
    auto flips_from = [&](const Complex &anchor, const Real &s) {
        ++work;
        const Complex w = value_at(s);
        return fingap::abs(w - anchor) > fingap::abs(w + anchor);
    };
    Real s = s_begin;
    Real step = (Real(1) - s_begin) / 256;
    int depth = 0;
    while (s < 1) {
        Real s_next = s + step;
        if (s_next > 1) {
            s_next = 1;
        }
        const Complex w_raw = value_at(s_next);
        ++work;
        Real sig_next = sigma;
        Complex w = Complex(sigma) * w_raw;
        if (fingap::abs(w - w_prev) > fingap::abs(w + w_prev)) {
            sig_next = -sigma;
            w = -w;
        }
        using std::abs;
        const Real jump = abs(fingap::arg(w / w_prev));
        if (jump > quarter) {
            step /= 2;
            ++depth;
            if (depth > 40) {
                throw BranchAmbiguity(
                    "monodromy_integral: sqrt(-Q) branch could not be "
                    "continued along the path");
            }
            continue;
        }
        if (sig_next != sigma) {
            // principal branch flipped in (s, s_next): pin the crossing
            const Complex anchor = w_prev * Complex(sigma); // principal scale
            Real lo = s, hi = s_next;
            while (hi - lo > locate_tol) {
                const Real mid = (lo + hi) / 2;
                if (flips_from(anchor, mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            table.breaks.push_back((lo + hi) / 2);
            sigma = sig_next;
        }
        w_prev = w;
        s = s_next;
        if (depth > 0) {
            --depth;
            step *= 2;
        }
    }
}

} // namespace detail

/** Multiplier of Lambda under x -> x + 2 w_k (k = 1 or 3) by the
 * energy-plane integral from a base zero E0 of Q along the given waypoint
 * polyline (default: the straight segment [E0, E]):
 *
 *   B(E) = (-1)^{q_k} exp( -1/2 int (-2 eta_k a + 2 w_k c) / sqrt(-Q) dt ).
 *
 * The parity q_k is read off the ODE route at E0 (multiplier +-1 there;
 * BadBasepoint if it is not, or if Q(E0) fails to vanish).  The integrand's
 * inverse-square-root singularity at E0 is removed by the substitution
 * t = E0 + s^2 (P1 - E0) on the first leg; the branch of sqrt(-Q) is fixed
 * at the start of the path and continued continuously across all legs.
 * Every leg must keep distance 1e-3 from the other zeros of Q
 * (BranchAmbiguity otherwise).
 */
inline MonodromyResult monodromy_integral(const SpectralData &S, const Lattice &lat,
                                          const Complex &E, int k,
                                          const Complex &E0,
                                          std::vector<Complex> waypoints = {}) {
    if (k != 1 && k != 3) {
        throw Error("monodromy_integral: period index must be 1 or 3");
    }
    precision_guard guard(lat.work_digits());
    if (fingap::abs(eval_at(S.Q, E0)) > pow10(-10) * eval_scale(S.Q, E0)) {
        throw BadBasepoint("monodromy_integral: E0 is not a zero of Q");
    }
    if (waypoints.empty()) {
        waypoints = {E0, E};
    }
    if (waypoints.size() < 2 || fingap::abs(waypoints.front() - E0) > pow10(-10) ||
        fingap::abs(waypoints.back() - E) > pow10(-10)) {
        throw Error("monodromy_integral: waypoints must run from E0 to E");
    }

    // clearance from the other zeros of Q
    const auto q_roots = poly_roots(S.Q, lat.precision());
    const Real near_e0 = pow10(-6);
    const Real min_clear = pow10(-3);
    for (std::size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
        for (const auto &r : q_roots) {
            if (detail::cdist(r.value, E0) < near_e0) {
                if (leg == 0) {
                    continue; // the basepoint itself anchors the first leg
                }
            }
            if (detail::segment_distance(waypoints[leg], waypoints[leg + 1],
                                         r.value) < min_clear) {
                throw BranchAmbiguity(
                    "monodromy_integral: path passes within 1e-3 of a zero of Q");
            }
        }
    }

    // parity of Lambda(., E0) under the period, from the ODE route
    MonodromyResult out;
    {
        const MonodromyResult at_e0 = monodromy_ode(S.l, lat, E0, k);
        const Real dplus = detail::cdist(at_e0.multiplier, Complex(Real(1)));
        const Real dminus = detail::cdist(at_e0.multiplier, Complex(Real(-1)));
        if (std::min(dplus, dminus) > pow10(-4)) {
            throw BadBasepoint(
                "monodromy_integral: multiplier at E0 is not a sign");
        }
        out.q_k = (dminus < dplus) ? 1 : 0;
        out.work = at_e0.work;
    }

    const Complex eta_k = lat.eta(k);
    const Complex w_k = lat.omega(k);
    auto numerator = [&](const Complex &t) {
        return Complex(Real(-2)) * eta_k * eval_at(S.a_poly, t) +
               Complex(Real(2)) * w_k * eval_at(S.c_poly, t);
    };
    auto root_mq = [&](const Complex &t) {
        return fingap::sqrt(-eval_at(S.Q, t));
    };

    const Real tol = pow10(-static_cast<long>(lat.precision()) + 2);
    Complex integral{};
    Real sigma_carry = 1;
    Complex w_carry{};
    bool have_carry = false;

    for (std::size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
        const Complex A = waypoints[leg], B = waypoints[leg + 1];
        if (leg == 0) {
            // t = E0 + s^2 (B - E0): integrand 2 s (B - E0) N / sqrt(-Q)
            auto map = [&](const Real &s) { return E0 + Complex(s * s) * (B - E0); };
            auto sqrt_at = [&](const Real &s) { return root_mq(map(s)); };
            detail::BranchTable table;
            const Real s_begin = Real(1) / 256;
            Complex w_begin = sqrt_at(s_begin);
            ++out.work;
            detail::march_branch(sqrt_at, s_begin, Real(1), w_begin, table,
                                 out.work);
            auto integrand = [&](const Complex &s) {
                // s stays real on this leg; quadrature nodes are real
                const Complex t = map(s.re);
                ++out.work;
                return Complex(Real(2)) * s * (B - E0) * numerator(t) /
                       (Complex(table.sign_at(s.re)) * root_mq(t));
            };
            integral += integrate_segment(integrand, Complex{}, Complex(Real(1)),
                                          tol, lat.work_digits());
            sigma_carry = table.sign_at(Real(1));
            w_carry = Complex(sigma_carry) * root_mq(B);
            have_carry = true;
        } else {
            auto map = [&](const Real &s) { return A + Complex(s) * (B - A); };
            auto sqrt_at = [&](const Real &s) { return root_mq(map(s)); };
            detail::BranchTable table;
            // continue the carried branch across the junction
            Real sigma = sigma_carry;
            Complex w0 = Complex(sigma) * sqrt_at(Real(0));
            ++out.work;
            if (have_carry &&
                fingap::abs(w0 - w_carry) > fingap::abs(w0 + w_carry)) {
                sigma = -sigma;
                w0 = -w0;
            }
            detail::march_branch(sqrt_at, Real(0), sigma, w0, table, out.work);
            auto integrand = [&](const Complex &s) {
                const Complex t = map(s.re);
                ++out.work;
                return (B - A) * numerator(t) /
                       (Complex(table.sign_at(s.re)) * root_mq(t));
            };
            integral += integrate_segment(integrand, Complex{}, Complex(Real(1)),
                                          tol, lat.work_digits());
            sigma_carry = table.sign_at(Real(1));
            w_carry = Complex(sigma_carry) * root_mq(B);
        }
    }

    out.k = k;
    out.route = MonodromyRoute::integral;
    out.base_energy = E0;
    out.path = std::move(waypoints);
    const Complex sign = (out.q_k == 1) ? Complex(Real(-1)) : Complex(Real(1));
    out.multiplier = sign * fingap::exp(-integral / Complex(Real(2)));
    return out;
}

/// The zero of Q nearest to E, as a basepoint for the integral route.
inline Complex nearest_base_energy(const SpectralData &S, const Lattice &lat,
                                   const Complex &E) {
    const auto roots = poly_roots(S.Q, lat.precision());
    if (roots.empty()) {
        throw Error("nearest_base_energy: Q has no zeros");
    }
    Complex best = roots.front().value;
    for (const auto &r : roots) {
        if (detail::cdist(r.value, E) < detail::cdist(best, E)) {
            best = r.value;
        }
    }
    return best;
}

} // namespace fingap
