#pragma once

/** \file bethe.hpp
 *
 * The Bethe-ansatz form of the eigenfunctions: with l = l_0 + l_1 + l_2 +
 * l_3 spectral roots t_1, ..., t_l (pairwise distinct mod the period
 * lattice, none on it) and an exponent c, the function
 *
 *   L(x) = prod_j sigma(x + t_j)
 *          / ( sigma(x)^{l_0} sigma_1(x)^{l_1} sigma_2(x)^{l_2}
 *              sigma_3(x)^{l_3} ) * exp(c x)
 *
 * solves -L'' + (sum_i l_i (l_i+1) wp(x + w_i)) L = E L exactly when
 * (t, c) satisfies the Bethe equations F_j = 0, G_i = 0 below; E is then
 * an explicit elliptic expression in (t, c).  The multiplier under
 * x -> x + 2 w_k follows from the sigma shift identity
 * sigma(z + 2 w_k) = -exp(2 eta_k (z + w_k)) sigma(z)  [DLMF 23.2.17]:
 *
 *   L(x + 2 w_k) = (-1)^{l_1+l_2+l_3-l_k} exp(2 eta_k sum_j t_j
 *                                             + 2 w_k c) L(x).
 *
 * Solving the Bethe equations is a damped complex Gauss-Newton iteration
 * with t_1 pinned to its seed: the solution set is a curve (parametrized
 * by the spectral curve), and pinning one root selects a point on it.
 */

#include <optional>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"
#include "monodromy.hpp"

namespace fingap {

/// A solved Bethe configuration: roots, exponent, eigenvalue, final
/// equation residuals (absolute values, F rows first, then G rows).
struct BetheConfig {
    std::vector<Complex> t;
    Complex c;
    Complex E;
    std::vector<Real> residuals;
};

struct BetheOptions {
    unsigned max_iter = 80;
    unsigned max_halvings = 20;
    long tol_exp = -10; ///< convergence when max residual < 10^tol_exp
};

// ---------------------------------------------------------------------------
// the equations, their Jacobian, and the eigenvalue
// ---------------------------------------------------------------------------

/** Residual vector of the Bethe equations at (t, c): for each j
 *
 *   F_j = sum_{k != j} zeta(t_k - t_j) - l_0 zeta(-t_j)
 *         - sum_{i=1}^3 l_i (zeta(w_i - t_j) - eta_i) + c,
 *
 * then G_0 = c + sum_j zeta(t_j) when l_0 > 0, and for each i with
 * l_i > 0, G_i = c + l zeta(w_i) + sum_j zeta(t_j - w_i).
 */
inline std::vector<Complex> bethe_residuals(const CouplingVector &l,
                                            const Lattice &lat,
                                            const std::vector<Complex> &t,
                                            const Complex &c) {
    precision_guard guard(lat.work_digits());
    const std::size_t n = t.size();
    std::vector<Complex> out;
    for (std::size_t j = 0; j < n; ++j) {
        Complex fj = c;
        for (std::size_t k = 0; k < n; ++k) {
            if (k != j) {
                fj += lat.zeta(t[k] - t[j]);
            }
        }
        if (l[0] != 0) {
            fj -= Complex(Real(l[0])) * lat.zeta(-t[j]);
        }
        for (int i = 1; i <= 3; ++i) {
            if (l[i] != 0) {
                fj -= Complex(Real(l[i])) * (lat.zeta(lat.omega(i) - t[j]) - lat.eta(i));
            }
        }
        out.push_back(fj);
    }
    if (l[0] != 0) {
        Complex g0 = c;
        for (const Complex &tj : t) {
            g0 += lat.zeta(tj);
        }
        out.push_back(g0);
    }
    for (int i = 1; i <= 3; ++i) {
        if (l[i] == 0) {
            continue;
        }
        Complex gi = c + Complex(Real(l.sum())) * lat.eta(i);
        for (const Complex &tj : t) {
            gi += lat.zeta(tj - lat.omega(i));
        }
        out.push_back(gi);
    }
    return out;
}

/** The eigenvalue attached to a Bethe configuration (w_0 = 0):
 *
 *   E = -c^2 + (l_0 l_1 + l_2 l_3) e_1 + (l_0 l_2 + l_1 l_3) e_2
 *       + (l_0 l_3 + l_1 l_2) e_3 - sum_{i=1}^3 l_i eta_i (2c + l eta_i)
 *       - sum_j sum_{i=0}^3 l_i (wp(t_j - w_i) - zeta(t_j - w_i)^2)
 *       + sum_{j<k} (wp(t_j - t_k) - zeta(t_j - t_k)^2).
 */
inline Complex bethe_eigenvalue(const CouplingVector &l, const Lattice &lat,
                                const std::vector<Complex> &t, const Complex &c) {
    precision_guard guard(lat.work_digits());
    Complex E = -(c * c);
    E += Complex(Real(l[0] * l[1] + l[2] * l[3])) * lat.e(1);
    E += Complex(Real(l[0] * l[2] + l[1] * l[3])) * lat.e(2);
    E += Complex(Real(l[0] * l[3] + l[1] * l[2])) * lat.e(3);
    const Real l_total(l.sum());
    for (int i = 1; i <= 3; ++i) {
        if (l[i] != 0) {
            E -= Complex(Real(l[i])) * lat.eta(i) *
                 (Complex(Real(2)) * c + Complex(l_total) * lat.eta(i));
        }
    }
    for (const Complex &tj : t) {
        for (int i = 0; i < 4; ++i) {
            if (l[i] == 0) {
                continue;
            }
            const Complex arg = (i == 0) ? tj : tj - lat.omega(i);
            const Complex z = lat.zeta(arg);
            E -= Complex(Real(l[i])) * (lat.wp(arg) - z * z);
        }
    }
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        for (std::size_t k = j + 1; k < t.size(); ++k) {
            const Complex d = t[j] - t[k];
            const Complex z = lat.zeta(d);
            E += lat.wp(d) - z * z;
        }
    }
    return E;
}

namespace detail {

/// max_i |v_i|
inline Real max_abs(const std::vector<Complex> &v) {
    Real m = 0;
    for (const Complex &z : v) {
        const Real a = fingap::abs(z);
        if (a > m) {
            m = a;
        }
    }
    return m;
}

/// Solve the normal equations (J^H J) delta = -J^H F for the complex
/// Gauss-Newton step, with partial pivoting by magnitude.
inline std::vector<Complex> gauss_newton_step(const std::vector<std::vector<Complex>> &J,
                                              const std::vector<Complex> &F) {
    const std::size_t m = J.size();
    const std::size_t n = m ? J.front().size() : 0;
    std::vector<std::vector<Complex>> A(n, std::vector<Complex>(n + 1));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t s = 0; s < n; ++s) {
            Complex acc{};
            for (std::size_t i = 0; i < m; ++i) {
                acc += fingap::conj(J[i][r]) * J[i][s];
            }
            A[r][s] = acc;
        }
        Complex rhs{};
        for (std::size_t i = 0; i < m; ++i) {
            rhs += fingap::conj(J[i][r]) * F[i];
        }
        A[r][n] = -rhs;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (fingap::abs(A[r][col]) > fingap::abs(A[piv][col])) {
                piv = r;
            }
        }
        if (fingap::abs(A[piv][col]) == 0) {
            throw Divergence("bethe_solve: singular Gauss-Newton system");
        }
        std::swap(A[col], A[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex f = A[r][col] / A[col][col];
            for (std::size_t s = col; s <= n; ++s) {
                A[r][s] -= f * A[col][s];
            }
        }
    }
    std::vector<Complex> delta(n);
    for (std::size_t r = n; r-- > 0;) {
        Complex acc = A[r][n];
        for (std::size_t s = r + 1; s < n; ++s) {
            acc -= A[r][s] * delta[s];
        }
        delta[r] = acc / A[r][r];
    }
    return delta;
}

/// Throw Collision if roots meet each other or the lattice (mod periods).
inline void check_bethe_roots(const Lattice &lat, const std::vector<Complex> &t) {
    const Real floor_dist = pow10(-8);
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (lat.lattice_distance(t[j]) <= floor_dist) {
            throw Collision("bethe_solve: a spectral root lies on the period lattice");
        }
        for (std::size_t k = j + 1; k < t.size(); ++k) {
            if (lat.lattice_distance(t[j] - t[k]) <= floor_dist) {
                throw Collision("bethe_solve: spectral roots collide");
            }
        }
    }
}

} // namespace detail

/** Solve the Bethe equations by damped Gauss-Newton with t_1 frozen at its
 * seed value (the solutions form a curve; freezing one root picks a
 * point).  seed_t must have l_0+l_1+l_2+l_3 entries.  The exponent seed
 * defaults to the value forced by the first applicable G equation.
 * Throws Collision when roots merge and Divergence (with the best residual
 * reached) when damping or the iteration budget runs out.
 */
inline BetheConfig bethe_solve(const CouplingVector &l, const Lattice &lat,
                               const std::vector<Complex> &seed_t,
                               std::optional<Complex> seed_c = {},
                               const BetheOptions &opt = {}) {
    precision_guard guard(lat.work_digits());
    const std::size_t n = static_cast<std::size_t>(l.sum());
    if (seed_t.size() != n) {
        throw Error("bethe_solve: expected " + std::to_string(n) +
                    " seed roots, got " + std::to_string(seed_t.size()));
    }
    BetheConfig cfg;
    cfg.t = seed_t;
    if (n == 0) {
        if (!seed_c) {
            throw Error("bethe_solve: the free case needs an exponent seed");
        }
        cfg.c = *seed_c;
        cfg.E = bethe_eigenvalue(l, lat, cfg.t, cfg.c);
        return cfg;
    }
    detail::check_bethe_roots(lat, cfg.t);
    if (seed_c) {
        cfg.c = *seed_c;
    } else if (l[0] != 0) {
        cfg.c = Complex{};
        for (const Complex &tj : cfg.t) {
            cfg.c -= lat.zeta(tj);
        }
    } else {
        int i = (l[1] != 0) ? 1 : (l[2] != 0) ? 2 : 3;
        cfg.c = -(Complex(Real(l.sum())) * lat.eta(i));
        for (const Complex &tj : cfg.t) {
            cfg.c -= lat.zeta(tj - lat.omega(i));
        }
    }

    // unknowns: t_2, ..., t_n, c  (t_1 pinned)
    const std::size_t nu = n; // (n - 1) roots + c
    const Real tol = pow10(opt.tol_exp);
    std::vector<Complex> F = bethe_residuals(l, lat, cfg.t, cfg.c);
    Real norm = detail::max_abs(F);
    Real best = norm;

    for (unsigned iter = 0; iter < opt.max_iter; ++iter) {
        if (norm < tol) {
            detail::check_bethe_roots(lat, cfg.t);
            cfg.E = bethe_eigenvalue(l, lat, cfg.t, cfg.c);
            cfg.residuals.clear();
            for (const Complex &r : F) {
                cfg.residuals.push_back(fingap::abs(r));
            }
            return cfg;
        }
        // Jacobian with respect to (t_2..t_n, c)
        std::vector<std::vector<Complex>> J(F.size(), std::vector<Complex>(nu));
        std::size_t row = 0;
        for (std::size_t j = 0; j < n; ++j, ++row) {
            for (std::size_t mcol = 1; mcol < n; ++mcol) {
                if (mcol == j) {
                    Complex d{};
                    for (std::size_t k = 0; k < n; ++k) {
                        if (k != j) {
                            d += lat.wp(cfg.t[k] - cfg.t[j]);
                        }
                    }
                    if (l[0] != 0) {
                        d -= Complex(Real(l[0])) * lat.wp(cfg.t[j]);
                    }
                    for (int i = 1; i <= 3; ++i) {
                        if (l[i] != 0) {
                            d -= Complex(Real(l[i])) * lat.wp(lat.omega(i) - cfg.t[j]);
                        }
                    }
                    J[row][mcol - 1] = d;
                } else {
                    J[row][mcol - 1] = -lat.wp(cfg.t[mcol] - cfg.t[j]);
                }
            }
            J[row][nu - 1] = Complex(Real(1));
        }
        if (l[0] != 0) {
            for (std::size_t mcol = 1; mcol < n; ++mcol) {
                J[row][mcol - 1] = -lat.wp(cfg.t[mcol]);
            }
            J[row][nu - 1] = Complex(Real(1));
            ++row;
        }
        for (int i = 1; i <= 3; ++i) {
            if (l[i] == 0) {
                continue;
            }
            for (std::size_t mcol = 1; mcol < n; ++mcol) {
                J[row][mcol - 1] = -lat.wp(cfg.t[mcol] - lat.omega(i));
            }
            J[row][nu - 1] = Complex(Real(1));
            ++row;
        }

        const std::vector<Complex> delta = detail::gauss_newton_step(J, F);

        // damped update
        Real scale = 1;
        bool accepted = false;
        for (unsigned h = 0; h <= opt.max_halvings; ++h) {
            std::vector<Complex> t_try = cfg.t;
            for (std::size_t mcol = 1; mcol < n; ++mcol) {
                t_try[mcol] += Complex(scale) * delta[mcol - 1];
            }
            const Complex c_try = cfg.c + Complex(scale) * delta[nu - 1];
            try {
                std::vector<Complex> F_try = bethe_residuals(l, lat, t_try, c_try);
                const Real norm_try = detail::max_abs(F_try);
                if (norm_try < norm) {
                    cfg.t = std::move(t_try);
                    cfg.c = c_try;
                    F = std::move(F_try);
                    norm = norm_try;
                    accepted = true;
                    break;
                }
            } catch (const PoleProximity &) {
                // trial step stepped onto a pole: halve and retry
            }
            scale /= 2;
        }
        if (!accepted) {
            throw Divergence("bethe_solve: damping failed; best residual " +
                             best.str(6));
        }
        if (norm < best) {
            best = norm;
        }
    }
    if (norm < tol) {
        detail::check_bethe_roots(lat, cfg.t);
        cfg.E = bethe_eigenvalue(l, lat, cfg.t, cfg.c);
        cfg.residuals.clear();
        for (const Complex &r : F) {
            cfg.residuals.push_back(fingap::abs(r));
        }
        return cfg;
    }
    throw Divergence("bethe_solve: no convergence; best residual " + best.str(6));
}

// ---------------------------------------------------------------------------
// the eigenfunction, its defect, and its multiplier
// ---------------------------------------------------------------------------

/// L(x) itself (poles of the potential excluded).
inline Complex bethe_function_value(const CouplingVector &l, const Lattice &lat,
                                    const BetheConfig &cfg, const Complex &x) {
    precision_guard guard(lat.work_digits());
    Complex num(Real(1));
    for (const Complex &tj : cfg.t) {
        num *= lat.sigma(x + tj);
    }
    Complex den(Real(1));
    for (long p = 0; p < l[0]; ++p) {
        den *= lat.sigma(x);
    }
    for (int i = 1; i <= 3; ++i) {
        for (long p = 0; p < l[i]; ++p) {
            den *= lat.co_sigma(i, x);
        }
    }
    return num / den * fingap::exp(cfg.c * x);
}

/** |u(x) - E - (phi' + phi^2)| with phi = L'/L; exactly zero for a solved
 * configuration, so the returned size measures equation error.
 */
inline Real bethe_function_residual(const CouplingVector &l, const Lattice &lat,
                                    const BetheConfig &cfg, const Complex &x) {
    precision_guard guard(lat.work_digits());
    Complex phi = cfg.c;
    Complex dphi{};
    for (const Complex &tj : cfg.t) {
        phi += lat.zeta(x + tj);
        dphi -= lat.wp(x + tj);
    }
    if (l[0] != 0) {
        phi -= Complex(Real(l[0])) * lat.zeta(x);
        dphi += Complex(Real(l[0])) * lat.wp(x);
    }
    for (int i = 1; i <= 3; ++i) {
        if (l[i] != 0) {
            phi -= Complex(Real(l[i])) * (lat.zeta(x + lat.omega(i)) - lat.eta(i));
            dphi += Complex(Real(l[i])) * lat.wp(x + lat.omega(i));
        }
    }
    const Complex u = potential_value(l, lat, x);
    return fingap::abs(u - cfg.E - (dphi + phi * phi));
}

/** Multiplier of L under x -> x + 2 w_k, k = 1, 2, 3, from the sigma and
 * co-sigma shift identities (the co-sigma shift contributes the extra
 * sign (-1)^{l_1+l_2+l_3-l_k} through the Legendre relation).
 */
inline Complex bethe_multiplier(const CouplingVector &l, const Lattice &lat,
                                const BetheConfig &cfg, int k) {
    if (k < 1 || k > 3) {
        throw Error("bethe_multiplier: period index must be 1, 2 or 3");
    }
    precision_guard guard(lat.work_digits());
    Complex sum_t{};
    for (const Complex &tj : cfg.t) {
        sum_t += tj;
    }
    const Complex val = fingap::exp(Complex(Real(2)) * lat.eta(k) * sum_t +
                                    Complex(Real(2)) * lat.omega(k) * cfg.c);
    const long sign = l[1] + l[2] + l[3] - l[k];
    return (sign % 2 != 0) ? -val : val;
}

/// The Bethe route packaged like the other monodromy routes.
inline MonodromyResult bethe_monodromy(const CouplingVector &l, const Lattice &lat,
                                       const BetheConfig &cfg, int k) {
    MonodromyResult out;
    out.k = k;
    out.route = MonodromyRoute::bethe;
    out.multiplier = bethe_multiplier(l, lat, cfg, k);
    return out;
}

// ---------------------------------------------------------------------------
// inverse of wp, and a seed scan for small root counts
// ---------------------------------------------------------------------------

/** A point x with wp(x) = v, from a coarse scan of the fundamental cell
 * refined by Newton (with a doubled step near the half periods, where
 * wp - e_i has a double zero).  Throws NonConvergence if no cell point
 * refines to the target.
 */
inline Complex wp_inverse(const Lattice &lat, const Complex &v) {
    precision_guard guard(lat.work_digits());
    const Real tol = pow10(-static_cast<long>(lat.precision()) - 2);
    Real vscale = fingap::abs(v);
    if (vscale < 1) {
        vscale = 1;
    }
    std::vector<Complex> starts;
    {
        std::vector<std::pair<Real, Complex>> scored;
        const int grid = 24;
        for (int a = 1; a < 2 * grid; a += 2) {
            for (int b = 1; b < 2 * grid; b += 2) {
                const Complex x = Complex(Real(a) / (2 * grid) * 2) * lat.omega1() +
                                  Complex(Real(b) / (2 * grid) * 2) * lat.omega3();
                scored.emplace_back(fingap::abs(lat.wp(x) - v), x);
            }
        }
        std::sort(scored.begin(), scored.end(),
                  [](const auto &p, const auto &q) { return p.first < q.first; });
        for (std::size_t i = 0; i < 3 && i < scored.size(); ++i) {
            starts.push_back(scored[i].second);
        }
    }
    for (const Complex &start : starts) {
        Complex x = start;
        Real g_abs = fingap::abs(lat.wp(x) - v);
        for (int iter = 0; iter < 200; ++iter) {
            if (g_abs <= tol * vscale) {
                return x;
            }
            const Complex g = lat.wp(x) - v;
            const Complex dg = lat.wp_prime(x);
            Complex x_best = x;
            Real g_best = g_abs;
            if (fingap::abs(dg) > 0) {
                const Complex step = g / dg;
                auto try_scale = [&](const Real &s) {
                    const Complex x_new = x - Complex(s) * step;
                    try {
                        const Real g_new = fingap::abs(lat.wp(x_new) - v);
                        if (g_new < g_best) {
                            x_best = x_new;
                            g_best = g_new;
                        }
                    } catch (const PoleProximity &) {
                    }
                };
                try_scale(Real(1));
                if (g_best > g_abs / 4) {
                    // sluggish: double zero of wp - v (v near some e_i) wants
                    // a doubled step; a halved one rescues overshoots
                    try_scale(Real(2));
                    try_scale(Real(1) / 2);
                }
            }
            if (g_best >= g_abs) {
                // linear steps stall where the two zeros of wp - v split
                // (near a half period); solve the local quadratic model
                // g + dg h + (wp''/2) h^2 = 0 instead
                const Complex half_d2 =
                    Complex(Real(3)) * lat.wp(x) * lat.wp(x) - lat.g2() / Complex(Real(4));
                const Complex disc = fingap::sqrt(dg * dg -
                                                  Complex(Real(4)) * half_d2 * g);
                for (const Complex &den : {dg + disc, dg - disc}) {
                    if (fingap::abs(den) == 0) {
                        continue;
                    }
                    const Complex h = Complex(Real(-2)) * g / den;
                    try {
                        const Real g_new = fingap::abs(lat.wp(x + h) - v);
                        if (g_new < g_best) {
                            g_best = g_new;
                            x_best = x + h;
                        }
                    } catch (const PoleProximity &) {
                    }
                }
            }
            if (g_best >= g_abs) {
                break;
            }
            x = x_best;
            g_abs = g_best;
        }
        if (g_abs <= tol * vscale) {
            return x;
        }
    }
    throw NonConvergence("wp_inverse: no starting point refined to the target");
}

/** Distinct solved configurations with the first root running over a grid
 * (one or two total roots; the sampling device behind the multi-energy
 * route-agreement checks).  Configurations are deduplicated by eigenvalue.
 */
inline std::vector<BetheConfig> bethe_sample_family(const CouplingVector &l,
                                                    const Lattice &lat,
                                                    std::size_t count) {
    precision_guard guard(lat.work_digits());
    const long n = l.sum();
    if (n != 1 && n != 2) {
        throw Error("bethe_sample_family: implemented for one or two roots");
    }
    std::vector<BetheConfig> out;
    auto seen = [&](const Complex &E) {
        for (const BetheConfig &c : out) {
            if (fingap::abs(c.E - E) < pow10(-8)) {
                return true;
            }
        }
        return false;
    };
    const std::array<std::pair<Rational, Rational>, 12> fracs{{
        {Rational(1, 3), Rational(0)},
        {Rational(1, 5), Rational(2, 5)},
        {Rational(0), Rational(2, 5)},
        {Rational(2, 5), Rational(1, 5)},
        {Rational(1, 2), Rational(1, 5)},
        {Rational(1, 4), Rational(1, 4)},
        {Rational(3, 7), Rational(3, 7)},
        {Rational(1, 7), Rational(1, 4)},
        {Rational(2, 7), Rational(1, 8)},
        {Rational(1, 8), Rational(3, 8)},
        {Rational(3, 8), Rational(1, 3)},
        {Rational(1, 6), Rational(1, 6)},
    }};
    for (const auto &[f1, f3] : fracs) {
        if (out.size() >= count) {
            break;
        }
        const Complex t1 = to_complex(f1) * (Complex(Real(2)) * lat.omega1()) +
                           to_complex(f3) * (Complex(Real(2)) * lat.omega3());
        if (lat.lattice_distance(t1) < pow10(-2)) {
            continue;
        }
        if (n == 1) {
            try {
                BetheConfig cfg = bethe_solve(l, lat, {t1});
                if (!seen(cfg.E)) {
                    out.push_back(std::move(cfg));
                }
            } catch (const Error &) {
                continue;
            }
            continue;
        }
        // two roots: scan the companion root over a coarse sub-grid
        for (int a = 1; a < 8 && out.size() < count; ++a) {
            for (int b = 1; b < 8 && out.size() < count; ++b) {
                const Complex t2 =
                    Complex(Real(a) / 8) * (Complex(Real(2)) * lat.omega1()) +
                    Complex(Real(b) / 8) * (Complex(Real(2)) * lat.omega3());
                if (lat.lattice_distance(t2) < pow10(-2) ||
                    lat.lattice_distance(t2 - t1) < pow10(-2)) {
                    continue;
                }
                try {
                    BetheConfig cfg = bethe_solve(l, lat, {t1, t2});
                    if (!seen(cfg.E)) {
                        out.push_back(std::move(cfg));
                    }
                } catch (const Error &) {
                    continue;
                }
            }
        }
    }
    return out;
}

} // namespace fingap
