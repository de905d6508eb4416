#pragma once

/** \file spectral.hpp
 *
 * The finite-gap apparatus for H = -(d/dx)^2 + sum_i l_i(l_i+1) wp(x+w_i):
 *
 *  - quasi-solvable invariant subspaces and the exact matrix of H on them,
 *  - the odd-order commuting operator A of order 2g+1, built as a product
 *    of at most four intertwining factors,
 *  - the spectral polynomial Q with A^2 + Q(H) = 0,
 *  - the function Xi(x, E) (the layer expansion of A), computed twice: by
 *    peeling A against powers of H and by an independent linear-ansatz
 *    solve of Xi''' - 4(u-E) Xi' - 2u' Xi = 0,
 *  - the period-integral rewrite Xi = c(E) + a(E) wp(...) + (d/dx)^2(...),
 *  - band edges as exact-or-refined roots of Q.
 *
 * Every quantity with two independent routes is cross-checked; mismatches
 * throw rather than propagate.
 */

#include <map>
#include <utility>
#include <vector>

#include "coupling.hpp"
#include "diffop.hpp"
#include "lattice.hpp"
#include "linalg.hpp"
#include "polyroots.hpp"

namespace fingap {

// ---------------------------------------------------------------------------
// potentials
// ---------------------------------------------------------------------------

/// u = sum_i l_i (l_i + 1) wp(x + w_i).
inline HalfPower<Rational> coupling_potential(const Roots &roots,
                                              const CouplingVector &l) {
    auto u = HalfPower<Rational>::zero(roots);
    for (int i = 0; i < 4; ++i) {
        const long li = l[i];
        if (li != 0) {
            u += Rational(li * (li + 1)) * HalfPower<Rational>::wp_shift(roots, i);
        }
    }
    return u;
}

/// u = sum_i alpha_i (alpha_i - 1) wp(x + w_i); gauge-independent.
inline HalfPower<Rational> alpha_potential(const Roots &roots,
                                           const AlphaVector &alpha) {
    auto u = HalfPower<Rational>::zero(roots);
    for (int i = 0; i < 4; ++i) {
        const long c = alpha[i] * (alpha[i] - 1);
        if (c != 0) {
            u += Rational(c) * HalfPower<Rational>::wp_shift(roots, i);
        }
    }
    return u;
}

/// u for an intermediate (possibly negative) coupling tuple m.
inline HalfPower<Rational> m_potential(const Roots &roots,
                                       const std::array<long, 4> &m) {
    auto u = HalfPower<Rational>::zero(roots);
    for (int i = 0; i < 4; ++i) {
        const long c = m[static_cast<std::size_t>(i)] *
                       (m[static_cast<std::size_t>(i)] + 1);
        if (c != 0) {
            u += Rational(c) * HalfPower<Rational>::wp_shift(roots, i);
        }
    }
    return u;
}

// ---------------------------------------------------------------------------
// quasi-solvable spaces
// ---------------------------------------------------------------------------

/** A finite-dimensional H-invariant space: basis Phihat z^n, 0 <= n <= d,
 * with Phihat = prod_{i=1..3} (z - e_i)^(alpha_i / 2), and the exact matrix
 * of H in that basis (column j holds the coordinates of H b_j).
 */
struct QuasiSpace {
    AlphaVector alpha;
    long degree = 0; ///< top power d; the dimension is d + 1
    std::vector<HalfPower<Rational>> basis;
    Matrix<Rational> h_matrix;
};

inline QuasiSpace quasi_space_basis(const Roots &roots, const AlphaVector &alpha) {
    using HP = HalfPower<Rational>;
    const long d = alpha_degree(alpha); // throws NotQuasiSolvable
    QuasiSpace qs;
    qs.alpha = alpha;
    qs.degree = d;
    const HP phi = HP::phi_hat(roots, {static_cast<int>(alpha[1]),
                                       static_cast<int>(alpha[2]),
                                       static_cast<int>(alpha[3])});
    const HP z = HP::z_var(roots);
    HP b = phi;
    for (long n = 0; n <= d; ++n) {
        qs.basis.push_back(b);
        b = b * z;
    }
    const auto H = DiffOp<Rational>::schroedinger(alpha_potential(roots, alpha));
    const std::size_t dim = static_cast<std::size_t>(d) + 1;
    qs.h_matrix = Matrix<Rational>(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        HP img = H.apply(qs.basis[j]);
        if (img.is_zero()) {
            continue;
        }
        HP q = HP::divide_single(img, phi);
        if (q.single_sector() != 0 || !q.sector_coeff(0).is_polynomial()) {
            throw ClosureFailure("quasi_space_basis: H image leaves the gauge sector");
        }
        const auto &poly = q.sector_coeff(0).num();
        if (poly.degree() > d) {
            throw ClosureFailure("quasi_space_basis: H image exceeds the top degree");
        }
        for (long i = 0; i <= poly.degree(); ++i) {
            qs.h_matrix(static_cast<std::size_t>(i), j) =
                poly[static_cast<std::size_t>(i)];
        }
    }
    return qs;
}

// ---------------------------------------------------------------------------
// intertwining factors and the commuting operator
// ---------------------------------------------------------------------------

/** One step of the factorized construction: the monic operator L
 * annihilating the quasi-solvable space of beta, which intertwines the
 * operator of coupling-square beta(beta-1) with the one of next(next+1),
 * next = beta + d.  The intertwining identity is verified exactly.
 */
struct DarbouxStep {
    AlphaVector beta;
    std::array<long, 4> next{};
    DiffOp<Rational> L;

    DarbouxStep() : L(Roots{}) {}
};

inline DarbouxStep darboux_step(const Roots &roots, const AlphaVector &beta) {
    DarbouxStep st;
    st.beta = beta;
    QuasiSpace qs = quasi_space_basis(roots, beta);
    st.L = annihilator(qs.basis);
    for (int i = 0; i < 4; ++i) {
        st.next[static_cast<std::size_t>(i)] = beta[i] + qs.degree;
    }
    const auto H_before = DiffOp<Rational>::schroedinger(alpha_potential(roots, beta));
    const auto H_after = DiffOp<Rational>::schroedinger(m_potential(roots, st.next));
    if (!(st.L * H_before == H_after * st.L)) {
        throw IntertwineFailure("darboux_step: L H != H' L");
    }
    return st;
}

/** The monic operator A of order 2g+1 commuting with H, assembled from at
 * most four annihilator factors.  Factor subscripts tau come from the
 * half-sum shifted couplings; the selection rule per factor is
 *   sum(tau)/2 integer and <= 0  ->  use tau,
 *   sum(tau)/2 integer and >= 2  ->  use 1 - tau,
 *   otherwise                    ->  the factor is the identity.
 * Each used subscript must be a gauge vector of the running stage coupling,
 * and the chain must end on a coupling equivalent to l.
 */
inline DiffOp<Rational> build_A(const Roots &roots, const CouplingVector &l) {
    std::array<std::array<long, 4>, 4> subs{}; // rightmost factor first
    if (l.sum() % 2 == 0) {
        const auto le = coupling_even_shift(l);
        subs[0] = {-l[0], -l[1], -l[2], -l[3]};
        subs[1] = {-le[0], -le[1], le[2] + 1, le[3] + 1};
        subs[2] = {-l[1], l[0] + 1, -l[3], l[2] + 1};
        subs[3] = {-le[3], le[2] + 1, le[1] + 1, -le[0]};
    } else {
        const auto lo = coupling_odd_shift(l);
        subs[0] = {l[0] + 1, -l[1], -l[2], -l[3]};
        subs[1] = {-lo[0], lo[1] + 1, -lo[2], -lo[3]};
        subs[2] = {-l[1], -l[0], l[3] + 1, -l[2]};
        subs[3] = {lo[2] + 1, -lo[3], -lo[0], -lo[1]};
    }

    std::array<long, 4> m = {l[0], l[1], l[2], l[3]};
    auto A = DiffOp<Rational>::identity(roots);
    for (const auto &tau : subs) {
        const long s2 = tau[0] + tau[1] + tau[2] + tau[3];
        AlphaVector beta;
        if (s2 % 2 == 0 && s2 <= 0) {
            beta = AlphaVector(tau[0], tau[1], tau[2], tau[3]);
        } else if (s2 % 2 == 0 && s2 >= 4) {
            beta = AlphaVector(1 - tau[0], 1 - tau[1], 1 - tau[2], 1 - tau[3]);
        } else {
            continue; // identity factor
        }
        for (int i = 0; i < 4; ++i) {
            const long mi = m[static_cast<std::size_t>(i)];
            if (beta[i] != -mi && beta[i] != mi + 1) {
                throw IntertwineFailure("build_A: factor gauge not admissible at its stage");
            }
        }
        DarbouxStep st = darboux_step(roots, beta);
        A = st.L * A;
        m = st.next;
    }
    for (int i = 0; i < 4; ++i) {
        const long mi = m[static_cast<std::size_t>(i)];
        if (mi * (mi + 1) != l[i] * (l[i] + 1)) {
            throw IntertwineFailure("build_A: chain did not close on the initial operator");
        }
    }
    const long g = genus(l);
    if (A.order() != 2 * g + 1) {
        throw IntertwineFailure("build_A: assembled order differs from 2g+1");
    }
    return A;
}

// ---------------------------------------------------------------------------
// spectral polynomial
// ---------------------------------------------------------------------------

/** Q(E) (monic, degree 2g+1) defined by A^2 + Q(H) = 0: expand -A.A in
 * powers of H and collect the constant coefficients.  Throws
 * RelationFailure if -A.A is not a polynomial in H with constant
 * coefficients.
 */
inline Polynomial<Rational> spectral_q(const DiffOp<Rational> &A,
                                       const HalfPower<Rational> &u, long g) {
    using Op = DiffOp<Rational>;
    const Roots roots = A.roots();
    const auto H = Op::schroedinger(u);
    std::vector<Op> Hpow;
    Hpow.push_back(Op::identity(roots));
    for (long k = 1; k <= 2 * g + 1; ++k) {
        Hpow.push_back(Hpow.back() * H);
    }
    Op R = -(A * A);
    std::vector<Rational> q(static_cast<std::size_t>(2 * g + 2));
    for (long k = 2 * g + 1; k >= 0; --k) {
        auto coef = R.coeff(static_cast<int>(2 * k));
        Rational qk = 0;
        if (!coef.is_zero()) {
            if (coef.single_sector() != 0 || !coef.sector_coeff(0).is_polynomial() ||
                coef.sector_coeff(0).num().degree() > 0) {
                throw RelationFailure("spectral_q: non-constant coefficient of H^k");
            }
            qk = coef.sector_coeff(0).num()[0];
            if (k % 2 != 0) {
                qk = -qk;
            }
        }
        q[static_cast<std::size_t>(k)] = qk;
        if (qk != 0) {
            R -= qk * Hpow[static_cast<std::size_t>(k)];
        }
    }
    if (!R.is_zero()) {
        throw RelationFailure("spectral_q: -A^2 is not a polynomial in H");
    }
    return Polynomial<Rational>(std::move(q));
}

/** The defining relations of the pair (A, H): A has order 2g+1, commutes
 * with H, and satisfies A^2 + Q(H) = 0 with Q monic of degree 2g+1.
 * Returns Q; throws RelationFailure otherwise.
 */
inline Polynomial<Rational> verify_A_relations(const DiffOp<Rational> &A,
                                               const HalfPower<Rational> &u,
                                               long g) {
    if (A.order() != 2 * g + 1) {
        throw RelationFailure("verify_A_relations: order is not 2g+1");
    }
    const auto H = DiffOp<Rational>::schroedinger(u);
    if (!op_commutator(A, H).is_zero()) {
        throw RelationFailure("verify_A_relations: [A, H] != 0");
    }
    Polynomial<Rational> Q = spectral_q(A, u, g);
    if (Q.degree() != 2 * g + 1 || !(Q.leading() == Rational(1))) {
        throw RelationFailure("verify_A_relations: Q not monic of degree 2g+1");
    }
    return Q;
}

// ---------------------------------------------------------------------------
// Xi(x, E): shift-power representation and the independent ansatz solve
// ---------------------------------------------------------------------------

/** Xi(x, E) = c0(E) + sum_{i,k} b[{i,k}](E) wp(x + w_i)^k, the normalized
 * form: every coefficient a polynomial in E, c0 monic of degree g, all b of
 * degree < g.  (i, k) runs over shifts i = 0..3 and powers 1 <= k <= l_i.
 */
struct XiData {
    Polynomial<Rational> c0;
    std::map<std::pair<int, int>, Polynomial<Rational>> b;

    friend bool operator==(const XiData &x, const XiData &y) {
        return x.c0 == y.c0 && x.b == y.b;
    }
};

/// Partial fractions of an element of Q(z) whose poles lie in {e_1,e_2,e_3}.
struct PartialFractions {
    Polynomial<Rational> poly;
    std::array<std::vector<Rational>, 3> pole; ///< pole[i][k-1] * (z-e_i)^(-k)
};

inline PartialFractions partial_fractions(const RationalFunction<Rational> &r,
                                          const Roots &roots) {
    PartialFractions out;
    Polynomial<Rational> den = r.den();
    std::array<long, 3> mult{};
    for (int i = 0; i < 3; ++i) {
        const Rational ei = roots.e[static_cast<std::size_t>(i)];
        while (den.degree() > 0 && den.eval(ei) == 0) {
            den = detail::deflate(den, ei);
            ++mult[static_cast<std::size_t>(i)];
        }
    }
    if (den.degree() != 0) {
        throw Error("partial_fractions: pole outside {e_1, e_2, e_3}");
    }
    RationalFunction<Rational> acc = r;
    for (int i = 0; i < 3; ++i) {
        const long k = mult[static_cast<std::size_t>(i)];
        if (k == 0) {
            continue;
        }
        const Rational ei = roots.e[static_cast<std::size_t>(i)];
        // Laurent expansion at z = e_i: substitute z = t + e_i, peel t^-k
        const Polynomial<Rational> shift(std::vector<Rational>{ei, Rational(1)});
        const Polynomial<Rational> Ns = r.num().compose(shift);
        const Polynomial<Rational> Ds_full = r.den().compose(shift);
        std::vector<Rational> D0;
        for (long j = 0; j <= Ds_full.degree(); ++j) {
            const Rational cj = Ds_full[static_cast<std::size_t>(j)];
            if (j < k) {
                if (cj != 0) {
                    throw Error("partial_fractions: inconsistent pole order");
                }
            } else {
                D0.push_back(cj);
            }
        }
        // inverse series of D0 modulo t^k, then s = Ns * D0^{-1} mod t^k
        std::vector<Rational> inv(static_cast<std::size_t>(k));
        inv[0] = Rational(1) / D0[0];
        for (long n = 1; n < k; ++n) {
            Rational s = 0;
            for (long j = 1; j <= n && j < static_cast<long>(D0.size()); ++j) {
                s += D0[static_cast<std::size_t>(j)] *
                     inv[static_cast<std::size_t>(n - j)];
            }
            inv[static_cast<std::size_t>(n)] = -s / D0[0];
        }
        auto &coeffs = out.pole[static_cast<std::size_t>(i)];
        coeffs.assign(static_cast<std::size_t>(k), Rational(0));
        for (long j = 0; j < k; ++j) {
            Rational sj = 0;
            for (long t = 0; t <= j; ++t) {
                const Rational nt = Ns[static_cast<std::size_t>(t)];
                if (nt != 0) {
                    sj += nt * inv[static_cast<std::size_t>(j - t)];
                }
            }
            // coefficient of (z - e_i)^{-(k - j)}
            if (sj != 0) {
                coeffs[static_cast<std::size_t>(k - j - 1)] = sj;
            }
        }
        for (long m = 1; m <= k; ++m) {
            const Rational gamma = coeffs[static_cast<std::size_t>(m - 1)];
            if (gamma == 0) {
                continue;
            }
            Polynomial<Rational> dpow(Rational(1));
            const Polynomial<Rational> lin(std::vector<Rational>{-ei, Rational(1)});
            for (long t = 0; t < m; ++t) {
                dpow *= lin;
            }
            acc -= RationalFunction<Rational>(Polynomial<Rational>(gamma), dpow);
        }
    }
    if (!acc.is_polynomial()) {
        throw Error("partial_fractions: residue removal left a pole");
    }
    out.poly = acc.num();
    return out;
}

/** Reduce a polynomial in w = wp(x + w_i) modulo exact second x-derivatives
 * of polynomials in w: returns (constant, linear) with
 * p(w) = constant + linear * w + (d/dx)^2 q(w).  Valid for any half-period
 * shift, since all shifts satisfy the same differential equation.
 */
inline std::pair<Rational, Rational> d2_reduce(Polynomial<Rational> p,
                                               const Rational &g2,
                                               const Rational &g3) {
    const Polynomial<Rational> W(
        std::vector<Rational>{-g3, -g2, Rational(0), Rational(4)});
    const Polynomial<Rational> V(
        std::vector<Rational>{-g2 / 2, Rational(0), Rational(6)});
    while (p.degree() >= 2) {
        const long n = p.degree();
        const Rational lambda = p[static_cast<std::size_t>(n)] /
                                Rational((4 * n - 2) * (n - 1));
        const auto q = Polynomial<Rational>::monomial(lambda, static_cast<std::size_t>(n - 1));
        p -= q.derivative().derivative() * W + q.derivative() * V;
        if (p.degree() >= n) {
            throw Error("d2_reduce: degree failed to drop");
        }
    }
    Rational c = p.degree() >= 0 ? p[0] : Rational(0);
    Rational a = p.degree() >= 1 ? p[1] : Rational(0);
    return {c, a};
}

/// Assemble XiData from the layer functions a_tilde[j] (E-coefficient g-j).
inline XiData xi_from_layers(const std::vector<HalfPower<Rational>> &a_tilde,
                             const Roots &roots) {
    const long g = static_cast<long>(a_tilde.size()) - 1;
    std::map<std::pair<int, int>, Polynomial<Rational>> b;
    Polynomial<Rational> c0;
    for (long j = 0; j <= g; ++j) {
        const auto &aj = a_tilde[static_cast<std::size_t>(j)];
        if (aj.is_zero()) {
            continue;
        }
        if (!aj.is_plain()) {
            throw ReductionFailure("xi_from_layers: layer outside the plain sector");
        }
        const std::size_t epow = static_cast<std::size_t>(g - j);
        const auto pf = partial_fractions(aj.sector_coeff(0), roots);
        for (long m = 0; m <= pf.poly.degree(); ++m) {
            const Rational cm = pf.poly[static_cast<std::size_t>(m)];
            if (cm == 0) {
                continue;
            }
            if (m == 0) {
                c0 += Polynomial<Rational>::monomial(cm, epow);
            } else {
                b[{0, static_cast<int>(m)}] += Polynomial<Rational>::monomial(cm, epow);
            }
        }
        for (int i = 0; i < 3; ++i) {
            const auto &coeffs = pf.pole[static_cast<std::size_t>(i)];
            if (coeffs.empty()) {
                continue;
            }
            const Rational ei = roots.e[static_cast<std::size_t>(i)];
            const Rational ej = roots.e[static_cast<std::size_t>((i + 1) % 3)];
            const Rational ek = roots.e[static_cast<std::size_t>((i + 2) % 3)];
            const Rational ci = (ei - ej) * (ei - ek);
            for (std::size_t km = 0; km < coeffs.size(); ++km) {
                const long k = static_cast<long>(km) + 1;
                const Rational gamma = coeffs[km];
                if (gamma == 0) {
                    continue;
                }
                // gamma (z - e_i)^{-k} = gamma c_i^{-k} (w_i - e_i)^k
                const Rational scale = gamma / pow_int(ci, k);
                std::vector<Rational> neg_e_pow(static_cast<std::size_t>(k) + 1);
                neg_e_pow[0] = 1;
                for (long s = 1; s <= k; ++s) {
                    neg_e_pow[static_cast<std::size_t>(s)] =
                        neg_e_pow[static_cast<std::size_t>(s - 1)] * (-ei);
                }
                Rational binom = 1; // C(k, t), updated incrementally
                for (long t = 0; t <= k; ++t) {
                    const Rational term =
                        scale * binom * neg_e_pow[static_cast<std::size_t>(k - t)];
                    if (term != 0) {
                        if (t == 0) {
                            c0 += Polynomial<Rational>::monomial(term, epow);
                        } else {
                            b[{static_cast<int>(i) + 1, static_cast<int>(t)}] +=
                                Polynomial<Rational>::monomial(term, epow);
                        }
                    }
                    if (t < k) {
                        binom = binom * Rational(k - t) / Rational(t + 1);
                    }
                }
            }
        }
    }
    XiData xi;
    xi.c0 = c0;
    for (auto &[key, poly] : b) {
        if (!poly.is_zero()) {
            xi.b.emplace(key, poly);
        }
    }
    return xi;
}

// ---------------------------------------------------------------------------
// spectral polynomial from Xi (first integral)
// ---------------------------------------------------------------------------

/** Q(E) from the first integral of Xi''' - 4(u - E) Xi' - 2 u' Xi = 0:
 * S = Xi^2 (E - u) + Xi Xi''/2 - (Xi')^2/4 is independent of x and equals
 * the spectral polynomial.  Every algebra coefficient of S is polynomial in
 * E of degree at most 2g + 1, so evaluating at the 2g + 2 energies
 * E = 0, 1, ..., 2g + 1 — checking at each that no x-dependence survives —
 * determines S completely; the samples are interpolated exactly.  Throws
 * MismatchFailure if any sample retains x-dependence.
 */
inline Polynomial<Rational> q_from_xi(const std::vector<HalfPower<Rational>> &a_tilde,
                                      const HalfPower<Rational> &u,
                                      const Roots &roots) {
    using HP = HalfPower<Rational>;
    const long g = static_cast<long>(a_tilde.size()) - 1;
    const HP one = HP::constant(roots, Rational(1));
    const Rational half = Rational(1) / 2;
    const Rational quarter = Rational(1) / 4;
    std::vector<std::pair<Rational, Rational>> samples;
    samples.reserve(static_cast<std::size_t>(2 * g + 2));
    for (long s = 0; s <= 2 * g + 1; ++s) {
        const Rational Es(s);
        HP xi = HP::zero(roots); // Horner over layers: sum_j a_tilde[j] Es^{g-j}
        for (const auto &layer : a_tilde) {
            xi = Es * xi + layer;
        }
        const HP xp = xi.ddx();
        const HP xpp = xp.ddx();
        const HP S = xi * xi * (Es * one - u) + half * (xi * xpp) - quarter * (xp * xp);
        Rational val(0);
        if (!S.is_zero()) {
            if (S.single_sector() != 0 || !S.sector_coeff(0).is_polynomial() ||
                S.sector_coeff(0).num().degree() > 0) {
                throw MismatchFailure("q_from_xi: first integral depends on x");
            }
            val = S.sector_coeff(0).num()[0];
        }
        samples.emplace_back(Es, val);
    }
    return interpolate(samples);
}

// ---------------------------------------------------------------------------
// independent ansatz solve for Xi
// ---------------------------------------------------------------------------

/** Solve Xi''' - 4(u - E) Xi' - 2 u' Xi = 0 in the span of
 * { 1, wp(x+w_i)^k : 1 <= k <= l_i } with coefficients polynomial in E of
 * degree at most g.  The operator splits as T0 + E T1 with
 * T0 f = f''' - 4 u f' - 2 u' f and T1 f = 4 f'; both images are computed
 * exactly over Q, denominators in z are cleared by a uniform power of
 * prod_i (z - e_i), and matching every (z-power, E-power) coefficient gives
 * a linear system over Q whose kernel must be one-dimensional.  The
 * normalized solution must satisfy deg c0 = g and deg b < g; otherwise
 * AnsatzFailure.
 */
inline XiData xi_solve(const Roots &roots, const CouplingVector &l, long g) {
    using HP = HalfPower<Rational>;
    std::vector<std::pair<int, int>> index;
    index.emplace_back(0, 0); // the constant function 1
    for (int i = 0; i < 4; ++i) {
        for (long k = 1; k <= l[i]; ++k) {
            index.emplace_back(i, static_cast<int>(k));
        }
    }
    const HP u = coupling_potential(roots, l);
    const HP up = u.ddx();
    const Rational four(4);
    const Rational two(2);

    std::vector<RationalFunction<Rational>> img0, img1;
    img0.reserve(index.size());
    img1.reserve(index.size());
    long max_den_deg = 0;
    for (const auto &[i, k] : index) {
        HP f = HP::constant(roots, Rational(1));
        if (k > 0) {
            const HP w = HP::wp_shift(roots, i);
            for (int t = 0; t < k; ++t) {
                f = f * w;
            }
        }
        const HP fp = f.ddx();
        const HP t0 = fp.ddx().ddx() - four * (u * fp) - two * (up * f);
        const HP t1 = four * fp;
        for (const HP *img : {&t0, &t1}) {
            for (unsigned mu = 0; mu < 8; ++mu) {
                if (mu != 7 && !img->sector_coeff(mu).is_zero()) {
                    throw AnsatzFailure("xi_solve: image left the odd sector");
                }
            }
        }
        img0.push_back(t0.sector_coeff(7));
        img1.push_back(t1.sector_coeff(7));
        max_den_deg = std::max({max_den_deg, img0.back().den().degree(),
                                img1.back().den().degree()});
    }

    // clear all poles with a uniform power of prod_i (z - e_i)
    Polynomial<Rational> clear_factor(Rational(1));
    for (long rep = 0; rep < max_den_deg; ++rep) {
        for (int i = 0; i < 3; ++i) {
            clear_factor *= Polynomial<Rational>(std::vector<Rational>{
                -roots.e[static_cast<std::size_t>(i)], Rational(1)});
        }
    }
    auto clear = [&](const RationalFunction<Rational> &r) {
        RationalFunction<Rational> cleared = r * RationalFunction<Rational>(clear_factor);
        if (!cleared.is_polynomial()) {
            throw AnsatzFailure("xi_solve: unexpected pole structure");
        }
        return cleared.num() * cleared.den()[0]; // den is a unit
    };
    std::vector<Polynomial<Rational>> P0, P1;
    P0.reserve(index.size());
    P1.reserve(index.size());
    long zmax = 0;
    for (std::size_t j = 0; j < index.size(); ++j) {
        P0.push_back(clear(img0[j]));
        P1.push_back(clear(img1[j]));
        zmax = std::max({zmax, P0.back().degree(), P1.back().degree()});
    }

    // unknowns lambda_{j,t} (ansatz entry j, E-power t = 0..g); the equation
    // indexed by (z-power dz, E-power p) reads
    //   sum_j lambda_{j,p} P0_j[dz] + lambda_{j,p-1} P1_j[dz] = 0.
    const std::size_t nb = index.size();
    const std::size_t gp1 = static_cast<std::size_t>(g) + 1;
    const std::size_t gp2 = gp1 + 1;
    Matrix<Rational> M(static_cast<std::size_t>(zmax + 1) * gp2, nb * gp1);
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t t = 0; t < gp1; ++t) {
            const std::size_t col = j * gp1 + t;
            for (long dz = 0; dz <= P0[j].degree(); ++dz) {
                M(static_cast<std::size_t>(dz) * gp2 + t, col) =
                    P0[j][static_cast<std::size_t>(dz)];
            }
            for (long dz = 0; dz <= P1[j].degree(); ++dz) {
                M(static_cast<std::size_t>(dz) * gp2 + t + 1, col) =
                    P1[j][static_cast<std::size_t>(dz)];
            }
        }
    }
    auto kernel = nullspace(M);
    if (kernel.size() != 1) {
        throw AnsatzFailure("xi_solve: kernel is not one-dimensional");
    }
    const auto &v = kernel.front();

    std::vector<Polynomial<Rational>> w(nb);
    for (std::size_t j = 0; j < nb; ++j) {
        std::vector<Rational> c(v.begin() + static_cast<std::ptrdiff_t>(j * gp1),
                                v.begin() + static_cast<std::ptrdiff_t>((j + 1) * gp1));
        w[j] = Polynomial<Rational>(std::move(c));
    }
    if (w[0].is_zero()) {
        throw AnsatzFailure("xi_solve: solution has no constant part");
    }
    const Rational lead = w[0].leading();
    for (auto &p : w) {
        p /= lead;
    }
    if (w[0].degree() != g) {
        throw AnsatzFailure("xi_solve: deg c0 != g");
    }
    XiData xi;
    xi.c0 = w[0];
    for (std::size_t j = 1; j < nb; ++j) {
        if (w[j].is_zero()) {
            continue;
        }
        if (w[j].degree() >= g) {
            throw AnsatzFailure("xi_solve: deg b >= g");
        }
        xi.b.emplace(index[j], w[j]);
    }
    return xi;
}

// ---------------------------------------------------------------------------
// period data (a, c)
// ---------------------------------------------------------------------------

/** Rewrite Xi = c(E) + a(E) wp(... ) + exact second derivatives, so that
 * integrating over a full period 2 w_k gives 2 w_k c(E) - 2 eta_k a(E):
 * every shifted power wp(x+w_i)^k reduces modulo (d/dx)^2 terms to a
 * constant plus a multiple of wp(x+w_i), and each wp(x+w_i) integrates to
 * -2 eta_k regardless of the shift.
 */
inline void ac_polynomials(const XiData &xi, const Roots &roots,
                           Polynomial<Rational> &a_out, Polynomial<Rational> &c_out) {
    const Rational g2 = roots.g2();
    const Rational g3 = roots.g3();
    a_out = Polynomial<Rational>();
    c_out = xi.c0;
    for (const auto &[key, bpoly] : xi.b) {
        const int k = key.second;
        auto [cpart, apart] =
            d2_reduce(Polynomial<Rational>::monomial(Rational(1),
                                                     static_cast<std::size_t>(k)),
                      g2, g3);
        if (cpart != 0) {
            c_out += bpoly * cpart;
        }
        if (apart != 0) {
            a_out += bpoly * apart;
        }
    }
}

// ---------------------------------------------------------------------------
// invariant spaces attached to the coupling vector
// ---------------------------------------------------------------------------

struct InvariantComponent {
    AlphaVector alpha;     ///< the gauge vector listed by the decomposition
    bool dual = false;     ///< true when the space used is that of 1 - alpha
    QuasiSpace space;      ///< the realized quasi-solvable space
    Polynomial<Rational> charpoly;
};

struct InvariantSpaces {
    std::vector<InvariantComponent> components;
    Polynomial<Rational> product; ///< product of the characteristic polynomials
};

/** The four-block decomposition of the full finite-dimensional invariant
 * space of H.  Blocks whose exponent sum is odd or equals 2 are zero and
 * are skipped; blocks with sum >= 4 are realized by the dual gauge
 * 1 - alpha.  The product of the characteristic polynomials equals the
 * spectral polynomial Q (checked by callers / tests).
 */
inline InvariantSpaces invariant_spaces(const Roots &roots, const CouplingVector &l) {
    std::array<AlphaVector, 4> comps;
    if (l.sum() % 2 == 0) {
        comps = {AlphaVector(-l[0], -l[1], -l[2], -l[3]),
                 AlphaVector(-l[0], -l[1], l[2] + 1, l[3] + 1),
                 AlphaVector(-l[0], l[1] + 1, -l[2], l[3] + 1),
                 AlphaVector(-l[0], l[1] + 1, l[2] + 1, -l[3])};
    } else {
        comps = {AlphaVector(-l[0], -l[1], -l[2], l[3] + 1),
                 AlphaVector(-l[0], -l[1], l[2] + 1, -l[3]),
                 AlphaVector(-l[0], l[1] + 1, -l[2], -l[3]),
                 AlphaVector(l[0] + 1, -l[1], -l[2], -l[3])};
    }
    InvariantSpaces out;
    out.product = Polynomial<Rational>(Rational(1));
    for (const auto &alpha : comps) {
        const long s = alpha.sum();
        InvariantComponent comp;
        comp.alpha = alpha;
        if (s % 2 != 0) {
            continue; // half-integer degree: zero block
        }
        if (s <= 0) {
            comp.dual = false;
            comp.space = quasi_space_basis(roots, alpha);
        } else if (s >= 4) {
            comp.dual = true;
            comp.space = quasi_space_basis(
                roots, AlphaVector(1 - alpha[0], 1 - alpha[1], 1 - alpha[2],
                                   1 - alpha[3]));
        } else {
            continue; // sum == 2: zero block
        }
        comp.charpoly = charpoly(comp.space.h_matrix);
        out.product *= comp.charpoly;
        out.components.push_back(std::move(comp));
    }
    return out;
}

// ---------------------------------------------------------------------------
// the full spectral record
// ---------------------------------------------------------------------------

struct SpectralData {
    CouplingVector l;
    long g = 0;
    DiffOp<Rational> A;
    std::vector<HalfPower<Rational>> a_tilde; ///< layers; a_tilde[0] = 1
    Polynomial<Rational> Q;                   ///< monic, degree 2g+1
    XiData xi;
    Polynomial<Rational> a_poly; ///< period data: int Xi = 2 w_k c - 2 eta_k a
    Polynomial<Rational> c_poly;

    SpectralData() : A(Roots{}) {}
};

/** Construct and cross-verify the whole finite-gap record for (roots, l).
 * Verifications performed here (all exact):
 *   - [A, H] = 0, A^2 + Q(H) = 0, A monic of order 2g+1,
 *   - the layer expansion exists with unit head and no scalar layers,
 *   - Xi from the layers equals Xi from the independent ansatz solve,
 *   - Q from A^2 equals Q from the Xi first integral.
 */
inline SpectralData spectral_data(const Roots &roots, const CouplingVector &l) {
    SpectralData sd;
    sd.l = l;
    sd.g = genus(l);
    sd.A = build_A(roots, l);
    const auto u = coupling_potential(roots, l);
    sd.Q = verify_A_relations(sd.A, u, sd.g);

    auto rr = op_right_reduce(sd.A, u, sd.g);
    if (!(rr.a.front() == HalfPower<Rational>::constant(roots, Rational(1)))) {
        throw ReductionFailure("spectral_data: leading layer is not 1");
    }
    for (const auto &cj : rr.c) {
        if (cj != 0) {
            throw ReductionFailure("spectral_data: scalar layers must vanish");
        }
    }
    sd.a_tilde = std::move(rr.a);

    sd.xi = xi_from_layers(sd.a_tilde, roots);
    const XiData xi_indep = xi_solve(roots, l, sd.g);
    if (!(sd.xi == xi_indep)) {
        throw MismatchFailure("spectral_data: operator and ansatz routes disagree on Xi");
    }
    const Polynomial<Rational> q_xi = q_from_xi(sd.a_tilde, u, roots);
    if (!(q_xi == sd.Q)) {
        throw MismatchFailure("spectral_data: A^2 and Xi routes disagree on Q");
    }
    ac_polynomials(sd.xi, roots, sd.a_poly, sd.c_poly);
    return sd;
}

// ---------------------------------------------------------------------------
// band edges
// ---------------------------------------------------------------------------

/** Roots of Q, sorted ascending along the real axis: the end points of the
 * allowed bands of H on the real line.  Requires a rectangular lattice
 * (real w_1, purely imaginary w_3); throws NonRectangular otherwise and
 * ComplexRoots if a nonreal root of Q survives the tolerance.
 */
inline std::vector<PolyRoot> band_edges(const Polynomial<Rational> &Q,
                                        const Lattice &lat, unsigned digits10) {
    {
        precision_guard guard(lat.work_digits());
        const Real tol = pow10(4 - static_cast<long>(lat.precision()));
        const Complex w1 = lat.omega1();
        const Complex w3 = lat.omega3();
        using std::abs;
        if (!(abs(w1.im) <= tol * abs(w1.re) && abs(w3.re) <= tol * abs(w3.im))) {
            throw NonRectangular("band_edges: lattice is not rectangular");
        }
    }
    precision_guard guard(digits10 + 10);
    auto roots = poly_roots(Q, digits10);
    const Real imag_tol = pow10(-static_cast<long>(digits10) + 5);
    using std::abs;
    for (auto &r : roots) {
        if (r.exact) {
            continue;
        }
        if (abs(r.value.im) > imag_tol * (1 + abs(r.value.re))) {
            throw ComplexRoots("band_edges: spectral polynomial has nonreal roots");
        }
        r.value.im = Real(0);
    }
    std::sort(roots.begin(), roots.end(),
              [](const PolyRoot &a, const PolyRoot &b) { return a.value.re < b.value.re; });
    return roots;
}

} // namespace fingap
