#pragma once

/** \file bcn.hpp
 *
 * Quasi-solvable sector of the BC_N elliptic N-particle Hamiltonian
 *
 *   H = -sum_j d^2/dx_j^2 + 2l(l+1) sum_{j<k} (wp(x_j-x_k) + wp(x_j+x_k))
 *       + sum_j sum_i l_i(l_i+1) wp(x_j + w_i),
 *
 * in the Weierstrass coordinates z_j = wp(x_j).  A gauge choice
 * a in {-l, l+1}, b_i in {-l_i/2, (l_i+1)/2} defines
 *
 *   Phi(z) = prod_{j<k} (z_j - z_k)^a  prod_j prod_{i=1..3} (z_j - e_i)^{b_i},
 *
 * and whenever d = -((N-1)a + b_0 + b_1 + b_2 + b_3) is a non-negative
 * integer, the gauged operator Phi^{-1} H Phi preserves the space W_d^sym
 * of symmetric polynomials in z with per-variable degree <= d.  This file
 * assembles that operator exactly over rational root data: the pair
 * potential is rewritten through the two-variable addition identity
 *
 *   wp(u+v) + wp(u-v) = [(z1+z2)(2 z1 z2 - g2/2) - g3] / (z1-z2)^2,
 *
 * which is validated numerically against the lattice evaluator before any
 * N >= 2 assembly (the identity is an external input, so it is gated, not
 * trusted).  All apparent poles must cancel: the one-body gauge residues
 * cancel inside a univariate rational-function computation that must come
 * out polynomial, and the pair poles cancel under exact division by
 * prod_{j<k} (z_j - z_k)^2.  Any nonzero remainder throws ClosureFailure.
 *
 * For N = 1 the construction reproduces the invariant-space decomposition
 * of the single-variable operator; the characteristic polynomials over all
 * admissible gauges must multiply to the spectral polynomial Q(E) exactly.
 */

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <random>
#include <utility>
#include <vector>

#include "coupling.hpp"
#include "lattice.hpp"
#include "linalg.hpp"
#include "polyroots.hpp"
#include "rational_function.hpp"
#include "spectral.hpp"

namespace fingap {

// ---------------------------------------------------------------------------
// gauge data
// ---------------------------------------------------------------------------

/** One branch choice (a, b_0..b_3) of the gauge factor Phi.  The member a
 * is one of -l, l+1 and each b_i is one of -l_i/2, (l_i+1)/2; admissibility
 * of the pair (gauge, N) means the derived degree d is a non-negative
 * integer.
 */
struct GaugeChoice {
    long a = 0;
    std::array<Rational, 4> b{};

    Rational d_value(int n_particles) const {
        return -(Rational(n_particles - 1) * a + b[0] + b[1] + b[2] + b[3]);
    }
    bool admissible(int n_particles) const {
        const Rational d = d_value(n_particles);
        return denominator(d) == 1 && d >= 0;
    }
    /// The per-variable degree bound; throws unless admissible.
    long d(int n_particles) const {
        if (!admissible(n_particles)) {
            throw NotQuasiSolvable("GaugeChoice: d = -((N-1)a + sum b_i) is "
                                   "not a non-negative integer");
        }
        return static_cast<long>(numerator(d_value(n_particles)));
    }
    /** True when the branches forced by square-integrability on the real
     * interval are all taken: a = l+1 (regular at coinciding particles),
     * b_0 = (l_0+1)/2 (regular at x_j = 0), b_1 = (l_1+1)/2 (regular at
     * x_j = w_1).  The remaining singular points w_2, w_3 lie off the real
     * interval, so b_2, b_3 are unconstrained.
     */
    bool square_integrable(long l, const CouplingVector &li) const {
        return a == l + 1 && 2 * b[0] == Rational(li[0] + 1) &&
               2 * b[1] == Rational(li[1] + 1);
    }

    friend bool operator==(const GaugeChoice &x, const GaugeChoice &y) {
        return x.a == y.a && x.b == y.b;
    }
};

/// All 32 branch combinations (16 when N = 1, where a is inert and fixed to -l).
inline std::vector<GaugeChoice> all_gauges(int n_particles, long l,
                                           const CouplingVector &li) {
    const std::array<long, 2> a_choices = {-l, l + 1};
    std::vector<GaugeChoice> out;
    for (int ia = 0; ia < (n_particles == 1 ? 1 : 2); ++ia) {
        for (int mask = 0; mask < 16; ++mask) {
            GaugeChoice g;
            g.a = a_choices[static_cast<std::size_t>(ia)];
            for (int i = 0; i < 4; ++i) {
                g.b[static_cast<std::size_t>(i)] =
                    (mask >> i & 1) ? Rational(li[i] + 1) / 2
                                    : Rational(-li[i]) / 2;
            }
            out.push_back(g);
        }
    }
    return out;
}

/// The gauges with d in Z>=0, in enumeration order.
inline std::vector<GaugeChoice> admissible_gauges(int n_particles, long l,
                                                  const CouplingVector &li) {
    std::vector<GaugeChoice> out;
    for (const GaugeChoice &g : all_gauges(n_particles, l, li)) {
        if (g.admissible(n_particles)) {
            out.push_back(g);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// sparse multivariate polynomials over the rationals
// ---------------------------------------------------------------------------

/** Graded reverse-lexicographic order on exponent vectors: compare total
 * degree first, then the *last* differing coordinate, reversed.  Used both
 * as the term order inside Mpoly and to order basis multisets.
 */
struct GrevlexLess {
    bool operator()(const std::vector<int> &x, const std::vector<int> &y) const {
        int dx = 0, dy = 0;
        for (int v : x) {
            dx += v;
        }
        for (int v : y) {
            dy += v;
        }
        if (dx != dy) {
            return dx < dy;
        }
        for (std::size_t i = x.size(); i-- > 0;) {
            if (x[i] != y[i]) {
                return x[i] > y[i];
            }
        }
        return false;
    }
};

/// Sparse polynomial in n variables with Rational coefficients.
class Mpoly {
  public:
    using Expo = std::vector<int>;
    using Terms = std::map<Expo, Rational, GrevlexLess>;

    explicit Mpoly(int nvars) : m_n(nvars) {}

    static Mpoly constant(int nvars, const Rational &c) {
        Mpoly p(nvars);
        if (c != 0) {
            p.m_t[Expo(static_cast<std::size_t>(nvars), 0)] = c;
        }
        return p;
    }
    /// The variable z_j (0-based).
    static Mpoly variable(int nvars, int j) {
        Mpoly p(nvars);
        Expo e(static_cast<std::size_t>(nvars), 0);
        e[static_cast<std::size_t>(j)] = 1;
        p.m_t[e] = 1;
        return p;
    }
    /// A single monomial c * z^e.
    static Mpoly monomial(const Rational &c, Expo e) {
        Mpoly p(static_cast<int>(e.size()));
        if (c != 0) {
            p.m_t[std::move(e)] = c;
        }
        return p;
    }
    /// A univariate polynomial substituted with z_j for its variable.
    static Mpoly from_univariate(int nvars, int j,
                                 const Polynomial<Rational> &p) {
        Mpoly out(nvars);
        for (long k = 0; k <= p.degree(); ++k) {
            if (p[static_cast<std::size_t>(k)] == 0) {
                continue;
            }
            Expo e(static_cast<std::size_t>(nvars), 0);
            e[static_cast<std::size_t>(j)] = static_cast<int>(k);
            out.m_t[e] = p[static_cast<std::size_t>(k)];
        }
        return out;
    }

    int nvars() const { return m_n; }
    bool is_zero() const { return m_t.empty(); }
    const Terms &terms() const { return m_t; }

    Mpoly &operator+=(const Mpoly &o) {
        for (const auto &[e, c] : o.m_t) {
            auto it = m_t.find(e);
            if (it == m_t.end()) {
                m_t.emplace(e, c);
            } else {
                it->second += c;
                if (it->second == 0) {
                    m_t.erase(it);
                }
            }
        }
        return *this;
    }
    Mpoly &operator-=(const Mpoly &o) { return *this += -o; }
    friend Mpoly operator+(Mpoly x, const Mpoly &y) { return x += y; }
    friend Mpoly operator-(Mpoly x, const Mpoly &y) { return x -= y; }
    friend Mpoly operator-(const Mpoly &x) {
        Mpoly r(x.m_n);
        for (const auto &[e, c] : x.m_t) {
            r.m_t[e] = -c;
        }
        return r;
    }
    friend Mpoly operator*(const Mpoly &x, const Mpoly &y) {
        Mpoly r(x.m_n);
        for (const auto &[ex, cx] : x.m_t) {
            for (const auto &[ey, cy] : y.m_t) {
                Expo e = ex;
                for (std::size_t i = 0; i < e.size(); ++i) {
                    e[i] += ey[i];
                }
                auto it = r.m_t.find(e);
                if (it == r.m_t.end()) {
                    r.m_t.emplace(std::move(e), cx * cy);
                } else {
                    it->second += cx * cy;
                    if (it->second == 0) {
                        r.m_t.erase(it);
                    }
                }
            }
        }
        return r;
    }
    friend Mpoly operator*(const Rational &s, Mpoly x) {
        if (s == 0) {
            return Mpoly(x.m_n);
        }
        for (auto &[e, c] : x.m_t) {
            c *= s;
        }
        return x;
    }
    friend bool operator==(const Mpoly &x, const Mpoly &y) {
        return x.m_n == y.m_n && x.m_t == y.m_t;
    }

    /// Formal partial derivative with respect to z_j.
    Mpoly derivative(int j) const {
        const auto ju = static_cast<std::size_t>(j);
        Mpoly r(m_n);
        for (const auto &[e, c] : m_t) {
            if (e[ju] == 0) {
                continue;
            }
            Expo f = e;
            f[ju] -= 1;
            r.m_t[std::move(f)] = c * e[ju];
        }
        return r;
    }

    /** Synthetic division by (z_j - z_k): returns (quotient, remainder)
     * with remainder = this evaluated at z_j = z_k (so it involves z_j no
     * more).
     */
    std::pair<Mpoly, Mpoly> divide_diff(int j, int k) const {
        const auto ju = static_cast<std::size_t>(j);
        // split into coefficients of powers of z_j
        std::map<int, Mpoly> by_pow;
        int max_pow = 0;
        for (const auto &[e, c] : m_t) {
            Expo f = e;
            const int m = f[ju];
            f[ju] = 0;
            max_pow = std::max(max_pow, m);
            auto it = by_pow.find(m);
            if (it == by_pow.end()) {
                it = by_pow.emplace(m, Mpoly(m_n)).first;
            }
            it->second.m_t[std::move(f)] = c;
        }
        const Mpoly zk = variable(m_n, k);
        Mpoly quotient(m_n);
        Mpoly carry(m_n); // running synthetic-division coefficient, top down
        for (int m = max_pow; m >= 1; --m) {
            auto it = by_pow.find(m);
            Mpoly bm = (it == by_pow.end()) ? Mpoly(m_n) : it->second;
            if (m == max_pow) {
                carry = bm;
            } else {
                carry = bm + carry * zk;
            }
            // carry is the coefficient of z_j^{m-1} in the quotient
            Expo e(static_cast<std::size_t>(m_n), 0);
            e[ju] = m - 1;
            quotient += carry * monomial(Rational(1), e);
        }
        auto it0 = by_pow.find(0);
        Mpoly rem = (it0 == by_pow.end()) ? Mpoly(m_n) : it0->second;
        if (max_pow >= 1) {
            rem += carry * zk;
        }
        return {quotient, rem};
    }

  private:
    int m_n;
    Terms m_t;
};

// ---------------------------------------------------------------------------
// the symmetric basis
// ---------------------------------------------------------------------------

/** Weakly-decreasing exponent multisets (m_1 >= ... >= m_N), entries in
 * {0..d}, listed in graded reverse-lexicographic order.  These index the
 * monomial symmetric polynomials m_lambda spanning W_d^sym; the count is
 * binomial(d + N, N).  Throws NotQuasiSolvable when d is not a
 * non-negative integer.
 */
inline std::vector<std::vector<int>> wdsym_basis(int n_particles,
                                                 const GaugeChoice &gauge) {
    const long d = gauge.d(n_particles);
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(n_particles), 0);
    // enumerate weakly-decreasing vectors recursively
    auto rec = [&](auto &&self, std::size_t pos, int cap) -> void {
        if (pos == cur.size()) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= cap; ++v) {
            cur[pos] = v;
            self(self, pos + 1, v);
        }
    };
    rec(rec, 0, static_cast<int>(d));
    std::sort(out.begin(), out.end(), GrevlexLess{});
    return out;
}

/// The monomial symmetric polynomial m_lambda (coefficient 1 per distinct orbit monomial).
inline Mpoly monomial_symmetric(int n_particles, std::vector<int> lambda) {
    std::sort(lambda.begin(), lambda.end());
    Mpoly out(n_particles);
    do {
        out += Mpoly::monomial(Rational(1), lambda);
    } while (std::next_permutation(lambda.begin(), lambda.end()));
    return out;
}

// ---------------------------------------------------------------------------
// the pair-identity gate
// ---------------------------------------------------------------------------

/** Numerically validates the addition identity used to rewrite the pair
 * potential,
 *
 *   wp(u+v) + wp(u-v) = [(z1+z2)(2 z1 z2 - g2/2) - g3] / (z1-z2)^2,
 *
 * at 100 random point pairs against the lattice evaluator at 30 digits.
 * Throws IdentityValidationFailed beyond 1e-10 relative error.  Results
 * are cached per root triple; the gate runs before any N >= 2 assembly.
 */
inline void validate_pair_identity(const Roots &roots) {
    static std::mutex mu;
    static std::map<std::array<Rational, 3>, bool> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(roots.e);
        if (it != cache.end()) {
            if (!it->second) {
                throw IdentityValidationFailed(
                    "validate_pair_identity: cached failure for these roots");
            }
            return;
        }
    }
    const unsigned digits = 30;
    const Lattice lat = Lattice::from_roots(roots.e, digits);
    precision_guard guard(lat.work_digits());
    const Real tol = pow10(-10);
    const Complex g2 = lat.g2();
    const Complex g3 = lat.g3();
    Real min_period = fingap::abs(Complex(Real(2)) * lat.omega1());
    {
        const Real p3 = fingap::abs(Complex(Real(2)) * lat.omega3());
        if (p3 < min_period) {
            min_period = p3;
        }
    }
    const Real clearance = Real(1) / 20 * min_period;
    std::mt19937 rng(714025u);
    auto draw = [&rng]() { return static_cast<int>(rng() % 9999u) + 1; };
    auto sample_point = [&]() {
        const Real f1 = Real(draw()) / 10000;
        const Real f3 = Real(draw()) / 10000;
        return Complex(Real(2) * f1) * lat.omega1() +
               Complex(Real(2) * f3) * lat.omega3();
    };
    bool ok = true;
    std::string why;
    int accepted = 0;
    for (int attempt = 0; accepted < 100 && attempt < 4000; ++attempt) {
        const Complex u = sample_point();
        const Complex v = sample_point();
        bool clear = true;
        for (const Complex &w : {u, v, u + v, u - v}) {
            if (lat.lattice_distance(w) < clearance) {
                clear = false;
                break;
            }
        }
        if (!clear) {
            continue;
        }
        const Complex z1 = lat.wp(u);
        const Complex z2 = lat.wp(v);
        if (fingap::abs(z1 - z2) < Real(1) / 1000) {
            continue; // u close to +-v modulo the lattice: identity pole
        }
        const Complex lhs = lat.wp(u + v) + lat.wp(u - v);
        const Complex rhs = ((z1 + z2) * (Complex(Real(2)) * z1 * z2 -
                                          g2 / Complex(Real(2))) -
                             g3) /
                            ((z1 - z2) * (z1 - z2));
        Real scale = fingap::abs(lhs);
        if (scale < 1) {
            scale = 1;
        }
        if (fingap::abs(lhs - rhs) > tol * scale) {
            ok = false;
            why = "validate_pair_identity: relative defect above 1e-10 at a "
                  "sample pair";
            break;
        }
        ++accepted;
    }
    if (ok && accepted < 100) {
        ok = false;
        why = "validate_pair_identity: could not draw 100 admissible sample "
              "pairs";
    }
    {
        std::lock_guard<std::mutex> lock(mu);
        cache[roots.e] = ok;
    }
    if (!ok) {
        throw IdentityValidationFailed(why);
    }
}

// ---------------------------------------------------------------------------
// the gauged operator
// ---------------------------------------------------------------------------

namespace detail {

/** One-body ingredients of the gauged operator in one variable z:
 * W = 4z^3 - g2 z - g3 (so (dz/dx)^2 = W), the polynomial W*B with
 * B = sum_i b_i/(z - e_i), and the zero-order polynomial
 * R = (B^2 + B') W + B W'/2 - V_1, where V_1 is the one-body potential
 *
 *   V_1(z) = l_0(l_0+1) z + sum_i l_i(l_i+1) (e_i + D_i/(z - e_i)),
 *   D_i = (e_i - e_j)(e_i - e_k).
 *
 * R is a rational function whose poles at the e_i cancel exactly for both
 * admissible branches of each b_i (the residue is proportional to
 * 2b_i(2b_i - 1) - l_i(l_i+1) = 0); a nonzero denominator surviving the
 * exact computation means the gauge data is inconsistent and raises
 * ClosureFailure.
 */
struct OneBody {
    Polynomial<Rational> w;      ///< W(z)
    Polynomial<Rational> w_d;    ///< W'(z)
    Polynomial<Rational> wb;     ///< W(z) B(z)
    Polynomial<Rational> r;      ///< R(z)
};

inline OneBody one_body_data(const Roots &roots, const CouplingVector &li,
                             const GaugeChoice &gauge) {
    using RF = RationalFunction<Rational>;
    using Poly = Polynomial<Rational>;
    const Rational g2 = roots.g2();
    const Rational g3 = roots.g3();
    OneBody out;
    out.w = Poly(std::vector<Rational>{-g3, -g2, 0, 4});
    out.w_d = out.w.derivative();
    const RF w_rf(out.w);
    RF b_rf;
    for (int i = 1; i <= 3; ++i) {
        const Poly lin(std::vector<Rational>{
            -roots.e[static_cast<std::size_t>(i - 1)], Rational(1)});
        b_rf += RF(Poly(gauge.b[static_cast<std::size_t>(i)]), lin);
    }
    RF v1(Poly(std::vector<Rational>{Rational(0),
                                     Rational(li[0] * (li[0] + 1))}));
    for (int i = 1; i <= 3; ++i) {
        const Rational ei = roots.e[static_cast<std::size_t>(i - 1)];
        const Rational ej = roots.e[static_cast<std::size_t>(i % 3)];
        const Rational ek = roots.e[static_cast<std::size_t>((i + 1) % 3)];
        const Rational di = (ei - ej) * (ei - ek);
        const Poly lin(std::vector<Rational>{-ei, Rational(1)});
        v1 += RF(Poly(Rational(li[i] * (li[i] + 1)))) *
              (RF(Poly(ei)) + RF(Poly(di), lin));
    }
    const RF r_rf = (b_rf * b_rf + b_rf.derivative()) * w_rf +
                    b_rf * RF(out.w_d) / RF(Poly(Rational(2))) - v1;
    if (!r_rf.is_polynomial()) {
        throw ClosureFailure("one_body_data: gauge residues at the e_i do "
                             "not cancel; R(z) is not polynomial");
    }
    const RF wb_rf = w_rf * b_rf;
    if (!wb_rf.is_polynomial()) {
        throw ClosureFailure("one_body_data: W B is not polynomial");
    }
    out.r = r_rf.num() * (Rational(1) / r_rf.den()[0]);
    out.wb = wb_rf.num() * (Rational(1) / wb_rf.den()[0]);
    return out;
}

/// prod over canonical pairs p<q of (z_p - z_q)^{2 - drop[{p,q}]}.
inline Mpoly pair_cofactor(int n, const std::map<std::pair<int, int>, int> &drop) {
    Mpoly out = Mpoly::constant(n, Rational(1));
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            int e = 2;
            auto it = drop.find({p, q});
            if (it != drop.end()) {
                e -= it->second;
            }
            const Mpoly diff =
                Mpoly::variable(n, p) - Mpoly::variable(n, q);
            for (int t = 0; t < e; ++t) {
                out = out * diff;
            }
        }
    }
    return out;
}

} // namespace detail

/** Applies the gauged Hamiltonian Phi^{-1} H Phi to the polynomial phi,
 * exactly.  Every term of the operator is multiplied by the discriminant
 * square D2 = prod_{j<k} (z_j - z_k)^2, accumulated as a polynomial, and
 * the total is divided back by D2; pair-pole cancellation is thereby a
 * checked fact, not an assumption (ClosureFailure otherwise).
 */
inline Mpoly gauged_apply(int n_particles, long l, const CouplingVector &li,
                          const GaugeChoice &gauge, const Roots &roots,
                          const Mpoly &phi) {
    const int n = n_particles;
    const detail::OneBody ob = detail::one_body_data(roots, li, gauge);
    const Rational g2 = roots.g2();
    const Rational g3 = roots.g3();
    const Rational a(gauge.a);
    const Rational pair_coupling(2 * l * (l + 1));

    const Mpoly d2 = detail::pair_cofactor(n, {});
    Mpoly acc(n);

    auto canonical = [](int j, int k) {
        return std::pair<int, int>{std::min(j, k), std::max(j, k)};
    };
    auto sgn = [](int j, int k) { return j < k ? Rational(1) : Rational(-1); };

    for (int j = 0; j < n; ++j) {
        const Mpoly w_j = Mpoly::from_univariate(n, j, ob.w);
        const Mpoly wd_j = Mpoly::from_univariate(n, j, ob.w_d);
        const Mpoly wb_j = Mpoly::from_univariate(n, j, ob.wb);
        const Mpoly r_j = Mpoly::from_univariate(n, j, ob.r);
        const Mpoly phi_j = phi.derivative(j);
        const Mpoly phi_jj = phi_j.derivative(j);

        // one-body: -W phi'' - (2WB + W'/2) phi' - R phi
        Mpoly one_body = -(w_j * phi_jj);
        one_body -= (Rational(2) * wb_j) * phi_j;
        one_body -= Rational(1, 2) * (wd_j * phi_j);
        one_body -= r_j * phi;
        acc += one_body * d2;

        for (int k = 0; k < n; ++k) {
            if (k == j) {
                continue;
            }
            // -2a W_j / (z_j - z_k) phi_j   (gauge cross term with the
            //                                first derivative)
            acc += (sgn(j, k) * Rational(-2) * a) *
                   (detail::pair_cofactor(n, {{canonical(j, k), 1}}) *
                    (w_j * phi_j));
            // + a W_j / (z_j - z_k)^2 phi   (from -W_j A_j')
            acc += a * (detail::pair_cofactor(n, {{canonical(j, k), 2}}) *
                        (w_j * phi));
            // -2a (W B)_j / (z_j - z_k) phi (from -2 W_j A_j B_j)
            acc += (sgn(j, k) * Rational(-2) * a) *
                   (detail::pair_cofactor(n, {{canonical(j, k), 1}}) *
                    (wb_j * phi));
            // -(a/2) W'_j / (z_j - z_k) phi (from -(W'_j/2) A_j)
            acc += (sgn(j, k) * Rational(-1, 2) * a) *
                   (detail::pair_cofactor(n, {{canonical(j, k), 1}}) *
                    (wd_j * phi));
            // -a^2 W_j / ((z_j - z_k)(z_j - z_m)) phi (from -W_j A_j^2)
            for (int m = 0; m < n; ++m) {
                if (m == j) {
                    continue;
                }
                std::map<std::pair<int, int>, int> drop;
                drop[canonical(j, k)] += 1;
                drop[canonical(j, m)] += 1;
                acc += (sgn(j, k) * sgn(j, m) * -(a * a)) *
                       (detail::pair_cofactor(n, drop) * (w_j * phi));
            }
        }
    }
    // pair potential 2l(l+1) [(z_j+z_k)(2 z_j z_k - g2/2) - g3]/(z_j-z_k)^2
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const Mpoly zj = Mpoly::variable(n, j);
            const Mpoly zk = Mpoly::variable(n, k);
            Mpoly num = (zj + zk) * (Rational(2) * (zj * zk) -
                                     Mpoly::constant(n, g2 / 2));
            num -= Mpoly::constant(n, g3);
            acc += pair_coupling *
                   (detail::pair_cofactor(n, {{{j, k}, 2}}) * (num * phi));
        }
    }

    // exact division by D2, one linear factor at a time
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            for (int t = 0; t < 2; ++t) {
                auto [q, rem] = acc.divide_diff(j, k);
                if (!rem.is_zero()) {
                    throw ClosureFailure(
                        "gauged_apply: pair poles do not cancel; remainder "
                        "after division by (z_j - z_k)");
                }
                acc = q;
            }
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// matrix assembly
// ---------------------------------------------------------------------------

/** The gauged Hamiltonian on W_d^sym: basis multisets (weakly decreasing),
 * and the exact matrix M with column c holding the coefficients of the
 * image of basis[c] over the basis, so that G m_{basis[c]} =
 * sum_r M(r, c) m_{basis[r]}.
 */
struct BCNMatrix {
    int n_particles = 1;
    long l = 0;
    CouplingVector li;
    GaugeChoice gauge;
    Roots roots;
    long d = 0;
    std::vector<std::vector<int>> basis;
    Matrix<Rational> m;
};

/** Expands a symmetric polynomial over the monomial symmetric basis by
 * repeated leading-term subtraction; the grevlex-leading exponent of a
 * symmetric polynomial is always weakly decreasing, and every part must
 * stay <= d.  Violations throw ClosureFailure (the image left W_d^sym, or
 * was not symmetric).
 */
inline std::vector<std::pair<std::vector<int>, Rational>>
msym_expand(Mpoly p, long d) {
    std::vector<std::pair<std::vector<int>, Rational>> out;
    while (!p.is_zero()) {
        const auto lead = std::prev(p.terms().end());
        std::vector<int> lambda = lead->first;
        if (!std::is_sorted(lambda.rbegin(), lambda.rend())) {
            throw ClosureFailure("msym_expand: leading exponent is not "
                                 "weakly decreasing; image not symmetric");
        }
        if (!lambda.empty() && lambda.front() > d) {
            throw ClosureFailure(
                "msym_expand: image has per-variable degree above d");
        }
        const Rational c = lead->second;
        p -= c * monomial_symmetric(static_cast<int>(lambda.size()), lambda);
        out.emplace_back(std::move(lambda), c);
    }
    return out;
}

/** Assembles the exact matrix of the gauged Hamiltonian on W_d^sym.  For
 * N >= 2 the pair-identity gate must pass first.  Throws NotQuasiSolvable
 * for inadmissible gauges and ClosureFailure if any image leaves the span.
 */
inline BCNMatrix bcn_matrix(int n_particles, long l, const CouplingVector &li,
                            const GaugeChoice &gauge, const Roots &roots) {
    if (n_particles < 1) {
        throw Error("bcn_matrix: N must be positive");
    }
    if (roots.e[0] + roots.e[1] + roots.e[2] != 0) {
        throw Error("bcn_matrix: roots must sum to zero");
    }
    if (n_particles >= 2) {
        validate_pair_identity(roots);
    }
    BCNMatrix out;
    out.n_particles = n_particles;
    out.l = l;
    out.li = li;
    out.gauge = gauge;
    out.roots = roots;
    out.d = gauge.d(n_particles);
    out.basis = wdsym_basis(n_particles, gauge);
    const std::size_t dim = out.basis.size();
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < dim; ++i) {
        index[out.basis[i]] = i;
    }
    out.m = Matrix<Rational>(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        const Mpoly phi = monomial_symmetric(n_particles, out.basis[c]);
        const Mpoly image = gauged_apply(n_particles, l, li, gauge, roots, phi);
        for (auto &[lambda, coeff] : msym_expand(image, out.d)) {
            auto it = index.find(lambda);
            if (it == index.end()) {
                throw ClosureFailure(
                    "bcn_matrix: expansion used a multiset outside the basis");
            }
            out.m(it->second, c) = coeff;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

/** Eigenvalue report for one assembled matrix: the exact characteristic
 * polynomial, its roots at the requested precision (multiplicities from
 * the exact square-free structure), and whether every eigenvalue is real
 * within 1e-8 relative tolerance.  Reality is reported, never asserted;
 * only the square-integrable gauge carries a reality expectation.
 */
struct BCNSpectra {
    Polynomial<Rational> charpoly;
    std::vector<PolyRoot> eigenvalues;
    bool real = true;
    bool square_integrable_gauge = false;
};

inline BCNSpectra bcn_spectra(const BCNMatrix &m, unsigned digits10) {
    BCNSpectra out;
    out.charpoly = charpoly(m.m);
    out.eigenvalues = poly_roots(out.charpoly, digits10);
    out.square_integrable_gauge = m.gauge.square_integrable(m.l, m.li);
    precision_guard guard(digits10 + 10);
    const Real tol = pow10(-8);
    for (const PolyRoot &r : out.eigenvalues) {
        using std::abs;
        Real scale = fingap::abs(r.value);
        if (scale < 1) {
            scale = 1;
        }
        if (abs(r.value.im) > tol * scale) {
            out.real = false;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// the N = 1 cross-check against the spectral polynomial
// ---------------------------------------------------------------------------

/** For N = 1 the model is the single-variable operator whose spectral
 * polynomial Q the spectral module computes by commutator algebra.  Here
 * the same Q must arise as the product of the characteristic polynomials
 * of the gauged matrices over all admissible gauges — an end-to-end
 * consistency check between the two constructions.  Throws
 * MismatchFailure when the exact product differs from Q.
 */
struct N1Crosscheck {
    std::vector<GaugeChoice> gauges;
    std::vector<Polynomial<Rational>> charpolys;
    Polynomial<Rational> product;
    Polynomial<Rational> q;
};

inline N1Crosscheck crosscheck_n1(const CouplingVector &li, const Roots &roots) {
    N1Crosscheck out;
    out.product = Polynomial<Rational>(Rational(1));
    for (const GaugeChoice &gauge : admissible_gauges(1, 0, li)) {
        const BCNMatrix m = bcn_matrix(1, 0, li, gauge, roots);
        Polynomial<Rational> cp = charpoly(m.m);
        out.product *= cp;
        out.gauges.push_back(gauge);
        out.charpolys.push_back(std::move(cp));
    }
    out.q = spectral_data(roots, li).Q;
    if (out.product != out.q) {
        throw MismatchFailure("crosscheck_n1: product of gauge "
                              "characteristic polynomials differs from Q");
    }
    return out;
}

} // namespace fingap
