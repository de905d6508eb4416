#pragma once

/** \file a3.hpp
 *
 * The explicit commuting operators of the three-particle elliptic
 * Calogero-type model with unit coupling,
 *
 *   H  = -(d1^2 + d2^2 + d3^2)/2 + 2(p12 + p23 + p31),
 *   P1 = d1 + d2 + d3,
 *   P3 = d1 d2 d3 + 2 p12 d3 + 2 p23 d1 + 2 p31 d2,
 *
 * together with the additional quartic operators I12 (displayed below),
 * I23 and I31 obtained from it by cyclically permuting the particle
 * indices.  Here p_jk = wp(x_j - x_k) and d_j = d/dx_j.
 *
 * The operators live in a *free* differential algebra: coefficients are
 * polynomials in the formal symbols p_jk and q_jk = wp'(x_j - x_k)
 * (canonical j < k; reversing a pair flips the sign of q), subject only to
 * the closure rules
 *
 *   d_j p_jk =  q_jk,        d_k p_jk = -q_jk,
 *   d_j q_jk =  6 p_jk^2 - g2/2,   (q_jk)^2 = 4 p_jk^3 - g2 p_jk - g3.
 *
 * The three-term addition relations between wp at different differences
 * are deliberately *not* imposed, so commutators like [H, I12] do not
 * vanish symbolically; they vanish only as functions on the lattice.
 * Verification therefore applies the symbolic commutator to a fixed family
 * of test functions (all reduced monomials of degree <= 2 in the p and q
 * symbols) and evaluates numerically at random points whose pairwise
 * differences stay clear of the period lattice.  [H, P1] is the exception:
 * translation invariance makes it the symbolic zero, which is asserted
 * exactly.
 */

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "halfpower.hpp"
#include "lattice.hpp"

namespace fingap {

// ---------------------------------------------------------------------------
// coefficient ring: polynomials in p12, p13, p23, q12, q13, q23
// ---------------------------------------------------------------------------

namespace a3detail {

/// Index of the canonical pair (j, k), 0-based particles, j < k.
inline int pair_index(int j, int k) {
    if (j > k) {
        std::swap(j, k);
    }
    if (j == 0) {
        return k == 1 ? 0 : 1; // (0,1) -> p12, (0,2) -> p13
    }
    return 2; // (1,2) -> p23
}

} // namespace a3detail

/** Polynomial in the six pair symbols.  Exponent layout: e[0..2] are the
 * powers of p12, p13, p23 and e[3..5] the powers of q12, q13, q23, kept
 * reduced to q-power <= 1 through (q)^2 = 4p^3 - g2 p - g3.  The ring
 * constants g2, g3 ride along from the Roots that created the element.
 */
class PairPoly {
  public:
    using Expo = std::array<int, 6>;
    using Terms = std::map<Expo, Rational>;

    PairPoly() = default;
    explicit PairPoly(const Roots &roots)
        : m_g2(roots.g2()), m_g3(roots.g3()) {}

    static PairPoly constant(const Roots &roots, const Rational &c) {
        PairPoly f(roots);
        if (c != 0) {
            f.m_t[Expo{}] = c;
        }
        return f;
    }
    /// The symbol p_jk (0-based particles j != k; order irrelevant).
    static PairPoly p(const Roots &roots, int j, int k) {
        PairPoly f(roots);
        Expo e{};
        e[static_cast<std::size_t>(a3detail::pair_index(j, k))] = 1;
        f.m_t[e] = 1;
        return f;
    }
    /// The symbol q_jk = wp'(x_j - x_k); q_kj = -q_jk.
    static PairPoly q(const Roots &roots, int j, int k) {
        PairPoly f(roots);
        Expo e{};
        e[static_cast<std::size_t>(3 + a3detail::pair_index(j, k))] = 1;
        f.m_t[e] = (j < k) ? Rational(1) : Rational(-1);
        return f;
    }

    bool is_zero() const { return m_t.empty(); }
    const Terms &terms() const { return m_t; }
    const Rational &g2() const { return m_g2; }
    const Rational &g3() const { return m_g3; }

    PairPoly &operator+=(const PairPoly &o) {
        if (m_t.empty()) {
            m_g2 = o.m_g2;
            m_g3 = o.m_g3;
        }
        for (const auto &[e, c] : o.m_t) {
            add_term(e, c);
        }
        return *this;
    }
    PairPoly &operator-=(const PairPoly &o) {
        if (m_t.empty()) {
            m_g2 = o.m_g2;
            m_g3 = o.m_g3;
        }
        for (const auto &[e, c] : o.m_t) {
            add_term(e, -c);
        }
        return *this;
    }
    friend PairPoly operator+(PairPoly x, const PairPoly &y) { return x += y; }
    friend PairPoly operator-(PairPoly x, const PairPoly &y) { return x -= y; }
    friend PairPoly operator-(PairPoly x) {
        for (auto &[e, c] : x.m_t) {
            c = -c;
        }
        return x;
    }
    friend PairPoly operator*(const Rational &s, PairPoly x) {
        if (s == 0) {
            x.m_t.clear();
            return x;
        }
        for (auto &[e, c] : x.m_t) {
            c *= s;
        }
        return x;
    }
    friend PairPoly operator*(const PairPoly &x, const PairPoly &y) {
        PairPoly r;
        r.m_g2 = x.m_t.empty() ? y.m_g2 : x.m_g2;
        r.m_g3 = x.m_t.empty() ? y.m_g3 : x.m_g3;
        for (const auto &[ex, cx] : x.m_t) {
            for (const auto &[ey, cy] : y.m_t) {
                Expo e;
                for (std::size_t i = 0; i < 6; ++i) {
                    e[i] = ex[i] + ey[i];
                }
                r.reduce_add(e, cx * cy);
            }
        }
        return r;
    }
    friend bool operator==(const PairPoly &x, const PairPoly &y) {
        return x.m_t == y.m_t;
    }

    /** Partial derivative with respect to x_j (0-based), using the stated
     * closure rules; the result stays inside the ring.
     */
    PairPoly derivative(int j) const {
        PairPoly out;
        out.m_g2 = m_g2;
        out.m_g3 = m_g3;
        static constexpr std::array<std::array<int, 2>, 3> pairs = {
            {{0, 1}, {0, 2}, {1, 2}}};
        for (const auto &[e, c] : m_t) {
            for (std::size_t s = 0; s < 3; ++s) {
                const int lo = pairs[s][0], hi = pairs[s][1];
                int orient = 0; // d_j acting on the difference x_lo - x_hi
                if (j == lo) {
                    orient = 1;
                } else if (j == hi) {
                    orient = -1;
                } else {
                    continue;
                }
                // d (p^a) = a p^{a-1} q, then d q = 6 p^2 - g2/2
                if (e[s] > 0) {
                    Expo f = e;
                    f[s] -= 1;
                    f[s + 3] += 1;
                    out.reduce_add(f, c * orient * e[s]);
                }
                if (e[s + 3] > 0) {
                    // q-power is at most 1 by the invariant
                    Expo f = e;
                    f[s + 3] -= 1;
                    Expo f2 = f;
                    f2[s] += 2;
                    out.reduce_add(f2, c * orient * 6);
                    out.reduce_add(f, c * orient * (-m_g2 / 2));
                }
            }
        }
        return out;
    }

    /// Numeric evaluation given values of the six symbols.
    Complex eval(const std::array<Complex, 6> &vals) const {
        Complex acc(Real(0));
        for (const auto &[e, c] : m_t) {
            Complex t = to_complex(c);
            for (std::size_t i = 0; i < 6; ++i) {
                for (int k = 0; k < e[i]; ++k) {
                    t = t * vals[i];
                }
            }
            acc = acc + t;
        }
        return acc;
    }

    /** The image under a particle relabeling perm (x_j -> x_{perm[j]}):
     * p-symbols permute, q-symbols permute with a sign when the
     * relabeled pair reverses orientation.
     */
    PairPoly relabel(const std::array<int, 3> &perm) const {
        static constexpr std::array<std::array<int, 2>, 3> pairs = {
            {{0, 1}, {0, 2}, {1, 2}}};
        PairPoly out;
        out.m_g2 = m_g2;
        out.m_g3 = m_g3;
        for (const auto &[e, c] : m_t) {
            Expo f{};
            Rational coeff = c;
            for (std::size_t s = 0; s < 3; ++s) {
                const int a = perm[static_cast<std::size_t>(pairs[s][0])];
                const int b = perm[static_cast<std::size_t>(pairs[s][1])];
                const auto t =
                    static_cast<std::size_t>(a3detail::pair_index(a, b));
                f[t] += e[s];
                f[t + 3] += e[s + 3];
                if (a > b && e[s + 3] % 2 != 0) {
                    coeff = -coeff;
                }
            }
            out.reduce_add(f, coeff);
        }
        return out;
    }

  private:
    void add_term(const Expo &e, const Rational &c) {
        auto it = m_t.find(e);
        if (it == m_t.end()) {
            if (c != 0) {
                m_t.emplace(e, c);
            }
        } else {
            it->second += c;
            if (it->second == 0) {
                m_t.erase(it);
            }
        }
    }
    /// Adds c * symbols^e after reducing q-powers to <= 1.
    void reduce_add(Expo e, const Rational &c) {
        for (std::size_t s = 3; s < 6; ++s) {
            if (e[s] >= 2) {
                // q^2 = 4 p^3 - g2 p - g3, recurse on the three branches
                Expo f = e;
                f[s] -= 2;
                Expo f3 = f;
                f3[s - 3] += 3;
                reduce_add(f3, c * 4);
                Expo f1 = f;
                f1[s - 3] += 1;
                reduce_add(f1, -c * m_g2);
                reduce_add(f, -c * m_g3);
                return;
            }
        }
        add_term(e, c);
    }

    Rational m_g2{}, m_g3{};
    Terms m_t;
};

// ---------------------------------------------------------------------------
// differential operators with PairPoly coefficients
// ---------------------------------------------------------------------------

/** A differential operator sum_alpha c_alpha(x) d^alpha in the three
 * particle derivatives, with PairPoly coefficients in the free pair-symbol
 * algebra.
 */
class PairVarOp {
  public:
    using DOrder = std::array<int, 3>;
    using Terms = std::map<DOrder, PairPoly>;

    PairVarOp() = default;

    static PairVarOp zero() { return PairVarOp(); }
    /// c(x) * d1^a1 d2^a2 d3^a3.
    static PairVarOp term(const PairPoly &c, const DOrder &alpha) {
        PairVarOp op;
        if (!c.is_zero()) {
            op.m_t[alpha] = c;
        }
        return op;
    }
    /// The derivative d_j (0-based).
    static PairVarOp d(const Roots &roots, int j) {
        DOrder a{};
        a[static_cast<std::size_t>(j)] = 1;
        return term(PairPoly::constant(roots, Rational(1)), a);
    }

    bool is_zero() const { return m_t.empty(); }
    const Terms &terms() const { return m_t; }

    PairVarOp &operator+=(const PairVarOp &o) {
        for (const auto &[a, c] : o.m_t) {
            auto it = m_t.find(a);
            if (it == m_t.end()) {
                m_t.emplace(a, c);
            } else {
                it->second += c;
                if (it->second.is_zero()) {
                    m_t.erase(it);
                }
            }
        }
        return *this;
    }
    PairVarOp &operator-=(const PairVarOp &o) { return *this += -o; }
    friend PairVarOp operator+(PairVarOp x, const PairVarOp &y) { return x += y; }
    friend PairVarOp operator-(PairVarOp x, const PairVarOp &y) { return x -= y; }
    friend PairVarOp operator-(const PairVarOp &x) {
        PairVarOp r;
        for (const auto &[a, c] : x.m_t) {
            r.m_t[a] = -c;
        }
        return r;
    }
    friend PairVarOp operator*(const Rational &s, PairVarOp x) {
        if (s == 0) {
            return PairVarOp();
        }
        for (auto &[a, c] : x.m_t) {
            c = s * c;
        }
        return x;
    }
    friend bool operator==(const PairVarOp &x, const PairVarOp &y) {
        return x.m_t == y.m_t;
    }

    /// Operator composition (this after o), by the multivariate Leibniz rule.
    PairVarOp compose(const PairVarOp &o) const {
        PairVarOp out;
        for (const auto &[alpha, ca] : m_t) {
            for (const auto &[beta, cb] : o.m_t) {
                // d^alpha (cb d^beta) =
                //   sum_{gamma <= alpha} C(alpha, gamma) (d^gamma cb)
                //   d^{alpha - gamma + beta}
                for (int g0 = 0; g0 <= alpha[0]; ++g0) {
                    for (int g1 = 0; g1 <= alpha[1]; ++g1) {
                        for (int g2c = 0; g2c <= alpha[2]; ++g2c) {
                            PairPoly dc = cb;
                            for (int t = 0; t < g0 && !dc.is_zero(); ++t) {
                                dc = dc.derivative(0);
                            }
                            for (int t = 0; t < g1 && !dc.is_zero(); ++t) {
                                dc = dc.derivative(1);
                            }
                            for (int t = 0; t < g2c && !dc.is_zero(); ++t) {
                                dc = dc.derivative(2);
                            }
                            if (dc.is_zero()) {
                                continue;
                            }
                            const Rational mult = binom(alpha[0], g0) *
                                                  binom(alpha[1], g1) *
                                                  binom(alpha[2], g2c);
                            const DOrder rest = {alpha[0] - g0 + beta[0],
                                                 alpha[1] - g1 + beta[1],
                                                 alpha[2] - g2c + beta[2]};
                            PairVarOp piece =
                                term(mult * (ca * dc), rest);
                            out += piece;
                        }
                    }
                }
            }
        }
        return out;
    }

    friend PairVarOp commutator(const PairVarOp &x, const PairVarOp &y) {
        return x.compose(y) - y.compose(x);
    }

    /// Applies the operator to a function in the pair-symbol algebra.
    PairPoly apply(const PairPoly &f) const {
        PairPoly out;
        for (const auto &[alpha, c] : m_t) {
            PairPoly df = f;
            for (std::size_t j = 0; j < 3; ++j) {
                for (int t = 0; t < alpha[j] && !df.is_zero(); ++t) {
                    df = df.derivative(static_cast<int>(j));
                }
            }
            if (!df.is_zero()) {
                out += c * df;
            }
        }
        return out;
    }

    /// Particle relabeling x_j -> x_{perm[j]} applied to all data.
    PairVarOp relabel(const std::array<int, 3> &perm) const {
        PairVarOp out;
        for (const auto &[a, c] : m_t) {
            DOrder b{};
            for (std::size_t j = 0; j < 3; ++j) {
                b[static_cast<std::size_t>(perm[j])] = a[j];
            }
            PairVarOp piece = term(c.relabel(perm), b);
            out += piece;
        }
        return out;
    }

  private:
    static Rational binom(int n, int k) {
        Rational r(1);
        for (int i = 0; i < k; ++i) {
            r *= Rational(n - i);
            r /= Rational(i + 1);
        }
        return r;
    }

    Terms m_t;
};

// ---------------------------------------------------------------------------
// the displayed operators
// ---------------------------------------------------------------------------

struct A3Operators {
    PairVarOp h;   ///< -(d1^2+d2^2+d3^2)/2 + 2(p12+p23+p31)
    PairVarOp p1;  ///< d1+d2+d3
    PairVarOp p3;  ///< d1 d2 d3 + 2 p12 d3 + 2 p23 d1 + 2 p31 d2
    PairVarOp i12; ///< the quartic operator attached to the pair (1,2)
    PairVarOp i23; ///< cyclic image (1->2, 2->3, 3->1) of i12
    PairVarOp i31; ///< cyclic image of i23
};

/** Builds the six operators exactly as displayed; I23 and I31 arise from
 * I12 by the cyclic relabeling 1 -> 2 -> 3 -> 1.
 */
inline A3Operators build_a3_operators(const Roots &roots) {
    using Op = PairVarOp;
    const auto c = [&](long v) { return PairPoly::constant(roots, Rational(v)); };
    const auto p = [&](int j, int k) { return PairPoly::p(roots, j - 1, k - 1); };
    const auto q = [&](int j, int k) { return PairPoly::q(roots, j - 1, k - 1); };
    // wp'' expands immediately: wp''_jk = 6 p_jk^2 - g2/2
    const auto ppp = [&](int j, int k) {
        return Rational(6) * (p(j, k) * p(j, k)) -
               PairPoly::constant(roots, roots.g2() / 2);
    };
    const Op d1 = Op::d(roots, 0), d2 = Op::d(roots, 1), d3 = Op::d(roots, 2);

    A3Operators out;
    out.h = Rational(-1, 2) *
                (d1.compose(d1) + d2.compose(d2) + d3.compose(d3)) +
            Op::term(Rational(2) * (p(1, 2) + p(2, 3) + p(3, 1)), {0, 0, 0});
    out.p1 = d1 + d2 + d3;
    out.p3 = d1.compose(d2).compose(d3) +
             Op::term(Rational(2) * p(1, 2), {0, 0, 1}) +
             Op::term(Rational(2) * p(2, 3), {1, 0, 0}) +
             Op::term(Rational(2) * p(3, 1), {0, 1, 0});

    const Op u = d1 - d3, v = d2 - d3;
    Op i12 = u.compose(u).compose(v).compose(v);
    i12 += Op::term(Rational(-8) * p(2, 3), {0, 0, 0}).compose(u).compose(u);
    i12 += Op::term(Rational(-8) * p(1, 3), {0, 0, 0}).compose(v).compose(v);
    i12 += Op::term(Rational(4) * (p(1, 2) - p(1, 3) - p(2, 3)), {0, 0, 0})
               .compose(u)
               .compose(v);
    i12 += Op::term(Rational(-2) * (q(1, 2) + q(1, 3) + Rational(6) * q(2, 3)),
                    {0, 0, 0})
               .compose(u);
    i12 += Op::term(Rational(-2) *
                        (-q(1, 2) + Rational(6) * q(1, 3) + q(2, 3)),
                    {0, 0, 0})
               .compose(v);
    i12 += Op::term(Rational(-2) * ppp(1, 2) - Rational(6) * ppp(1, 3) -
                        Rational(6) * ppp(2, 3) +
                        Rational(4) * (p(1, 2) * p(1, 2) + p(1, 3) * p(1, 3) +
                                       p(2, 3) * p(2, 3)) +
                        Rational(8) * (p(1, 2) * p(1, 3) + p(1, 2) * p(2, 3) +
                                       Rational(7) * (p(1, 3) * p(2, 3))),
                    {0, 0, 0});
    out.i12 = i12;
    const std::array<int, 3> cyc = {1, 2, 0}; // x1->x2, x2->x3, x3->x1
    out.i23 = out.i12.relabel(cyc);
    out.i31 = out.i23.relabel(cyc);
    (void)c;
    return out;
}

// ---------------------------------------------------------------------------
// numeric commutator verification
// ---------------------------------------------------------------------------

/** The fixed test-function family: all reduced monomials of total degree
 * <= 2 in the six pair symbols (so q-powers stay <= 1): the constant, the
 * six symbols, and the eighteen degree-two products without q^2.  Order is
 * deterministic.
 */
inline std::vector<PairPoly> a3_test_family(const Roots &roots) {
    std::vector<PairPoly> fam;
    std::vector<PairPoly> gens;
    gens.push_back(PairPoly::p(roots, 0, 1));
    gens.push_back(PairPoly::p(roots, 0, 2));
    gens.push_back(PairPoly::p(roots, 1, 2));
    gens.push_back(PairPoly::q(roots, 0, 1));
    gens.push_back(PairPoly::q(roots, 0, 2));
    gens.push_back(PairPoly::q(roots, 1, 2));
    fam.push_back(PairPoly::constant(roots, Rational(1)));
    for (const auto &g : gens) {
        fam.push_back(g);
    }
    for (std::size_t i = 0; i < gens.size(); ++i) {
        for (std::size_t j = i; j < gens.size(); ++j) {
            if (i >= 3 && i == j) {
                continue; // q^2 reduces to lower degree; not a new monomial
            }
            fam.push_back(gens[i] * gens[j]);
        }
    }
    return fam;
}

struct CommutatorReport {
    std::string pair;    ///< label such as "H,I12"
    unsigned precision;  ///< decimal digits used in evaluation
    int samples;         ///< number of admitted sample points
    Real max_residual;   ///< max |([X,Y] f)(x)| over family and samples
    bool symbolic_zero;  ///< the commutator already vanished symbolically
};

/** Evaluates the free-algebra commutator [X, Y] on the fixed test family
 * at random sample points whose pairwise coordinate differences stay at
 * least 0.05 away from every lattice point.  Throws SamplePole when no
 * admissible sample can be drawn.  The reported residual is the maximum
 * absolute value; exact commutation shows up as residuals at the
 * cancellation floor of the working precision, shrinking as the precision
 * grows.
 */
inline CommutatorReport commutator_residual(const PairVarOp &x,
                                            const PairVarOp &y,
                                            const Roots &roots,
                                            const Lattice &lat, int samples,
                                            const std::string &label = "") {
    CommutatorReport rep;
    rep.pair = label;
    rep.precision = lat.precision();
    rep.samples = samples;
    rep.max_residual = Real(0);
    const PairVarOp k = commutator(x, y);
    rep.symbolic_zero = k.is_zero();
    if (rep.symbolic_zero) {
        return rep;
    }
    const std::vector<PairPoly> family = a3_test_family(roots);
    std::vector<PairPoly> images;
    images.reserve(family.size());
    for (const PairPoly &f : family) {
        images.push_back(k.apply(f));
    }
    precision_guard guard(lat.work_digits());
    const Real clearance = Real(1) / 20;
    std::mt19937 rng(402653189u);
    auto frac = [&rng]() { return Real(static_cast<int>(rng() % 99989u) + 5) / 100000; };
    int accepted = 0;
    for (int attempt = 0; accepted < samples; ++attempt) {
        if (attempt > 100 * samples + 1000) {
            throw SamplePole("commutator_residual: could not draw enough "
                             "sample points clear of the lattice");
        }
        std::array<Complex, 3> xs;
        for (auto &xi : xs) {
            xi = Complex(Real(2) * frac()) * lat.omega1() +
                 Complex(Real(2) * frac()) * lat.omega3();
        }
        bool clear = true;
        for (int a = 0; a < 3 && clear; ++a) {
            for (int b = a + 1; b < 3; ++b) {
                if (lat.lattice_distance(xs[static_cast<std::size_t>(a)] -
                                         xs[static_cast<std::size_t>(b)]) <
                    clearance) {
                    clear = false;
                    break;
                }
            }
        }
        if (!clear) {
            continue;
        }
        ++accepted;
        std::array<Complex, 6> vals;
        static constexpr std::array<std::array<int, 2>, 3> pairs = {
            {{0, 1}, {0, 2}, {1, 2}}};
        for (std::size_t s = 0; s < 3; ++s) {
            const Complex diff = xs[static_cast<std::size_t>(pairs[s][0])] -
                                 xs[static_cast<std::size_t>(pairs[s][1])];
            vals[s] = lat.wp(diff);
            vals[s + 3] = lat.wp_prime(diff);
        }
        for (const PairPoly &img : images) {
            const Real r = fingap::abs(img.eval(vals));
            if (r > rep.max_residual) {
                rep.max_residual = r;
            }
        }
    }
    return rep;
}

} // namespace fingap
