#pragma once

/** \file halfpower.hpp
 *
 * Exact function algebra generated over a scalar field K by
 *
 *     z = wp(x)   and   (z - e_i)^(1/2),  i = 1, 2, 3,
 *
 * with e_i exact rationals.  An element is stored as a sum over the eight
 * "sectors" mu in {0, 1/2}^3 of rational functions of z:
 *
 *     f = sum_mu  r_mu(z) * prod_i (z - e_i)^(mu_i).
 *
 * The branch convention ties the product of the three half powers to the
 * derivative of z:  prod_i (z - e_i)^(1/2) := wp'(x) / 2.  With that, d/dx
 * acts exactly on the algebra (chain rule flips every sector bit), and the
 * algebra contains wp(x + w_i) for all half-periods w_i as well as every
 * operator coefficient this library ever produces.
 *
 * K is Q (Rational) for concrete operators and Q(E) (RationalFunction over
 * Rational) when the spectral parameter is carried along.
 */

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "complex.hpp"
#include "lattice.hpp"
#include "rational_function.hpp"

namespace fingap {

/// The exact roots shared by all elements of one algebra instance.
struct Roots {
    std::array<Rational, 3> e;

    Rational g2() const {
        return -4 * (e[0] * e[1] + e[0] * e[2] + e[1] * e[2]);
    }
    Rational g3() const { return 4 * e[0] * e[1] * e[2]; }

    friend bool operator==(const Roots &a, const Roots &b) { return a.e == b.e; }
};

/// Signs of the three half-power factors used by numeric evaluation.
struct HalfPowerBranch {
    int s1 = +1, s2 = +1, s3 = +1;
};

template <class K> class HalfPower {
  public:
    using RF = RationalFunction<K>;
    using Poly = Polynomial<K>;

    HalfPower() = default;
    explicit HalfPower(Roots roots) : m_roots(std::move(roots)) {}
    HalfPower(Roots roots, const RF &plain) : m_roots(std::move(roots)) {
        m_sec[0] = plain;
    }

    static HalfPower zero(const Roots &roots) { return HalfPower(roots); }
    static HalfPower constant(const Roots &roots, const K &c) {
        return HalfPower(roots, RF(c));
    }
    /// The generator z = wp(x).
    static HalfPower z_var(const Roots &roots) {
        return HalfPower(roots, RF::variable());
    }
    /// One sector: r(z) * prod_{i in mu} (z - e_i)^(1/2).
    static HalfPower sector(const Roots &roots, unsigned mu, const RF &r) {
        if (mu > 7) {
            throw Error("HalfPower::sector: sector index out of range");
        }
        HalfPower f(roots);
        f.m_sec[mu] = r;
        return f;
    }
    /// wp'(x) = 2 (z-e_1)^(1/2) (z-e_2)^(1/2) (z-e_3)^(1/2).
    static HalfPower wp_prime(const Roots &roots) {
        return sector(roots, 7, RF(field_from_long<K>(2)));
    }
    /** wp(x + w_i), i = 0..3 (w_0 = 0).  For i >= 1 this is the half-period
     * shift value e_i + (e_i - e_j)(e_i - e_k) / (z - e_i).
     */
    static HalfPower wp_shift(const Roots &roots, int i) {
        if (i == 0) {
            return z_var(roots);
        }
        if (i < 1 || i > 3) {
            throw Error("HalfPower::wp_shift: index out of range");
        }
        const Rational ei = roots.e[static_cast<std::size_t>(i - 1)];
        const Rational ej = roots.e[static_cast<std::size_t>(i % 3)];
        const Rational ek = roots.e[static_cast<std::size_t>((i + 1) % 3)];
        RF num(embed_q((ei - ej) * (ei - ek)));
        RF den = RF::variable() - RF(embed_q(ei));
        return HalfPower(roots, RF(embed_q(ei)) + num / den);
    }
    /** The gauge factor Phihat = prod_i (z - e_i)^(alpha_i / 2) for integer
     * exponents alpha_i; half-integer parts go to the sector bits, integer
     * parts into the rational function.
     */
    static HalfPower phi_hat(const Roots &roots, const std::array<int, 3> &alpha) {
        unsigned mu = 0;
        RF r(K(1));
        for (int i = 0; i < 3; ++i) {
            int a = alpha[static_cast<std::size_t>(i)];
            int half = a - 2 * (a >= 0 ? a / 2 : -((-a + 1) / 2)); // a mod 2 in {0,1}
            int whole = (a - half) / 2;
            if (half != 0) {
                mu |= 1u << i;
            }
            RF lin = linear(roots, i);
            if (whole >= 0) {
                for (int k = 0; k < whole; ++k) {
                    r *= lin;
                }
            } else {
                for (int k = 0; k < -whole; ++k) {
                    r /= lin;
                }
            }
        }
        return sector(roots, mu, r);
    }

    const Roots &roots() const { return m_roots; }
    const RF &sector_coeff(unsigned mu) const { return m_sec.at(mu); }

    bool is_zero() const {
        for (const auto &r : m_sec) {
            if (!r.is_zero()) {
                return false;
            }
        }
        return true;
    }
    /// True when the element lies in the plain sector (a rational function of z).
    bool is_plain() const {
        for (unsigned mu = 1; mu < 8; ++mu) {
            if (!m_sec[mu].is_zero()) {
                return false;
            }
        }
        return true;
    }
    /// Sector index if exactly one sector is populated.
    int single_sector() const {
        int found = -1;
        for (unsigned mu = 0; mu < 8; ++mu) {
            if (m_sec[mu].is_zero()) {
                continue;
            }
            if (found >= 0) {
                return -1;
            }
            found = static_cast<int>(mu);
        }
        return found;
    }
    /// Constant scalar if the element is one; throws otherwise.
    K constant_value() const {
        if (!is_plain() || !m_sec[0].is_polynomial() || m_sec[0].num().degree() > 0) {
            throw Error("HalfPower::constant_value: element is not constant");
        }
        return m_sec[0].num()[0];
    }

    HalfPower &operator+=(const HalfPower &o) {
        check(o);
        for (unsigned mu = 0; mu < 8; ++mu) {
            m_sec[mu] += o.m_sec[mu];
        }
        return *this;
    }
    HalfPower &operator-=(const HalfPower &o) {
        check(o);
        for (unsigned mu = 0; mu < 8; ++mu) {
            m_sec[mu] -= o.m_sec[mu];
        }
        return *this;
    }
    friend HalfPower operator+(HalfPower a, const HalfPower &b) { return a += b; }
    friend HalfPower operator-(HalfPower a, const HalfPower &b) { return a -= b; }
    friend HalfPower operator-(const HalfPower &a) {
        HalfPower r = a;
        for (auto &s : r.m_sec) {
            s = -s;
        }
        return r;
    }

    friend HalfPower operator*(const HalfPower &a, const HalfPower &b) {
        a.check(b);
        HalfPower out(a.m_roots);
        for (unsigned mu = 0; mu < 8; ++mu) {
            if (a.m_sec[mu].is_zero()) {
                continue;
            }
            for (unsigned nu = 0; nu < 8; ++nu) {
                if (b.m_sec[nu].is_zero()) {
                    continue;
                }
                // (z-e_i)^(1/2) (z-e_i)^(1/2) = (z-e_i) on the overlap
                unsigned target = mu ^ nu;
                RF term = a.m_sec[mu] * b.m_sec[nu];
                unsigned overlap = mu & nu;
                for (int i = 0; i < 3; ++i) {
                    if (overlap & (1u << i)) {
                        term *= linear(a.m_roots, i);
                    }
                }
                out.m_sec[target] += term;
            }
        }
        return out;
    }
    HalfPower &operator*=(const HalfPower &o) { return *this = *this * o; }

    HalfPower &operator*=(const K &s) {
        RF f{s};
        for (auto &r : m_sec) {
            r *= f;
        }
        return *this;
    }
    friend HalfPower operator*(HalfPower a, const K &s) { return a *= s; }
    friend HalfPower operator*(const K &s, HalfPower a) { return a *= s; }

    friend bool operator==(const HalfPower &a, const HalfPower &b) {
        return a.m_roots == b.m_roots && a.m_sec == b.m_sec;
    }

    /** Exact division by a single-sector element.  Each of a's sectors
     * divides cleanly: the bits of b's sector cancel against matching bits
     * or introduce an explicit (z - e_i) denominator.
     */
    static HalfPower divide_single(const HalfPower &a, const HalfPower &b) {
        a.check(b);
        int nu = b.single_sector();
        if (nu < 0) {
            throw Error("HalfPower::divide_single: divisor must be single-sector");
        }
        const RF &rb = b.m_sec[static_cast<unsigned>(nu)];
        HalfPower out(a.m_roots);
        for (unsigned mu = 0; mu < 8; ++mu) {
            if (a.m_sec[mu].is_zero()) {
                continue;
            }
            unsigned target = mu ^ static_cast<unsigned>(nu);
            RF term = a.m_sec[mu] / rb;
            for (int i = 0; i < 3; ++i) {
                unsigned bit = 1u << i;
                if ((nu & bit) && !(mu & bit)) {
                    term /= linear(a.m_roots, i);
                }
            }
            out.m_sec[target] += term;
        }
        return out;
    }

    /** Galois conjugate: flip the sign of (z - e_i)^(1/2) for each i in
     * `mask`.  Sector mu picks up (-1)^popcount(mu & mask).
     */
    HalfPower conjugate(unsigned mask) const {
        HalfPower out = *this;
        for (unsigned mu = 0; mu < 8; ++mu) {
            unsigned overlap = mu & mask & 7u;
            int bits = static_cast<int>((overlap & 1u) + ((overlap >> 1) & 1u) +
                                        ((overlap >> 2) & 1u));
            if (bits % 2 != 0) {
                out.m_sec[mu] = -out.m_sec[mu];
            }
        }
        return out;
    }

    /** Multiplicative inverse.  The algebra is a field (an eightfold
     * multiquadratic extension of K(z)), so 1/f = (prod of the seven
     * nontrivial conjugates) / Norm(f), and the norm lives in the plain
     * sector.
     */
    HalfPower inverse() const {
        if (is_zero()) {
            throw Error("HalfPower::inverse: division by zero");
        }
        if (single_sector() >= 0) {
            return divide_single(constant(m_roots, K(1)), *this);
        }
        HalfPower cof = conjugate(1);
        for (unsigned mask = 2; mask < 8; ++mask) {
            cof *= conjugate(mask);
        }
        HalfPower nrm = *this * cof;
        if (!nrm.is_plain()) {
            throw Error("HalfPower::inverse: norm escaped the plain sector");
        }
        return divide_single(cof, nrm);
    }

    friend HalfPower operator/(const HalfPower &a, const HalfPower &b) {
        if (b.single_sector() >= 0) {
            return divide_single(a, b);
        }
        return a * b.inverse();
    }

    /** d/dx via the chain rule; every sector bit flips.  For a sector
     * (mu, r):
     *   d/dx -> sector ~mu with coefficient
     *     sum_{i in mu} r * prod_{j in mu, j != i} (z - e_j)
     *     + 2 r' * prod_{i in mu} (z - e_i).
     */
    HalfPower ddx() const {
        HalfPower out(m_roots);
        for (unsigned mu = 0; mu < 8; ++mu) {
            if (m_sec[mu].is_zero()) {
                continue;
            }
            unsigned target = (~mu) & 7u;
            RF acc{};
            for (int i = 0; i < 3; ++i) {
                if (!(mu & (1u << i))) {
                    continue;
                }
                RF prod(K(1));
                for (int j = 0; j < 3; ++j) {
                    if (j != i && (mu & (1u << j))) {
                        prod *= linear(m_roots, j);
                    }
                }
                acc += m_sec[mu] * prod;
            }
            RF prod_all(K(1));
            for (int i = 0; i < 3; ++i) {
                if (mu & (1u << i)) {
                    prod_all *= linear(m_roots, i);
                }
            }
            acc += RF(field_from_long<K>(2)) * m_sec[mu].derivative() * prod_all;
            out.m_sec[target] += acc;
        }
        return out;
    }

    /// (z - e_i) as a rational function, 0-based index.
    static RF linear(const Roots &roots, int i) {
        return RF::variable() - RF(embed_q(roots.e[static_cast<std::size_t>(i)]));
    }

    /// Exact embedding Q -> K (any coefficient field here is a Q-algebra).
    static K embed_q(const Rational &q) {
        return embed_int(numerator(q)) / embed_int(denominator(q));
    }

  private:
    static K embed_int(const Int &n) {
        bool neg = n < 0;
        Int m = neg ? Int(-n) : n;
        K acc{};
        K bit = field_from_long<K>(1);
        while (m != 0) {
            if ((m & 1) != 0) {
                acc += bit;
            }
            bit += bit;
            m >>= 1;
        }
        return neg ? K{} - acc : acc;
    }

    void check(const HalfPower &o) const {
        if (!(m_roots == o.m_roots)) {
            throw FieldMismatch("HalfPower: operands over different root fields");
        }
    }

    Roots m_roots{};
    std::array<RF, 8> m_sec{};
};

/// Spec-facing names.
template <class K> HalfPower<K> hp_ddx(const HalfPower<K> &f) { return f.ddx(); }

/** Numeric evaluation at x through a Lattice.  The three half-power factor
 * values are principal square roots of (wp(x) - e_i) for i = 1, 2 with
 * signs from `branch`; the third is wp'(x)/2 divided by the first two, so
 * the product convention holds exactly.  KEval embeds scalars of K into
 * Complex (identity-ish for Rational; an E-substitution for Q(E)).
 */
template <class K, class KEval>
Complex hp_eval_with(const HalfPower<K> &f, const Lattice &lat, const Complex &x,
                     KEval embed, const HalfPowerBranch &branch = {}) {
    precision_guard guard(lat.work_digits());
    const Complex z = lat.wp(x);
    const Complex dz = lat.wp_prime(x);
    auto rational_root = [&](int i) {
        return to_complex(f.roots().e[static_cast<std::size_t>(i)]);
    };
    std::array<Complex, 3> half{};
    half[0] = fingap::sqrt(z - rational_root(0));
    if (branch.s1 < 0) half[0] = -half[0];
    half[1] = fingap::sqrt(z - rational_root(1));
    if (branch.s2 < 0) half[1] = -half[1];
    half[2] = dz / (Complex(Real(2)) * half[0] * half[1]);
    if (branch.s3 < 0) half[2] = -half[2];

    auto eval_poly = [&](const Polynomial<K> &p) {
        Complex acc{};
        const auto &c = p.coeffs();
        for (std::size_t i = c.size(); i-- > 0;) {
            acc = acc * z + embed(c[i]);
        }
        return acc;
    };
    Complex total{};
    for (unsigned mu = 0; mu < 8; ++mu) {
        const auto &r = f.sector_coeff(mu);
        if (r.is_zero()) {
            continue;
        }
        Complex v = eval_poly(r.num()) / eval_poly(r.den());
        for (int i = 0; i < 3; ++i) {
            if (mu & (1u << i)) {
                v *= half[static_cast<std::size_t>(i)];
            }
        }
        total += v;
    }
    return total;
}

/// Evaluation for K = Rational.
inline Complex hp_eval(const HalfPower<Rational> &f, const Lattice &lat,
                       const Complex &x, const HalfPowerBranch &branch = {}) {
    return hp_eval_with(f, lat, x, [](const Rational &q) { return to_complex(q); },
                        branch);
}

} // namespace fingap
