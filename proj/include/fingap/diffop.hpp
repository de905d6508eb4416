#pragma once

/** \file diffop.hpp
 *
 * Ordinary differential operators sum_k c_k(x) (d/dx)^k whose coefficients
 * live in the half-power algebra.  Composition is exact Leibniz calculus;
 * together with `annihilator` (the monic operator killing a given solution
 * basis) and `op_right_reduce` (peeling an odd-order operator into
 * (a_j d/dx - a_j'/2 + c_j) H^(g-j) layers) this is all the operator
 * machinery the finite-gap construction needs.
 */

#include <vector>

#include "halfpower.hpp"

namespace fingap {

template <class K> class DiffOp {
  public:
    using HP = HalfPower<K>;

    explicit DiffOp(Roots roots) : m_roots(std::move(roots)) {}
    DiffOp(Roots roots, std::vector<HP> coeffs)
        : m_roots(std::move(roots)), m_c(std::move(coeffs)) {
        for (const auto &c : m_c) {
            if (!(c.roots() == m_roots)) {
                throw FieldMismatch("DiffOp: coefficient over different roots");
            }
        }
        trim();
    }

    static DiffOp zero(const Roots &roots) { return DiffOp(roots); }
    static DiffOp identity(const Roots &roots) {
        return DiffOp(roots, {HP::constant(roots, K(1))});
    }
    static DiffOp ddx(const Roots &roots) {
        return DiffOp(roots, {HP::zero(roots), HP::constant(roots, K(1))});
    }
    /// The Schroedinger operator -(d/dx)^2 + u.
    static DiffOp schroedinger(const HP &u) {
        return DiffOp(u.roots(),
                      {u, HP::zero(u.roots()), HP::constant(u.roots(), K(-1))});
    }

    const Roots &roots() const { return m_roots; }
    /// -1 for the zero operator.
    int order() const { return static_cast<int>(m_c.size()) - 1; }
    bool is_zero() const { return m_c.empty(); }
    HP coeff(int k) const {
        if (k < 0 || k >= static_cast<int>(m_c.size())) {
            return HP::zero(m_roots);
        }
        return m_c[static_cast<std::size_t>(k)];
    }

    DiffOp &operator+=(const DiffOp &o) {
        check(o);
        if (o.m_c.size() > m_c.size()) {
            m_c.resize(o.m_c.size(), HP::zero(m_roots));
        }
        for (std::size_t k = 0; k < o.m_c.size(); ++k) {
            m_c[k] += o.m_c[k];
        }
        trim();
        return *this;
    }
    DiffOp &operator-=(const DiffOp &o) {
        check(o);
        if (o.m_c.size() > m_c.size()) {
            m_c.resize(o.m_c.size(), HP::zero(m_roots));
        }
        for (std::size_t k = 0; k < o.m_c.size(); ++k) {
            m_c[k] -= o.m_c[k];
        }
        trim();
        return *this;
    }
    friend DiffOp operator+(DiffOp a, const DiffOp &b) { return a += b; }
    friend DiffOp operator-(DiffOp a, const DiffOp &b) { return a -= b; }
    friend DiffOp operator-(const DiffOp &a) {
        DiffOp r = a;
        for (auto &c : r.m_c) {
            c = -c;
        }
        return r;
    }

    /// Left multiplication by a function.
    friend DiffOp operator*(const HP &f, DiffOp op) {
        for (auto &c : op.m_c) {
            c = f * c;
        }
        op.trim();
        return op;
    }
    friend DiffOp operator*(const K &s, DiffOp op) {
        for (auto &c : op.m_c) {
            c *= s;
        }
        op.trim();
        return op;
    }

    /** Composition a . b (b acts first):
     *  (d/dx)^j . (b_k (d/dx)^k) = sum_i C(j,i) b_k^{(i)} (d/dx)^{j-i+k}.
     */
    friend DiffOp operator*(const DiffOp &a, const DiffOp &b) {
        a.check(b);
        DiffOp out(a.m_roots);
        if (a.is_zero() || b.is_zero()) {
            return out;
        }
        const int na = a.order();
        const int nb = b.order();
        out.m_c.assign(static_cast<std::size_t>(na + nb) + 1, HP::zero(a.m_roots));
        // derivative table of b's coefficients up to order na
        std::vector<std::vector<HP>> db(b.m_c.size());
        for (std::size_t k = 0; k < b.m_c.size(); ++k) {
            db[k].reserve(static_cast<std::size_t>(na) + 1);
            db[k].push_back(b.m_c[k]);
            for (int i = 1; i <= na; ++i) {
                db[k].push_back(db[k].back().ddx());
            }
        }
        for (int j = 0; j <= na; ++j) {
            const HP &aj = a.m_c[static_cast<std::size_t>(j)];
            if (aj.is_zero()) {
                continue;
            }
            for (int k = 0; k <= nb; ++k) {
                if (b.m_c[static_cast<std::size_t>(k)].is_zero()) {
                    continue;
                }
                unsigned long long binom = 1;
                for (int i = 0; i <= j; ++i) {
                    if (i > 0) {
                        binom = binom * static_cast<unsigned long long>(j - i + 1) /
                                static_cast<unsigned long long>(i);
                    }
                    HP term = aj * db[static_cast<std::size_t>(k)]
                                       [static_cast<std::size_t>(i)];
                    if (binom != 1) {
                        term *= field_from_long<K>(static_cast<long>(binom));
                    }
                    out.m_c[static_cast<std::size_t>(j - i + k)] += term;
                }
            }
        }
        out.trim();
        return out;
    }

    /// Apply to an element of the algebra.
    HP apply(const HP &f) const {
        HP acc = HP::zero(m_roots);
        HP fk = f;
        for (std::size_t k = 0; k < m_c.size(); ++k) {
            if (k > 0) {
                fk = fk.ddx();
            }
            if (!m_c[k].is_zero()) {
                acc += m_c[k] * fk;
            }
        }
        return acc;
    }

    friend bool operator==(const DiffOp &a, const DiffOp &b) {
        return a.m_roots == b.m_roots && a.m_c == b.m_c;
    }

  private:
    void check(const DiffOp &o) const {
        if (!(m_roots == o.m_roots)) {
            throw FieldMismatch("DiffOp: operands over different roots");
        }
    }
    void trim() {
        while (!m_c.empty() && m_c.back().is_zero()) {
            m_c.pop_back();
        }
    }

    Roots m_roots;
    std::vector<HP> m_c;
};

template <class K> DiffOp<K> op_compose(const DiffOp<K> &a, const DiffOp<K> &b) {
    return a * b;
}

template <class K>
HalfPower<K> op_apply(const DiffOp<K> &op, const HalfPower<K> &f) {
    return op.apply(f);
}

template <class K>
DiffOp<K> op_commutator(const DiffOp<K> &a, const DiffOp<K> &b) {
    return a * b - b * a;
}

/** Monic operator of order n annihilating the n given (independent)
 * elements: solve sum_k c_k b_j^{(k)} = -b_j^{(n)} by Gaussian elimination
 * over the half-power field.  Throws DependentBasis when the elements are
 * linearly dependent over the constants (vanishing Wronskian).
 */
template <class K>
DiffOp<K> annihilator(const std::vector<HalfPower<K>> &basis) {
    using HP = HalfPower<K>;
    if (basis.empty()) {
        throw Error("annihilator: empty basis");
    }
    const Roots roots = basis.front().roots();
    const std::size_t n = basis.size();

    std::vector<std::vector<HP>> M(n);
    std::vector<HP> rhs;
    rhs.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        M[j].reserve(n);
        HP d = basis[j];
        for (std::size_t k = 0; k < n; ++k) {
            M[j].push_back(d);
            d = d.ddx();
        }
        rhs.push_back(-d);
    }

    // forward elimination with row swaps; prefer single-sector pivots
    std::vector<std::size_t> rowperm(n);
    for (std::size_t j = 0; j < n; ++j) {
        rowperm[j] = j;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = n;
        for (std::size_t r = col; r < n; ++r) {
            const HP &cand = M[rowperm[r]][col];
            if (cand.is_zero()) {
                continue;
            }
            if (pivot == n || cand.single_sector() >= 0) {
                pivot = r;
                if (cand.single_sector() >= 0) {
                    break;
                }
            }
        }
        if (pivot == n) {
            throw DependentBasis("annihilator: basis is linearly dependent");
        }
        std::swap(rowperm[col], rowperm[pivot]);
        const std::size_t p = rowperm[col];
        const HP pinv = M[p][col].inverse();
        for (std::size_t r = col + 1; r < n; ++r) {
            const std::size_t q = rowperm[r];
            if (M[q][col].is_zero()) {
                continue;
            }
            HP f = M[q][col] * pinv;
            for (std::size_t k = col; k < n; ++k) {
                M[q][k] -= f * M[p][k];
            }
            rhs[q] -= f * rhs[p];
        }
    }

    // back substitution
    std::vector<HP> c(n, HP::zero(roots));
    for (std::size_t col = n; col-- > 0;) {
        const std::size_t p = rowperm[col];
        HP acc = rhs[p];
        for (std::size_t k = col + 1; k < n; ++k) {
            acc -= M[p][k] * c[k];
        }
        c[col] = acc / M[p][col];
    }

    std::vector<HP> coeffs = std::move(c);
    coeffs.push_back(HP::constant(roots, K(1)));
    DiffOp<K> op(roots, std::move(coeffs));
    for (const auto &b : basis) {
        if (!op.apply(b).is_zero()) {
            throw DependentBasis("annihilator: residual after solve");
        }
    }
    return op;
}

/// Result of peeling an odd operator against powers of H = -(d/dx)^2 + u.
template <class K> struct RightReduction {
    std::vector<HalfPower<K>> a; ///< a[j], j = 0..g, a[0] the leading layer
    std::vector<K> c;            ///< constant layers c[j]; all zero for
                                 ///< a commuting finite-gap operator
};

/** Write (-1)^g A = sum_j (a_j d/dx - a_j'/2 + c_j) H^(g-j) by descending
 * through the orders; validates each layer and the coupled derivative
 * relation a_j''' - 4 u a_j' - 2 u' a_j + 4 a_{j+1}' = 0 (a_{g+1} = 0).
 * Throws ReductionFailure when A is not of this shape.
 */
template <class K>
RightReduction<K> op_right_reduce(const DiffOp<K> &A, const HalfPower<K> &u,
                                  int g) {
    using HP = HalfPower<K>;
    const Roots roots = A.roots();
    if (g < 0 || A.order() != 2 * g + 1) {
        throw ReductionFailure("op_right_reduce: order must equal 2g+1");
    }
    const K half = HP::embed_q(Rational(1) / 2);

    DiffOp<K> H = DiffOp<K>::schroedinger(u);
    std::vector<DiffOp<K>> Hpow;
    Hpow.push_back(DiffOp<K>::identity(roots));
    for (int m = 1; m <= g; ++m) {
        Hpow.push_back(Hpow.back() * H);
    }

    DiffOp<K> R = (g % 2 != 0) ? -A : A;
    RightReduction<K> out;
    for (int j = 0; j <= g; ++j) {
        const int m = g - j;
        if (R.order() > 2 * m + 1) {
            throw ReductionFailure("op_right_reduce: order did not drop");
        }
        HP aj = R.coeff(2 * m + 1);
        if (m % 2 != 0) {
            aj = -aj;
        }
        DiffOp<K> layer(roots, {-(half * aj.ddx()), aj});
        R -= layer * Hpow[static_cast<std::size_t>(m)];
        if (R.order() > 2 * m) {
            throw ReductionFailure("op_right_reduce: leading layer mismatch");
        }
        HP gamma = R.coeff(2 * m);
        if (m % 2 != 0) {
            gamma = -gamma;
        }
        K cj{};
        if (!gamma.is_zero()) {
            if (gamma.single_sector() != 0 || !gamma.sector_coeff(0).is_polynomial() ||
                gamma.sector_coeff(0).num().degree() > 0) {
                throw ReductionFailure("op_right_reduce: non-constant scalar layer");
            }
            cj = gamma.sector_coeff(0).num()[0];
        }
        out.a.push_back(aj);
        out.c.push_back(cj);
        R -= cj * Hpow[static_cast<std::size_t>(m)];
        if (R.order() > 2 * m - 1) {
            throw ReductionFailure("op_right_reduce: constant layer mismatch");
        }
    }
    if (!R.is_zero()) {
        throw ReductionFailure("op_right_reduce: nonzero remainder");
    }

    const HP up = u.ddx();
    for (int j = 0; j <= g; ++j) {
        const HP &aj = out.a[static_cast<std::size_t>(j)];
        HP rel = aj.ddx().ddx().ddx() - field_from_long<K>(4) * (u * aj.ddx()) -
                 field_from_long<K>(2) * (up * aj);
        if (j + 1 <= g) {
            rel += field_from_long<K>(4) * out.a[static_cast<std::size_t>(j + 1)].ddx();
        }
        if (!rel.is_zero()) {
            throw ReductionFailure("op_right_reduce: derivative relation failed");
        }
    }
    return out;
}

} // namespace fingap
