#pragma once

/** \file coupling.hpp
 *
 * Coupling bookkeeping for the elliptic operator
 *
 *     H = -(d/dx)^2 + sum_{i=0..3} l_i (l_i + 1) wp(x + w_i),   w_0 = 0,
 *
 * with nonnegative integer couplings l = (l_0, l_1, l_2, l_3): the genus of
 * the associated spectral curve, the gauge exponent vectors alpha defining
 * the quasi-solvable subspaces, and the shifted coupling tuples entering the
 * factorized construction of the commuting odd-order operator.
 */

#include <algorithm>
#include <array>
#include <vector>

#include "errors.hpp"

namespace fingap {

/// Four nonnegative integer couplings (l_0, l_1, l_2, l_3).
struct CouplingVector {
    std::array<long, 4> l{};

    CouplingVector() = default;
    CouplingVector(long l0, long l1, long l2, long l3) : l{{l0, l1, l2, l3}} {
        for (long v : l) {
            if (v < 0) {
                throw Error("CouplingVector: couplings must be nonnegative");
            }
        }
    }
    long operator[](int i) const { return l[static_cast<std::size_t>(i)]; }
    long sum() const { return l[0] + l[1] + l[2] + l[3]; }
    friend bool operator==(const CouplingVector &a, const CouplingVector &b) {
        return a.l == b.l;
    }
};

/** Arithmetic genus of the spectral curve; the commuting operator has order
 * 2g + 1.  In terms of the couplings sorted descending (k_0 >= ... >= k_3):
 * for even total, g = k_0 when k_0 + k_3 >= k_1 + k_2 and
 * (k_0+k_1+k_2-k_3)/2 otherwise; for odd total, g = k_0 when
 * k_0 >= k_1 + k_2 + k_3 + 1 and (k_0+k_1+k_2+k_3+1)/2 otherwise.
 */
inline long genus(const CouplingVector &l) {
    std::array<long, 4> k = l.l;
    std::sort(k.begin(), k.end(), std::greater<long>());
    const long total = k[0] + k[1] + k[2] + k[3];
    if (total % 2 == 0) {
        if (k[0] + k[3] >= k[1] + k[2]) {
            return k[0];
        }
        return (k[0] + k[1] + k[2] - k[3]) / 2;
    }
    if (k[0] >= k[1] + k[2] + k[3] + 1) {
        return k[0];
    }
    return (total + 1) / 2;
}

/** Gauge exponent tuple (alpha_0, ..., alpha_3); each alpha_i is one of
 * -l_i or l_i + 1, so alpha_i (alpha_i - 1) = l_i (l_i + 1) and the
 * potential is unchanged by the choice.
 */
struct AlphaVector {
    std::array<long, 4> a{};

    AlphaVector() = default;
    AlphaVector(long a0, long a1, long a2, long a3) : a{{a0, a1, a2, a3}} {}
    long operator[](int i) const { return a[static_cast<std::size_t>(i)]; }
    long sum() const { return a[0] + a[1] + a[2] + a[3]; }
    friend bool operator==(const AlphaVector &x, const AlphaVector &y) {
        return x.a == y.a;
    }
};

/// Does alpha belong to the 16-element gauge set of l?
inline bool alpha_admissible(const AlphaVector &alpha, const CouplingVector &l) {
    for (int i = 0; i < 4; ++i) {
        if (alpha[i] != -l[i] && alpha[i] != l[i] + 1) {
            return false;
        }
    }
    return true;
}

/** Top polynomial degree d of the quasi-solvable space attached to alpha:
 * the space is span{ Phihat z^n : 0 <= n <= d } with d = -sum(alpha)/2.
 * Throws NotQuasiSolvable unless that is a nonnegative integer.
 */
inline long alpha_degree(const AlphaVector &alpha) {
    const long s = alpha.sum();
    if (s % 2 != 0 || s > 0) {
        throw NotQuasiSolvable("alpha_degree: -sum(alpha)/2 must be a nonnegative integer");
    }
    return -s / 2;
}

/// All gauge choices of l that carry a finite-dimensional invariant space.
inline std::vector<AlphaVector> quasi_solvable_alphas(const CouplingVector &l) {
    std::vector<AlphaVector> out;
    for (unsigned mask = 0; mask < 16; ++mask) {
        AlphaVector alpha;
        for (int i = 0; i < 4; ++i) {
            alpha.a[static_cast<std::size_t>(i)] =
                (mask & (1u << i)) ? l[i] + 1 : -l[i];
        }
        const long s = alpha.sum();
        if (s % 2 == 0 && s <= 0) {
            out.push_back(alpha);
        }
    }
    return out;
}

/** Half-sum shifted couplings used by the factorization for even total
 * coupling: le_i = (sum_j l_j)/2 - l_i.
 */
inline std::array<long, 4> coupling_even_shift(const CouplingVector &l) {
    const long s = l.sum();
    if (s % 2 != 0) {
        throw Error("coupling_even_shift: total coupling must be even");
    }
    return {s / 2 - l[0], s / 2 - l[1], s / 2 - l[2], s / 2 - l[3]};
}

/** Shifted couplings for odd total coupling: lo_0 = (sum + 1)/2 and
 * lo_i = l_0 + l_i - (sum + 1)/2 for i = 1, 2, 3.
 */
inline std::array<long, 4> coupling_odd_shift(const CouplingVector &l) {
    const long s = l.sum();
    if (s % 2 == 0) {
        throw Error("coupling_odd_shift: total coupling must be odd");
    }
    const long h = (s + 1) / 2;
    return {h, l[0] + l[1] - h, l[0] + l[2] - h, l[0] + l[3] - h};
}

} // namespace fingap
