#pragma once

/** \file hermite.hpp
 *
 * The Hermite-Krichever form of the eigenfunction: Lambda(x, E) =
 * exp(kappa x) sum_{i,j} b^(i)_j (d/dx)^j Phi_i(x, alpha) with
 * Phi_i(x, alpha) = sigma(x + w_i - alpha)/sigma(x + w_i) exp(zeta(alpha) x),
 * whose multiplier under x -> x + 2 w_k is
 *
 *   exp(-2 eta_k alpha + 2 w_k zeta(alpha) + 2 kappa w_k),   k = 1, 3.
 *
 * For the one-gap pair l = (2, 0, 0, 0) the translation data has the
 * closed form
 *
 *   wp(alpha) = e_1 - (E - 3 e_1)(E + 6 e_1)^2 / (9 (E^2 - 3 g_2)),
 *   kappa     = 2 sqrt(-Q(E)) / (3 (E^2 - 3 g_2)),
 *
 * which this header realizes numerically.  alpha is recovered from
 * wp(alpha) up to sign; the sign is tied to the branch of sqrt(-Q) chosen
 * for kappa by matching the multiplier against the ODE transfer-matrix
 * route for both periods (the rejected sign differs by exp(4 kappa w_k),
 * which the unordered-pair distance detects away from band edges).
 */

#include "bethe.hpp"
#include "monodromy.hpp"

namespace fingap {

/// Translation data of the eigenfunction line bundle at energy E.
struct HkParams {
    Complex alpha;        ///< wp(alpha) as below; sign fixed by the match
    Complex kappa;        ///< principal branch of 2 sqrt(-Q) / (3 (E^2 - 3 g2))
    Complex wp_alpha;
    Complex multiplier_1; ///< exp(-2 eta_1 alpha + 2 w_1 zeta(alpha) + 2 kappa w_1)
    Complex multiplier_3;
    Real match_defect = Real(0); ///< achieved distance against the ODE route
};

/// The HK multiplier formula for one period.
inline Complex hk_multiplier(const Lattice &lat, const Complex &alpha,
                             const Complex &kappa, int k) {
    precision_guard guard(lat.work_digits());
    return fingap::exp(Complex(Real(-2)) * lat.eta(k) * alpha +
                       Complex(Real(2)) * lat.omega(k) * lat.zeta(alpha) +
                       Complex(Real(2)) * kappa * lat.omega(k));
}

/** Translation data for l = (2, 0, 0, 0) at energy E.  Throws SingularP2
 * when E^2 - 3 g_2 vanishes to 1e-10 (the closed form degenerates at
 * those two energies) and MismatchFailure when neither sign of alpha
 * reproduces the transfer-matrix multipliers.
 */
inline HkParams hk_example_params(const SpectralData &S, const Lattice &lat,
                                  const Complex &E) {
    if (!(S.l == CouplingVector(2, 0, 0, 0))) {
        throw Error("hk_example_params: closed form is for l = (2,0,0,0)");
    }
    precision_guard guard(lat.work_digits());
    const Complex g2 = lat.g2();
    const Complex e1 = lat.e(1);
    const Complex p2 = E * E - Complex(Real(3)) * g2;
    using std::abs;
    const Real scale = fingap::norm(E) + Real(3) * fingap::abs(g2);
    if (fingap::abs(p2) < pow10(-10) * std::max(Real(1), scale)) {
        throw SingularP2("hk_example_params: E^2 - 3 g_2 vanishes at this energy");
    }
    HkParams out;
    const Complex em = E - Complex(Real(3)) * e1;
    const Complex ep = E + Complex(Real(6)) * e1;
    out.wp_alpha = e1 - em * ep * ep / (Complex(Real(9)) * p2);
    out.kappa = Complex(Real(2)) * fingap::sqrt(-eval_at(S.Q, E)) /
                (Complex(Real(3)) * p2);

    const Complex alpha0 = wp_inverse(lat, out.wp_alpha);
    const MonodromyResult ode1 = monodromy_ode(S.l, lat, E, 1);
    const MonodromyResult ode3 = monodromy_ode(S.l, lat, E, 3);
    Real best_defect = 0;
    bool have = false;
    for (int sgn : {1, -1}) {
        const Complex a = (sgn == 1) ? alpha0 : -alpha0;
        const Complex m1 = hk_multiplier(lat, a, out.kappa, 1);
        const Complex m3 = hk_multiplier(lat, a, out.kappa, 3);
        const Real defect = std::max(multiplier_set_distance(m1, ode1.multiplier),
                                     multiplier_set_distance(m3, ode3.multiplier));
        if (!have || defect < best_defect) {
            have = true;
            best_defect = defect;
            out.alpha = a;
            out.multiplier_1 = m1;
            out.multiplier_3 = m3;
        }
    }
    out.match_defect = best_defect;
    if (best_defect > pow10(-5)) {
        throw MismatchFailure(
            "hk_example_params: no sign of alpha matches the transfer matrix "
            "(defect " + best_defect.str(6) + ")");
    }
    return out;
}

/** kappa predicted by a Bethe configuration of the same energy: matching
 * the Bethe multiplier exp(2 eta_k sum t_j + 2 w_k c) against the HK
 * multiplier for both periods forces alpha = -sum_j t_j mod the lattice
 * and kappa = c + zeta(sum_j t_j), independently of the representative
 * chosen for alpha.  (The opposite HK branch carries -kappa and -alpha.)
 */
inline Complex hk_kappa_from_bethe(const Lattice &lat, const BetheConfig &cfg) {
    precision_guard guard(lat.work_digits());
    Complex sum_t{};
    for (const Complex &tj : cfg.t) {
        sum_t += tj;
    }
    return cfg.c + lat.zeta(sum_t);
}

} // namespace fingap
