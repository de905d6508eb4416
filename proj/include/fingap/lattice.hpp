#pragma once

/** \file lattice.hpp
 *
 * Weierstrass elliptic functions for an arbitrary period lattice, computed
 * from Jacobi theta series in the nome q = exp(i pi tau), tau = w3/w1.
 *
 * Conventions: half-periods w1, w3 with Im(w3/w1) > 0, w2 = -w1 - w3, and
 * root labels e_i = wp(w_i).  Arguments are reduced into the fundamental
 * cell via the quasi-periodicity laws before the series are summed, so
 * evaluation is uniformly accurate over the plane.
 *
 * Formula sources: DLMF 20.2 (theta series), DLMF 23.6 (wp, zeta, sigma in
 * terms of theta), with the wp' expression arranged to stay finite at the
 * zeros of theta_2.
 */

#include <array>
#include <cstddef>
#include <optional>

#include "complex.hpp"
#include "errors.hpp"
#include "scalar.hpp"

namespace fingap {

/// Function selector for eval_elliptic.
enum class EllipticKind { wp, wp_prime, zeta, sigma, sigma1, sigma2, sigma3, theta1 };

namespace detail {
/// Extra decimal digits carried internally beyond the requested precision.
inline constexpr unsigned k_guard_digits = 10;
} // namespace detail

class Lattice {
  public:
    /** Build from half-periods.  Requires Im(w3/w1) > 0 and a nome p = q^2
     * with |p| < 1 - 1e-3; throws DegenerateLattice otherwise.
     */
    static Lattice from_periods(const Complex &w1, const Complex &w3,
                                unsigned digits10) {
        Lattice l(digits10);
        precision_guard guard(l.work_digits());
        l.init_from_periods(w1, w3);
        return l;
    }

    /** Build from exact real roots (e1, e2, e3): distinct rationals summing
     * to zero.  The half-periods are produced by AGM-based complete
     * elliptic integrals and labeled so that wp(w_i) = e_i holds for the
     * roots exactly as given (any ordering is realizable because the
     * modular group permutes the half-period classes).
     */
    static Lattice from_roots(const std::array<Rational, 3> &e, unsigned digits10) {
        if (e[0] + e[1] + e[2] != 0) {
            throw DegenerateLattice("from_roots: roots must sum to zero");
        }
        if (e[0] == e[1] || e[0] == e[2] || e[1] == e[2]) {
            throw DegenerateLattice("from_roots: roots must be distinct");
        }
        Lattice l(digits10);
        precision_guard guard(l.work_digits());
        l.init_from_roots(e);
        return l;
    }

    unsigned precision() const { return m_digits; }
    unsigned work_digits() const { return m_digits + detail::k_guard_digits; }

    const Complex &omega1() const { return m_w1; }
    const Complex &omega3() const { return m_w3; }
    Complex omega2() const { return -(m_w1 + m_w3); }
    /// Half-period by index, 1-based: omega(1) = w1, omega(2) = -w1-w3, omega(3) = w3.
    Complex omega(int i) const {
        switch (i) {
        case 1: return m_w1;
        case 2: return omega2();
        case 3: return m_w3;
        default: throw Error("Lattice::omega: index must be 1, 2 or 3");
        }
    }
    const Complex &tau() const { return m_tau; }
    /// Nome of the doubled variable, p = exp(2 pi i tau) = q^2.
    const Complex &nome_p() const { return m_p; }
    const Complex &e(int i) const {
        if (i < 1 || i > 3) {
            throw Error("Lattice::e: index must be 1, 2 or 3");
        }
        return m_e[static_cast<std::size_t>(i - 1)];
    }
    const Complex &eta(int i) const {
        if (i < 1 || i > 3) {
            throw Error("Lattice::eta: index must be 1, 2 or 3");
        }
        return m_eta[static_cast<std::size_t>(i - 1)];
    }
    const Complex &g2() const { return m_g2; }
    const Complex &g3() const { return m_g3; }

    bool has_exact_roots() const { return m_exact.has_value(); }
    const std::array<Rational, 3> &exact_roots() const {
        if (!m_exact) {
            throw Error("Lattice: no exact roots recorded");
        }
        return *m_exact;
    }
    Rational exact_g2() const {
        const auto &e = exact_roots();
        return -4 * (e[0] * e[1] + e[0] * e[2] + e[1] * e[2]);
    }
    Rational exact_g3() const {
        const auto &e = exact_roots();
        return 4 * e[0] * e[1] * e[2];
    }

    /// Distance from x to the nearest period-lattice point.
    Real lattice_distance(const Complex &x) const {
        precision_guard guard(work_digits());
        long m = 0, n = 0;
        Complex x0 = reduce(x, m, n);
        Real best = fingap::abs(x0);
        for (int a = -1; a <= 1; ++a) {
            for (int b = -1; b <= 1; ++b) {
                Complex d = x0 - (field_from_long<Real>(2 * a) * m_w1 +
                                  field_from_long<Real>(2 * b) * m_w3);
                Real v = fingap::abs(d);
                if (v < best) {
                    best = v;
                }
            }
        }
        return best;
    }

    Complex wp(const Complex &x) const {
        precision_guard guard(work_digits());
        long m = 0, n = 0;
        Complex x0 = reduce(x, m, n);
        require_away_from_pole(x0, "wp");
        theta_point t = eval_thetas(arg_v(x0));
        Complex ratio = (t.t2 / t.t1) * m_t30 * m_t40;
        return m_e[0] + m_fac * ratio * ratio;
    }

    Complex wp_prime(const Complex &x) const {
        precision_guard guard(work_digits());
        long m = 0, n = 0;
        Complex x0 = reduce(x, m, n);
        require_away_from_pole(x0, "wp_prime");
        theta_point t = eval_thetas(arg_v(x0));
        // wp' = 2 (pi/(2 w1))^3 (t30 t40)^2 t2 (t2' t1 - t2 t1') / t1^3,
        // arranged so the zeros of theta_2 (x near w1) cause no division.
        Complex c = m_pi_over_2w1 * m_pi_over_2w1 * m_pi_over_2w1;
        Complex t1cube = t.t1 * t.t1 * t.t1;
        return Real(2) * c * (m_t30 * m_t40) * (m_t30 * m_t40) * t.t2 *
               (t.t2p * t.t1 - t.t2 * t.t1p) / t1cube;
    }

    Complex zeta(const Complex &x) const {
        precision_guard guard(work_digits());
        long m = 0, n = 0;
        Complex x0 = reduce(x, m, n);
        require_away_from_pole(x0, "zeta");
        theta_point t = eval_thetas(arg_v(x0));
        Complex base = m_eta[0] * x0 / m_w1 + m_pi_over_2w1 * t.t1p / t.t1;
        return base + field_from_long<Real>(2 * m) * m_eta[0] +
               field_from_long<Real>(2 * n) * m_eta[2];
    }

    Complex sigma(const Complex &x) const {
        precision_guard guard(work_digits());
        return sigma_reduced(x);
    }

    /// Co-sigma: sigma_i(x) = exp(-eta_i x) sigma(x + w_i) / sigma(w_i).
    Complex co_sigma(int i, const Complex &x) const {
        precision_guard guard(work_digits());
        const Complex &etai = eta(i);
        return fingap::exp(-(etai * x)) * sigma_reduced(x + omega(i)) /
               m_sigma_half[static_cast<std::size_t>(i - 1)];
    }

    /// theta_1(pi x / (2 w1), q); for the lattice (1/2, tau/2) this is the
    /// classical theta_1 with argument pi x.
    Complex theta1(const Complex &x) const {
        precision_guard guard(work_digits());
        long m = 0, n = 0;
        Complex x0 = reduce(x, m, n);
        theta_point t = eval_thetas(arg_v(x0));
        // quasi-periodicity: v -> v + pi flips the sign; v -> v + n pi tau
        // multiplies by (-1)^n q^{-n^2} exp(-2 i n v).
        Complex val = t.t1;
        if (m % 2 != 0) {
            val = -val;
        }
        if (n != 0) {
            Complex v0 = arg_v(x0);
            Complex i_unit{Real(0), Real(1)};
            Complex f = fingap::exp(Complex(Real(-2) * field_from_long<Real>(n)) *
                                    i_unit * v0) *
                        pow_int(m_q, -static_cast<long>(n) * n);
            if (n % 2 != 0) {
                f = -f;
            }
            val = val * f;
        }
        return val;
    }

  private:
    explicit Lattice(unsigned digits10) : m_digits(digits10) {}

    struct theta_point {
        Complex t1, t2, t3, t4, t1p, t2p;
    };

    Complex arg_v(const Complex &x) const { return m_pi_over_2w1 * x; }

    void require_away_from_pole(const Complex &x0, const char *who) const {
        Real d = fingap::abs(x0);
        for (int a = -1; a <= 1; ++a) {
            for (int b = -1; b <= 1; ++b) {
                if (a == 0 && b == 0) {
                    continue;
                }
                Real v = fingap::abs(x0 - (field_from_long<Real>(2 * a) * m_w1 +
                                           field_from_long<Real>(2 * b) * m_w3));
                if (v < d) {
                    d = v;
                }
            }
        }
        if (d < pow10(-12)) {
            throw PoleProximity(std::string(who) +
                                ": argument within 1e-12 of a lattice point");
        }
    }

    /// x = x0 + 2m w1 + 2n w3 with (m, n) the rounded lattice coordinates.
    Complex reduce(const Complex &x, long &m, long &n) const {
        // solve [2w1 2w3] (s, t)^T = x as a real 2x2 system
        Real a = 2 * m_w1.re, b = 2 * m_w3.re;
        Real c = 2 * m_w1.im, d = 2 * m_w3.im;
        Real det = a * d - b * c;
        Real s = (x.re * d - b * x.im) / det;
        Real t = (a * x.im - x.re * c) / det;
        m = lround_real(s);
        n = lround_real(t);
        return x - (field_from_long<Real>(2 * m) * m_w1 +
                    field_from_long<Real>(2 * n) * m_w3);
    }

    Complex sigma_reduced(const Complex &x) const {
        long m = 0, n = 0;
        Complex x0 = reduce(x, m, n);
        theta_point t = eval_thetas(arg_v(x0));
        Complex val = (m_w1 / m_pi_const) * Real(2) *
                      fingap::exp(m_eta[0] * x0 * x0 / (Real(2) * m_w1)) * t.t1 /
                      m_t1p0;
        if (m == 0 && n == 0) {
            return val;
        }
        // sigma(x + 2m w1 + 2n w3) =
        //   (-1)^{m+n+mn} exp((2m eta1 + 2n eta3)(x + m w1 + n w3)) sigma(x)
        Complex etaf = field_from_long<Real>(2 * m) * m_eta[0] +
                       field_from_long<Real>(2 * n) * m_eta[2];
        Complex mid = x0 + field_from_long<Real>(m) * m_w1 +
                      field_from_long<Real>(n) * m_w3;
        Complex f = fingap::exp(etaf * mid);
        if ((m + n + m * n) % 2 != 0) {
            f = -f;
        }
        return f * val;
    }

    /** All four thetas plus the first two v-derivatives at one argument.
     * Series in S_k = w^k - w^-k = 2i sin(kv) and C_k = w^k + w^-k =
     * 2cos(kv) with w = exp(iv); terms decay like |q|^{n^2} once the
     * argument reduction has bounded Im(v).
     */
    theta_point eval_thetas(const Complex &v) const {
        const Real eps = pow10(-static_cast<long>(work_digits()) - 2);
        const Complex i_unit{Real(0), Real(1)};
        const Complex w = fingap::exp(i_unit * v);
        const Complex winv = Complex(Real(1)) / w;
        const Complex w2 = w * w, winv2 = winv * winv;

        // odd series: theta_1, theta_2 and their v-derivatives
        Complex s1{}, s2{}, s1p{}, s2p{};
        {
            Complex wp_ = w, wm = winv;   // w^{2n+1}, w^{-(2n+1)}
            Complex qp = m_q14;           // q^{(n+1/2)^2}
            Complex qstep = m_q2;         // ratio q^{2n+2}
            int sign = 1;
            bool done = false;
            for (unsigned long n = 0; n < 100000; ++n) {
                Complex S = wp_ - wm, C = wp_ + wm;
                Real k = field_from_long<Real>(static_cast<long>(2 * n + 1));
                Complex qs = sign > 0 ? qp : -qp;
                s1 += qs * S;
                s1p += qs * k * C;
                s2 += qp * C;
                s2p += qp * k * S;
                Real mag = fingap::abs(qp) * (fingap::abs(wp_) + fingap::abs(wm)) *
                           k * k * k;
                Real scale = Real(1) + fingap::abs(s2) + fingap::abs(s1p);
                if (mag < eps * scale) {
                    done = true;
                    break;
                }
                qp *= qstep;
                qstep *= m_q2;
                wp_ *= w2;
                wm *= winv2;
                sign = -sign;
            }
            if (!done) {
                throw NonConvergence("theta series (odd part) did not converge");
            }
        }

        // even series: theta_3, theta_4
        Complex s3{}, s4{};
        {
            Complex wp_ = w2, wm = winv2; // w^{2n}, w^{-2n}, n >= 1
            Complex qp = m_q;             // q^{n^2}
            Complex qstep = m_q * m_q2;   // ratio q^{2n+1}
            int sign = -1;
            bool done = false;
            for (unsigned long n = 1; n < 100000; ++n) {
                Complex C = wp_ + wm;
                s3 += qp * C;
                s4 += (sign > 0 ? qp : -qp) * C;
                Real mag = fingap::abs(qp) * (fingap::abs(wp_) + fingap::abs(wm));
                Real scale = Real(1) + fingap::abs(s3);
                if (mag < eps * scale) {
                    done = true;
                    break;
                }
                qp *= qstep;
                qstep *= m_q2;
                wp_ *= w2;
                wm *= winv2;
                sign = -sign;
            }
            if (!done) {
                throw NonConvergence("theta series (even part) did not converge");
            }
        }

        theta_point out;
        const Complex minus_i{Real(0), Real(-1)};
        out.t1 = minus_i * s1;
        out.t1p = s1p;
        out.t2 = s2;
        out.t2p = i_unit * s2p;
        out.t3 = Complex(Real(1)) + s3;
        out.t4 = Complex(Real(1)) + s4;
        return out;
    }

    void init_from_periods(const Complex &w1, const Complex &w3) {
        if (fingap::abs(w1) == 0) {
            throw DegenerateLattice("from_periods: omega1 must be nonzero");
        }
        m_w1 = w1;
        m_w3 = w3;
        m_tau = w3 / w1;
        if (!(m_tau.im > 0)) {
            throw DegenerateLattice("from_periods: Im(omega3/omega1) must be positive");
        }
        m_pi_const = Complex(const_pi());
        Complex i_pi{Real(0), const_pi()};
        m_q = fingap::exp(i_pi * m_tau);
        m_q14 = fingap::exp(i_pi * m_tau / Real(4));
        m_q2 = m_q * m_q;
        m_p = m_q2;
        if (!(fingap::abs(m_p) < Real(1) - pow10(-3))) {
            throw DegenerateLattice("from_periods: nome too close to the unit circle");
        }
        m_pi_over_2w1 = m_pi_const / (Real(2) * m_w1);
        m_fac = m_pi_over_2w1 * m_pi_over_2w1;

        // theta nulls and the derived lattice constants
        theta_point t0 = eval_thetas(Complex(Real(0)));
        m_t30 = t0.t3;
        m_t40 = t0.t4;
        Complex t20 = t0.t2;
        m_t1p0 = theta1_deriv0(1);
        Complex t1ppp0 = theta1_deriv0(3);

        Complex t2q = t20 * t20, t3q = m_t30 * m_t30, t4q = m_t40 * m_t40;
        t2q *= t2q;
        t3q *= t3q;
        t4q *= t4q;
        Real third = Real(1) / 3;
        m_e[0] = m_fac * (t3q + t4q) * third;
        m_e[1] = m_fac * (t2q - t4q) * third;
        m_e[2] = -(m_fac * (t2q + t3q) * third);
        m_g2 = Real(-4) * (m_e[0] * m_e[1] + m_e[0] * m_e[2] + m_e[1] * m_e[2]);
        m_g3 = Real(4) * m_e[0] * m_e[1] * m_e[2];

        // eta1 from DLMF 23.6.8; eta3 independently as zeta(w3) so the
        // Legendre relation below is a real consistency check.
        m_eta[0] = -(m_pi_const * m_pi_const) * t1ppp0 /
                   (Real(12) * m_w1 * m_t1p0);
        {
            theta_point t3v = eval_thetas(arg_v(m_w3));
            m_eta[2] = m_eta[0] * m_w3 / m_w1 + m_pi_over_2w1 * t3v.t1p / t3v.t1;
        }
        m_eta[1] = -(m_eta[0] + m_eta[2]);

        const Real tol = pow10(4 - static_cast<long>(m_digits));
        Complex legendre = m_eta[0] * m_w3 - m_eta[2] * m_w1 -
                           Complex(Real(0), const_pi() / 2);
        if (!(fingap::abs(legendre) < tol)) {
            throw DegenerateLattice("from_periods: Legendre relation check failed");
        }
        if (!(fingap::abs(m_e[0] + m_e[1] + m_e[2]) < tol)) {
            throw DegenerateLattice("from_periods: root sum check failed");
        }

        // co-sigma normalizers
        for (int i = 1; i <= 3; ++i) {
            m_sigma_half[static_cast<std::size_t>(i - 1)] = sigma_reduced(omega(i));
        }

        // wp at each half-period must reproduce the labeled root.
        for (int i = 1; i <= 3; ++i) {
            if (!(fingap::abs(wp_nolock(omega(i)) - e(i)) <
                  tol * (Real(1) + fingap::abs(e(i))))) {
                throw DegenerateLattice("from_periods: wp(omega_i) != e_i");
            }
        }
    }

    void init_from_roots(const std::array<Rational, 3> &roots) {
        // sort descending to get the standard rectangular data
        std::array<Rational, 3> s = roots;
        if (s[0] < s[1]) std::swap(s[0], s[1]);
        if (s[1] < s[2]) std::swap(s[1], s[2]);
        if (s[0] < s[1]) std::swap(s[0], s[1]);
        Real E1 = to_real(s[0]), E2 = to_real(s[1]), E3 = to_real(s[2]);
        Real scale = sqrt(E1 - E3);
        Real msq = (E2 - E3) / (E1 - E3); // in (0,1)
        Real k = sqrt(msq), kp = sqrt(1 - msq);
        Real Kk = const_pi() / (2 * agm(Real(1), kp));
        Real Kkp = const_pi() / (2 * agm(Real(1), k));
        Complex half_real{Kk / scale, Real(0)};
        Complex half_imag{Real(0), Kkp / scale};

        auto rep = [&](const Rational &r) -> Complex {
            if (r == s[0]) return half_real;
            if (r == s[2]) return half_imag;
            return half_real + half_imag;
        };
        Complex w1 = rep(roots[0]);
        Complex w3 = rep(roots[2]);
        if (!((w3 / w1).im > 0)) {
            w3 = -w3; // wp is even, so the label survives the sign flip
        }
        init_from_periods(w1, w3);
        m_exact = roots;

        const Real tol = pow10(4 - static_cast<long>(m_digits));
        for (int i = 1; i <= 3; ++i) {
            Real want = to_real(roots[static_cast<std::size_t>(i - 1)]);
            if (!(fingap::abs(e(i) - Complex(want)) < tol * (Real(1) + abs(want)))) {
                throw DegenerateLattice("from_roots: root labeling check failed");
            }
        }
    }

    Complex wp_nolock(const Complex &x) const {
        long m = 0, n = 0;
        Complex x0 = reduce(x, m, n);
        theta_point t = eval_thetas(arg_v(x0));
        Complex ratio = (t.t2 / t.t1) * m_t30 * m_t40;
        return m_e[0] + m_fac * ratio * ratio;
    }

    /// k-th derivative of theta_1 at v = 0 (odd k; even ones vanish).
    Complex theta1_deriv0(int k) const {
        const Real eps = pow10(-static_cast<long>(work_digits()) - 2);
        Complex qodd = m_q14;
        Complex qodd_step = m_q2;
        Complex acc{};
        int sign = 1;
        for (unsigned long n = 0; n < 100000; ++n) {
            Real mfac = field_from_long<Real>(static_cast<long>(2 * n + 1));
            Real mk = Real(1);
            for (int j = 0; j < k; ++j) {
                mk *= mfac;
            }
            Complex term = qodd * Real(2) * mk;
            if (sign < 0) {
                term = -term;
            }
            acc += term;
            if (fingap::abs(term) < eps * (Real(1) + fingap::abs(acc))) {
                // sign of d^k/dv^k sin((2n+1)v) at 0 alternates with k mod 4
                break;
            }
            qodd *= qodd_step;
            qodd_step *= m_q2;
            sign = -sign;
        }
        // (d/dv)^k sin(mv) at 0 = m^k * {0, 1, 0, -1}[k mod 4]
        if (k % 4 == 3) {
            acc = -acc;
        }
        return acc;
    }

    static Real const_pi() { return 4 * atan(Real(1)); }

    static Real agm(Real a, Real b) {
        const Real eps = pow10(-static_cast<long>(Real::default_precision()));
        for (int i = 0; i < 200000; ++i) {
            Real a2 = (a + b) / 2;
            Real b2 = sqrt(a * b);
            if (abs(a2 - b2) < eps * abs(a2)) {
                return a2;
            }
            a = a2;
            b = b2;
        }
        throw NonConvergence("agm did not converge");
    }

    unsigned m_digits;
    Complex m_w1, m_w3, m_tau, m_q, m_q14, m_q2, m_p;
    Complex m_pi_const, m_pi_over_2w1, m_fac;
    Complex m_t30, m_t40, m_t1p0;
    std::array<Complex, 3> m_e{};
    std::array<Complex, 3> m_eta{};
    Complex m_g2, m_g3;
    std::array<Complex, 3> m_sigma_half{};
    std::optional<std::array<Rational, 3>> m_exact;
};

/// Uniform entry point matching the enum above.
inline Complex eval_elliptic(const Lattice &l, EllipticKind kind, const Complex &x) {
    switch (kind) {
    case EllipticKind::wp: return l.wp(x);
    case EllipticKind::wp_prime: return l.wp_prime(x);
    case EllipticKind::zeta: return l.zeta(x);
    case EllipticKind::sigma: return l.sigma(x);
    case EllipticKind::sigma1: return l.co_sigma(1, x);
    case EllipticKind::sigma2: return l.co_sigma(2, x);
    case EllipticKind::sigma3: return l.co_sigma(3, x);
    case EllipticKind::theta1: return l.theta1(x);
    }
    throw Error("eval_elliptic: unknown kind");
}

} // namespace fingap
