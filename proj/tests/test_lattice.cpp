#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>
#include <vector>

#include "fingap/lattice.hpp"

using namespace fingap;

namespace {

// ---------------------------------------------------------------------------
// oracle: direct lattice sums in double precision
// ---------------------------------------------------------------------------

struct kahan_sum {
    std::complex<double> s{}, c{};
    void add(const std::complex<double> &v) {
        const std::complex<double> y = v - c;
        const std::complex<double> t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

std::complex<double> cdbl(const Complex &z) {
    return {static_cast<double>(z.re), static_cast<double>(z.im)};
}

/** Sum f over the nonzero period lattice {m p1 + n p3} with the points w and
 * -w visited as a pair (f receives w once per pair), restricted to |w| <= R.
 */
template <class F>
std::complex<double> pair_sum(std::complex<double> p1, std::complex<double> p3,
                              double R, F f) {
    const double det = std::abs(std::imag(std::conj(p1) * p3));
    const long mmax = static_cast<long>(R * std::abs(p3) / det) + 2;
    const long nmax = static_cast<long>(R * std::abs(p1) / det) + 2;
    kahan_sum acc;
    for (long m = 0; m <= mmax; ++m) {
        for (long n = (m == 0 ? 1 : -nmax); n <= nmax; ++n) {
            const std::complex<double> w =
                static_cast<double>(m) * p1 + static_cast<double>(n) * p3;
            if (std::abs(w) > R) {
                continue;
            }
            acc.add(f(w));
        }
    }
    return acc.s;
}

/// wp(x) = 1/x^2 + sum' [1/(x-w)^2 - 1/w^2]; the +/- pairing gives O(1/|w|^4) terms.
std::complex<double> wp_direct(std::complex<double> x, std::complex<double> p1,
                               std::complex<double> p3, double R = 1500.0) {
    return 1.0 / (x * x) +
           pair_sum(p1, p3, R, [&](std::complex<double> w) {
               return 1.0 / ((x - w) * (x - w)) + 1.0 / ((x + w) * (x + w)) -
                      2.0 / (w * w);
           });
}

/// wp'(x) = -2 sum [1/(x-w)^3] over the full lattice including w = 0.
std::complex<double> wp_prime_direct(std::complex<double> x, std::complex<double> p1,
                                     std::complex<double> p3, double R = 1500.0) {
    return -2.0 / (x * x * x) +
           pair_sum(p1, p3, R, [&](std::complex<double> w) {
               const std::complex<double> a = x - w, b = x + w;
               return -2.0 / (a * a * a) - 2.0 / (b * b * b);
           });
}

/// zeta(x) = 1/x + sum' [1/(x-w) + 1/w + x/w^2]; pairs decay like 1/|w|^4.
std::complex<double> zeta_direct(std::complex<double> x, std::complex<double> p1,
                                 std::complex<double> p3, double R = 1500.0) {
    return 1.0 / x + pair_sum(p1, p3, R, [&](std::complex<double> w) {
               return 1.0 / (x - w) + 1.0 / (x + w) + 2.0 * x / (w * w);
           });
}

// deterministic sample points spread over the fundamental cell
std::vector<Complex> cell_points(const Lattice &lat, int count, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(0.08, 0.92);
    std::vector<Complex> out;
    while (static_cast<int>(out.size()) < count) {
        const Real a(dist(gen)), b(dist(gen));
        const Complex x = Complex(2 * a) * lat.omega1() + Complex(2 * b) * lat.omega3();
        if (lat.lattice_distance(x) > Real(1) / 20) {
            out.push_back(x);
        }
    }
    return out;
}

} // namespace

TEST_CASE("square lattice reference values") {
    // DLMF 23.6: Weierstrass functions through Jacobi theta series; the
    // reference values below are frozen from an independent 40-digit
    // computation for half-periods (1/2, i/2) at x = 0.3.
    const unsigned digits = 30;
    precision_guard guard(45);
    const Lattice lat =
        Lattice::from_periods(Complex(Real(1) / 2), Complex(Real(0), Real(1) / 2), digits);
    const Complex x(Real("0.3"));
    const Real tol = pow10(-28);

    CHECK(abs(lat.wp(x) - Complex(Real("11.98391431584552726785480823061798844257"))) <
          tol);
    CHECK(abs(lat.zeta(x) - Complex(Real("3.24731283607040008542130620745699670296"))) <
          tol);
    CHECK(abs(lat.sigma(x) -
              Complex(Real("0.2980812773690531406684342037292735268123"))) < tol);

    // lemniscatic shape: e2 = 0, g3 = 0, purely real e1 = -e3
    CHECK(abs(lat.e(2)) < tol);
    CHECK(abs(lat.g3()) < tol);
    CHECK(abs(lat.e(1) + lat.e(3)) < tol);
}

TEST_CASE("generic lattice against direct lattice sums") {
    const unsigned digits = 30;
    precision_guard guard(45);
    const Complex w1(Real(1) / 2);
    const Complex w3(Real("0.3"), Real("0.4"));
    const Lattice lat = Lattice::from_periods(w1, w3, digits);

    // frozen independent reference for e1
    CHECK(abs(lat.e(1) - Complex(Real("5.743638869898406632941984866113377734322"),
                                 Real("-0.6027303152866533217643872838411013395034"))) <
          pow10(-28));

    const auto p1 = cdbl(Complex(Real(2)) * w1);
    const auto p3 = cdbl(Complex(Real(2)) * w3);
    const double tol = 5e-9;

    // e_i = wp(w_i) against the truncated double-precision sum
    for (int i = 1; i <= 3; ++i) {
        const auto ref = wp_direct(cdbl(lat.omega(i)), p1, p3);
        CHECK(std::abs(cdbl(lat.e(i)) - ref) < tol);
    }

    for (const Complex &x : cell_points(lat, 2, 2026u)) {
        const auto xd = cdbl(x);
        CHECK(std::abs(cdbl(lat.wp(x)) - wp_direct(xd, p1, p3)) < tol);
        CHECK(std::abs(cdbl(lat.wp_prime(x)) - wp_prime_direct(xd, p1, p3)) < tol);
        CHECK(std::abs(cdbl(lat.zeta(x)) - zeta_direct(xd, p1, p3)) < tol);
    }
}

TEST_CASE("lattice invariants and identities") {
    const unsigned digits = 30;
    precision_guard guard(45);
    const Lattice lat = Lattice::from_periods(Complex(Real(1) / 2),
                                              Complex(Real("0.3"), Real("0.4")), digits);
    const Real tol = pow10(-27);
    const Real pi = 4 * atan(Real(1));

    // Legendre relation eta1 w3 - eta3 w1 = i pi / 2 (eta3 is computed
    // independently of eta1, so this is a genuine crosscheck)
    CHECK(abs(lat.eta(1) * lat.omega3() - lat.eta(3) * lat.omega1() -
              Complex(Real(0), pi / 2)) < tol);
    // eta2 = eta(omega2) consistency
    CHECK(abs(lat.eta(1) + lat.eta(2) + lat.eta(3)) < tol);

    // root symmetric functions match g2, g3
    const Complex e1 = lat.e(1), e2 = lat.e(2), e3 = lat.e(3);
    CHECK(abs(e1 + e2 + e3) < tol);
    CHECK(abs(Complex(Real(-4)) * (e1 * e2 + e1 * e3 + e2 * e3) - lat.g2()) < tol);
    CHECK(abs(Complex(Real(4)) * (e1 * e2 * e3) - lat.g3()) < tol);

    // wp at half-periods hits the roots; wp' vanishes there
    for (int i = 1; i <= 3; ++i) {
        CHECK(abs(lat.wp(lat.omega(i)) - lat.e(i)) < tol);
        CHECK(abs(lat.wp_prime(lat.omega(i))) < tol);
    }

    // theta1 vanishes at 0; co-sigmas are normalized to 1 there
    CHECK(abs(lat.theta1(Complex(Real(0)))) < tol);
    for (int i = 1; i <= 3; ++i) {
        CHECK(abs(lat.co_sigma(i, Complex(Real(0))) - Complex(Real(1))) < tol);
    }

    for (const Complex &x : cell_points(lat, 100, 7u)) {
        const Complex wp = lat.wp(x);
        const Complex wpp = lat.wp_prime(x);
        const Real scale = (std::max)(Real(1), abs(wp) * abs(wp) * abs(wp));

        // differential equation wp'^2 = 4 wp^3 - g2 wp - g3
        CHECK(abs(wpp * wpp - (Complex(Real(4)) * wp * wp * wp - lat.g2() * wp -
                               lat.g3())) < tol * scale);
        // parity
        CHECK(abs(lat.wp(-x) - wp) < tol * scale);
        CHECK(abs(lat.zeta(-x) + lat.zeta(x)) < tol * scale);
    }

    for (const Complex &x : cell_points(lat, 20, 11u)) {
        const Real scale = (std::max)(Real(1), norm(lat.wp(x)));
        for (int k : {1, 3}) {
            const Complex p = Complex(Real(2)) * lat.omega(k);
            // periodicity of wp, wp'; quasi-periodicity of zeta and sigma
            CHECK(abs(lat.wp(x + p) - lat.wp(x)) < tol * scale);
            CHECK(abs(lat.wp_prime(x + p) - lat.wp_prime(x)) < tol * scale);
            CHECK(abs(lat.zeta(x + p) - lat.zeta(x) - Complex(Real(2)) * lat.eta(k)) <
                  tol);
            const Complex fac =
                -exp(Complex(Real(2)) * lat.eta(k) * (x + lat.omega(k)));
            CHECK(abs(lat.sigma(x + p) - fac * lat.sigma(x)) <
                  tol * (Real(1) + abs(fac) * abs(lat.sigma(x))));
        }

        // duplication: sigma(2x) = -wp'(x) sigma(x)^4 and
        // wp(2x) = (wp''/2wp')^2 - 2 wp with wp'' = 6 wp^2 - g2/2
        const Complex wp = lat.wp(x), wpp = lat.wp_prime(x);
        const Complex s = lat.sigma(x), s2 = lat.sigma(x * Complex(Real(2)));
        CHECK(abs(s2 + wpp * s * s * s * s) < tol * (Real(1) + abs(s2)));
        if (lat.lattice_distance(x * Complex(Real(2))) > Real(1) / 20 &&
            abs(wpp) > Real(1) / 10) {
            const Complex wpp2 = Complex(Real(6)) * wp * wp - lat.g2() / Complex(Real(2));
            const Complex dup = (wpp2 / (Complex(Real(2)) * wpp));
            CHECK(abs(lat.wp(x * Complex(Real(2))) - (dup * dup - Complex(Real(2)) * wp)) <
                  tol * (Real(1) + norm(dup)));
        }
    }
}

TEST_CASE("from_roots: exact labeling and frozen periods") {
    const unsigned digits = 30;
    precision_guard guard(45);
    const std::array<Rational, 3> e{Rational(3), Rational(-1), Rational(-2)};
    const Lattice lat = Lattice::from_roots(e, digits);
    const Real tol = pow10(-27);

    CHECK(lat.has_exact_roots());
    CHECK(lat.exact_roots() == e);
    CHECK(lat.exact_g2() == 28);
    CHECK(lat.exact_g3() == 24);

    // frozen 20-digit references for the rectangle
    CHECK(abs(lat.omega1() - Complex(Real("0.74220623671119322645"))) < pow10(-18));
    CHECK(abs(lat.omega3() - Complex(Real(0), Real("1.0094529099892116078"))) <
          pow10(-18));

    for (int i = 1; i <= 3; ++i) {
        CHECK(abs(lat.e(i) - to_complex(e[static_cast<std::size_t>(i - 1)])) < tol);
    }
    CHECK(abs(lat.g2() - Complex(Real(28))) < tol);
    CHECK(abs(lat.g3() - Complex(Real(24))) < tol);

    // a permuted labeling is realizable too, and relabels the half-periods
    const Lattice perm = Lattice::from_roots({Rational(-2), Rational(-1), Rational(3)},
                                             digits);
    CHECK(abs(perm.wp(perm.omega(1)) - Complex(Real(-2))) < tol);
    CHECK(abs(perm.wp(perm.omega(3)) - Complex(Real(3))) < tol);

    // square lattice: from_roots with e2 = 0
    const Lattice sq = Lattice::from_roots({Rational(1), Rational(0), Rational(-1)},
                                           digits);
    CHECK(abs(sq.e(2)) < tol);
    CHECK(abs(sq.g3()) < tol);
    CHECK(abs(sq.omega3() / sq.omega1() - Complex(Real(0), Real(1))) < tol);
}

TEST_CASE("eval_elliptic dispatch") {
    const unsigned digits = 20;
    precision_guard guard(30);
    const Lattice lat = Lattice::from_roots({Rational(3), Rational(-1), Rational(-2)},
                                            digits);
    const Complex x(Real("0.31"), Real("0.27"));
    CHECK(eval_elliptic(lat, EllipticKind::wp, x) == lat.wp(x));
    CHECK(eval_elliptic(lat, EllipticKind::wp_prime, x) == lat.wp_prime(x));
    CHECK(eval_elliptic(lat, EllipticKind::zeta, x) == lat.zeta(x));
    CHECK(eval_elliptic(lat, EllipticKind::sigma, x) == lat.sigma(x));
    CHECK(eval_elliptic(lat, EllipticKind::sigma2, x) == lat.co_sigma(2, x));
    CHECK(eval_elliptic(lat, EllipticKind::theta1, x) == lat.theta1(x));
}

TEST_CASE("failure modes") {
    const unsigned digits = 20;
    precision_guard guard(30);

    // degenerate inputs
    CHECK_THROWS_AS(Lattice::from_roots({Rational(1), Rational(1), Rational(-2)}, digits),
                    DegenerateLattice);
    CHECK_THROWS_AS(Lattice::from_roots({Rational(1), Rational(2), Rational(3)}, digits),
                    DegenerateLattice);
    // collinear periods / wrong orientation / nome at the unit circle
    CHECK_THROWS_AS(Lattice::from_periods(Complex(Real(1) / 2), Complex(Real(3) / 4),
                                          digits),
                    DegenerateLattice);
    CHECK_THROWS_AS(Lattice::from_periods(Complex(Real(1) / 2),
                                          Complex(Real("0.3"), Real("-0.4")), digits),
                    DegenerateLattice);
    CHECK_THROWS_AS(Lattice::from_periods(Complex(Real(1) / 2),
                                          Complex(Real(0), Real("0.00005")), digits),
                    DegenerateLattice);

    // pole guard
    const Lattice lat = Lattice::from_roots({Rational(3), Rational(-1), Rational(-2)},
                                            digits);
    CHECK_THROWS_AS(lat.wp(Complex(Real(0))), PoleProximity);
    const Complex near_pole =
        Complex(Real(2)) * lat.omega1() + Complex(pow10(-14), pow10(-14));
    CHECK_THROWS_AS(lat.wp(near_pole), PoleProximity);
    CHECK_THROWS_AS(lat.zeta(near_pole), PoleProximity);
}
