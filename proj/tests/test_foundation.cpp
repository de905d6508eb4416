#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fingap/complex.hpp"
#include "fingap/linalg.hpp"
#include "fingap/polynomial.hpp"
#include "fingap/polyroots.hpp"
#include "fingap/rational_function.hpp"
#include "fingap/scalar.hpp"

using namespace fingap;
using Poly = Polynomial<Rational>;
using RF = RationalFunction<Rational>;

static Poly from_roots_list(std::initializer_list<Rational> rs) {
    Poly p(Rational(1));
    for (const auto &r : rs) {
        p *= Poly(std::vector<Rational>{-r, Rational(1)});
    }
    return p;
}

TEST_CASE("rational parsing and formatting") {
    CHECK(parse_rational("3/4") == Rational(3) / 4);
    CHECK(parse_rational("-7") == Rational(-7));
    CHECK(parse_rational("0") == 0);
    CHECK(format_rational(Rational(22) / 4) == "11/2");
    CHECK(format_rational(Rational(-6)) == "-6");
    CHECK(parse_rational(format_rational(Rational(-355) / 113)) == Rational(-355) / 113);
    CHECK_THROWS_AS(parse_rational("x+1"), UnsupportedFormat);
}

TEST_CASE("scalar helpers") {
    CHECK(field_from_long<Rational>(-37) == Rational(-37));
    CHECK(field_from_long<Rational>(0) == 0);
    CHECK(pow_int(Rational(2) / 3, -3) == Rational(27) / 8);
    CHECK(pow_int(Rational(5), 0) == 1);
    CHECK_THROWS_AS(pow_int(Rational(0), -1), Error);

    precision_guard guard(40);
    CHECK(field_from_long<Real>(1000000) == Real(1000000));
    CHECK(lround_real(Real("2.4999")) == 2);
    CHECK(lround_real(Real("-2.5001")) == -3);
    CHECK(abs(pow10(-3) - Real("0.001")) < pow10(-40));
    CHECK(abs(to_real(Rational(1) / 3) * 3 - 1) < pow10(-38));
}

TEST_CASE("complex arithmetic") {
    precision_guard guard(40);
    const Complex i{Real(0), Real(1)};
    const Real tol = pow10(-38);

    // principal square root
    Complex s = sqrt(Complex(Real(-1)));
    CHECK(abs(s - i) < tol);
    CHECK(abs(sqrt(Complex{Real(3), Real(4)}) - Complex{Real(2), Real(1)}) < tol);
    // branch: sqrt lands in the right half plane (or on the positive imag axis)
    CHECK(sqrt(Complex{Real(-4), Real(-1) / 1000}).re > 0);

    // exp/log round trip
    Complex z{Real("1.25"), Real("-0.75")};
    CHECK(abs(log(exp(z)) - z) < tol);
    CHECK(abs(exp(log(z)) - z) < tol);

    // Smith division is robust for wildly scaled components
    Complex big{pow10(30), pow10(-30)};
    CHECK(abs((z / big) * big - z) < abs(z) * tol);

    CHECK(abs(pow_int(z, 3) - z * z * z) < tol);
    CHECK(abs(pow_int(z, -2) * (z * z) - Complex(Real(1))) < tol);
}

TEST_CASE("polynomial core") {
    const Poly p = from_roots_list({Rational(1), Rational(-2), Rational(1) / 2});
    CHECK(p.degree() == 3);
    CHECK(p.eval(Rational(1)) == 0);
    CHECK(p.eval(Rational(3)) == Rational(25));

    // divmod is Euclidean: p = q d + r with deg r < deg d
    const Poly d(std::vector<Rational>{Rational(1), Rational(0), Rational(1)});
    auto [q, r] = p.divmod(d);
    CHECK(q * d + r == p);
    CHECK(r.degree() < d.degree());
    CHECK_THROWS_AS(divide_exact(p, d), Error);

    CHECK(gcd_poly(from_roots_list({Rational(1), Rational(-1)}),
                   from_roots_list({Rational(1), Rational(1)})) ==
          from_roots_list({Rational(1)}));

    // derivative and composition
    CHECK(Poly::monomial(Rational(1), 4).derivative() == Poly::monomial(Rational(4), 3));
    const Poly x2 = Poly::monomial(Rational(1), 2);
    CHECK(d.compose(x2) ==
          Poly(std::vector<Rational>{Rational(1), Rational(0), Rational(0), Rational(0),
                                     Rational(1)}));
}

TEST_CASE("squarefree decomposition") {
    const Poly f = from_roots_list({Rational(-2)}) *
                   from_roots_list({Rational(1), Rational(1)}) *
                   from_roots_list({Rational(5), Rational(5), Rational(5)});
    const auto parts = squarefree_decomposition(f * Rational(7));
    REQUIRE(parts.size() == 3);
    CHECK(parts[0] == from_roots_list({Rational(-2)}));
    CHECK(parts[1] == from_roots_list({Rational(1)}));
    CHECK(parts[2] == from_roots_list({Rational(5)}));
}

TEST_CASE("interpolation") {
    const Poly p(std::vector<Rational>{Rational(-5), Rational(1) / 3, Rational(0),
                                       Rational(2)});
    std::vector<std::pair<Rational, Rational>> pts;
    for (long k = 0; k < 4; ++k) {
        pts.emplace_back(Rational(k), p.eval(Rational(k)));
    }
    CHECK(interpolate(pts) == p);
    // constant data
    CHECK(interpolate<Rational>({{Rational(0), Rational(4)}, {Rational(1), Rational(4)}}) ==
          Poly(Rational(4)));
    CHECK_THROWS_AS(
        interpolate<Rational>({{Rational(1), Rational(0)}, {Rational(1), Rational(1)}}),
        Error);
}

TEST_CASE("rational functions canonicalize") {
    const RF x = RF::variable();
    RF f = (x * x - RF(Rational(1))) / (x - RF(Rational(1)));
    CHECK(f.is_polynomial());
    CHECK(f == x + RF(Rational(1)));

    // monic denominator
    RF g = RF(Rational(1)) / (RF(Rational(2)) * x);
    CHECK(g.den() == Poly::monomial(Rational(1), 1));
    CHECK(g.num() == Poly(Rational(1) / 2));

    // derivative of 1/x
    RF h = RF(Rational(1)) / x;
    CHECK(h.derivative() == -(h * h));
    CHECK(h.eval(Rational(4)) == Rational(1) / 4);

    CHECK((x / (x * x)) * x == RF(Rational(1)));
}

TEST_CASE("linear algebra") {
    // solve a 3x3 system
    Matrix<Rational> m(3, 3);
    m(0, 0) = 2; m(0, 1) = 1; m(0, 2) = -1;
    m(1, 0) = -3; m(1, 1) = -1; m(1, 2) = 2;
    m(2, 0) = -2; m(2, 1) = 1; m(2, 2) = 2;
    const auto x = solve_linear(m, {Rational(8), Rational(-11), Rational(-3)});
    CHECK(x == std::vector<Rational>{Rational(2), Rational(3), Rational(-1)});

    // nullspace of a rank-1 2x3 matrix
    Matrix<Rational> n(2, 3);
    n(0, 0) = 1; n(0, 1) = 2; n(0, 2) = 3;
    n(1, 0) = 2; n(1, 1) = 4; n(1, 2) = 6;
    const auto basis = nullspace(n);
    REQUIRE(basis.size() == 2);
    for (const auto &v : basis) {
        CHECK(v[0] + 2 * v[1] + 3 * v[2] == 0);
    }

    // characteristic polynomials (monic, via Faddeev-LeVerrier)
    Matrix<Rational> t(2, 2);
    t(0, 0) = 2; t(0, 1) = 1; t(1, 0) = 0; t(1, 1) = 3;
    CHECK(charpoly(t) == from_roots_list({Rational(2), Rational(3)}));

    // companion matrix of E^3 - 2E + 5
    Matrix<Rational> c(3, 3);
    c(1, 0) = 1; c(2, 1) = 1;
    c(0, 2) = -5; c(1, 2) = 2; c(2, 2) = 0;
    CHECK(charpoly(c) ==
          Poly(std::vector<Rational>{Rational(5), Rational(-2), Rational(0), Rational(1)}));
}

TEST_CASE("polynomial roots: exact extraction plus Aberth") {
    const Poly half = from_roots_list({Rational(1) / 2, Rational(1) / 2});
    const Poly p = half * from_roots_list({Rational(-3)}) *
                   Poly(std::vector<Rational>{Rational(-2), Rational(0), Rational(1)});
    const unsigned digits = 30;
    const auto roots = poly_roots(p, digits);
    REQUIRE(roots.size() == 4);

    precision_guard guard(40);
    const Real sqrt2("1.41421356237309504880168872420969807857");
    int exact_half = 0, exact_m3 = 0, inexact = 0;
    for (const auto &r : roots) {
        if (r.exact && r.exact_value == Rational(1) / 2) {
            CHECK(r.multiplicity == 2);
            ++exact_half;
        } else if (r.exact && r.exact_value == Rational(-3)) {
            CHECK(r.multiplicity == 1);
            ++exact_m3;
        } else {
            CHECK(!r.exact);
            CHECK(r.multiplicity == 1);
            CHECK(abs(abs(r.value.re) - sqrt2) < pow10(-25));
            CHECK(abs(r.value.im) < pow10(-25));
            ++inexact;
        }
    }
    CHECK(exact_half == 1);
    CHECK(exact_m3 == 1);
    CHECK(inexact == 2);
}

TEST_CASE("aberth handles clustered roots at scale") {
    // (x - 10^6)(x - 10^6 - 1)(x + 1/10^6): no rational-root shortcut when the
    // constant term's divisor set is capped, still converges
    precision_guard guard(50);
    const Poly p = from_roots_list(
        {Rational(1000000), Rational(1000001), Rational(-1) / 1000000});
    const auto rts = aberth_roots(p, 30);
    REQUIRE(rts.size() == 3);
    Real best(1);
    for (const auto &r : rts) {
        best = (std::min)(best, abs(r - Complex(Real(1000000))));
    }
    CHECK(best < pow10(-20));
}
