#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "fingap/spectral.hpp"

using namespace fingap;

using HP = HalfPower<Rational>;
using Op = DiffOp<Rational>;
using Poly = Polynomial<Rational>;

static const Roots kRoots{{Rational(3), Rational(-1), Rational(-2)}};

static Poly from_roots_list(std::initializer_list<Rational> rs) {
    Poly p(Rational(1));
    for (const auto &r : rs) {
        p *= Poly(std::vector<Rational>{-r, Rational(1)});
    }
    return p;
}

TEST_CASE("arithmetic genus of the spectral curve") {
    CHECK(genus(CouplingVector(0, 0, 0, 0)) == 0);
    CHECK(genus(CouplingVector(1, 0, 0, 0)) == 1);
    CHECK(genus(CouplingVector(1, 1, 0, 0)) == 1);
    CHECK(genus(CouplingVector(1, 1, 1, 0)) == 2);
    CHECK(genus(CouplingVector(1, 1, 1, 1)) == 1);
    CHECK(genus(CouplingVector(2, 0, 0, 0)) == 2);
    CHECK(genus(CouplingVector(2, 1, 1, 0)) == 2);
    CHECK(genus(CouplingVector(3, 0, 0, 0)) == 3);
    // order of the couplings is irrelevant
    CHECK(genus(CouplingVector(0, 1, 1, 1)) == 2);
    CHECK(genus(CouplingVector(0, 0, 1, 2)) == 2);
}

TEST_CASE("quasi-solvable gauge exponents") {
    // l = (1,0,0,0): exactly three sectors, all of dimension 1
    const auto a1 = quasi_solvable_alphas(CouplingVector(1, 0, 0, 0));
    CHECK(a1.size() == 3);
    for (const auto &alpha : a1) {
        CHECK(alpha_degree(alpha) == 0);
        CHECK(alpha[0] == -1);
    }

    // l = (2,0,0,0): four sectors of dimensions 2,1,1,1 — total 5 = 2g+1
    const auto a2 = quasi_solvable_alphas(CouplingVector(2, 0, 0, 0));
    CHECK(a2.size() == 4);
    long total = 0;
    for (const auto &alpha : a2) {
        total += alpha_degree(alpha) + 1;
    }
    CHECK(total == 5);

    CHECK_THROWS_AS(alpha_degree(AlphaVector{2, 0, 0, 0}), NotQuasiSolvable);
    CHECK_THROWS_AS(alpha_degree(AlphaVector{-1, 0, 0, 0}), NotQuasiSolvable);
}

TEST_CASE("free case: A = d/dx") {
    CHECK(build_A(kRoots, CouplingVector(0, 0, 0, 0)) == Op::ddx(kRoots));
    const auto sd = spectral_data(kRoots, CouplingVector(0, 0, 0, 0));
    CHECK(sd.g == 0);
    CHECK(sd.Q == Poly(std::vector<Rational>{Rational(0), Rational(1)}));
    CHECK(sd.xi.c0 == Poly(Rational(1)));
    CHECK(sd.xi.b.empty());
    CHECK(sd.a_poly == Poly(Rational(0)));
    CHECK(sd.c_poly == Poly(Rational(1)));
}

TEST_CASE("one-gap chain l = (1,0,0,0)") {
    const auto sd = spectral_data(kRoots, CouplingVector(1, 0, 0, 0));
    CHECK(sd.g == 1);

    // Q(E) = (E + e1)(E + e2)(E + e3)
    CHECK(sd.Q == from_roots_list({Rational(-3), Rational(1), Rational(2)}));

    // Xi = E + wp(x)
    CHECK(sd.xi.c0 == Poly(std::vector<Rational>{Rational(0), Rational(1)}));
    REQUIRE(sd.xi.b.size() == 1);
    CHECK(sd.xi.b.at({0, 1}) == Poly(Rational(1)));

    // period data
    CHECK(sd.a_poly == Poly(Rational(1)));
    CHECK(sd.c_poly == Poly(std::vector<Rational>{Rational(0), Rational(1)}));

    // A = d^3 - 3 wp d - (3/2) wp'
    const Op D = Op::ddx(kRoots);
    const Op expected = D * D * D - (Rational(3) * HP::z_var(kRoots)) * D -
                        Op(kRoots, {Rational(3) / 2 * HP::wp_prime(kRoots)});
    CHECK(sd.A == expected);
}

TEST_CASE("two-gap chain l = (2,0,0,0): closed forms") {
    const auto sd = spectral_data(kRoots, CouplingVector(2, 0, 0, 0));
    CHECK(sd.g == 2);
    const Rational g2 = kRoots.g2();
    REQUIRE(g2 == 28);

    // A = d^5 - 15 wp d^3 - (45/2) wp' d^2 - 9 (5 wp^2 - (3/4) g2) d
    const HP wp = HP::z_var(kRoots);
    const HP wpp = HP::wp_prime(kRoots);
    const Op D = Op::ddx(kRoots);
    const Op D2 = D * D;
    const Op D3 = D2 * D;
    const Op D5 = D3 * D2;
    const Op expected_A =
        D5 - (Rational(15) * wp) * D3 - (Rational(45) / 2 * wpp) * D2 -
        (Rational(9) *
         (Rational(5) * (wp * wp) - HP::constant(kRoots, Rational(3) / 4 * g2))) *
            D;
    CHECK(sd.A == expected_A);

    // Q(E) = (E^2 - 3 g2)(E - 3 e1)(E - 3 e2)(E - 3 e3)
    const Poly expected_Q =
        Poly(std::vector<Rational>{-3 * g2, Rational(0), Rational(1)}) *
        from_roots_list({Rational(9), Rational(-3), Rational(-6)});
    CHECK(sd.Q == expected_Q);

    // Xi = (E^2 - (9/4) g2) + 3 E wp + 9 wp^2
    CHECK(sd.xi.c0 == Poly(std::vector<Rational>{Rational(-63), Rational(0), Rational(1)}));
    REQUIRE(sd.xi.b.size() == 2);
    CHECK(sd.xi.b.at({0, 1}) == Poly(std::vector<Rational>{Rational(0), Rational(3)}));
    CHECK(sd.xi.b.at({0, 2}) == Poly(Rational(9)));

    // a(E) = 3E, c(E) = E^2 - (3/2) g2
    CHECK(sd.a_poly == Poly(std::vector<Rational>{Rational(0), Rational(3)}));
    CHECK(sd.c_poly == Poly(std::vector<Rational>{Rational(-42), Rational(0), Rational(1)}));
}

TEST_CASE("invariant sectors multiply up to Q") {
    const auto sd = spectral_data(kRoots, CouplingVector(2, 0, 0, 0));
    const auto inv = invariant_spaces(kRoots, CouplingVector(2, 0, 0, 0));
    REQUIRE(inv.components.size() == 4);
    CHECK(inv.product == sd.Q);

    // the alpha = (-2,0,0,0) sector has H-matrix {{0, g2/2},{6, 0}} and
    // characteristic polynomial E^2 - 3 g2
    const auto &first = inv.components.front();
    CHECK(first.alpha == AlphaVector{-2, 0, 0, 0});
    const auto &m0 = first.space.h_matrix;
    REQUIRE(m0.rows() == 2);
    CHECK(m0(0, 0) == 0);
    CHECK(m0(0, 1) == kRoots.g2() / 2);
    CHECK(m0(1, 0) == 6);
    CHECK(m0(1, 1) == 0);
    CHECK(first.charpoly ==
          Poly(std::vector<Rational>{-3 * kRoots.g2(), Rational(0), Rational(1)}));
}

TEST_CASE("shifted couplings exercise all pole segments") {
    for (const auto &lv :
         {CouplingVector(1, 1, 0, 0), CouplingVector(1, 1, 1, 1),
          CouplingVector(0, 1, 0, 0), CouplingVector(0, 0, 2, 0),
          CouplingVector(1, 1, 1, 0)}) {
        CAPTURE(lv[0]);
        CAPTURE(lv[1]);
        CAPTURE(lv[2]);
        CAPTURE(lv[3]);
        const auto sd = spectral_data(kRoots, lv);
        CHECK(sd.Q.degree() == 2 * sd.g + 1);
        CHECK(sd.Q.leading() == 1);
        const auto inv = invariant_spaces(kRoots, lv);
        CHECK(inv.product == sd.Q);
    }
}

TEST_CASE("a second root triple") {
    // square-lattice roots (1, 0, -1): e2 = 0 stresses the binomial
    // bookkeeping in the partial-fraction reduction
    const Roots sq{{Rational(1), Rational(0), Rational(-1)}};
    const auto sd = spectral_data(sq, CouplingVector(1, 0, 0, 0));
    CHECK(sd.Q == from_roots_list({Rational(-1), Rational(0), Rational(1)}));
    const auto inv = invariant_spaces(sq, CouplingVector(1, 0, 0, 0));
    CHECK(inv.product == sd.Q);
}

TEST_CASE("band edges") {
    const unsigned digits = 30;
    precision_guard guard(40);
    const Lattice lat = Lattice::from_roots(kRoots.e, digits);

    SUBCASE("one-gap: all edges exact") {
        const auto sd = spectral_data(kRoots, CouplingVector(1, 0, 0, 0));
        const auto edges = band_edges(sd.Q, lat, digits);
        REQUIRE(edges.size() == 3);
        CHECK(edges[0].exact);
        CHECK(edges[0].exact_value == -3);
        CHECK(edges[1].exact_value == 1);
        CHECK(edges[2].exact_value == 2);
    }

    SUBCASE("two-gap: rational and quadratic edges interleave") {
        const auto sd = spectral_data(kRoots, CouplingVector(2, 0, 0, 0));
        const auto edges = band_edges(sd.Q, lat, digits);
        REQUIRE(edges.size() == 5);
        // -sqrt(84), -6, -3, 9, sqrt(84)
        const Real s84("9.165151389911680013176094387456016977969");
        CHECK(!edges[0].exact);
        CHECK(abs(edges[0].value.re + s84) < pow10(-25));
        CHECK(edges[1].exact_value == -6);
        CHECK(edges[2].exact_value == -3);
        CHECK(edges[3].exact_value == 9);
        CHECK(!edges[4].exact);
        CHECK(abs(edges[4].value.re - s84) < pow10(-25));
        for (std::size_t i = 1; i < edges.size(); ++i) {
            CHECK(edges[i - 1].value.re < edges[i].value.re);
        }
    }

    SUBCASE("rejects non-rectangular lattices") {
        const Lattice skew = Lattice::from_periods(
            Complex(Real(1) / 2), Complex(Real("0.3"), Real("0.4")), digits);
        const auto sd = spectral_data(kRoots, CouplingVector(1, 0, 0, 0));
        CHECK_THROWS_AS(band_edges(sd.Q, skew, digits), NonRectangular);
    }

    SUBCASE("rejects complex spectral roots") {
        const Poly bad(std::vector<Rational>{Rational(1), Rational(0), Rational(1)});
        CHECK_THROWS_AS(band_edges(bad, lat, digits), ComplexRoots);
    }
}

TEST_CASE("degenerate couplings are rejected cleanly") {
    CHECK_THROWS_AS(CouplingVector(-1, 0, 0, 0), Error);
}
