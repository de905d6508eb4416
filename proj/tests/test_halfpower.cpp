#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fingap/diffop.hpp"
#include "fingap/lattice.hpp"

using namespace fingap;

using HP = HalfPower<Rational>;
using Op = DiffOp<Rational>;

static const Roots kRoots{{Rational(3), Rational(-1), Rational(-2)}};

TEST_CASE("roots invariants") {
    CHECK(kRoots.g2() == 28);
    CHECK(kRoots.g3() == 24);
}

TEST_CASE("half-power algebra is a model of the wp differential ring") {
    const HP one = HP::constant(kRoots, Rational(1));
    const HP z = HP::z_var(kRoots);
    const HP wpp = HP::wp_prime(kRoots);

    // wp'^2 = 4 z^3 - g2 z - g3, and the square is branch-free
    const HP rhs = Rational(4) * (z * z * z) - kRoots.g2() * z -
                   HP::constant(kRoots, kRoots.g3());
    CHECK(wpp * wpp == rhs);
    CHECK((wpp * wpp).is_plain());

    // d/dx z = wp'; d/dx wp' = 6 z^2 - g2/2
    CHECK(z.ddx() == wpp);
    CHECK(wpp.ddx() == Rational(6) * (z * z) - HP::constant(kRoots, kRoots.g2() / 2));

    // every half-period shift satisfies the same differential equation
    for (int i = 0; i <= 3; ++i) {
        const HP f = HP::wp_shift(kRoots, i);
        const HP lhs = f.ddx() * f.ddx();
        CHECK(lhs == Rational(4) * (f - HP::constant(kRoots, kRoots.e[0])) *
                         (f - HP::constant(kRoots, kRoots.e[1])) *
                         (f - HP::constant(kRoots, kRoots.e[2])));
    }
}

TEST_CASE("gauge factors: exponent bookkeeping") {
    const HP one = HP::constant(kRoots, Rational(1));
    const HP wpp = HP::wp_prime(kRoots);

    // alpha = (1,1,1) is wp'/2
    CHECK(Rational(2) * HP::phi_hat(kRoots, {1, 1, 1}) == wpp);

    // negative odd exponent: phi(-1,0,0)^2 (z - e1) = 1
    const HP pneg = HP::phi_hat(kRoots, {-1, 0, 0});
    CHECK(pneg * pneg * HP::sector(kRoots, 0, HP::RF::variable() - HP::RF(Rational(3))) ==
          one);

    // phi(3,-2,1)^2 = (z-e1)^3 (z-e2)^-2 (z-e3)
    const HP p3 = HP::phi_hat(kRoots, {3, -2, 1});
    const HP::RF l1 = HP::linear(kRoots, 0);
    const HP::RF l2 = HP::linear(kRoots, 1);
    const HP::RF l3 = HP::linear(kRoots, 2);
    CHECK(p3 * p3 == HP(kRoots, l1 * l1 * l1 * l3 / (l2 * l2)));
}

TEST_CASE("the algebra is a field") {
    const HP one = HP::constant(kRoots, Rational(1));
    const HP wpp = HP::wp_prime(kRoots);

    // inverse of an element spread over three sectors
    const HP f = Rational(2) * one +
                 Rational(3) * HP::sector(kRoots, 1, HP::RF(Rational(1))) +
                 HP::sector(kRoots, 6, HP::RF::variable());
    const HP g = f.inverse();
    CHECK(f * g == one);
    CHECK(one / f == g);
    CHECK(wpp * wpp.inverse() == one);

    // conjugations: the full flip negates wp', and they compose
    CHECK(wpp.conjugate(7) == -wpp);
    CHECK(wpp.conjugate(3) == wpp.conjugate(1).conjugate(2));
}

TEST_CASE("ddx is a derivation across sectors") {
    const HP f = HP::phi_hat(kRoots, {1, 0, 0});
    const HP g = HP::phi_hat(kRoots, {0, 1, 1});
    CHECK((f * g).ddx() == f.ddx() * g + f * g.ddx());
}

TEST_CASE("numeric evaluation is consistent with the lattice functions") {
    const unsigned digits = 30;
    precision_guard guard(40);
    const Lattice lat = Lattice::from_roots(kRoots.e, digits);
    const Complex x(Real("0.31"), Real("0.12"));
    const Real tol = pow10(-25);

    // z evaluates to wp, wp_prime factory to wp', and ddx matches: the
    // half-power branch convention ties prod_i (z - e_i)^(1/2) to wp'/2
    CHECK(abs(hp_eval(HP::z_var(kRoots), lat, x) - lat.wp(x)) < tol);
    CHECK(abs(hp_eval(HP::wp_prime(kRoots), lat, x) - lat.wp_prime(x)) < tol);
    for (int i = 1; i <= 3; ++i) {
        CHECK(abs(hp_eval(HP::wp_shift(kRoots, i), lat, x) -
                  lat.wp(x + lat.omega(i))) < tol);
    }

    // a fat element: value of f * g equals value(f) * value(g)
    const HP f = HP::phi_hat(kRoots, {1, 0, 1}) + HP::z_var(kRoots);
    const HP g = HP::phi_hat(kRoots, {0, 1, 0}).inverse();
    CHECK(abs(hp_eval(f * g, lat, x) - hp_eval(f, lat, x) * hp_eval(g, lat, x)) < tol);
}

TEST_CASE("differential operators compose by Leibniz") {
    const HP one = HP::constant(kRoots, Rational(1));
    const HP z = HP::z_var(kRoots);
    const HP wpp = HP::wp_prime(kRoots);
    const Op D = Op::ddx(kRoots);

    // [d, f] = f'
    CHECK(op_commutator(D, Op(kRoots, {z})) == Op(kRoots, {wpp}));
    // associativity
    const Op f_op(kRoots, {wpp});
    CHECK((D * D) * f_op == D * (D * f_op));
}

TEST_CASE("annihilators") {
    const HP one = HP::constant(kRoots, Rational(1));
    const HP z = HP::z_var(kRoots);
    const Op D = Op::ddx(kRoots);

    CHECK(annihilator<Rational>({one}) == D);

    const Op L = annihilator<Rational>({one, z});
    CHECK(L.order() == 2);
    CHECK(L.apply(one).is_zero());
    CHECK(L.apply(z).is_zero());

    CHECK_THROWS_AS(annihilator<Rational>({one, z, z + one}), DependentBasis);
}

TEST_CASE("one-gap pair and its right reduction") {
    const HP one = HP::constant(kRoots, Rational(1));
    const HP wp = HP::z_var(kRoots);
    const HP wpp = HP::wp_prime(kRoots);
    const Op D = Op::ddx(kRoots);
    const Op I = Op::identity(kRoots);

    const HP u = Rational(2) * wp;
    const Op H = Op::schroedinger(u);
    const Op A = D * D * D - (Rational(3) * wp) * D - Op(kRoots, {Rational(3) / 2 * wpp});

    CHECK(op_commutator(A, H).is_zero());

    // A^2 + Q(H) = 0 with Q(E) = (E + e1)(E + e2)(E + e3)
    const Op QH = H * H * H - (kRoots.g2() / 4) * H + (kRoots.g3() / 4) * I;
    CHECK(A * A + QH == Op::zero(kRoots));

    const auto rr = op_right_reduce(A, u, 1);
    REQUIRE(rr.a.size() == 2);
    CHECK(rr.a[0] == one);
    CHECK(rr.a[1] == wp);
    CHECK(rr.c[0] == 0);
    CHECK(rr.c[1] == 0);

    // the free case reduces against u = 0
    const auto free = op_right_reduce(D, HP::zero(kRoots), 0);
    CHECK(free.a.size() == 1);
    CHECK(free.a[0] == one);
    CHECK(free.c[0] == 0);
}
