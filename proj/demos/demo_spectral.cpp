/** Exact finite-gap data for the elliptic-form Heun operator
 * H = -d^2/dx^2 + sum_i l_i (l_i+1) wp(x + w_i) with couplings l = (2,0,0,0)
 * over the root triple (e1, e2, e3) = (3, -1, -2): the commuting odd-order
 * operator A, the spectral polynomial Q with A^2 + Q(H) = 0, the function
 * Xi(x, E) with Lambda Lambda^* = Xi, the period data (a, c), and the band
 * edges of the two-gap spectrum.
 */
#include <iostream>
#include <string>

#include "fingap/spectral.hpp"

using namespace fingap;

static std::string poly_str(const Polynomial<Rational> &p, const std::string &var) {
    if (p.is_zero()) {
        return "0";
    }
    std::string out;
    for (long k = p.degree(); k >= 0; --k) {
        const Rational c = p[static_cast<std::size_t>(k)];
        if (c == 0) {
            continue;
        }
        if (!out.empty()) {
            out += (c > 0) ? " + " : " - ";
        } else if (c < 0) {
            out += "-";
        }
        const Rational a = c > 0 ? c : Rational(-c);
        if (a != 1 || k == 0) {
            out += format_rational(a);
        }
        if (k > 0) {
            if (a != 1) {
                out += " ";
            }
            out += var;
            if (k > 1) {
                out += "^" + std::to_string(k);
            }
        }
    }
    return out;
}

int main() {
    const Roots roots{{Rational(3), Rational(-1), Rational(-2)}};
    const CouplingVector l(2, 0, 0, 0);

    std::cout << "couplings l = (2,0,0,0), roots (e1,e2,e3) = (3,-1,-2)\n";
    std::cout << "g2 = " << format_rational(roots.g2())
              << ", g3 = " << format_rational(roots.g3()) << "\n\n";

    const SpectralData sd = spectral_data(roots, l);
    std::cout << "arithmetic genus g = " << sd.g << ", order of A = " << sd.A.order()
              << "\n";
    std::cout << "Q(E) = " << poly_str(sd.Q, "E") << "\n";
    std::cout << "Xi(x,E) = " << poly_str(sd.xi.c0, "E");
    for (const auto &[key, poly] : sd.xi.b) {
        std::cout << " + (" << poly_str(poly, "E") << ") wp(x+w" << key.first << ")";
        if (key.second > 1) {
            std::cout << "^" << key.second;
        }
    }
    std::cout << "\n";
    std::cout << "a(E) = " << poly_str(sd.a_poly, "E")
              << "   c(E) = " << poly_str(sd.c_poly, "E") << "\n\n";

    const InvariantSpaces inv = invariant_spaces(roots, l);
    std::cout << "quasi-solvable sectors (alpha : characteristic polynomial):\n";
    for (const auto &comp : inv.components) {
        std::cout << "  (" << comp.alpha[0] << "," << comp.alpha[1] << ","
                  << comp.alpha[2] << "," << comp.alpha[3]
                  << ") : " << poly_str(comp.charpoly, "E") << "\n";
    }
    std::cout << "product over sectors = Q: " << (inv.product == sd.Q ? "yes" : "NO")
              << "\n\n";

    const unsigned digits = 30;
    const Lattice lat = Lattice::from_roots(roots.e, digits);
    std::cout << "band edges (spectrum = two bands and a half line):\n";
    for (const auto &r : band_edges(sd.Q, lat, digits)) {
        precision_guard guard(digits);
        std::cout << "  " << format_real(r.value.re, digits)
                  << (r.exact ? "  (exact)" : "") << "\n";
    }
    return 0;
}
