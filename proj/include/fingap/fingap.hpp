#pragma once

/** \file fingap.hpp
 *
 * Umbrella header: the full finite-gap apparatus of Heun's equation in
 * elliptic form (spectral polynomial, commuting operator, monodromy by
 * three routes, Bethe roots, Hermite-Krichever data), the quasi-solvable
 * sector of the BC_N Inozemtsev model, and the explicit A3-type commuting
 * operators, together with report emission and the acceptance suite.
 */

#include "a3.hpp"
#include "acceptance.hpp"
#include "bcn.hpp"
#include "bethe.hpp"
#include "complex.hpp"
#include "coupling.hpp"
#include "diffop.hpp"
#include "errors.hpp"
#include "halfpower.hpp"
#include "hermite.hpp"
#include "io_json.hpp"
#include "lattice.hpp"
#include "linalg.hpp"
#include "monodromy.hpp"
#include "ode.hpp"
#include "polynomial.hpp"
#include "polyroots.hpp"
#include "quadrature.hpp"
#include "rational_function.hpp"
#include "scalar.hpp"
#include "spectral.hpp"
