#pragma once

/** \file ode.hpp
 *
 * Adaptive Dormand-Prince 5(4) integration for small systems of complex
 * ODEs y' = f(t, y) over a real parameter interval, at arbitrary working
 * precision.  The classic tableau is embedded exactly (as rationals) and
 * realised at the current precision on entry.
 */

#include <array>
#include <vector>

#include "complex.hpp"
#include "errors.hpp"

namespace fingap {

struct OdeOptions {
    Real abs_tol = pow10(-10);  ///< per-component absolute tolerance
    Real rel_tol = pow10(-10);  ///< per-component relative tolerance
    unsigned max_steps = 100000;
    Real initial_step = 0;      ///< 0: pick (t1 - t0) / 100
};

struct OdeResult {
    std::vector<Complex> y;   ///< state at the endpoint
    unsigned steps = 0;       ///< accepted steps
    unsigned rejected = 0;    ///< rejected trial steps
};

namespace detail {

/// Dormand-Prince coefficients at the current working precision.
struct Dopri5Tableau {
    std::array<Real, 21> a;  // strictly lower triangle, rows 2..7
    std::array<Real, 7> c;
    std::array<Real, 7> b5;  // 5th-order weights (row 7 of a)
    std::array<Real, 7> b4;  // embedded 4th-order weights

    Dopri5Tableau() {
        auto q = [](long num, long den) { return Real(num) / Real(den); };
        c = {Real(0), q(1, 5), q(3, 10), q(4, 5), q(8, 9), Real(1), Real(1)};
        a = {q(1, 5),
             q(3, 40),        q(9, 40),
             q(44, 45),       q(-56, 15),      q(32, 9),
             q(19372, 6561),  q(-25360, 2187), q(64448, 6561),  q(-212, 729),
             q(9017, 3168),   q(-355, 33),     q(46732, 5247),  q(49, 176),
             q(-5103, 18656),
             q(35, 384),      Real(0),         q(500, 1113),    q(125, 192),
             q(-2187, 6784),  q(11, 84)};
        b5 = {q(35, 384),     Real(0),          q(500, 1113),     q(125, 192),
              q(-2187, 6784), q(11, 84),        Real(0)};
        b4 = {q(5179, 57600), Real(0),          q(7571, 16695),   q(393, 640),
              q(-92097, 339200), q(187, 2100),  q(1, 40)};
    }
};

} // namespace detail

/** Integrate y' = f(t, y) from t0 to t1 (t real, y complex vector).
 *
 * f is called as f(t, y, dydt) with dydt pre-sized.  Throws Divergence if
 * the controller drives the step size below representable resolution or
 * exhausts max_steps.  If steps_out is non-null the accepted mesh points
 * are appended to it.
 */
template <class F>
OdeResult ode_solve(const F &f, Real t0, Real t1, std::vector<Complex> y0,
                    const OdeOptions &opt = {},
                    std::vector<Real> *steps_out = nullptr) {
    const detail::Dopri5Tableau tab;
    const std::size_t n = y0.size();
    const Real direction = (t1 >= t0) ? Real(1) : Real(-1);
    const Real span = abs(t1 - t0);
    if (span == 0) {
        return {std::move(y0), 0, 0};
    }

    Real t = t0;
    Real h = (opt.initial_step > 0) ? opt.initial_step : span / 100;
    const Real h_min = span * pow10(-static_cast<long>(Real::default_precision()));

    std::array<std::vector<Complex>, 7> k;
    for (auto &ki : k) {
        ki.resize(n);
    }
    std::vector<Complex> y = std::move(y0), ytmp(n), ynew(n);
    f(t, y, k[0]);  // FSAL: k1 of the next step reuses k7 of the last

    OdeResult result;
    if (steps_out) {
        steps_out->push_back(t);
    }
    while (abs(t - t0) < span) {
        if (result.steps + result.rejected >= opt.max_steps) {
            throw Divergence("ode_solve: step budget exhausted");
        }
        if (h > abs(t1 - t)) {
            h = abs(t1 - t);
        }
        if (h < h_min) {
            throw Divergence("ode_solve: step size underflow");
        }
        // Stages 2..7; stage 7 evaluates at the 5th-order solution (FSAL).
        std::size_t ai = 0;
        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                Complex acc{};
                for (int j = 0; j < s; ++j) {
                    acc += Complex(tab.a[ai + j]) * k[j][i];
                }
                ytmp[i] = y[i] + Complex(direction * h) * acc;
            }
            ai += s;
            f(t + direction * h * tab.c[s], ytmp, k[s]);
        }
        // ytmp now holds the 5th-order solution (b5 == row 7 of a).
        ynew = ytmp;
        // Error estimate from the embedded 4th-order weights.
        Real err = 0;
        for (std::size_t i = 0; i < n; ++i) {
            Complex diff{};
            for (int s = 0; s < 7; ++s) {
                diff += Complex(tab.b5[s] - tab.b4[s]) * k[s][i];
            }
            const Real scale =
                opt.abs_tol +
                opt.rel_tol * std::max(fingap::abs(y[i]), fingap::abs(ynew[i]));
            const Real e = h * fingap::abs(diff) / scale;
            if (e > err) {
                err = e;
            }
        }
        if (err <= 1) {
            t += direction * h;
            y = ynew;
            k[0] = k[6];
            ++result.steps;
            if (steps_out) {
                steps_out->push_back(t);
            }
        } else {
            ++result.rejected;
        }
        Real factor = (err > 0) ? Real(Real(9) / 10 * pow(err, Real(-1) / 5))
                                : Real(5);
        if (factor < Real(1) / 5) {
            factor = Real(1) / 5;
        }
        if (factor > 5) {
            factor = 5;
        }
        h *= factor;
    }
    result.y = std::move(y);
    return result;
}

} // namespace fingap
