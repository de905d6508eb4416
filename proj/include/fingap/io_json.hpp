#pragma once

/** \file io_json.hpp
 *
 * Report emission.  Every module result serializes to JSON with sorted
 * keys, exact rationals as "p/q" strings, and floating-point data as
 * {re, im} decimal strings at the working precision, so that identical
 * inputs produce byte-identical reports.  CSV output exists only for
 * multiplier sweeps (plot data) with the fixed header
 * `E_re,E_im,B_re,B_im,route`; requesting CSV for anything else throws
 * UnsupportedFormat.
 */

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "a3.hpp"
#include "bcn.hpp"
#include "bethe.hpp"
#include "hermite.hpp"
#include "monodromy.hpp"
#include "spectral.hpp"

namespace fingap {

using nlohmann::json;

// ---------------------------------------------------------------------------
// leaf formatting
// ---------------------------------------------------------------------------

/// Exact rational as "p/q", denominator always spelled out ("3" -> "3/1").
inline std::string io_rational(const Rational &r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

/// Real number as a decimal string with the given number of digits.
inline std::string io_real(const Real &x, unsigned digits10) {
    return x.str(static_cast<std::streamsize>(digits10),
                 std::ios_base::scientific);
}

inline json io_complex(const Complex &z, unsigned digits10) {
    return json{{"im", io_real(z.im, digits10)}, {"re", io_real(z.re, digits10)}};
}

/// Polynomial as the ascending list of its coefficients ("0/1", "1/1" = E).
inline json io_poly(const Polynomial<Rational> &p) {
    json a = json::array();
    const long d = p.degree();
    if (d < 0) {
        a.push_back(io_rational(Rational(0)));
        return a;
    }
    for (long j = 0; j <= d; ++j) {
        a.push_back(io_rational(p[static_cast<std::size_t>(j)]));
    }
    return a;
}

inline json io_couplings(const CouplingVector &l) {
    return json{l[0], l[1], l[2], l[3]};
}

inline json io_roots(const Roots &roots) {
    json a = json::array();
    for (const Rational &e : roots.e) {
        a.push_back(io_rational(e));
    }
    return a;
}

inline json io_poly_roots(const std::vector<PolyRoot> &rs, unsigned digits10) {
    json a = json::array();
    for (const PolyRoot &r : rs) {
        json e = io_complex(r.value, digits10);
        e["multiplicity"] = r.multiplicity;
        if (r.exact) {
            e["exact"] = io_rational(r.exact_value);
        }
        a.push_back(e);
    }
    return a;
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

/** A serialized result: JSON always, CSV only when the result is a sweep.
 */
struct Report {
    json data;
    std::optional<std::string> csv;
};

/// Renders a report in the requested format ("json" or "csv").
inline std::string emit_report(const Report &r, const std::string &format) {
    if (format == "json") {
        return r.data.dump(2) + "\n";
    }
    if (format == "csv") {
        if (!r.csv) {
            throw UnsupportedFormat(
                "emit_report: CSV output exists only for multiplier sweeps");
        }
        return *r.csv;
    }
    throw UnsupportedFormat("emit_report: unknown format '" + format + "'");
}

inline Report report_spectral(const Roots &roots, const SpectralData &s) {
    Report rep;
    rep.data = json{
        {"Q", io_poly(s.Q)},
        {"a", io_poly(s.a_poly)},
        {"c", io_poly(s.c_poly)},
        {"couplings", io_couplings(s.l)},
        {"genus", s.g},
        {"order", 2 * s.g + 1},
        {"roots", io_roots(roots)},
    };
    return rep;
}

inline Report report_band_edges(const Roots &roots, const SpectralData &s,
                                const std::vector<PolyRoot> &edges,
                                unsigned digits10) {
    Report rep;
    rep.data = json{
        {"Q", io_poly(s.Q)},
        {"band_edges", io_poly_roots(edges, digits10)},
        {"couplings", io_couplings(s.l)},
        {"genus", s.g},
        {"roots", io_roots(roots)},
    };
    return rep;
}

inline Report report_monodromy(const MonodromyResult &m, const Complex &E,
                               unsigned digits10) {
    json path = json::array();
    for (const Complex &w : m.path) {
        path.push_back(io_complex(w, digits10));
    }
    Report rep;
    rep.data = json{
        {"E", io_complex(E, digits10)},
        {"k", m.k},
        {"multiplier", io_complex(m.multiplier, digits10)},
        {"path", path},
        {"q_k", m.q_k},
        {"residuals", json{{"det_defect", io_real(m.det_defect, digits10)}}},
        {"route", route_name(m.route)},
    };
    return rep;
}

inline Report report_bethe(const BetheConfig &cfg, unsigned digits10) {
    json ts = json::array();
    for (const Complex &t : cfg.t) {
        ts.push_back(io_complex(t, digits10));
    }
    json res = json::array();
    for (const Real &r : cfg.residuals) {
        res.push_back(io_real(r, digits10));
    }
    Report rep;
    rep.data = json{
        {"E", io_complex(cfg.E, digits10)},
        {"c", io_complex(cfg.c, digits10)},
        {"residuals", res},
        {"t", ts},
    };
    return rep;
}

inline Report report_hk(const HkParams &hk, const Complex &E,
                        unsigned digits10) {
    Report rep;
    rep.data = json{
        {"E", io_complex(E, digits10)},
        {"alpha", io_complex(hk.alpha, digits10)},
        {"kappa", io_complex(hk.kappa, digits10)},
        {"match_defect", io_real(hk.match_defect, digits10)},
        {"multiplier_1", io_complex(hk.multiplier_1, digits10)},
        {"multiplier_3", io_complex(hk.multiplier_3, digits10)},
        {"wp_alpha", io_complex(hk.wp_alpha, digits10)},
    };
    return rep;
}

inline Report report_bcn(const BCNMatrix &m, const BCNSpectra &s,
                         unsigned digits10) {
    json matrix = json::array();
    for (std::size_t i = 0; i < m.m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.m.cols(); ++j) {
            row.push_back(io_rational(m.m(i, j)));
        }
        matrix.push_back(row);
    }
    json b = json::array();
    for (const Rational &bi : m.gauge.b) {
        b.push_back(io_rational(bi));
    }
    json eigs = json::array();
    for (const PolyRoot &r : s.eigenvalues) {
        eigs.push_back(io_complex(r.value, digits10));
    }
    Report rep;
    rep.data = json{
        {"N", m.n_particles},
        {"couplings", io_couplings(m.li)},
        {"dim", m.basis.size()},
        {"eigenvalues", eigs},
        {"gauge", json{{"a", m.gauge.a}, {"b", b}, {"d", m.d}}},
        {"l", m.l},
        {"matrix", matrix},
        {"reality", s.real},
        {"roots", io_roots(m.roots)},
    };
    return rep;
}

inline Report report_a3(const CommutatorReport &r) {
    Report rep;
    rep.data = json{
        {"max_residual", io_real(r.max_residual, r.precision)},
        {"pair", r.pair},
        {"precision", r.precision},
        {"samples", r.samples},
        {"symbolic_zero", r.symbolic_zero},
    };
    return rep;
}

// ---------------------------------------------------------------------------
// multiplier sweeps
// ---------------------------------------------------------------------------

struct SweepRow {
    Complex E;
    Complex B;
    std::string route;
};

/// Multiplier sweep: JSON rows plus the CSV rendering for plotting.
inline Report report_sweep(const std::vector<SweepRow> &rows,
                           unsigned digits10) {
    json a = json::array();
    std::string csv = "E_re,E_im,B_re,B_im,route\n";
    for (const SweepRow &r : rows) {
        a.push_back(json{
            {"B", io_complex(r.B, digits10)},
            {"E", io_complex(r.E, digits10)},
            {"route", r.route},
        });
        csv += io_real(r.E.re, digits10) + "," + io_real(r.E.im, digits10) +
               "," + io_real(r.B.re, digits10) + "," +
               io_real(r.B.im, digits10) + "," + r.route + "\n";
    }
    Report rep;
    rep.data = json{{"rows", a}};
    rep.csv = csv;
    return rep;
}

} // namespace fingap
