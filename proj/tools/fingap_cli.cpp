// fingap: command-line front end for the finite-gap apparatus of Heun's
// equation in elliptic form and the quasi-solvable BC_N sector.
//
// Subcommands: spectral, bands, monodromy, bethe, hk, bcn, verify-a3,
// selftest.  Reports are JSON by default (sorted keys, exact rationals as
// "p/q" strings, floating-point values as decimal strings at the working
// precision), CSV only for multiplier sweeps.  Identical configurations
// produce byte-identical reports.
//
// Exit codes: 0 success, 1 computational failure (structured JSON error on
// standard error), 2 usage error (message on standard error).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fingap/fingap.hpp>

using namespace fingap;

namespace {

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string command;
    std::vector<long> couplings;       // l0, l1, l2, l3
    std::vector<std::string> roots;    // e1, e2, e3 as exact rationals
    std::vector<std::string> periods;  // w1_re, w1_im, w3_re, w3_im
    unsigned precision = 30;
    std::string tol = "1e-8";
    std::string out;
    std::string format = "json";

    // subcommand-specific
    std::vector<std::string> energy;   // re [, im]
    int period_index = 1;
    std::string route = "ode";
    std::vector<std::string> sweep;    // start, stop, count (real E)
    std::size_t count = 10;
    int n_particles = 1;
    long pair_l = 0;
    std::size_t gauge_index = 0;
    std::string pair = "H,I12";
    int samples = 50;
};

std::string validate_couplings(const std::vector<long> &l) {
    if (l.size() != 4) {
        return "couplings must be non-negative integers (expected l0,l1,l2,l3)";
    }
    for (long v : l) {
        if (v < 0) {
            return "couplings must be non-negative integers";
        }
    }
    return "";
}

CouplingVector to_couplings(const std::vector<long> &l) {
    return CouplingVector(l.at(0), l.at(1), l.at(2), l.at(3));
}

Roots parse_roots(const std::vector<std::string> &parts) {
    if (parts.size() != 3) {
        throw Error("roots: expected e1,e2,e3");
    }
    Roots r;
    for (std::size_t i = 0; i < 3; ++i) {
        try {
            r.e[i] = Rational(parts[i]);
        } catch (const std::exception &) {
            throw Error("roots: '" + parts[i] + "' is not an exact rational");
        }
    }
    return r;
}

Real parse_real(const std::string &s, const char *what) {
    try {
        return Real(s);
    } catch (const std::exception &) {
        throw Error(std::string(what) + ": '" + s + "' is not a number");
    }
}

Complex parse_complex(const std::vector<std::string> &parts, const char *what) {
    if (parts.empty() || parts.size() > 2) {
        throw Error(std::string(what) + ": expected re or re,im");
    }
    Complex z(parse_real(parts[0], what));
    if (parts.size() == 2) {
        z.im = parse_real(parts[1], what);
    }
    return z;
}

/// The lattice for the run: exact roots when available, periods otherwise.
struct LatticeSpec {
    std::optional<Roots> roots;
    Lattice lattice;

    static LatticeSpec from_config(const RunConfig &cfg) {
        if (!cfg.roots.empty() && !cfg.periods.empty()) {
            throw Error("give either --roots or --periods, not both");
        }
        if (!cfg.roots.empty()) {
            const Roots r = parse_roots(cfg.roots);
            return {r, Lattice::from_roots(r.e, cfg.precision)};
        }
        if (!cfg.periods.empty()) {
            if (cfg.periods.size() != 4) {
                throw Error("periods: expected w1_re,w1_im,w3_re,w3_im");
            }
            precision_guard guard(cfg.precision + 10);
            const Complex w1(parse_real(cfg.periods[0], "periods"),
                             parse_real(cfg.periods[1], "periods"));
            const Complex w3(parse_real(cfg.periods[2], "periods"),
                             parse_real(cfg.periods[3], "periods"));
            return {std::nullopt, Lattice::from_periods(w1, w3, cfg.precision)};
        }
        throw Error("a lattice is required: give --roots e1,e2,e3 "
                    "or --periods w1_re,w1_im,w3_re,w3_im");
    }

    const Roots &exact_roots(const char *need) const {
        if (!roots) {
            throw Error(std::string(need) + " requires exact roots "
                                            "(--roots e1,e2,e3)");
        }
        return *roots;
    }
};

void write_output(const RunConfig &cfg, const Report &report) {
    const std::string bytes = emit_report(report, cfg.format);
    if (cfg.out.empty()) {
        std::cout << bytes;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
        throw Error("cannot open output file '" + cfg.out + "'");
    }
    f << bytes;
}

// ---------------------------------------------------------------------------
// subcommand handlers
// ---------------------------------------------------------------------------

void run_spectral(const RunConfig &cfg) {
    const LatticeSpec spec = LatticeSpec::from_config(cfg);
    const Roots &roots = spec.exact_roots("spectral");
    const SpectralData s = spectral_data(roots, to_couplings(cfg.couplings));
    write_output(cfg, report_spectral(roots, s));
}

void run_bands(const RunConfig &cfg) {
    const LatticeSpec spec = LatticeSpec::from_config(cfg);
    const Roots &roots = spec.exact_roots("bands");
    const SpectralData s = spectral_data(roots, to_couplings(cfg.couplings));
    const auto edges = band_edges(s.Q, spec.lattice, cfg.precision);
    write_output(cfg, report_band_edges(roots, s, edges, cfg.precision));
}

MonodromyResult monodromy_by_route(const std::string &route,
                                   const CouplingVector &l,
                                   const LatticeSpec &spec, const Complex &E,
                                   int k) {
    if (route == "ode") {
        return monodromy_ode(l, spec.lattice, E, k);
    }
    if (route == "integral") {
        const SpectralData s =
            spectral_data(spec.exact_roots("the integral route"), l);
        const Complex e0 = nearest_base_energy(s, spec.lattice, E);
        return monodromy_integral(s, spec.lattice, E, k, e0);
    }
    if (route == "bethe") {
        // solve the Bethe system and use the family member nearest to E;
        // the reported energy is the solved one
        const auto family = bethe_sample_family(l, spec.lattice, 12);
        if (family.empty()) {
            throw Error("bethe route: no solvable sample energies");
        }
        std::size_t best = 0;
        precision_guard guard(spec.lattice.work_digits());
        for (std::size_t i = 1; i < family.size(); ++i) {
            if (fingap::abs(family[i].E - E) < fingap::abs(family[best].E - E)) {
                best = i;
            }
        }
        return bethe_monodromy(l, spec.lattice, family[best], k);
    }
    throw Error("unknown route '" + route + "' (integral, bethe, ode)");
}

void run_monodromy(const RunConfig &cfg) {
    const LatticeSpec spec = LatticeSpec::from_config(cfg);
    const CouplingVector l = to_couplings(cfg.couplings);
    const int k = cfg.period_index;
    if (k != 1 && k != 3) {
        throw Error("period index must be 1 or 3");
    }
    if (!cfg.sweep.empty()) {
        if (cfg.sweep.size() != 3) {
            throw Error("sweep: expected start,stop,count");
        }
        precision_guard guard(spec.lattice.work_digits());
        const Real a = parse_real(cfg.sweep[0], "sweep");
        const Real b = parse_real(cfg.sweep[1], "sweep");
        long n = 0;
        try {
            n = std::stol(cfg.sweep[2]);
        } catch (const std::exception &) {
            throw Error("sweep: count is not an integer");
        }
        if (n < 2) {
            throw Error("sweep: count must be at least 2");
        }
        std::vector<SweepRow> rows;
        for (long i = 0; i < n; ++i) {
            const Complex E(a + (b - a) * Real(i) / Real(n - 1));
            const MonodromyResult m =
                monodromy_by_route(cfg.route, l, spec, E, k);
            rows.push_back({E, m.multiplier, route_name(m.route)});
        }
        write_output(cfg, report_sweep(rows, cfg.precision));
        return;
    }
    if (cfg.energy.empty()) {
        throw Error("monodromy requires --energy or --sweep");
    }
    precision_guard guard(spec.lattice.work_digits());
    const Complex E = parse_complex(cfg.energy, "energy");
    const MonodromyResult m = monodromy_by_route(cfg.route, l, spec, E, k);
    write_output(cfg, report_monodromy(m, E, cfg.precision));
}

void run_bethe(const RunConfig &cfg) {
    const LatticeSpec spec = LatticeSpec::from_config(cfg);
    const CouplingVector l = to_couplings(cfg.couplings);
    const auto family = bethe_sample_family(l, spec.lattice, cfg.count);
    json members = json::array();
    for (const BetheConfig &member : family) {
        members.push_back(report_bethe(member, cfg.precision).data);
    }
    Report rep;
    rep.data = json{{"couplings", io_couplings(l)}, {"members", members}};
    write_output(cfg, rep);
}

void run_hk(const RunConfig &cfg) {
    const LatticeSpec spec = LatticeSpec::from_config(cfg);
    const Roots &roots = spec.exact_roots("hk");
    if (cfg.energy.empty()) {
        throw Error("hk requires --energy");
    }
    const SpectralData s = spectral_data(roots, to_couplings(cfg.couplings));
    precision_guard guard(spec.lattice.work_digits());
    const Complex E = parse_complex(cfg.energy, "energy");
    const HkParams hk = hk_example_params(s, spec.lattice, E);
    write_output(cfg, report_hk(hk, E, cfg.precision));
}

void run_bcn(const RunConfig &cfg) {
    const LatticeSpec spec = LatticeSpec::from_config(cfg);
    const Roots &roots = spec.exact_roots("bcn");
    const CouplingVector li = to_couplings(cfg.couplings);
    const auto gauges = admissible_gauges(cfg.n_particles, cfg.pair_l, li);
    if (gauges.empty()) {
        throw NotQuasiSolvable("no admissible gauge for these couplings");
    }
    if (cfg.gauge_index >= gauges.size()) {
        throw Error("gauge index out of range: " +
                    std::to_string(gauges.size()) + " admissible gauges");
    }
    const BCNMatrix m = bcn_matrix(cfg.n_particles, cfg.pair_l, li,
                                   gauges[cfg.gauge_index], roots);
    const BCNSpectra s = bcn_spectra(m, cfg.precision);
    write_output(cfg, report_bcn(m, s, cfg.precision));
}

void run_verify_a3(const RunConfig &cfg) {
    const LatticeSpec spec = LatticeSpec::from_config(cfg);
    const Roots &roots = spec.exact_roots("verify-a3");
    const A3Operators ops = build_a3_operators(roots);
    const auto pick = [&](const std::string &name) -> const PairVarOp & {
        if (name == "H") return ops.h;
        if (name == "P1") return ops.p1;
        if (name == "P3") return ops.p3;
        if (name == "I12") return ops.i12;
        if (name == "I23") return ops.i23;
        if (name == "I31") return ops.i31;
        throw Error("unknown operator '" + name +
                    "' (H, P1, P3, I12, I23, I31)");
    };
    const auto comma = cfg.pair.find(',');
    if (comma == std::string::npos) {
        throw Error("pair: expected X,Y such as H,I12");
    }
    const PairVarOp &x = pick(cfg.pair.substr(0, comma));
    const PairVarOp &y = pick(cfg.pair.substr(comma + 1));
    const CommutatorReport r = commutator_residual(
        x, y, roots, spec.lattice, cfg.samples, cfg.pair);
    write_output(cfg, report_a3(r));
}

} // namespace

int main(int argc, char **argv) {
    RunConfig cfg;

    CLI::App app{
        "fingap: the finite-gap apparatus of Heun's equation in elliptic "
        "form - spectral polynomial, commuting operator, monodromy, Bethe "
        "roots, Hermite-Krichever data, the quasi-solvable BC_N sector, "
        "and the A3 commuting operators"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "configuration file; flags live in a [subcommand] "
                   "section and command-line flags win on conflict");

    const auto add_common = [&](CLI::App *sub, bool needs_couplings) {
        auto *c = sub->add_option("--couplings", cfg.couplings,
                                  "coupling integers l0,l1,l2,l3")
                      ->delimiter(',')
                      ->expected(4);
        if (needs_couplings) {
            c->required();
        }
        sub->add_option("--roots", cfg.roots,
                        "exact roots e1,e2,e3 (rationals summing to zero)")
            ->delimiter(',')
            ->expected(3);
        sub->add_option("--periods", cfg.periods,
                        "half periods w1_re,w1_im,w3_re,w3_im")
            ->delimiter(',')
            ->expected(4);
        sub->add_option("--precision", cfg.precision,
                        "working precision in decimal digits")
            ->envname("FINGAP_PRECISION")
            ->capture_default_str();
        sub->add_option("--tol", cfg.tol, "tolerance for numeric checks")
            ->capture_default_str();
        sub->add_option("--out", cfg.out, "output path (default: stdout)");
        sub->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
    };

    CLI::App *spectral = app.add_subcommand(
        "spectral", "exact spectral data: A, Q, Xi, and the period data");
    add_common(spectral, true);

    CLI::App *bands = app.add_subcommand(
        "bands", "band edges: the zeros of Q on a rectangular lattice");
    add_common(bands, true);

    CLI::App *monodromy = app.add_subcommand(
        "monodromy", "the multiplier of Lambda under x -> x + 2 w_k");
    add_common(monodromy, true);
    monodromy->add_option("--energy", cfg.energy, "energy E as re or re,im")
        ->delimiter(',');
    monodromy->add_option("--period", cfg.period_index, "period index (1 or 3)")
        ->capture_default_str();
    monodromy
        ->add_option("--route", cfg.route,
                     "integral | bethe | ode (bethe snaps to the nearest "
                     "solvable sample energy)")
        ->check(CLI::IsMember({"integral", "bethe", "ode"}))
        ->capture_default_str();
    monodromy
        ->add_option("--sweep", cfg.sweep,
                     "real-energy sweep start,stop,count (CSV-capable)")
        ->delimiter(',')
        ->expected(3);

    CLI::App *bethe = app.add_subcommand(
        "bethe", "solve the Bethe system on a family of sample energies");
    add_common(bethe, true);
    bethe->add_option("--count", cfg.count, "number of family members")
        ->capture_default_str();

    CLI::App *hk = app.add_subcommand(
        "hk", "Hermite-Krichever data at an energy (closed forms, l0 = 2)");
    add_common(hk, true);
    hk->add_option("--energy", cfg.energy, "energy E as re or re,im")
        ->delimiter(',');

    CLI::App *bcn = app.add_subcommand(
        "bcn", "quasi-solvable sector of the BC_N Inozemtsev model");
    add_common(bcn, true);
    bcn->add_option("--n", cfg.n_particles, "number of particles")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bcn->add_option("--pair-l", cfg.pair_l, "pair coupling integer l")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    bcn->add_option("--gauge", cfg.gauge_index,
                    "index into the admissible gauges (deterministic order)")
        ->capture_default_str();

    CLI::App *verify_a3 = app.add_subcommand(
        "verify-a3", "numeric commutator residuals of the A3 operators");
    verify_a3->add_option("--pair", cfg.pair, "operator pair, e.g. H,I12")
        ->capture_default_str();
    verify_a3->add_option("--samples", cfg.samples, "number of sample points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_common(verify_a3, false);

    CLI::App *selftest = app.add_subcommand(
        "selftest", "run the full acceptance suite (nonzero exit on failure)");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e); // help to stdout; errors to stderr
        return code == 0 ? 0 : 2;
    }

    if (!cfg.couplings.empty()) {
        const std::string msg = validate_couplings(cfg.couplings);
        if (!msg.empty()) {
            std::cerr << "--couplings: " << msg << "\n";
            return 2;
        }
    }

    try {
        if (spectral->parsed()) {
            cfg.command = "spectral";
            run_spectral(cfg);
        } else if (bands->parsed()) {
            cfg.command = "bands";
            run_bands(cfg);
        } else if (monodromy->parsed()) {
            cfg.command = "monodromy";
            run_monodromy(cfg);
        } else if (bethe->parsed()) {
            cfg.command = "bethe";
            run_bethe(cfg);
        } else if (hk->parsed()) {
            cfg.command = "hk";
            run_hk(cfg);
        } else if (bcn->parsed()) {
            cfg.command = "bcn";
            run_bcn(cfg);
        } else if (verify_a3->parsed()) {
            cfg.command = "verify-a3";
            run_verify_a3(cfg);
        } else if (selftest->parsed()) {
            cfg.command = "selftest";
            return run_acceptance(std::cout) == 0 ? 0 : 1;
        }
        return 0;
    } catch (const std::exception &e) {
        const json err{{"error", json{{"message", e.what()}}}};
        std::cerr << err.dump(2) << "\n";
        return 1;
    }
}
