// Command-line front end: every engine with reproducible file outputs.
//
// Subcommands: evolve, kernel (ho|mcell|walk|zk|ising), doubling,
// grassmann (det|quartic), susy-check, clock-shift,
// spectrum (heisenberg|tfim|fermionized|bogoliubov), propagate, control.
// Exit codes: 0 success, 1 engine error (named on stderr), 2 flag errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qca/bose.hpp"
#include "qca/ca.hpp"
#include "qca/grassmann.hpp"
#include "qca/io.hpp"
#include "qca/spin.hpp"
#include "qca/susy.hpp"
#include "qca/target.hpp"

namespace {

using namespace qca;

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<long long> parse_ints(const std::string& s) {
    std::vector<long long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
    return out;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
    Eigen::VectorXd out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
    return out;
}

Eigen::VectorXi to_veci(const std::vector<long long>& v) {
    Eigen::VectorXi out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = static_cast<int>(v[i]);
    return out;
}

struct EvolveOpts {
    std::string rule = "wave";
    double w = 0.0;
    int m = 1;
    int steps = 0;
    std::string init = "zero";
    unsigned long long seed = 1;
    std::string boundary = "periodic";
    std::string csv_path, pgm_path;
    std::string bfield = "0,0,1";
    bool coupling = false;
};

std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_rows(const EvolveOpts& o) {
    Eigen::VectorXd r0 = Eigen::VectorXd::Zero(o.m), r1 = Eigen::VectorXd::Zero(o.m);
    if (o.init == "zero") {
        // keep zeros
    } else if (o.init == "bump") {
        r0(o.m / 2) = 1.0;
        r1(o.m / 2) = 1.0;
    } else if (o.init == "random") {
        std::mt19937_64 rng(o.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int j = 0; j < o.m; ++j) r0(j) = u(rng);
        for (int j = 0; j < o.m; ++j) r1(j) = u(rng);
    } else {
        // literal rows "a,b,..;c,d,.." or "a,b" meaning the two rows of a 1-site chain
        auto semi = o.init.find(';');
        if (semi == std::string::npos) {
            auto vals = parse_doubles(o.init);
            if (o.m == 1 && vals.size() == 2) {
                r0(0) = vals[0];
                r1(0) = vals[1];
            } else if (static_cast<int>(vals.size()) == o.m) {
                r0 = to_vec(vals);
                r1 = r0;
            } else {
                throw ConfigError("initial row literal does not match --m");
            }
        } else {
            auto v0 = parse_doubles(o.init.substr(0, semi));
            auto v1 = parse_doubles(o.init.substr(semi + 1));
            if (static_cast<int>(v0.size()) != o.m || static_cast<int>(v1.size()) != o.m)
                throw ConfigError("initial row literal does not match --m");
            r0 = to_vec(v0);
            r1 = to_vec(v1);
        }
    }
    return {r0, r1};
}

int cmd_evolve(const EvolveOpts& o) {
    SpaceBoundary sb = o.boundary == "open" ? SpaceBoundary::open : SpaceBoundary::periodic;
    json out;
    out["rule"] = o.rule;
    out["m"] = o.m;
    out["steps"] = o.steps;
    if (o.rule == "spin") {
        auto b = parse_doubles(o.bfield);
        if (b.size() != 3) throw ConfigError("--b needs three components");
        RuleSpec rule = RuleSpec::SpinPrecession(Eigen::Vector3d(b[0], b[1], b[2]), o.coupling);
        std::mt19937_64 rng(o.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Eigen::Matrix3Xd row0(3, o.m);
        for (int j = 0; j < o.m; ++j) {
            Eigen::Vector3d v(u(rng), u(rng), u(rng));
            row0.col(j) = v.normalized() * 0.5;
        }
        SpinHistory h = evolve_spin(rule, row0, seed_spin_row1(rule, row0, sb), o.steps, sb);
        if (!o.csv_path.empty()) atomic_write(o.csv_path, write_csv(h));
        out["rows"] = h.filled_rows();
    } else {
        RuleSpec rule = o.rule == "wave" ? RuleSpec::Wave() : RuleSpec::Harmonic(o.w);
        if (o.rule != "wave" && o.rule != "harmonic")
            throw ConfigError("unknown rule " + o.rule);
        auto [r0, r1] = initial_rows(o);
        FieldHistory h = evolve(rule, r0, r1, o.steps, sb);
        if (!o.csv_path.empty()) atomic_write(o.csv_path, write_csv(h));
        if (!o.pgm_path.empty()) atomic_write(o.pgm_path, render_pgm(h));
        out["rows"] = h.filled_rows;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace qca;
    CLI::App app{"lattice quantization toolkit for reversible cellular automata"};
    app.require_subcommand(1);

    // ---- evolve ----
    EvolveOpts ev;
    auto* evolve_cmd = app.add_subcommand("evolve", "run a classical automaton");
    evolve_cmd->add_option("--rule", ev.rule, "wave|harmonic|spin");
    evolve_cmd->add_option("--w", ev.w, "harmonic frequency W");
    evolve_cmd->add_option("--m", ev.m, "number of sites");
    evolve_cmd->add_option("--steps", ev.steps, "time steps to produce");
    evolve_cmd->add_option("--init", ev.init, "zero|bump|random|literal rows");
    evolve_cmd->add_option("--seed", ev.seed, "RNG seed for random init");
    evolve_cmd->add_option("--boundary", ev.boundary, "periodic|open");
    evolve_cmd->add_option("--csv", ev.csv_path, "write history CSV here");
    evolve_cmd->add_option("--pgm", ev.pgm_path, "write grayscale PGM here");
    evolve_cmd->add_option("--b", ev.bfield, "spin rule magnetic field bx,by,bz");
    evolve_cmd->add_flag("--coupling", ev.coupling, "enable neighbor coupling (spin rule)");

    // ---- kernel ----
    auto* kernel_cmd = app.add_subcommand("kernel", "transition amplitudes");
    kernel_cmd->require_subcommand(1);

    int kn = 4;
    double kphi = 0.7, kx0 = 0.0, kxn = 0.0;
    bool koracle = false;
    auto* kho = kernel_cmd->add_subcommand("ho", "discrete oscillator kernel");
    kho->add_option("--steps", kn, "time steps N")->required();
    kho->add_option("--phi", kphi, "per-step angle phi");
    kho->add_option("--x0", kx0, "initial endpoint");
    kho->add_option("--xn", kxn, "final endpoint");
    kho->add_flag("--oracle", koracle, "also evaluate by sequential Fresnel reduction");

    int mn = 2;
    std::string mrow0 = "0,0", mrown = "0,0";
    bool moracle = false;
    auto* kmc = kernel_cmd->add_subcommand("mcell", "mode-factorized lattice kernel");
    kmc->add_option("--steps", mn, "time steps N")->required();
    kmc->add_option("--row0", mrow0, "initial row, comma separated");
    kmc->add_option("--rown", mrown, "final row, comma separated");
    kmc->add_flag("--oracle", moracle, "also evaluate by direct reduction");

    long long wdelta = 0;
    double wt = 1.0;
    int wk = 0;
    long long wxi = 0, wxf = 0, wmmax = 0;
    auto* kwalk = kernel_cmd->add_subcommand("walk", "continuous-time walk amplitude");
    kwalk->add_option("--delta", wdelta, "displacement on Z");
    kwalk->add_option("--t", wt, "elapsed time")->required();
    kwalk->add_option("--k", wk, "cycle modulus (image sum when set)");
    kwalk->add_option("--xi", wxi, "initial site mod k");
    kwalk->add_option("--xf", wxf, "final site mod k");
    kwalk->add_option("--mmax", wmmax, "image truncation override");

    int zk_k = 2, zk_n = 2;
    std::string zk_row0 = "0,0", zk_rown = "0,0";
    auto* kzk = kernel_cmd->add_subcommand("zk", "discrete-target lattice amplitude");
    kzk->add_option("--k", zk_k, "target modulus")->required();
    kzk->add_option("--steps", zk_n, "time steps N")->required();
    kzk->add_option("--row0", zk_row0, "initial row");
    kzk->add_option("--rown", zk_rown, "final row");

    int is_n = 2;
    std::string is_row0 = "1,1", is_rown = "1,1";
    auto* kis = kernel_cmd->add_subcommand("ising", "Z2 spin lattice amplitude");
    kis->add_option("--steps", is_n, "time steps N")->required();
    kis->add_option("--row0", is_row0, "initial spins +-1");
    kis->add_option("--rown", is_rown, "final spins +-1");

    // ---- doubling ----
    double dr = 0.0;
    int ddim = 1, dgrid = 256;
    auto* doubling_cmd = app.add_subcommand("doubling", "inverse-propagator zero census");
    doubling_cmd->add_option("--r", dr, "Wilson parameter")->required();
    doubling_cmd->add_option("--dim", ddim, "1 or 2")->required();
    doubling_cmd->add_option("--grid", dgrid, "momentum scan resolution");

    // ---- grassmann ----
    auto* gr_cmd = app.add_subcommand("grassmann", "Berezin integrals");
    gr_cmd->require_subcommand(1);
    int gd_n = 4;
    double gd_w = 0.3, gd_r = 0.0;
    std::string gd_preset = "onecell";
    int gd_msites = 2;
    unsigned long long gd_seed = 1;
    auto* gdet = gr_cmd->add_subcommand("det", "Gaussian amplitude with brute-force residual");
    gdet->add_option("--preset", gd_preset, "onecell|mcell|random");
    gdet->add_option("--steps", gd_n, "time extent N");
    gdet->add_option("--m", gd_msites, "sites (mcell preset)");
    gdet->add_option("--w", gd_w, "mass W (onecell preset)");
    gdet->add_option("--r", gd_r, "Wilson parameter");
    gdet->add_option("--seed", gd_seed, "seed (random preset)");

    int gq_pairs = 3;
    double gq_g = 0.2;
    unsigned long long gq_seed = 1;
    auto* gq = gr_cmd->add_subcommand("quartic", "quartic amplitude and first-order check");
    gq->add_option("--pairs", gq_pairs, "conjugate pair count");
    gq->add_option("--g", gq_g, "quartic coupling");
    gq->add_option("--seed", gq_seed, "seed for the bilinear matrix");

    // ---- susy-check ----
    std::string sc_cells = "1";
    int sc_n = 4, sc_m = 4, sc_trials = 20;
    double sc_w = 0.0, sc_r = 0.0;
    unsigned long long sc_seed = 1;
    auto* sc = app.add_subcommand("susy-check", "variation of the supersymmetric action");
    sc->add_option("--cells", sc_cells, "1|m");
    sc->add_option("--n", sc_n, "time extent");
    sc->add_option("--m", sc_m, "sites (m-cell)");
    sc->add_option("--w", sc_w, "mass W (1-cell)");
    sc->add_option("--r", sc_r, "Wilson parameter");
    sc->add_option("--trials", sc_trials, "random bosonic configurations");
    sc->add_option("--seed", sc_seed, "RNG seed");

    // ---- clock-shift ----
    int cs_m = 4;
    auto* cs = app.add_subcommand("clock-shift", "clock and shift matrix identity");
    cs->add_option("--m", cs_m, "matrix dimension M")->required();

    // ---- spectrum ----
    auto* sp_cmd = app.add_subcommand("spectrum", "exact diagonalization spectra");
    sp_cmd->require_subcommand(1);
    int sp_m = 2;
    std::string sp_b = "0,0,0";
    double sp_bz = 1.0, sp_gamma = 0.5;
    std::string sp_boundary = "open";
    bool sp_bterm = false;
    std::string sp_out;
    auto* sph = sp_cmd->add_subcommand("heisenberg", "nearest-neighbor spin chain");
    sph->add_option("--m", sp_m, "sites")->required();
    sph->add_option("--b", sp_b, "field bx,by,bz");
    sph->add_option("--boundary", sp_boundary, "open|periodic");
    sph->add_option("--out", sp_out, "write sorted CSV here");
    auto* spt = sp_cmd->add_subcommand("tfim", "transverse-field chain");
    spt->add_option("--m", sp_m, "sites")->required();
    spt->add_option("--bz", sp_bz, "field");
    spt->add_option("--gamma", sp_gamma, "coupling");
    spt->add_option("--boundary", sp_boundary, "open|periodic");
    spt->add_option("--out", sp_out, "write sorted CSV here");
    auto* spf = sp_cmd->add_subcommand("fermionized", "Jordan-Wigner image of the chain");
    spf->add_option("--m", sp_m, "sites")->required();
    spf->add_option("--bz", sp_bz, "field");
    spf->add_option("--gamma", sp_gamma, "coupling");
    spf->add_option("--boundary", sp_boundary, "open|periodic");
    spf->add_flag("--boundary-term", sp_bterm, "include the parity wrap correction");
    spf->add_option("--out", sp_out, "write sorted CSV here");
    auto* spb = sp_cmd->add_subcommand("bogoliubov", "quadratic-form single-particle energies");
    spb->add_option("--m", sp_m, "sites")->required();
    spb->add_option("--bz", sp_bz, "field");
    spb->add_option("--gamma", sp_gamma, "coupling");
    spb->add_option("--boundary", sp_boundary, "open|periodic");
    spb->add_option("--out", sp_out, "write sorted CSV here");

    // ---- propagate ----
    std::string pr_model = "heisenberg";
    int pr_m = 2;
    std::string pr_b = "0,0,1";
    double pr_bz = 1.0, pr_gamma = 0.5, pr_t = 1.0;
    int pr_basis = 0;
    std::string pr_psi0, pr_out, pr_boundary = "open";
    auto* pr = app.add_subcommand("propagate", "evolve a state under e^{-iHT}");
    pr->add_option("--model", pr_model, "heisenberg|tfim");
    pr->add_option("--m", pr_m, "sites")->required();
    pr->add_option("--b", pr_b, "heisenberg field");
    pr->add_option("--bz", pr_bz, "tfim field");
    pr->add_option("--gamma", pr_gamma, "tfim coupling");
    pr->add_option("--boundary", pr_boundary, "open|periodic");
    pr->add_option("--t", pr_t, "elapsed time")->required();
    pr->add_option("--basis-state", pr_basis, "initial computational basis index");
    pr->add_option("--psi0", pr_psi0, "initial state re,im;re,im;...");
    pr->add_option("--out", pr_out, "write final state CSV here");

    // ---- control ----
    std::string ct_model = "spin", ct_schedule, ct_out;
    int ct_m = 2;
    bool ct_jw_compare = false;
    auto* ct = app.add_subcommand("control", "piecewise-constant control unitary");
    ct->add_option("--model", ct_model, "spin|fermionic");
    ct->add_option("--m", ct_m, "sites")->required();
    ct->add_option("--schedule", ct_schedule, "JSON schedule file")->required();
    ct->add_option("--out", ct_out, "write the unitary CSV here");
    ct->add_flag("--jw-compare", ct_jw_compare,
                 "spin model: compare against the mapped fermionic picture");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (*evolve_cmd) return cmd_evolve(ev);

        if (*kho) {
            HOParams params(kn, kphi);
            cplx closed = kernel_ho_closed(params, kx0, kxn);
            json out{{"steps", kn}, {"phi", fmt17(kphi)}, {"x0", fmt17(kx0)},
                     {"xn", fmt17(kxn)}, {"closed", amp_json(closed)}};
            if (koracle) {
                cplx oracle = kernel_ho_oracle(params, kx0, kxn);
                cplx gauge = boundary_gauge_phase(params.w(), kx0, kxn);
                out["oracle"] = amp_json(oracle);
                out["gauge_residual"] = fmt17(std::abs(oracle - closed * gauge));
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*kmc) {
            Eigen::VectorXd r0 = to_vec(parse_doubles(mrow0)), rn = to_vec(parse_doubles(mrown));
            cplx prod = kernel_mcell(mn, r0, rn);
            json out{{"steps", mn}, {"m", r0.size()}, {"mode_product", amp_json(prod)}};
            if (moracle) {
                cplx direct = kernel_mcell_direct(mn, r0, rn);
                out["direct"] = amp_json(direct);
                out["gauge_residual"] =
                    fmt17(std::abs(direct - prod * mcell_gauge_phase(r0, rn)));
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*kwalk) {
            json out{{"t", fmt17(wt)}};
            if (wk > 0) {
                cplx amp = walk_zk(wk, wxi, wxf, wt, wmmax);
                out["k"] = wk;
                out["xi"] = wxi;
                out["xf"] = wxf;
                out["amplitude"] = amp_json(amp);
                out["eigenbasis_residual"] =
                    fmt17(std::abs(amp - walk_zk_eigenbasis(wk, wxi, wxf, wt)));
            } else {
                out["delta"] = wdelta;
                out["amplitude"] = amp_json(walk_z(wdelta, wt));
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*kzk) {
            Eigen::VectorXi r0 = to_veci(parse_ints(zk_row0)), rn = to_veci(parse_ints(zk_rown));
            json out{{"k", zk_k}, {"steps", zk_n},
                     {"amplitude", amp_json(zk_amplitude(zk_k, zk_n, r0, rn))}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*kis) {
            Eigen::VectorXi r0 = to_veci(parse_ints(is_row0)), rn = to_veci(parse_ints(is_rown));
            json out{{"steps", is_n},
                     {"amplitude", amp_json(ising_amplitude(is_n, r0, rn))}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*doubling_cmd) {
            auto zeros = doubler_census(dr, ddim, dgrid);
            json out{{"r", fmt17(dr)}, {"dim", ddim}};
            json zs = json::array();
            for (const auto& z : zeros) {
                if (ddim == 1)
                    zs.push_back(z[0]);
                else
                    zs.push_back(json::array({z[0], z[1]}));
            }
            out["zeros"] = zs;
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*gdet) {
            FermiAction action = [&] {
                if (gd_preset == "onecell") return fermi_action_1cell(gd_n, gd_w, gd_r);
                if (gd_preset == "mcell") return fermi_action_mcell(gd_n, gd_msites, gd_r);
                if (gd_preset == "random") {
                    std::mt19937_64 rng(gd_seed);
                    std::uniform_real_distribution<double> u(-1.0, 1.0);
                    Eigen::MatrixXcd m(gd_n, gd_n);
                    for (int i = 0; i < gd_n; ++i)
                        for (int j = 0; j < gd_n; ++j) m(i, j) = cplx{u(rng), u(rng)};
                    return FermiAction::conjugate(m);
                }
                throw ConfigError("unknown preset " + gd_preset);
            }();
            cplx det = det_amplitude(action);
            json out{{"preset", gd_preset}, {"det", amp_json(det)}};
            if (action.n_gen <= 20)
                out["brute_force_residual"] = fmt17(std::abs(det - berezin_amplitude(action)));
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*gq) {
            std::mt19937_64 rng(gq_seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            Eigen::MatrixXcd m(gq_pairs, gq_pairs);
            for (int i = 0; i < gq_pairs; ++i)
                for (int j = 0; j < gq_pairs; ++j) m(i, j) = cplx{u(rng), u(rng)};
            FermiAction action = FermiAction::conjugate(m);
            action.quartic.push_back({action.gen_theta_bar(0), action.gen_theta(0),
                                      action.gen_theta_bar(1), action.gen_theta(1),
                                      cplx{gq_g, 0.0}});
            json out{{"pairs", gq_pairs}, {"g", fmt17(gq_g)},
                     {"amplitude", amp_json(quartic_amplitude(action))}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*sc) {
            std::mt19937_64 rng(sc_seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            double max_coeff = 0.0;
            for (int trial = 0; trial < sc_trials; ++trial) {
                if (sc_cells == "1") {
                    Eigen::VectorXd x(sc_n), p(sc_n);
                    for (int i = 0; i < sc_n; ++i) {
                        x(i) = u(rng);
                        p(i) = u(rng);
                    }
                    max_coeff = std::max(
                        max_coeff, susy_variation_1cell(x, p, sc_w, sc_r).max_abs_coeff());
                } else {
                    Eigen::MatrixXd x(sc_n, sc_m), p(sc_n, sc_m), l(sc_n, sc_m);
                    for (int i = 0; i < sc_n; ++i)
                        for (int j = 0; j < sc_m; ++j) {
                            x(i, j) = u(rng);
                            p(i, j) = u(rng);
                            l(i, j) = u(rng);
                        }
                    max_coeff =
                        std::max(max_coeff, susy_variation_mcell(x, p, l, sc_r).max_abs_coeff());
                }
            }
            json out{{"cells", sc_cells}, {"n", sc_n}, {"r", fmt17(sc_r)},
                     {"trials", sc_trials}, {"max_coeff", fmt17(max_coeff)}};
            if (sc_cells == "1") out["w"] = fmt17(sc_w);
            else out["m"] = sc_m;
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*cs) {
            auto [u, v] = clock_shift(cs_m);
            cplx omega = std::polar(1.0, 2.0 * std::numbers::pi / cs_m);
            double resid = (u * v - omega * v * u).cwiseAbs().maxCoeff();
            double unit = std::max(
                (u.adjoint() * u - Eigen::MatrixXcd::Identity(cs_m, cs_m)).cwiseAbs().maxCoeff(),
                (v.adjoint() * v - Eigen::MatrixXcd::Identity(cs_m, cs_m)).cwiseAbs().maxCoeff());
            json out{{"m", cs_m}, {"max_residual", fmt17(resid)}, {"unitarity", fmt17(unit)}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        auto emit_spectrum = [&](const Eigen::VectorXd& evals, json extra) {
            std::vector<double> sorted(evals.data(), evals.data() + evals.size());
            std::sort(sorted.begin(), sorted.end());
            json arr = json::array();
            std::string csv;
            for (double e : sorted) {
                arr.push_back(fmt17(e));
                csv += fmt17(e);
                csv += "\n";
            }
            extra["spectrum"] = arr;
            if (!sp_out.empty()) atomic_write(sp_out, csv);
            std::cout << extra.dump(2) << "\n";
            return 0;
        };
        ChainBoundary cb = sp_boundary == "periodic" ? ChainBoundary::periodic
                                                     : ChainBoundary::open;
        if (*sph) {
            auto b = parse_doubles(sp_b);
            OperatorMatrix h = heisenberg_h(sp_m, Eigen::Vector3d(b[0], b[1], b[2]), cb);
            Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
            return emit_spectrum(es.eigenvalues(), json{{"model", "heisenberg"}, {"m", sp_m}});
        }
        if (*spt) {
            Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(tfim_h(sp_m, sp_bz, sp_gamma, cb));
            return emit_spectrum(es.eigenvalues(), json{{"model", "tfim"}, {"m", sp_m}});
        }
        if (*spf) {
            OperatorMatrix hf = fermionized_tfim(sp_m, sp_bz, sp_gamma, cb, sp_bterm);
            Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(hf);
            Eigen::SelfAdjointEigenSolver<OperatorMatrix> et(tfim_h(sp_m, sp_bz, sp_gamma, cb));
            double resid = (es.eigenvalues() - et.eigenvalues()).cwiseAbs().maxCoeff();
            return emit_spectrum(es.eigenvalues(), json{{"model", "fermionized"},
                                                        {"m", sp_m},
                                                        {"tfim_spectrum_residual", fmt17(resid)}});
        }
        if (*spb) {
            auto res = bogoliubov_spectrum(sp_m, sp_bz, sp_gamma, cb);
            json extra{{"model", "bogoliubov"}, {"m", sp_m},
                       {"ground_energy", fmt17(res.ground_energy)}};
            return emit_spectrum(res.single_particle, extra);
        }

        if (*pr) {
            ChainBoundary prb = pr_boundary == "periodic" ? ChainBoundary::periodic
                                                          : ChainBoundary::open;
            OperatorMatrix h;
            if (pr_model == "heisenberg") {
                auto b = parse_doubles(pr_b);
                h = heisenberg_h(pr_m, Eigen::Vector3d(b[0], b[1], b[2]), prb);
            } else if (pr_model == "tfim") {
                h = tfim_h(pr_m, pr_bz, pr_gamma, prb);
            } else {
                throw ConfigError("unknown model " + pr_model);
            }
            long dim = h.rows();
            Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(dim);
            if (!pr_psi0.empty()) {
                std::stringstream ss(pr_psi0);
                std::string item;
                int idx = 0;
                while (std::getline(ss, item, ';') && idx < dim) {
                    auto parts = parse_doubles(item);
                    psi0(idx++) = cplx{parts[0], parts.size() > 1 ? parts[1] : 0.0};
                }
                psi0.normalize();
            } else {
                if (pr_basis < 0 || pr_basis >= dim)
                    throw ConfigError("basis state index out of range");
                psi0(pr_basis) = 1.0;
            }
            Eigen::VectorXcd psi = propagate(h, psi0, pr_t);
            double e0 = (psi0.adjoint() * h * psi0)(0).real();
            double e1 = (psi.adjoint() * h * psi)(0).real();
            json out{{"model", pr_model},
                     {"t", fmt17(pr_t)},
                     {"norm_drift", fmt17(std::abs(psi.norm() - 1.0))},
                     {"energy_drift", fmt17(std::abs(e1 - e0))}};
            if (!pr_out.empty()) {
                std::string csv;
                for (long i = 0; i < dim; ++i)
                    csv += fmt17(psi(i).real()) + std::string(",") + fmt17(psi(i).imag()) + "\n";
                atomic_write(pr_out, csv);
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*ct) {
            std::ifstream in(ct_schedule);
            if (!in) throw ConfigError("cannot read schedule " + ct_schedule);
            json sched = json::parse(in);
            auto vecd = [&](const json& j, int n) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
                for (int i = 0; i < n && i < static_cast<int>(j.size()); ++i)
                    v(i) = j[i].get<double>();
                return v;
            };
            auto matd = [&](const json& j, int n) {
                Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
                for (int i = 0; i < n && i < static_cast<int>(j.size()); ++i)
                    for (int k = 0; k < n && k < static_cast<int>(j[i].size()); ++k)
                        m(i, k) = j[i][k].get<double>();
                return m;
            };
            std::vector<SpinSegment> spin_segments;
            for (const auto& s : sched.at("segments")) {
                SpinSegment seg;
                seg.duration = s.at("duration").get<double>();
                seg.alpha_x = vecd(s.value("alpha_x", json::array()), ct_m);
                seg.beta_y = vecd(s.value("beta_y", json::array()), ct_m);
                seg.gamma_zz = matd(s.value("gamma_zz", json::array()), ct_m);
                seg.constant = s.value("constant", 0.0);
                spin_segments.push_back(seg);
            }
            OperatorMatrix u;
            if (ct_model == "spin") {
                u = control_unitary_spin(ct_m, spin_segments);
            } else if (ct_model == "fermionic") {
                u = control_unitary_fermi(ct_m, jw_map_schedule(spin_segments));
            } else {
                throw ConfigError("unknown model " + ct_model);
            }
            long dim = u.rows();
            double unit = (u.adjoint() * u - OperatorMatrix::Identity(dim, dim))
                              .cwiseAbs()
                              .maxCoeff();
            json out{{"model", ct_model}, {"m", ct_m}, {"dim", dim},
                     {"unitarity_residual", fmt17(unit)}};
            if (ct_jw_compare && ct_model == "spin") {
                OperatorMatrix uf = control_unitary_fermi(ct_m, jw_map_schedule(spin_segments));
                out["jw_picture_residual"] = fmt17((u - uf).cwiseAbs().maxCoeff());
            }
            if (!ct_out.empty()) {
                std::string csv;
                for (long i = 0; i < dim; ++i)
                    for (long j = 0; j < dim; ++j) {
                        csv += fmt17(u(i, j).real()) + std::string(",") + fmt17(u(i, j).imag());
                        csv += (j + 1 == dim) ? "\n" : ",";
                    }
                atomic_write(ct_out, csv);
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
