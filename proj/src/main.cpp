// srgeo — command-line front-end for the sub-Riemannian frame toolkit.
//
// Subcommands: brackets, growth, adapted-basis, nilpotentize, lift, length,
// shorten-corner, abnormal (family | check), distance, corner-gap, nsw-fit.
// Exit codes: 0 success, 1 domain error (bad input data, hypothesis failure,
// non-convergence), 2 usage error (unknown flag, missing argument).

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "srgeo/examples.hpp"
#include "srgeo/json_io.hpp"

namespace {

using srgeo::domain_error;
using srgeo::Frame;
using srgeo::HorizontalCurve;
using srgeo::MultiIndex;
using srgeo::Rational;
using srgeo::io::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open input file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw domain_error("invalid JSON in " + path + ": " + e.what());
    }
}

Frame read_frame(const std::string& path) { return srgeo::io::frame_from_json(read_json_file(path)); }

HorizontalCurve read_curve(const std::string& path) {
    return srgeo::io::curve_from_json(read_json_file(path));
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw domain_error("cannot open output file: " + path);
    out << text;
    if (!out) throw domain_error("failed to write output file: " + path);
}

void emit_json(const json& j, const std::string& path) { write_text(j.dump(2) + "\n", path); }

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) out.push_back(item);
    if (!text.empty() && text.back() == ',') out.emplace_back();
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const std::string& tok : split_csv(text)) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw domain_error("cannot parse " + what + " entry '" + tok + "' as a number");
        }
    }
    if (out.empty()) throw domain_error(what + " must be a non-empty comma-separated list");
    return out;
}

std::optional<std::vector<Rational>> try_parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    for (const std::string& tok : split_csv(text)) {
        try {
            out.push_back(srgeo::parse_rational(tok));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (double v : parse_double_list(text, what)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) throw domain_error(what + " entries must be integers");
        out.push_back(i);
    }
    return out;
}

MultiIndex parse_multiindex_arg(const std::string& text) {
    MultiIndex beta;
    beta.entries = parse_int_list(text, "--multiindex");
    return beta;
}

// Shared solver flags for the randomized subcommands; defaults mirror
// SolveConfig so certificates are reproducible without extra flags.
struct SolverFlags {
    srgeo::SolveConfig cfg;

    void attach(CLI::App* cmd, bool with_tol = true) {
        cmd->add_option("--steps", cfg.steps, "control intervals in the transcription");
        cmd->add_option("--restarts", cfg.restarts, "independent seeded restarts");
        cmd->add_option("--seed", cfg.seed, "RNG seed recorded in the output");
        cmd->add_option("--mu0", cfg.mu0, "initial endpoint penalty weight");
        cmd->add_option("--mu-factor", cfg.mu_factor, "penalty growth factor per stage");
        cmd->add_option("--mu-max", cfg.mu_max, "penalty weight cap");
        if (with_tol) cmd->add_option("--tol", cfg.tol, "endpoint tolerance");
        cmd->add_option("--iters", cfg.iters, "descent iterations per penalty stage");
    }
};

struct Cli {
    // brackets
    std::string br_frame, br_multiindex, br_out;
    // growth / adapted-basis
    std::string gr_frame, gr_point, gr_out;
    int gr_depth = srgeo::kDefaultBracketCap;
    std::string ab_frame, ab_point, ab_out;
    int ab_depth = srgeo::kDefaultBracketCap;
    // nilpotentize
    std::string np_frame, np_weights, np_out;
    // lift / length
    std::string lf_frame, lf_curve, lf_out;
    double lf_tol = srgeo::kDefaultFlowTol;
    std::string ln_frame, ln_curve, ln_out;
    // shorten-corner
    std::string sc_frame, sc_weights, sc_out, sc_competitor_out;
    double sc_tol = 5e-9;
    int sc_max_grid = 40;
    SolverFlags sc_solver;
    // abnormal
    double fam_b = 0.0, fam_c = 1.0, fam_d = 0.0, fam_t0 = 1.0, fam_t1 = 2.0;
    int fam_samples = 1000;
    std::string fam_out;
    std::string chk_curve, chk_out;
    // distance
    std::string di_frame, di_from, di_to, di_out, di_csv;
    SolverFlags di_solver;
    // corner-gap
    std::string cg_frame, cg_corner, cg_out, cg_csv;
    SolverFlags cg_solver;
    // nsw-fit
    std::string nf_frame, nf_multiindex, nf_point, nf_s, nf_out, nf_csv;
    SolverFlags nf_solver;
};

json abnormal_diagnostics(const HorizontalCurve& curve) {
    const srgeo::AbnormalResidualReport rep =
        srgeo::abnormal_ode_residual(curve, srgeo::dual_curve_from_states(curve));
    const std::vector<double> phi = srgeo::conserved_quantity(curve);
    double lo = phi.front(), hi = phi.front();
    for (double v : phi) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    json j = srgeo::io::abnormal_report_to_json(rep);
    j["phi_value"] = phi.front();
    j["phi_variation"] = hi - lo;
    return j;
}

void run_brackets(const Cli& a) {
    const Frame frame = read_frame(a.br_frame);
    const srgeo::VectorField f = srgeo::iterated_commutator(frame, parse_multiindex_arg(a.br_multiindex));
    emit_json(srgeo::io::vector_field_to_json(f), a.br_out);
}

void run_growth(const Cli& a) {
    const Frame frame = read_frame(a.gr_frame);
    srgeo::GrowthReport rep;
    if (auto exact = try_parse_rational_list(a.gr_point))
        rep = srgeo::growth_report(frame, *exact, a.gr_depth);
    else
        rep = srgeo::growth_report(frame, parse_double_list(a.gr_point, "--point"), a.gr_depth);
    emit_json(srgeo::io::growth_report_to_json(rep), a.gr_out);
}

void run_adapted_basis(const Cli& a) {
    const Frame frame = read_frame(a.ab_frame);
    srgeo::AdaptedBasis basis;
    if (auto exact = try_parse_rational_list(a.ab_point))
        basis = srgeo::adapted_basis(frame, *exact, a.ab_depth);
    else
        basis = srgeo::adapted_basis(frame, parse_double_list(a.ab_point, "--point"), a.ab_depth);
    emit_json(srgeo::io::adapted_basis_to_json(basis), a.ab_out);
}

void run_nilpotentize(const Cli& a) {
    const Frame frame = read_frame(a.np_frame);
    const srgeo::GradedStructure gs =
        srgeo::nilpotentize(frame, parse_int_list(a.np_weights, "--weights"));
    emit_json(srgeo::io::graded_structure_to_json(gs), a.np_out);
}

void run_lift(const Cli& a) {
    const Frame frame = read_frame(a.lf_frame);
    const HorizontalCurve input = read_curve(a.lf_curve);
    const HorizontalCurve lifted =
        srgeo::horizontal_lift(frame, input.control_curve(), input.base_point, a.lf_tol);
    emit_json(srgeo::io::curve_to_json(lifted), a.lf_out);
}

void run_length(const Cli& a) {
    const Frame frame = read_frame(a.ln_frame);
    const HorizontalCurve curve = read_curve(a.ln_curve);
    json j;
    j["length"] = srgeo::curve_length(frame, curve);
    emit_json(j, a.ln_out);
}

void run_shorten_corner(const Cli& a) {
    const Frame frame = read_frame(a.sc_frame);
    const srgeo::TriangularFrame tf(frame, parse_int_list(a.sc_weights, "--weights"));
    srgeo::ShortenOptions opt;
    opt.solver = a.sc_solver.cfg;
    opt.max_grid = a.sc_max_grid;
    const srgeo::ShorteningCertificate cert = srgeo::shorten(tf, a.sc_tol, opt);
    json j = srgeo::io::certificate_to_json(cert);
    j["seed"] = a.sc_solver.cfg.seed;
    emit_json(j, a.sc_out);
    if (!a.sc_competitor_out.empty())
        emit_json(srgeo::io::curve_to_json(cert.competitor), a.sc_competitor_out);
}

void run_abnormal_family(const Cli& a) {
    const HorizontalCurve curve =
        srgeo::closed_family_curve(a.fam_b, a.fam_c, a.fam_d, a.fam_t0, a.fam_t1, a.fam_samples);
    json j = abnormal_diagnostics(curve);
    j["curve"] = srgeo::io::curve_to_json(curve);
    emit_json(j, a.fam_out);
}

void run_abnormal_check(const Cli& a) {
    HorizontalCurve curve = read_curve(a.chk_curve);
    if (curve.base_point.size() != 4)
        throw domain_error("abnormal check: curve must live in the four-dimensional model space");
    if (!curve.has_states())
        srgeo::integrate_states(srgeo::examples::ag_frame(), curve, srgeo::kDefaultFlowTol);
    emit_json(abnormal_diagnostics(curve), a.chk_out);
}

void run_distance(const Cli& a) {
    const Frame frame = read_frame(a.di_frame);
    const std::vector<double> from = parse_double_list(a.di_from, "--from");
    const std::vector<double> to = parse_double_list(a.di_to, "--to");
    const srgeo::SolveResult res = srgeo::upper_bound_distance(frame, from, to, a.di_solver.cfg);
    emit_json(srgeo::io::solve_result_to_json(res, a.di_solver.cfg.seed), a.di_out);
    if (!a.di_csv.empty()) write_text(srgeo::io::history_to_csv(res.history), a.di_csv);
}

void run_corner_gap(const Cli& a) {
    const Frame frame = read_frame(a.cg_frame);
    const HorizontalCurve corner =
        a.cg_corner.empty() ? srgeo::model_corner(frame.dimension()) : read_curve(a.cg_corner);
    const srgeo::CornerGapReport rep = srgeo::corner_gap(frame, corner, a.cg_solver.cfg);
    json j;
    j["corner_length"] = rep.corner_length;
    j["margin"] = rep.margin;
    j["result"] = srgeo::io::solve_result_to_json(rep.result, a.cg_solver.cfg.seed);
    emit_json(j, a.cg_out);
    if (!a.cg_csv.empty()) write_text(srgeo::io::history_to_csv(rep.result.history), a.cg_csv);
}

void run_nsw_fit(const Cli& a) {
    const Frame frame = read_frame(a.nf_frame);
    const MultiIndex beta = parse_multiindex_arg(a.nf_multiindex);
    const std::vector<double> x = parse_double_list(a.nf_point, "--point");
    const std::vector<double> s_values = parse_double_list(a.nf_s, "--s");
    std::vector<double> lengths;
    const double slope = srgeo::nsw_exponent_fit(frame, beta, x, s_values, a.nf_solver.cfg, &lengths);
    json j;
    j["lengths"] = lengths;
    j["s_values"] = s_values;
    j["seed"] = a.nf_solver.cfg.seed;
    j["slope"] = slope;
    emit_json(j, a.nf_out);
    if (!a.nf_csv.empty()) write_text(srgeo::io::fit_to_csv(s_values, lengths), a.nf_csv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"srgeo: bracket analysis, nilpotent approximation, corner shortening,\n"
                 "and length minimization for polynomial sub-Riemannian frames"};
    app.set_version_flag("--version", "srgeo 1.0.0");
    app.require_subcommand(1);
    Cli a;

    CLI::App* br = app.add_subcommand("brackets", "iterated commutator X_beta as VectorField JSON");
    br->add_option("--frame", a.br_frame, "Frame JSON file")->required();
    br->add_option("--multiindex", a.br_multiindex, "comma-separated generator indices, e.g. 2,1")
        ->required();
    br->add_option("--output,-o", a.br_out, "output path (default stdout)");
    br->callback([&a] { run_brackets(a); });

    CLI::App* gr = app.add_subcommand("growth", "layer dimensions, step, and weights at a point");
    gr->add_option("--frame", a.gr_frame, "Frame JSON file")->required();
    gr->add_option("--point", a.gr_point, "comma-separated coordinates (rationals p/q give exact ranks)")
        ->required();
    gr->add_option("--max-depth", a.gr_depth, "bracket length cap");
    gr->add_option("--output,-o", a.gr_out, "output path (default stdout)");
    gr->callback([&a] { run_growth(a); });

    CLI::App* ab = app.add_subcommand("adapted-basis", "commutators adapted to the growth filtration");
    ab->add_option("--frame", a.ab_frame, "Frame JSON file")->required();
    ab->add_option("--point", a.ab_point, "comma-separated coordinates (rationals p/q give exact ranks)")
        ->required();
    ab->add_option("--max-depth", a.ab_depth, "bracket length cap");
    ab->add_option("--output,-o", a.ab_out, "output path (default stdout)");
    ab->callback([&a] { run_adapted_basis(a); });

    CLI::App* np = app.add_subcommand("nilpotentize", "graded limit frame under anisotropic dilations");
    np->add_option("--frame", a.np_frame, "Frame JSON file")->required();
    np->add_option("--weights", a.np_weights, "comma-separated coordinate weights, e.g. 1,1,2,5")
        ->required();
    np->add_option("--output,-o", a.np_out, "output path (default stdout)");
    np->callback([&a] { run_nilpotentize(a); });

    CLI::App* lf = app.add_subcommand("lift", "integrate a control curve to a horizontal curve");
    lf->add_option("--frame", a.lf_frame, "Frame JSON file")->required();
    lf->add_option("--curve", a.lf_curve, "Curve JSON file (controls + base point)")->required();
    lf->add_option("--tol", a.lf_tol, "integration tolerance");
    lf->add_option("--output,-o", a.lf_out, "output path (default stdout)");
    lf->callback([&a] { run_lift(a); });

    CLI::App* ln = app.add_subcommand("length", "metric length of a control curve");
    ln->add_option("--frame", a.ln_frame, "Frame JSON file")->required();
    ln->add_option("--curve", a.ln_curve, "Curve JSON file")->required();
    ln->add_option("--output,-o", a.ln_out, "output path (default stdout)");
    ln->callback([&a] { run_length(a); });

    CLI::App* sc = app.add_subcommand(
        "shorten-corner", "certified strict shortening of the model corner in a triangular frame");
    sc->add_option("--frame", a.sc_frame, "Frame JSON file (triangular polynomial frame)")->required();
    sc->add_option("--weights", a.sc_weights, "comma-separated coordinate weights")->required();
    sc->add_option("--tol", a.sc_tol, "endpoint tolerance for the certificate");
    sc->add_option("--max-grid", a.sc_max_grid, "largest dyadic exponent tried for epsilon");
    sc->add_option("--competitor-out", a.sc_competitor_out, "also write the competitor Curve JSON here");
    sc->add_option("--output,-o", a.sc_out, "certificate output path (default stdout)");
    a.sc_solver.cfg.restarts = 4;
    a.sc_solver.attach(sc, /*with_tol=*/false);  // the certificate --tol drives the base case
    sc->callback([&a] { run_shorten_corner(a); });

    CLI::App* an = app.add_subcommand("abnormal", "abnormal-extremal diagnostics for the model system");
    an->require_subcommand(1);
    CLI::App* fam = an->add_subcommand("family", "sample the closed-form abnormal family");
    fam->add_option("--b", a.fam_b, "linear coefficient");
    fam->add_option("--c", a.fam_c, "singular coefficient (non-zero for a genuine curve)");
    fam->add_option("--d", a.fam_d, "vertical offset");
    fam->add_option("--t0", a.fam_t0, "start time (same sign as --t1, non-zero)")->required();
    fam->add_option("--t1", a.fam_t1, "end time")->required();
    fam->add_option("--samples", a.fam_samples, "number of grid points");
    fam->add_option("--output,-o", a.fam_out, "output path (default stdout)");
    fam->callback([&a] { run_abnormal_family(a); });
    CLI::App* chk = an->add_subcommand("check", "residuals of the abnormal system along a curve");
    chk->add_option("--curve", a.chk_curve, "Curve JSON file (states integrated if absent)")->required();
    chk->add_option("--output,-o", a.chk_out, "output path (default stdout)");
    chk->callback([&a] { run_abnormal_check(a); });

    CLI::App* di = app.add_subcommand("distance", "upper bound on the sub-Riemannian distance");
    di->add_option("--frame", a.di_frame, "Frame JSON file")->required();
    di->add_option("--from", a.di_from, "comma-separated start point")->required();
    di->add_option("--to", a.di_to, "comma-separated end point")->required();
    di->add_option("--output,-o", a.di_out, "output path (default stdout)");
    di->add_option("--csv", a.di_csv, "write the convergence history CSV here");
    a.di_solver.attach(di);
    di->callback([&a] { run_distance(a); });

    CLI::App* cg = app.add_subcommand("corner-gap", "corner length minus best admissible length");
    cg->add_option("--frame", a.cg_frame, "Frame JSON file")->required();
    cg->add_option("--corner", a.cg_corner, "corner Curve JSON (default: model corner)");
    cg->add_option("--output,-o", a.cg_out, "output path (default stdout)");
    cg->add_option("--csv", a.cg_csv, "write the convergence history CSV here");
    a.cg_solver.attach(cg);
    cg->callback([&a] { run_corner_gap(a); });

    CLI::App* nf = app.add_subcommand("nsw-fit", "log-log slope of reachable length vs displacement");
    nf->add_option("--frame", a.nf_frame, "Frame JSON file")->required();
    nf->add_option("--multiindex", a.nf_multiindex, "bracket direction, e.g. 2,1,1,1")->required();
    nf->add_option("--point", a.nf_point, "comma-separated base point")->required();
    nf->add_option("--s", a.nf_s, "comma-separated displacement sizes spanning >= 2 decades")
        ->required();
    nf->add_option("--output,-o", a.nf_out, "output path (default stdout)");
    nf->add_option("--csv", a.nf_csv, "write the (s, length) table CSV here");
    a.nf_solver.cfg.iters = 0;  // pure path synthesis unless a solve budget is requested
    a.nf_solver.cfg.restarts = 0;
    a.nf_solver.attach(nf);
    nf->callback([&a] { run_nsw_fit(a); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
