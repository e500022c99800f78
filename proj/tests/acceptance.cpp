// Acceptance harness: nine go/no-go checks covering the symbolic bracket
// engine, graded dilations, lifts, the corner-shortening pipeline, the
// abnormal-extremal diagnostics, and the direct solver. Each check prints
// exactly one [PASS]/[FAIL] line with its pinned tolerances and time budget;
// the process exits 0 only if every check passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "srgeo/examples.hpp"
#include "srgeo/extremal.hpp"
#include "srgeo/shortener.hpp"

using namespace srgeo;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double inf_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

Rational random_coeff(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 3);
    int p = num(rng);
    if (p == 0) p = 1;
    return Rational(p, den(rng));
}

Polynomial random_polynomial(std::mt19937_64& rng, int dim) {
    Polynomial p(dim);
    std::uniform_int_distribution<int> deg(0, 3);
    std::uniform_int_distribution<int> axis(0, dim - 1);
    for (int t = 0; t < 4; ++t) {
        Exponents e(static_cast<std::size_t>(dim), 0);
        const int d = deg(rng);
        for (int k = 0; k < d; ++k) e[static_cast<std::size_t>(axis(rng))] += 1;
        p.add_term(e, random_coeff(rng));
    }
    return p;
}

VectorField random_field(std::mt19937_64& rng, int dim) {
    VectorField f(dim);
    for (int i = 0; i < dim; ++i) f.set_coeff(i, random_polynomial(rng, dim));
    return f;
}

ControlCurve random_controls(std::mt19937_64& rng, int m, int cells) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    ControlCurve cc;
    for (int k = 0; k <= cells; ++k) cc.times.push_back(static_cast<double>(k) / cells);
    for (int k = 0; k < cells; ++k) {
        std::vector<double> u(static_cast<std::size_t>(m));
        for (auto& v : u) v = val(rng);
        cc.controls.push_back(std::move(u));
    }
    return cc;
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion1() {
    Outcome out;
    std::mt19937_64 rng(1234321);
    for (int trial = 0; trial < 25; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 4);  // 2..5
        const VectorField X = random_field(rng, dim);
        const VectorField Y = random_field(rng, dim);
        const VectorField Z = random_field(rng, dim);
        const Polynomial f = random_polynomial(rng, dim);
        const Rational a = random_coeff(rng), b = random_coeff(rng);

        out.require(lie_bracket(X, Y) == -lie_bracket(Y, X), "antisymmetry");
        out.require(lie_bracket(X.scaled(a) + Y.scaled(b), Z) ==
                        lie_bracket(X, Z).scaled(a) + lie_bracket(Y, Z).scaled(b),
                    "bilinearity");
        out.require(lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) +
                            lie_bracket(Z, lie_bracket(X, Y)) ==
                        VectorField::zero(dim),
                    "jacobi");
        VectorField fY(dim), expect(dim);
        const VectorField br = lie_bracket(X, Y);
        const Polynomial Xf = X.apply(f);
        for (int i = 0; i < dim; ++i) {
            fY.set_coeff(i, f * Y.coeff(i));
            expect.set_coeff(i, f * br.coeff(i) + Xf * Y.coeff(i));
        }
        out.require(lie_bracket(X, fY) == expect, "derivation");
        if (!out.ok) break;
    }
    return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion2() {
    Outcome out;
    const Frame ag = examples::ag_frame();

    VectorField b12(4);
    b12.set_coeff(2, Polynomial::constant(4, Rational(-4)));
    b12.set_coeff(3, Polynomial::monomial(4, {1, 0, 1, 0}, Rational(4)));
    out.require(lie_bracket(ag.generator(1), ag.generator(2)) == b12, "[X1,X2]");

    VectorField b112(4);
    {
        Polynomial p(4);
        p.add_term({0, 0, 1, 0}, Rational(12));
        p.add_term({1, 1, 0, 0}, Rational(8));
        b112.set_coeff(3, p);
    }
    out.require(lie_bracket(ag.generator(1), lie_bracket(ag.generator(1), ag.generator(2))) == b112,
                "[X1,[X1,X2]]");

    VectorField top(4);
    top.set_coeff(3, Polynomial::constant(4, Rational(32)));
    out.require(iterated_commutator(ag, MultiIndex({2, 1, 1, 1, 2})) == top,
                "[X2,[X1,[X1,[X1,X2]]]]");

    const GrowthReport rep = growth_report(ag, std::vector<Rational>(4, Rational(0)), 6);
    out.require(rep.exact, "exact ranks");
    out.require(rep.layer_dims == std::vector<int>{2, 3, 3, 3, 4}, "growth vector");
    out.require(rep.weights == std::vector<int>{1, 1, 2, 5}, "weights");
    out.require(rep.growth_pause_condition, "growth-pause condition");
    out.require(!rep.layer_bracket_condition, "layer-bracket condition");
    return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion3() {
    Outcome out;
    const Frame ag = examples::ag_frame();
    const std::vector<int> w = examples::ag_weights();
    const std::vector<Rational> lams = {Rational(2), Rational(3), Rational(1, 2)};

    // Homogeneity: the limit frame is a fixed point of every dilation.
    const GradedStructure gs = nilpotentize(ag, w);
    for (int i = 1; i <= 2; ++i)
        for (const Rational& lam : lams)
            out.require(scale_field(gs.limit_frame.generator(i), w, 1, lam) ==
                            gs.limit_frame.generator(i),
                        "homogeneity");

    // Bracket preservation for every multi-index up to length 5.
    for (int len = 1; len <= 5 && out.ok; ++len)
        for (int mask = 0; mask < (1 << len) && out.ok; ++mask) {
            std::vector<int> entries;
            for (int k = 0; k < len; ++k) entries.push_back(((mask >> k) & 1) + 1);
            const MultiIndex beta(entries);
            for (const Rational& lam : lams)
                out.require(verify_bracket_preservation(ag, w, beta, lam), "bracket preservation");
            out.require(verify_bracket_preservation_at_infinity(ag, w, beta),
                        "bracket preservation at infinity");
        }

    // Residual decay along the dilation family for a perturbed frame.
    VectorField pert = ag.generator(1);
    pert.set_coeff(3, pert.coeff(3) + Polynomial::monomial(4, {0, 0, 0, 2}, Rational(1, 7)));
    const VectorField limit = limit_field(pert, w, 1);
    double prev = -1.0;
    for (const Rational& lam : {Rational(10), Rational(100), Rational(1000)}) {
        const VectorField diff = scale_field(pert, w, 1, lam) - limit;
        double size = 0.0;
        for (int i = 0; i < 4; ++i)
            for (const auto& [e, c] : diff.coeff(i).terms()) size += std::abs(static_cast<double>(c));
        if (prev >= 0.0) out.require(size < prev, "residual decay");
        prev = size;
    }
    return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion4() {
    Outcome out;
    std::mt19937_64 rng(424242);
    const struct {
        Frame frame;
        std::vector<int> weights;
    } cases[] = {{examples::heisenberg_frame(), examples::heisenberg_weights()},
                 {examples::ag_frame(), examples::ag_weights()}};
    double worst = 0.0;
    for (const auto& c : cases) {
        const int n = c.frame.dimension();
        for (int trial = 0; trial < 10; ++trial) {
            const ControlCurve cc = random_controls(rng, 2, 8);
            const std::vector<double> origin(static_cast<std::size_t>(n), 0.0);
            const HorizontalCurve full = horizontal_lift(c.frame, cc, origin, 1e-10);
            for (double eps : {0.5, 0.1}) {
                ControlCurve scaled = cc;
                for (auto& u : scaled.controls)
                    for (auto& v : u) v *= eps;
                const HorizontalCurve lifted = horizontal_lift(c.frame, scaled, origin, 1e-10);
                const HorizontalCurve dilated = dilate_curve(full, c.weights, eps);
                for (std::size_t k = 0; k < lifted.states.size(); ++k)
                    worst = std::max(worst, inf_dist(lifted.states[k], dilated.states[k]));
            }
        }
    }
    out.require(worst <= 1e-8, "equivariance gap " + fmt(worst) + " > 1e-8");
    return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion5() {
    Outcome out;

    const auto check_pipeline = [&out](const TriangularFrame& tf, const HorizontalCurve& sigma,
                                       double eps, const char* tag) {
        const Assembly lo = assemble_competitor(tf, sigma, eps);
        const Assembly hi = assemble_competitor(tf, sigma, eps / 2.0);
        const double len = curve_length(tf.frame(), lo.competitor);
        const double ledger = std::abs(len - (lo.corner_length - eps * lo.k)) / lo.corner_length;
        out.require(ledger <= 1e-12,
                    std::string(tag) + " ledger defect " + fmt(ledger) + " > 1e-12");
        const double hgap = std::abs(lo.h - hi.h) / std::max(std::abs(lo.h), 1e-300);
        out.require(hgap <= 1e-6,
                    std::string(tag) + " drift-rate mismatch " + fmt(hgap) + " > 1e-6");
    };

    const TriangularFrame ht(examples::heisenberg_frame(), examples::heisenberg_weights());
    check_pipeline(ht, shorten(project(ht), 1e-9).competitor, 0.25, "heisenberg");

    const TriangularFrame at(examples::ag_triangular_frame(), examples::ag_triangular_weights());
    ShortenOptions opt;
    opt.solver.restarts = 4;
    opt.solver.iters = 150;
    check_pipeline(at, shorten(project(at), 1e-7, opt).competitor, 1.0 / 16.0, "4d chart");
    return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion6(double* t_pipeline, double* t_solver) {
    Outcome out;
    const double corner_len = 2.0 * std::sqrt(2.0);
    const double target = corner_len - 1e-3;
    const Frame plain = examples::ag_frame();
    const std::vector<double> from = {-1.0, 1.0, 0.0, 0.0};
    const std::vector<double> to = {1.0, 1.0, 0.0, 0.0};

    {  // Constructive pipeline in the triangular chart, transferred back.
        const auto t0 = std::chrono::steady_clock::now();
        const TriangularFrame tf(examples::ag_triangular_frame(),
                                 examples::ag_triangular_weights());
        ShortenOptions opt;
        opt.solver.restarts = 4;
        opt.solver.iters = 200;
        const ShorteningCertificate cert = shorten(tf, 5e-9, opt);
        const ControlCurve transferred = examples::ag_transfer_curve(cert.competitor.control_curve());
        const HorizontalCurve competitor = horizontal_lift(plain, transferred, from, 1e-10);
        const double len = curve_length(plain, competitor);
        const double err = inf_dist(competitor.endpoint(), to);
        const double err_half = inf_dist(endpoint_half_step(plain, competitor, 1e-10), to);
        *t_pipeline = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.require(len < target, "pipeline length " + fmt(len) + " >= " + fmt(target));
        out.require(err <= 1e-6, "pipeline endpoint error " + fmt(err) + " > 1e-6");
        out.require(err_half <= 1e-6, "pipeline half-step error " + fmt(err_half) + " > 1e-6");
        out.require(*t_pipeline < 60.0, "pipeline took " + fmt(*t_pipeline) + "s >= 60s");
    }

    {  // Direct solve between the corner's endpoints, corner-seeded.
        const auto t0 = std::chrono::steady_clock::now();
        SolveConfig cfg;
        cfg.steps = 48;
        cfg.restarts = 4;
        cfg.iters = 300;
        cfg.tol = 1e-6;
        cfg.inits = {examples::ag_corner().control_curve()};
        const SolveResult res = upper_bound_distance(plain, from, to, cfg);
        *t_solver = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.require(res.length < target, "solver length " + fmt(res.length) + " >= " + fmt(target));
        out.require(res.endpoint_error_half <= 1e-6,
                    "solver half-step error " + fmt(res.endpoint_error_half) + " > 1e-6");
        out.require(*t_solver < 60.0, "solver took " + fmt(*t_solver) + "s >= 60s");
    }
    return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion7() {
    Outcome out;
    SolveConfig synth;
    synth.iters = 0;  // pure bracket-path synthesis
    synth.restarts = 0;
    const std::vector<double> s = {1e-4, 1e-5, 1e-6};

    const double slope_h = nsw_exponent_fit(examples::heisenberg_frame(), MultiIndex({2, 1}),
                                            {0.0, 0.0, 0.0}, s, synth);
    out.require(std::abs(slope_h - 0.5) <= 0.05,
                "heisenberg slope " + fmt(slope_h) + " outside 0.5 +- 0.05");

    const double slope_4 = nsw_exponent_fit(examples::ag_frame(), MultiIndex({2, 1, 1, 1}),
                                            {0.0, 1.0, 0.0, 0.0}, s, synth);
    out.require(slope_4 >= 0.20 && slope_4 <= 0.35,
                "weight-5 slope " + fmt(slope_4) + " outside [0.20, 0.35]");
    return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion8() {
    Outcome out;

    for (int bi = -1; bi <= 1; ++bi)
        for (int ci = -1; ci <= 1; ++ci)
            for (int di = -1; di <= 1; ++di) {
                const HorizontalCurve fam = closed_family_curve(bi, ci, di, 1.0, 2.0, 1000);
                const AbnormalResidualReport rep =
                    abnormal_ode_residual(fam, dual_curve_from_states(fam));
                const std::vector<double> phi = conserved_quantity(fam);
                double lo = phi.front(), hi = phi.front();
                for (double v : phi) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                std::ostringstream tag;
                tag << "(b,c,d)=(" << bi << "," << ci << "," << di << ")";
                if (ci == 0) {
                    // Degenerate line: everything vanishes identically.
                    out.require(rep.ode == 0.0, tag.str() + " ode residual not exactly 0");
                    out.require(rep.algebraic == 0.0, tag.str() + " algebraic residual not 0");
                } else {
                    out.require(rep.ode <= 1e-8,
                                tag.str() + " ode residual " + fmt(rep.ode) + " > 1e-8");
                    out.require(rep.algebraic <= 1e-8,
                                tag.str() + " algebraic residual " + fmt(rep.algebraic) + " > 1e-8");
                }
                out.require(hi - lo <= 1e-10,
                            tag.str() + " phi variation " + fmt(hi - lo) + " > 1e-10");
                if (!out.ok) return out;
            }

    // The corner family is exactly abnormal with the constant vertical covector.
    const HorizontalCurve corner = corner_family({1.0, 0.0}, {0.0, 1.0}, 1.5, 101);
    const DualCurve xi = dual_curve_from_states(corner);
    for (const auto& row : xi.xi)
        out.require(row[0] == 0.0 && row[1] == 0.0 && row[2] == 0.0 && row[3] == 1.0,
                    "corner covector is not (0,0,0,1)");
    const AbnormalResidualReport rep = abnormal_ode_residual(corner, xi);
    out.require(rep.ode == 0.0, "corner ode residual not exactly 0");
    out.require(rep.algebraic == 0.0, "corner algebraic residual not exactly 0");
    return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion9() {
    Outcome out;

    SolveConfig euclid;
    euclid.steps = 16;
    euclid.restarts = 2;
    euclid.iters = 80;
    const SolveResult re =
        upper_bound_distance(examples::euclidean2_frame(), {0.0, 0.0}, {3.0, 4.0}, euclid);
    out.require(std::abs(re.length - 5.0) <= 1e-4,
                "euclidean length " + fmt(re.length) + " != 5 +- 1e-4");
    out.require(re.endpoint_error_half <= 2.0 * euclid.tol, "euclidean re-integration drift");

    SolveConfig heis;
    heis.steps = 32;
    heis.restarts = 4;
    heis.iters = 150;
    const SolveResult rh = upper_bound_distance(examples::heisenberg_frame(), {0.0, 0.0, 0.0},
                                                {1.0, 0.0, 0.0}, heis);
    out.require(std::abs(rh.length - 1.0) <= 1e-4,
                "heisenberg length " + fmt(rh.length) + " != 1 +- 1e-4");
    out.require(rh.endpoint_error_half <= 2.0 * heis.tol, "heisenberg re-integration drift");

    const SolveResult rh2 = upper_bound_distance(examples::heisenberg_frame(), {0.0, 0.0, 0.0},
                                                 {1.0, 0.0, 0.0}, heis);
    bool bitwise = rh.length == rh2.length && rh.curve.controls == rh2.curve.controls &&
                   rh.restart_index == rh2.restart_index;
    out.require(bitwise, "fixed-seed rerun is not bitwise identical");
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* label;
        double budget;  // seconds; 0 = no pinned budget
        std::function<Outcome(double*, double*)> run;
    };

    const auto plain = [](Outcome (*f)()) {
        return [f](double*, double*) { return f(); };
    };

    const std::vector<Entry> entries = {
        {1, "bracket identities exact on 100 random fields (dims 2-5, deg <= 3)", 10.0,
         plain(criterion1)},
        {2, "4d model bracket/growth regression, exact", 5.0, plain(criterion2)},
        {3, "dilation homogeneity, bracket preservation (|beta| <= 5), residual decay", 10.0,
         plain(criterion3)},
        {4, "lift equivariance under graded dilations <= 1e-8 (20 random curves)", 10.0,
         plain(criterion4)},
        {5, "competitor length ledger <= 1e-12 rel; drift rate stable to 1e-6 rel", 0.0,
         plain(criterion5)},
        {6, "corner strictly shortened below 2*sqrt(2) - 1e-3 by pipeline and solver", 0.0,
         [](double* a, double* b) { return criterion6(a, b); }},
        {7, "reachable-set exponents: 0.5 +- 0.05 and [0.20, 0.35]", 60.0, plain(criterion7)},
        {8, "abnormal family residuals <= 1e-8, phi constant, corner exactly abnormal", 10.0,
         plain(criterion8)},
        {9, "solver soundness: pinned lengths, re-integration, bitwise reruns", 0.0,
         plain(criterion9)},
    };

    bool all_ok = true;
    for (const Entry& e : entries) {
        double t_pipeline = 0.0, t_solver = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.run(&t_pipeline, &t_solver);
        } catch (const std::exception& ex) {
            out.ok = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (e.budget > 0.0 && secs >= e.budget) {
            out.ok = false;
            out.detail += (out.detail.empty() ? "" : "; ") + std::string("over time budget");
        }
        std::string timing = fmt(secs) + "s";
        if (e.budget > 0.0) timing += " < " + fmt(e.budget) + "s";
        if (e.id == 6) timing += " (pipeline " + fmt(t_pipeline) + "s, solver " + fmt(t_solver) + "s)";
        std::printf("[%s] criterion %d: %s [%s]%s%s\n", out.ok ? "PASS" : "FAIL", e.id, e.label,
                    timing.c_str(), out.detail.empty() ? "" : " — ", out.detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && out.ok;
    }
    std::printf("%s\n", all_ok ? "acceptance: all criteria passed" : "acceptance: FAILURES present");
    return all_ok ? 0 : 1;
}
