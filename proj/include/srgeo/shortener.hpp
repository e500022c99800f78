#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "srgeo/flows.hpp"
#include "srgeo/solver.hpp"
#include "srgeo/triangular.hpp"

namespace srgeo {

namespace detail {

// Signed flow legs (generator index, signed duration); realized as a
// piecewise-constant control curve with positive interval lengths.
struct Leg {
    int gen;     // 1-based generator index
    double dur;  // signed; sign goes into the control
};

inline std::vector<Leg> inverse_word(const std::vector<Leg>& w) {
    std::vector<Leg> out(w.rbegin(), w.rend());
    for (auto& l : out) l.dur = -l.dur;
    return out;
}

// Nested group-commutator word for the right-nested multi-index β̂: the word
// for (β₁) is a single leg; appending an outer index j wraps the previous
// word W as [flow_j, W] = leg_j ∘ W ∘ leg_j⁻¹ ∘ W⁻¹. Leg count: 1, 4, 10, 22…
inline std::vector<Leg> commutator_word(const MultiIndex& beta_hat, double tau) {
    std::vector<Leg> word{{beta_hat.entries.front(), tau}};
    for (std::size_t i = 1; i < beta_hat.entries.size(); ++i) {
        const int j = beta_hat.entries[i];
        std::vector<Leg> next;
        next.reserve(2 + 2 * word.size());
        next.push_back({j, tau});
        next.insert(next.end(), word.begin(), word.end());
        next.push_back({j, -tau});
        const auto inv = inverse_word(word);
        next.insert(next.end(), inv.begin(), inv.end());
        word = std::move(next);
    }
    return word;
}

inline ControlCurve legs_to_controls(const std::vector<Leg>& legs, int m, double t_start) {
    ControlCurve cc;
    cc.times.push_back(t_start);
    for (const auto& l : legs) {
        const double d = std::abs(l.dur);
        if (d <= 0.0) continue;
        std::vector<double> u(static_cast<std::size_t>(m), 0.0);
        u[static_cast<std::size_t>(l.gen - 1)] = l.dur < 0 ? -1.0 : 1.0;
        cc.controls.push_back(std::move(u));
        cc.times.push_back(cc.times.back() + d);
    }
    return cc;
}

}  // namespace detail

// Horizontal curve from x approximating exp(s·X_β̂)(x), built from the nested
// group-commutator word of generator flows, calibrated by a secant iteration
// on the dominant displaced coordinate and corrected recursively until the
// endpoint error is at most tol. If constant_out is given it receives
// length / |s|^{1/k}.
inline HorizontalCurve synthesize_bracket_path(const Frame& frame, const MultiIndex& beta_hat,
                                               double s, const std::vector<double>& x, double tol,
                                               double* constant_out = nullptr, int depth = 0) {
    beta_hat.validate(frame.num_generators());
    if (static_cast<int>(x.size()) != frame.dimension())
        throw domain_error("synthesize_bracket_path: point dimension mismatch");
    if (!(tol > 0.0)) throw domain_error("synthesize_bracket_path: tolerance must be positive");
    const int n = frame.dimension();
    const int k = beta_hat.length();

    const VectorField Z = iterated_commutator(frame, beta_hat);
    const std::vector<double> q = (s == 0.0) ? x : flow(Z, x, s, kDefaultFlowTol);

    double disp = 0.0;
    int axis = 0;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(q[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]);
        if (d >= disp) {
            disp = d;
            axis = i;
        }
    }
    if (disp <= tol) {  // empty path: the target is already within tolerance
        HorizontalCurve c;
        c.base_point = x;
        c.times = {0.0};
        c.states = {x};
        if (constant_out) *constant_out = 0.0;
        return c;
    }

    const double target = q[static_cast<std::size_t>(axis)];
    const auto endpoint_for = [&](double tau) {
        const auto legs = detail::commutator_word(beta_hat, tau);
        const ControlCurve cc = detail::legs_to_controls(legs, frame.num_generators(), 0.0);
        HorizontalCurve c = horizontal_lift(frame, cc, x, kDefaultFlowTol);
        return c;
    };

    // Leading order the word displaces the target coordinate by ±τ^k·Z_axis(x),
    // and the flow target is s·Z_axis(x) + O(s²), so τ ≈ |s|^{1/k}.
    double tau0 = std::pow(std::abs(s), 1.0 / static_cast<double>(k));
    MultiIndex word_index = beta_hat;
    HorizontalCurve probe = endpoint_for(tau0);
    double d0 = probe.endpoint()[static_cast<std::size_t>(axis)] - x[static_cast<std::size_t>(axis)];
    bool inverted = false;
    if (d0 * (target - x[static_cast<std::size_t>(axis)]) < 0.0) inverted = true;

    const auto curve_for = [&](double tau) {
        auto legs = detail::commutator_word(beta_hat, tau);
        if (inverted) legs = detail::inverse_word(legs);
        const ControlCurve cc = detail::legs_to_controls(legs, frame.num_generators(), 0.0);
        return horizontal_lift(frame, cc, x, kDefaultFlowTol);
    };

    // Secant iteration on g(τ) = endpoint_axis(τ) − target.
    double ta = tau0;
    HorizontalCurve ca = curve_for(ta);
    double ga = ca.endpoint()[static_cast<std::size_t>(axis)] - target;
    double tb = tau0 * 1.05;
    HorizontalCurve cb = curve_for(tb);
    double gb = cb.endpoint()[static_cast<std::size_t>(axis)] - target;
    const double g_goal = std::max(1e-16, 0.2 * tol);
    for (int it = 0; it < 80 && std::abs(gb) > g_goal; ++it) {
        if (gb == ga) break;
        double tn = tb - gb * (tb - ta) / (gb - ga);
        if (!(tn > 1e-14)) tn = 0.5 * tb;
        if (tn > 10.0 * tau0 + 1.0) tn = 10.0 * tau0 + 1.0;
        ta = tb;
        ga = gb;
        tb = tn;
        cb = curve_for(tb);
        gb = cb.endpoint()[static_cast<std::size_t>(axis)] - target;
    }

    HorizontalCurve path = std::move(cb);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(path.endpoint()[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(i)]));

    // Recursive residual correction along the same bracket direction.
    std::vector<double> history{err};
    const auto history_string = [&history] {
        std::string h;
        for (double e : history) h += format_double_brief(e) + " ";
        return h;
    };
    while (err > tol) {
        if (depth >= 6)
            throw domain_error("synthesize_bracket_path: correction fails to contract; residuals " +
                               history_string());
        const std::vector<double>& p = path.endpoint();
        const double za = Z.eval(p)[static_cast<std::size_t>(axis)];
        if (za == 0.0)
            throw domain_error("synthesize_bracket_path: bracket field vanishes at the residual point");
        const double s_rest = (q[static_cast<std::size_t>(axis)] - p[static_cast<std::size_t>(axis)]) / za;
        HorizontalCurve fix = synthesize_bracket_path(frame, beta_hat, s_rest, p, tol, nullptr, depth + 1);
        // splice: shift fix times to continue after path
        const double t_end = path.times.back();
        for (std::size_t i = 1; i < fix.times.size(); ++i) path.times.push_back(t_end + (fix.times[i] - fix.times.front()));
        path.controls.insert(path.controls.end(), fix.controls.begin(), fix.controls.end());
        path.states.insert(path.states.end(), fix.states.begin() + 1, fix.states.end());
        double err2 = 0.0;
        for (int i = 0; i < n; ++i)
            err2 = std::max(err2, std::abs(path.endpoint()[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(i)]));
        history.push_back(err2);
        if (err2 >= 0.5 * err && err2 > tol)
            throw domain_error("synthesize_bracket_path: correction fails to contract; residuals " +
                               history_string());
        err = err2;
    }
    if (constant_out)
        *constant_out =
            curve_length(frame, path) / std::pow(std::abs(s), 1.0 / static_cast<double>(k));
    return path;
}

// One assembled competitor γ^ε: the ê₂-leg cut at ε, the ε-dilated child
// competitor σ̂ lifted through the full frame, and the ê₁-leg from ε to 1.
struct Assembly {
    HorizontalCurve competitor;  // unpatched, from ê₂
    double eps = 0.0;
    double corner_length = 0.0;      // this level's corner
    double child_corner_length = 0.0;
    double sigma_length = 0.0;       // child-frame length of σ̂
    double k = 0.0;                  // child_corner_length − sigma_length
    double drift = 0.0;              // top coordinate of the dedicated ε·σ̂ lift endpoint
    double h = 0.0;                  // drift / ε^{w_n}
    double endpoint_error = 0.0;     // ∞-norm against ê₁
};

inline Assembly assemble_competitor(const TriangularFrame& tf, const HorizontalCurve& sigma_hat,
                                    double eps) {
    const int n = tf.dimension();
    if (n < 3) throw domain_error("assemble_competitor: dimension must be >= 3");
    if (!(eps > 0.0) || eps > 1.0) throw domain_error("assemble_competitor: eps must lie in (0, 1]");
    sigma_hat.validate(n - 1, 2);
    for (int i = 0; i < n - 1; ++i) {
        const double expected = (i == 1) ? 1.0 : 0.0;
        if (std::abs(sigma_hat.base_point[static_cast<std::size_t>(i)] - expected) > 1e-9)
            throw domain_error("assemble_competitor: child competitor must start at e2");
    }

    Assembly a;
    a.eps = eps;
    const TriangularFrame child = project(tf);
    a.corner_length = curve_length(tf.frame(), model_corner(n));
    a.child_corner_length = curve_length(child.frame(), model_corner(n - 1));
    a.sigma_length = curve_length(child.frame(), sigma_hat);
    a.k = a.child_corner_length - a.sigma_length;

    // Dedicated measurement of the top-coordinate drift: lift the ε-dilated
    // child controls from the exact point ε·ê₂. For dyadic ε every floating
    // operation scales exactly, so h = drift/ε^{w_n} is ε-independent.
    {
        ControlCurve scaled;
        scaled.times = sigma_hat.times;
        scaled.controls = sigma_hat.controls;
        for (auto& u : scaled.controls)
            for (auto& c : u) c *= eps;
        std::vector<double> base(static_cast<std::size_t>(n), 0.0);
        base[1] = eps;
        const HorizontalCurve lifted = horizontal_lift(tf.frame(), scaled, base, kDefaultFlowTol);
        a.drift = lifted.endpoint()[static_cast<std::size_t>(n - 1)];
        double p = 1.0;
        for (int w = 0; w < tf.top_weight(); ++w) p *= eps;
        a.h = a.drift / p;
    }

    // Assembled control sequence on one time axis; σ̂'s horizon is compressed
    // by ε (controls kept), which traces exactly the ε-dilated child curve.
    ControlCurve cc;
    cc.times.push_back(-1.0);
    const auto push_leg = [&cc](double duration, std::vector<double> u) {
        if (duration <= 0.0) return;
        cc.controls.push_back(std::move(u));
        cc.times.push_back(cc.times.back() + duration);
    };
    push_leg(1.0 - eps, {0.0, -1.0});
    for (std::size_t s = 0; s + 1 < sigma_hat.times.size(); ++s)
        push_leg(eps * (sigma_hat.times[s + 1] - sigma_hat.times[s]), sigma_hat.controls[s]);
    push_leg(1.0 - eps, {1.0, 0.0});

    std::vector<double> start(static_cast<std::size_t>(n), 0.0);
    start[1] = 1.0;
    a.competitor = horizontal_lift(tf.frame(), cc, start, kDefaultFlowTol);
    const auto& end = a.competitor.endpoint();
    for (int i = 0; i < n; ++i) {
        const double expected = (i == 0) ? 1.0 : 0.0;
        a.endpoint_error = std::max(a.endpoint_error, std::abs(end[static_cast<std::size_t>(i)] - expected));
    }
    return a;
}

struct ShortenOptions {
    SolveConfig solver;  // base-case solve budget; tol is overridden by shorten's tol
    int max_grid = 40;   // dyadic candidates ε = 2^{−j}, j = 0..max_grid
};

struct ShorteningCertificate {
    int dimension = 0;
    double corner_length = 0.0;
    HorizontalCurve competitor;  // from ê₂ to ê₁ (patched when needed)
    double competitor_length = 0.0;
    double margin = 0.0;
    double endpoint_error = 0.0;
    double endpoint_error_half = 0.0;  // re-integration at doubled substeps
    double eps = 0.0;                  // 0 in the base cases
    int grid_index = -1;
    std::vector<double> k_values;  // per recursion level, deepest first
    double patch_cost = 0.0;
    double h = 0.0;
    std::vector<std::string> candidates;  // grid diagnostics in evaluation order
};

inline ShorteningCertificate shorten(const TriangularFrame& tf, double tol,
                                     const ShortenOptions& opt = {}) {
    if (!(tol > 0.0)) throw domain_error("shorten: tolerance must be positive");
    const int n = tf.dimension();
    const Frame& F = tf.frame();

    ShorteningCertificate cert;
    cert.dimension = n;
    cert.corner_length = curve_length(F, model_corner(n));

    const auto finish = [&](HorizontalCurve competitor) {
        competitor.validate(n, 2);
        cert.competitor_length = curve_length(F, competitor);
        cert.margin = cert.corner_length - cert.competitor_length;
        const auto& end = competitor.endpoint();
        cert.endpoint_error = 0.0;
        for (int i = 0; i < n; ++i) {
            const double expected = (i == 0) ? 1.0 : 0.0;
            cert.endpoint_error =
                std::max(cert.endpoint_error, std::abs(end[static_cast<std::size_t>(i)] - expected));
        }
        const auto half = endpoint_half_step(F, competitor, kDefaultFlowTol);
        cert.endpoint_error_half = 0.0;
        for (int i = 0; i < n; ++i) {
            const double expected = (i == 0) ? 1.0 : 0.0;
            cert.endpoint_error_half =
                std::max(cert.endpoint_error_half, std::abs(half[static_cast<std::size_t>(i)] - expected));
        }
        cert.competitor = std::move(competitor);
    };

    if (n == 2) {
        // Base case: the straight chord in the plane.
        ControlCurve cc;
        cc.times = {-1.0, 1.0};
        cc.controls = {{0.5, -0.5}};
        finish(horizontal_lift(F, cc, {0.0, 1.0}, kDefaultFlowTol));
        cert.k_values = {cert.margin};
        return cert;
    }

    // Growth-pause hypothesis at the origin, checked exactly.
    {
        const std::vector<Rational> origin(static_cast<std::size_t>(n), Rational(0));
        const GrowthReport rep = growth_report(F, origin, tf.top_weight() + 1);
        if (!rep.bracket_generating)
            throw domain_error("shorten: frame is not bracket generating at the origin");
        if (!rep.growth_pause_condition)
            throw domain_error("shorten: growth-pause hypothesis fails at the origin");
    }

    if (n == 3 && tf.weights()[2] == 2) {
        // Base case: step-2 plane distribution; competitor from the solver.
        SolveConfig cfg = opt.solver;
        cfg.tol = tol;
        cfg.inits.insert(cfg.inits.begin(), model_corner(3).control_curve());
        const SolveResult res =
            upper_bound_distance(F, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, cfg);
        finish(res.curve);
        if (!(cert.margin > 0.0))
            throw domain_error("shorten: solver base case failed to beat the corner");
        cert.k_values = {cert.margin};
        return cert;
    }

    // Inductive case.
    const ShorteningCertificate child = shorten(project(tf), tol, opt);
    const std::vector<Rational> origin(static_cast<std::size_t>(n), Rational(0));
    const ZChoice zc = choose_Z(tf, adapted_basis(F, origin));
    const double z_scale = to_double(zc.scale);

    for (int j = 0; j <= opt.max_grid; ++j) {
        const double eps = std::ldexp(1.0, -j);
        Assembly a = assemble_competitor(tf, child.competitor, eps);
        std::string note = "j=" + std::to_string(j) + " eps=" + format_double_brief(eps) +
                           " unpatched_length=" + format_double_brief(curve_length(F, a.competitor)) +
                           " drift=" + format_double_brief(a.drift);
        HorizontalCurve candidate;
        double patch_cost = 0.0;
        if (a.endpoint_error <= tol) {
            candidate = std::move(a.competitor);
            note += " patch=none";
        } else {
            // Patch the top coordinate with a bracket word where b_n = 1:
            // prepended at ê₂ when the outer index is 2, appended at the
            // endpoint when it is 1.
            const double drift_top =
                a.competitor.endpoint()[static_cast<std::size_t>(n - 1)];
            const double s_patch = -drift_top / z_scale;
            ControlCurve assembled = a.competitor.control_curve();
            ControlCurve combined;
            if (zc.outer == 2) {
                std::vector<double> e2(static_cast<std::size_t>(n), 0.0);
                e2[1] = 1.0;
                const HorizontalCurve patch =
                    synthesize_bracket_path(F, zc.beta_hat, s_patch, e2, 0.5 * tol);
                patch_cost = curve_length(F, patch);
                combined = patch.control_curve();
                const double shift = combined.times.back() - assembled.times.front();
                for (std::size_t i2 = 1; i2 < assembled.times.size(); ++i2)
                    combined.times.push_back(assembled.times[i2] + shift);
                combined.controls.insert(combined.controls.end(), assembled.controls.begin(),
                                         assembled.controls.end());
            } else {
                const HorizontalCurve patch = synthesize_bracket_path(
                    F, zc.beta_hat, s_patch, a.competitor.endpoint(), 0.5 * tol);
                patch_cost = curve_length(F, patch);
                combined = std::move(assembled);
                const ControlCurve pc = patch.control_curve();
                const double shift = combined.times.back() - pc.times.front();
                for (std::size_t i2 = 1; i2 < pc.times.size(); ++i2)
                    combined.times.push_back(pc.times[i2] + shift);
                combined.controls.insert(combined.controls.end(), pc.controls.begin(),
                                         pc.controls.end());
            }
            std::vector<double> e2(static_cast<std::size_t>(n), 0.0);
            e2[1] = 1.0;
            candidate = horizontal_lift(F, combined, e2, kDefaultFlowTol);
            note += " patch_cost=" + format_double_brief(patch_cost);
        }

        const double len = curve_length(F, candidate);
        const auto& end = candidate.endpoint();
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            const double expected = (i == 0) ? 1.0 : 0.0;
            err = std::max(err, std::abs(end[static_cast<std::size_t>(i)] - expected));
        }
        note += " length=" + format_double_brief(len) + " endpoint_error=" + format_double_brief(err);
        if (err <= tol && len < cert.corner_length) {
            finish(std::move(candidate));
            if (cert.endpoint_error_half <= tol) {
                cert.candidates.push_back(note + " -> accepted");
                cert.eps = eps;
                cert.grid_index = j;
                cert.k_values = child.k_values;
                cert.k_values.push_back(a.k);
                cert.patch_cost = patch_cost;
                cert.h = a.h;
                return cert;
            }
            cert.candidates.push_back(note + " -> rejected (half-step endpoint)");
            continue;
        }
        cert.candidates.push_back(note + " -> rejected");
    }
    std::string diag = "shorten: no dyadic eps certified below the corner length;";
    for (const auto& c : cert.candidates) diag += "\n  " + c;
    throw domain_error(diag);
}

// Least-squares slope of log(upper-bound length) against log(s): for each s
// the bracket word gives an admissible curve to exp(s·X_β̂)(x), optionally
// improved by the transcription solver seeded with that word.
inline double nsw_exponent_fit(const Frame& frame, const MultiIndex& beta_hat,
                               const std::vector<double>& x, const std::vector<double>& s_values,
                               const SolveConfig& cfg, std::vector<double>* lengths_out = nullptr) {
    if (s_values.size() < 2) throw domain_error("nsw_exponent_fit: need at least two s values");
    double smin = s_values.front(), smax = s_values.front();
    for (double s : s_values) {
        if (!(s > 0.0)) throw domain_error("nsw_exponent_fit: s values must be positive");
        smin = std::min(smin, s);
        smax = std::max(smax, s);
    }
    if (smax / smin < 99.9999)
        throw domain_error("nsw_exponent_fit: s values must span at least two decades");

    const VectorField Z = iterated_commutator(frame, beta_hat);
    std::vector<double> lens;
    for (double s : s_values) {
        const std::vector<double> q = flow(Z, x, s, kDefaultFlowTol);
        double scale = 0.0;
        for (int i = 0; i < frame.dimension(); ++i)
            scale = std::max(scale, std::abs(q[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]));
        const double tol_s = std::max(1e-14, 1e-3 * scale);
        const HorizontalCurve path = synthesize_bracket_path(frame, beta_hat, s, x, tol_s);
        double len = curve_length(frame, path);
        if (cfg.iters > 0 && cfg.restarts > 0) {
            SolveConfig refine = cfg;
            refine.tol = std::min(cfg.tol, 0.1 * scale);
            refine.inits = {path.control_curve()};
            try {
                const SolveResult res = upper_bound_distance(frame, x, q, refine);
                if (res.length < len) len = res.length;
            } catch (const domain_error&) {
                // keep the synthesized upper bound
            }
        }
        lens.push_back(len);
    }
    if (lengths_out) *lengths_out = lens;

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lens.size(); ++i) {
        mx += std::log(s_values[i]);
        my += std::log(lens[i]);
    }
    mx /= static_cast<double>(lens.size());
    my /= static_cast<double>(lens.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lens.size(); ++i) {
        const double dx = std::log(s_values[i]) - mx;
        num += dx * (std::log(lens[i]) - my);
        den += dx * dx;
    }
    if (den == 0.0) throw domain_error("nsw_exponent_fit: degenerate s grid");
    return num / den;
}

}  // namespace srgeo
