#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "srgeo/curve.hpp"
#include "srgeo/vector_field.hpp"

// Abnormal-extremal analysis hard-coded to the R⁴ system
// X₁ = ∂₁ + 2x₂∂₃ + x₃²∂₄, X₂ = ∂₂ − 2x₁∂₃. The dual (covector) curve of an
// abnormal extremal solves ξ̇ = (2γ̇₂ξ₃, −2γ̇₁ξ₃, −2γ₃γ̇₁ξ₄, 0) together with
// the pointwise constraints ⟨ξ, X₁(γ)⟩ = ⟨ξ, X₂(γ)⟩ = ⟨ξ, [X₁,X₂](γ)⟩ = 0.

namespace srgeo {

// Covector samples along a curve, on the same time grid as the state curve.
struct DualCurve {
    std::vector<double> times;
    std::vector<std::vector<double>> xi;  // R⁴ samples

    void validate() const {
        if (times.size() != xi.size())
            throw domain_error("dual curve: times and samples must have equal length");
        if (times.empty()) throw domain_error("dual curve: empty");
        for (std::size_t k = 0; k + 1 < times.size(); ++k)
            if (!(times[k] < times[k + 1]))
                throw domain_error("dual curve: times must be strictly increasing");
        for (const auto& v : xi)
            if (v.size() != 4) throw domain_error("dual curve: samples must lie in R^4");
    }
};

// With ξ₄ normalized to 1 the constraints solve to
// ξ = (−2γ₁γ₂γ₃ − γ₃², 2γ₁²γ₃, γ₁γ₃, 1).
inline std::vector<double> dual_from_state(const std::vector<double>& g) {
    if (g.size() != 4) throw domain_error("dual_from_state: point must lie in R^4");
    return {-2.0 * g[0] * g[1] * g[2] - g[2] * g[2], 2.0 * g[0] * g[0] * g[2], g[0] * g[2], 1.0};
}

inline std::vector<Rational> dual_from_state(const std::vector<Rational>& g) {
    if (g.size() != 4) throw domain_error("dual_from_state: point must lie in R^4");
    return {-2 * g[0] * g[1] * g[2] - g[2] * g[2], 2 * g[0] * g[0] * g[2], g[0] * g[2],
            Rational(1)};
}

inline DualCurve dual_curve_from_states(const HorizontalCurve& gamma) {
    if (!gamma.has_states())
        throw domain_error("dual_curve_from_states: curve states not integrated");
    DualCurve d;
    d.times = gamma.times;
    d.xi.reserve(gamma.states.size());
    for (const auto& g : gamma.states) d.xi.push_back(dual_from_state(g));
    return d;
}

namespace detail {

// Fourth-order five-point first derivative on a uniform grid; one-sided
// stencils at the two samples nearest each boundary.
inline std::vector<std::vector<double>> fd5_derivative(const std::vector<double>& times,
                                                       const std::vector<std::vector<double>>& f) {
    const std::size_t T = times.size();
    if (T < 5) throw domain_error("derivative stencil: need at least 5 samples");
    const double h = times[1] - times[0];
    for (std::size_t k = 0; k + 1 < T; ++k)
        if (std::abs((times[k + 1] - times[k]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw domain_error("derivative stencil: time grid must be uniform");

    const std::size_t dim = f.front().size();
    std::vector<std::vector<double>> out(T, std::vector<double>(dim, 0.0));
    const auto stencil = [&](std::size_t i, const std::array<long, 5>& off,
                             const std::array<double, 5>& w) {
        for (std::size_t j = 0; j < dim; ++j) {
            double acc = 0.0;
            for (int s = 0; s < 5; ++s)
                acc += w[static_cast<std::size_t>(s)] *
                       f[i + static_cast<std::size_t>(off[static_cast<std::size_t>(s)])][j];
            out[i][j] = acc / (12.0 * h);
        }
    };
    stencil(0, {0, 1, 2, 3, 4}, {-25.0, 48.0, -36.0, 16.0, -3.0});
    stencil(1, {-1, 0, 1, 2, 3}, {-3.0, -10.0, 18.0, -6.0, 1.0});
    for (std::size_t i = 2; i + 2 < T; ++i)
        stencil(i, {-2, -1, 0, 1, 2}, {1.0, -8.0, 0.0, 8.0, -1.0});
    stencil(T - 2, {-3, -2, -1, 0, 1}, {-1.0, 6.0, -18.0, 10.0, 3.0});
    stencil(T - 1, {-4, -3, -2, -1, 0}, {3.0, -16.0, 36.0, -48.0, 25.0});
    return out;
}

}  // namespace detail

struct AbnormalResidualReport {
    double ode = 0.0;        // sup norm of the finite-difference ODE defect
    double algebraic = 0.0;  // sup norm of the three pointwise constraints
    bool xi4_normalized = true;   // ξ₄ ≡ 1 within 1e−12 (flagged, not fatal)
    bool xi_nonvanishing = true;  // ξ ≠ 0 at every sample
};

inline AbnormalResidualReport abnormal_ode_residual(const HorizontalCurve& gamma,
                                                    const DualCurve& xi) {
    gamma.validate(4);
    xi.validate();
    if (!gamma.has_states()) throw domain_error("abnormal_ode_residual: curve states not integrated");
    if (gamma.times.size() != xi.times.size())
        throw domain_error("abnormal_ode_residual: state and dual grids differ in length");
    for (std::size_t k = 0; k < gamma.times.size(); ++k)
        if (gamma.times[k] != xi.times[k])
            throw domain_error("abnormal_ode_residual: state and dual grids differ");

    const auto gdot = detail::fd5_derivative(gamma.times, gamma.states);
    const auto xdot = detail::fd5_derivative(xi.times, xi.xi);

    AbnormalResidualReport rep;
    for (std::size_t k = 0; k < xi.xi.size(); ++k) {
        const auto& g = gamma.states[k];
        const auto& p = xi.xi[k];
        if (std::abs(p[3] - 1.0) > 1e-12) rep.xi4_normalized = false;
        double norm = 0.0;
        for (double v : p) norm = std::max(norm, std::abs(v));
        if (norm == 0.0) rep.xi_nonvanishing = false;

        const double rhs[4] = {2.0 * gdot[k][1] * p[2], -2.0 * gdot[k][0] * p[2],
                               -2.0 * g[2] * gdot[k][0] * p[3], 0.0};
        for (int i = 0; i < 4; ++i)
            rep.ode = std::max(rep.ode, std::abs(xdot[k][static_cast<std::size_t>(i)] - rhs[i]));

        rep.algebraic = std::max(rep.algebraic, std::abs(p[0] + 2.0 * g[1] * p[2] + g[2] * g[2] * p[3]));
        rep.algebraic = std::max(rep.algebraic, std::abs(p[1] - 2.0 * g[0] * p[2]));
        rep.algebraic = std::max(rep.algebraic, std::abs(p[2] - g[0] * g[2] * p[3]));
    }
    return rep;
}

// The closed-form abnormal family γ(t) = (t, bt − (3/10)c t⁻⁴, c t⁻³,
// −(1/5)c² t⁻⁵ + d), defined for t ≠ 0; smooth on each half-line.
inline std::vector<double> closed_family(double b, double c, double d, double t) {
    if (t == 0.0) throw domain_error("closed_family: t must be nonzero");
    const double t3 = t * t * t;
    const double t4 = t3 * t;
    const double t5 = t4 * t;
    return {t, b * t - 0.3 * c / t4, c / t3, -0.2 * c * c / t5 + d};
}

inline std::vector<double> closed_family_velocity(double b, double c, double d, double t) {
    if (t == 0.0) throw domain_error("closed_family: t must be nonzero");
    (void)d;
    const double t4 = t * t * t * t;
    const double t5 = t4 * t;
    const double t6 = t5 * t;
    return {1.0, b + 1.2 * c / t5, -3.0 * c / t4, c * c / t6};
}

inline std::vector<Rational> closed_family(const Rational& b, const Rational& c, const Rational& d,
                                           const Rational& t) {
    if (t == 0) throw domain_error("closed_family: t must be nonzero");
    return {t, b * t - Rational(3, 10) * c * rational_pow(t, -4), c * rational_pow(t, -3),
            -Rational(1, 5) * c * c * rational_pow(t, -5) + d};
}

inline std::vector<Rational> closed_family_velocity(const Rational& b, const Rational& c,
                                                    const Rational& d, const Rational& t) {
    if (t == 0) throw domain_error("closed_family: t must be nonzero");
    (void)d;
    return {Rational(1), b + Rational(6, 5) * c * rational_pow(t, -5),
            -3 * c * rational_pow(t, -4), c * c * rational_pow(t, -6)};
}

// Uniform sampling of the family on [t0, t1] (same sign, away from 0), with
// analytic states and midpoint-velocity controls for the two generators.
inline HorizontalCurve closed_family_curve(double b, double c, double d, double t0, double t1,
                                           int samples) {
    if (!(t0 < t1)) throw domain_error("closed_family_curve: need t0 < t1");
    if (t0 * t1 <= 0.0) throw domain_error("closed_family_curve: domain must avoid t = 0");
    if (samples < 5) throw domain_error("closed_family_curve: need at least 5 samples");
    HorizontalCurve g;
    const int N = samples - 1;
    g.times.reserve(static_cast<std::size_t>(samples));
    g.states.reserve(static_cast<std::size_t>(samples));
    for (int k = 0; k <= N; ++k) {
        const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(N);
        g.times.push_back(t);
        g.states.push_back(closed_family(b, c, d, t));
    }
    g.base_point = g.states.front();
    g.controls.reserve(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        const double tm = 0.5 * (g.times[static_cast<std::size_t>(k)] +
                                 g.times[static_cast<std::size_t>(k) + 1]);
        const auto v = closed_family_velocity(b, c, d, tm);
        g.controls.push_back({v[0], v[1]});
    }
    return g;
}

// A corner through the origin at height a: γ(t) = (−t·x, 0, a) on [−1, 0] and
// (t·y, 0, a) on [0, 1], with x, y ∈ R² linearly independent. States are exact;
// controls are the constant leg velocities.
inline HorizontalCurve corner_family(const std::array<double, 2>& x, const std::array<double, 2>& y,
                                     double a, int samples_per_leg) {
    if (x[0] * y[1] - x[1] * y[0] == 0.0)
        throw domain_error("corner_family: directions must be linearly independent");
    if (samples_per_leg < 5) throw domain_error("corner_family: need at least 5 samples per leg");
    const int K = samples_per_leg - 1;
    HorizontalCurve g;
    for (int k = -K; k <= K; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(K);
        g.times.push_back(t);
        if (t <= 0.0)
            g.states.push_back({-t * x[0], -t * x[1], 0.0, a});
        else
            g.states.push_back({t * y[0], t * y[1], 0.0, a});
    }
    g.base_point = g.states.front();
    for (int k = -K; k < K; ++k) {
        if (k < 0)
            g.controls.push_back({-x[0], -x[1]});
        else
            g.controls.push_back({y[0], y[1]});
    }
    return g;
}

// Samples of φ = γ₁³γ₃, constant along abnormal extremals and zero exactly on
// corners; nonconstant φ certifies a curve as non-abnormal.
inline std::vector<double> conserved_quantity(const HorizontalCurve& gamma) {
    if (!gamma.has_states()) throw domain_error("conserved_quantity: curve states not integrated");
    gamma.validate(4);
    std::vector<double> phi;
    phi.reserve(gamma.states.size());
    for (const auto& g : gamma.states) phi.push_back(g[0] * g[0] * g[0] * g[2]);
    return phi;
}

// Denominator-cleared direction field (2x₁⁵, 3c + 2x₁⁴x₂) whose integral
// curves away from x₁ = 0 carry the planar shadows (γ₁, γ₂) of the family.
inline VectorField planar_characteristic_field(const Rational& c) {
    VectorField f(2);
    Polynomial p0(2), p1(2);
    p0.add_term(Exponents({5, 0}), Rational(2));
    p1.add_term(Exponents({0, 0}), 3 * c);
    p1.add_term(Exponents({4, 1}), Rational(2));
    f.set_coeff(0, std::move(p0));
    f.set_coeff(1, std::move(p1));
    return f;
}

// Unit-first-component direction (1, (3c + 2x₁⁴x₂)/(2x₁⁵)); the line x₁ = 0
// is outside the field's domain.
inline std::vector<double> planar_characteristic_direction(double c, const std::vector<double>& x) {
    if (x.size() != 2) throw domain_error("planar_characteristic_direction: point must lie in R^2");
    if (x[0] == 0.0)
        throw domain_error("planar_characteristic_direction: undefined on the line x1 = 0");
    const double x14 = x[0] * x[0] * x[0] * x[0];
    return {1.0, (3.0 * c + 2.0 * x14 * x[1]) / (2.0 * x14 * x[0])};
}

}  // namespace srgeo
