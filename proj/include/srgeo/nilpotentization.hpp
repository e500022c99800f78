#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "srgeo/bracket_engine.hpp"
#include "srgeo/curve.hpp"
#include "srgeo/flows.hpp"

namespace srgeo {

inline void validate_weights(const std::vector<int>& weights, int dimension) {
    if (static_cast<int>(weights.size()) != dimension)
        throw domain_error("weights: size must equal the dimension");
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 1) throw domain_error("weights: entries must be positive");
        if (i > 0 && weights[i] < weights[i - 1])
            throw domain_error("weights: entries must be nondecreasing");
    }
}

// δ_λ(x) = (λ^{w₁}x₁, …, λ^{w_n}x_n).
inline std::vector<double> dilate(const std::vector<double>& x, const std::vector<int>& weights,
                                  double lam) {
    validate_weights(weights, static_cast<int>(x.size()));
    if (!(lam > 0.0)) throw domain_error("dilate: lambda must be positive");
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double f = 1.0;
        for (int r = 0; r < weights[i]; ++r) f *= lam;
        y[i] = f * x[i];
    }
    return y;
}

inline std::vector<Rational> dilate(const std::vector<Rational>& x,
                                    const std::vector<int>& weights, const Rational& lam) {
    validate_weights(weights, static_cast<int>(x.size()));
    if (!(lam > 0)) throw domain_error("dilate: lambda must be positive");
    std::vector<Rational> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = rational_pow(lam, weights[i]) * x[i];
    return y;
}

// X^λ(x) = Σ_i λ^{w_i − length} a_i(δ_{1/λ}(x)) ∂/∂x_i, exact in λ.
inline VectorField scale_field(const VectorField& X, const std::vector<int>& weights, int length,
                               const Rational& lam) {
    validate_weights(weights, X.dimension());
    if (!(lam > 0)) throw domain_error("scale_field: lambda must be positive");
    if (length < 1) throw domain_error("scale_field: length must be >= 1");
    std::vector<Rational> inv_scale(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) inv_scale[i] = rational_pow(lam, -weights[i]);
    VectorField out(X.dimension());
    for (int i = 0; i < X.dimension(); ++i)
        out.set_coeff(i, X.coeff(i)
                             .diagonal_substitute(inv_scale)
                             .scaled(rational_pow(lam, weights[static_cast<std::size_t>(i)] - length)));
    return out;
}

// X^∞: on axis i keep the weighted-homogeneous part of degree w_i − length
// (zero when w_i < length).
inline VectorField limit_field(const VectorField& X, const std::vector<int>& weights, int length) {
    validate_weights(weights, X.dimension());
    if (length < 1) throw domain_error("limit_field: length must be >= 1");
    VectorField out(X.dimension());
    for (int i = 0; i < X.dimension(); ++i)
        out.set_coeff(i, X.coeff(i).weighted_part(
                             weights, weights[static_cast<std::size_t>(i)] - length));
    return out;
}

struct Decomposition {
    VectorField homogeneous;  // p_i: weighted degree exactly w_i − length
    VectorField residual;     // r_i: strictly higher weighted degree only
};

// Exact split a_i = p_i + r_i. Coefficients with weighted degree below
// w_i − length mean the frame is not expressed in adapted coordinates.
inline Decomposition decompose(const VectorField& X, const std::vector<int>& weights, int length) {
    validate_weights(weights, X.dimension());
    if (length < 1) throw domain_error("decompose: length must be >= 1");
    Decomposition d{VectorField(X.dimension()), VectorField(X.dimension())};
    for (int i = 0; i < X.dimension(); ++i) {
        const long target = weights[static_cast<std::size_t>(i)] - length;
        Polynomial p(X.dimension()), r(X.dimension());
        for (const auto& [exps, coeff] : X.coeff(i).terms()) {
            const long deg = Polynomial::weighted_degree_of(exps, weights);
            if (deg < target)
                throw domain_error(
                    "decompose: structure violation on axis " + std::to_string(i + 1) +
                    " — coefficient term of weighted degree " + std::to_string(deg) +
                    " below w_i - length = " + std::to_string(target) +
                    " (frame not in adapted coordinates)");
            if (deg == target)
                p.add_term(exps, coeff);
            else
                r.add_term(exps, coeff);
        }
        d.homogeneous.set_coeff(i, std::move(p));
        d.residual.set_coeff(i, std::move(r));
    }
    return d;
}

struct GradedStructure {
    std::vector<int> weights;
    long homogeneous_dimension = 0;  // Q = Σ w_i
    Frame limit_frame;
};

// Builds the graded structure of a frame in adapted coordinates; generators
// have commutator length 1. Structure violations surface via decompose.
inline GradedStructure nilpotentize(const Frame& frame, const std::vector<int>& weights) {
    validate_weights(weights, frame.dimension());
    std::vector<VectorField> limits;
    limits.reserve(frame.generators().size());
    for (const auto& X : frame.generators())
        limits.push_back(decompose(X, weights, 1).homogeneous);
    GradedStructure g{weights, 0, Frame(frame.dimension(), std::move(limits), frame.metric())};
    for (int w : weights) g.homogeneous_dimension += w;
    return g;
}

// [X_i, X_β]^λ = [X_i^λ, X_β^λ] for every generator X_i, exact in λ.
inline bool verify_bracket_preservation(const Frame& frame, const std::vector<int>& weights,
                                        const MultiIndex& beta, const Rational& lam) {
    beta.validate(frame.num_generators());
    const int k = beta.length();
    const VectorField Xb = iterated_commutator(frame, beta);
    const VectorField Xb_scaled = scale_field(Xb, weights, k, lam);
    for (int i = 1; i <= frame.num_generators(); ++i) {
        const VectorField lhs = scale_field(lie_bracket(frame.generator(i), Xb), weights, k + 1, lam);
        const VectorField rhs =
            lie_bracket(scale_field(frame.generator(i), weights, 1, lam), Xb_scaled);
        if (lhs != rhs) return false;
    }
    return true;
}

// Same identity at λ = ∞, via the limit fields.
inline bool verify_bracket_preservation_at_infinity(const Frame& frame,
                                                    const std::vector<int>& weights,
                                                    const MultiIndex& beta) {
    beta.validate(frame.num_generators());
    const int k = beta.length();
    const VectorField Xb = iterated_commutator(frame, beta);
    const VectorField Xb_limit = limit_field(Xb, weights, k);
    for (int i = 1; i <= frame.num_generators(); ++i) {
        const VectorField lhs = limit_field(lie_bracket(frame.generator(i), Xb), weights, k + 1);
        const VectorField rhs = lie_bracket(limit_field(frame.generator(i), weights, 1), Xb_limit);
        if (lhs != rhs) return false;
    }
    return true;
}

// γ ↦ δ_ε ∘ γ for graded frames: (δ_ε)_* X_j = ε X_j, so the dilated curve
// keeps the time grid and scales the controls by ε.
inline HorizontalCurve dilate_curve(const HorizontalCurve& curve, const std::vector<int>& weights,
                                    double eps) {
    validate_weights(weights, static_cast<int>(curve.base_point.size()));
    if (!(eps > 0.0)) throw domain_error("dilate_curve: epsilon must be positive");
    HorizontalCurve out;
    out.base_point = dilate(curve.base_point, weights, eps);
    out.times = curve.times;
    out.controls = curve.controls;
    for (auto& u : out.controls)
        for (double& c : u) c *= eps;
    if (curve.has_states()) {
        out.states.reserve(curve.states.size());
        for (const auto& s : curve.states) out.states.push_back(dilate(s, weights, eps));
    }
    return out;
}

// γ^λ(t) = δ_λ γ(t/λ) on [t₀,t₁] ∩ [λt₀, λt₁]. States are transported from
// the source trajectory; the carried controls u(t/λ) are horizontal with
// respect to the λ-scaled frame (which equals the input frame when graded).
inline HorizontalCurve blow_up_curve(const Frame& frame, const HorizontalCurve& curve,
                                     const std::vector<int>& weights, double lam,
                                     double tol = kDefaultFlowTol) {
    validate_weights(weights, frame.dimension());
    if (!(lam > 0.0)) throw domain_error("blow_up_curve: lambda must be positive");
    HorizontalCurve src = curve;
    src.validate(frame.dimension(), frame.num_generators());
    if (!(src.t0() <= 0.0 && src.t1() >= 0.0))
        throw domain_error("blow_up_curve: the curve domain must contain parameter 0 (the corner)");
    if (!src.has_states()) integrate_states(frame, src, tol);

    const double a = std::max(src.t0(), lam * src.t0());
    const double b = std::min(src.t1(), lam * src.t1());

    // New breakpoints: λ·(source grid) clipped to [a,b], plus the ends.
    std::vector<double> grid;
    grid.push_back(a);
    for (double s : src.times) {
        const double t = lam * s;
        if (t > a && t < b) grid.push_back(t);
    }
    grid.push_back(b);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // State of the source curve at an arbitrary parameter value.
    CompiledFrame cf(frame);
    auto state_at = [&](double t) -> std::vector<double> {
        std::size_t k = 0;
        while (k + 2 < src.times.size() && src.times[k + 1] <= t) ++k;
        std::vector<double> x = src.states[k];
        const double dt = t - src.times[k];
        if (dt > 0.0) {
            const long S = substeps_for_interval(dt, tol);
            const double h = dt / static_cast<double>(S);
            const std::size_t n = x.size();
            std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
            const double* u = src.controls[k].data();
            for (long s = 0; s < S; ++s)
                detail::rk4_step_controlled(cf, x, u, h, k1, k2, k3, k4, tmp);
        }
        return x;
    };

    HorizontalCurve out;
    out.times = grid;
    out.base_point = dilate(state_at(grid.front() / lam), weights, lam);
    out.states.push_back(out.base_point);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double mid = 0.5 * (grid[k] + grid[k + 1]) / lam;
        std::size_t j = 0;
        while (j + 2 < src.times.size() && src.times[j + 1] <= mid) ++j;
        out.controls.push_back(src.controls[j]);
        out.states.push_back(dilate(state_at(grid[k + 1] / lam), weights, lam));
    }
    return out;
}

}  // namespace srgeo
