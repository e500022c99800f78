#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "srgeo/bracket_engine.hpp"
#include "srgeo/compiled_field.hpp"
#include "srgeo/curve.hpp"

namespace srgeo {

inline constexpr double kDefaultFlowTol = 1e-10;
inline constexpr double kNewtonTol = 1e-10;
inline constexpr int kNewtonMaxIter = 100;
inline constexpr double kConcatenationGapLimit = 1e-9;

namespace detail {

// Classical 4th-order step for an autonomous compiled field.
inline void rk4_step(const CompiledVectorField& f, std::vector<double>& x, double h,
                     std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
                     std::vector<double>& k4, std::vector<double>& tmp) {
    const std::size_t n = x.size();
    f.eval(x.data(), k1.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    f.eval(tmp.data(), k2.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    f.eval(tmp.data(), k3.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    f.eval(tmp.data(), k4.data());
    for (std::size_t i = 0; i < n; ++i)
        x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

inline std::vector<double> rk4_integrate(const CompiledVectorField& f, std::vector<double> x,
                                         double t, long substeps) {
    const std::size_t n = x.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double h = t / static_cast<double>(substeps);
    for (long s = 0; s < substeps; ++s) rk4_step(f, x, h, k1, k2, k3, k4, tmp);
    return x;
}

// RK4 step for ẋ = Σ_j u_j X_j(x) with a constant control vector.
inline void rk4_step_controlled(const CompiledFrame& frame, std::vector<double>& x,
                                const double* u, double h, std::vector<double>& k1,
                                std::vector<double>& k2, std::vector<double>& k3,
                                std::vector<double>& k4, std::vector<double>& tmp) {
    const std::size_t n = x.size();
    frame.eval_combination(x.data(), u, k1.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    frame.eval_combination(tmp.data(), u, k2.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    frame.eval_combination(tmp.data(), u, k3.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    frame.eval_combination(tmp.data(), u, k4.data());
    for (std::size_t i = 0; i < n; ++i)
        x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace detail

// Substep count for one control interval. Depends on the time grid and the
// tolerance only — never on control or state magnitudes — so curves that
// differ by a dilation integrate on identical step sequences.
inline long substeps_for_interval(double dt, double tol = kDefaultFlowTol) {
    const double target = std::pow(std::max(tol, 1e-16), 0.25);
    const double raw = std::abs(dt) / target;
    long s = static_cast<long>(std::ceil(raw - 1e-12));
    if (s < 2) s = 2;
    if (s > (1L << 20)) s = 1L << 20;
    return s;
}

// Solution of ẋ = X(x) at time t. Fixed-substep RK4 with the substep count
// chosen by Richardson comparison: halve steps until two resolutions agree to
// tol per unit time.
inline std::vector<double> flow(const CompiledVectorField& X, const std::vector<double>& x0,
                                double t, double tol = kDefaultFlowTol) {
    if (static_cast<int>(x0.size()) != X.dimension()) throw domain_error("flow: dimension mismatch");
    for (double c : x0)
        if (!std::isfinite(c)) throw domain_error("flow: non-finite start point");
    if (!std::isfinite(t)) throw domain_error("flow: non-finite duration");
    if (t == 0.0) return x0;

    long n = substeps_for_interval(t, tol);
    const double scale = std::max(std::abs(t), 1.0);
    for (;;) {
        auto coarse = detail::rk4_integrate(X, x0, t, n);
        auto fine = detail::rk4_integrate(X, x0, t, 2 * n);
        double err = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            if (!std::isfinite(fine[i])) throw domain_error("flow: trajectory blow-up");
            err = std::max(err, std::abs(fine[i] - coarse[i]));
        }
        // One-step-method error estimate for order 4: |fine − exact| ≈ err/15.
        if (err / 15.0 <= tol * scale) return fine;
        n *= 2;
        if (n > (1L << 22)) throw domain_error("flow: step underflow (required step below limit)");
    }
}

inline std::vector<double> flow(const VectorField& X, const std::vector<double>& x0, double t,
                                double tol = kDefaultFlowTol) {
    return flow(CompiledVectorField(X), x0, t, tol);
}

// Fills curve.states by integrating ẋ = Σ_j u_j X_j(x) across the grid.
inline void integrate_states(const CompiledFrame& cf, HorizontalCurve& curve,
                             double tol = kDefaultFlowTol) {
    curve.validate(cf.dimension(), cf.num_generators());
    const std::size_t n = curve.base_point.size();
    std::vector<double> x = curve.base_point;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    curve.states.clear();
    curve.states.reserve(curve.times.size());
    curve.states.push_back(x);
    for (int k = 0; k < curve.intervals(); ++k) {
        const double dt = curve.times[static_cast<std::size_t>(k) + 1] -
                          curve.times[static_cast<std::size_t>(k)];
        const long S = substeps_for_interval(dt, tol);
        const double h = dt / static_cast<double>(S);
        const double* u = curve.controls[static_cast<std::size_t>(k)].data();
        for (long s = 0; s < S; ++s) detail::rk4_step_controlled(cf, x, u, h, k1, k2, k3, k4, tmp);
        curve.states.push_back(x);
    }
}

inline void integrate_states(const Frame& frame, HorizontalCurve& curve,
                             double tol = kDefaultFlowTol) {
    CompiledFrame cf(frame);
    integrate_states(cf, curve, tol);
}

// Same trajectory integrated with twice the substeps per interval; used for
// certificate soundness checks.
inline std::vector<double> endpoint_half_step(const Frame& frame, const HorizontalCurve& curve,
                                              double tol = kDefaultFlowTol) {
    CompiledFrame cf(frame);
    curve.validate(cf.dimension(), cf.num_generators());
    const std::size_t n = curve.base_point.size();
    std::vector<double> x = curve.base_point;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int k = 0; k < curve.intervals(); ++k) {
        const double dt = curve.times[static_cast<std::size_t>(k) + 1] -
                          curve.times[static_cast<std::size_t>(k)];
        const long S = 2 * substeps_for_interval(dt, tol);
        const double h = dt / static_cast<double>(S);
        const double* u = curve.controls[static_cast<std::size_t>(k)].data();
        for (long s = 0; s < S; ++s) detail::rk4_step_controlled(cf, x, u, h, k1, k2, k3, k4, tmp);
    }
    return x;
}

// Trajectory of ẋ = Σ u_j X_j(x) from `start` under the given controls.
inline HorizontalCurve horizontal_lift(const Frame& frame, const ControlCurve& controls,
                                       const std::vector<double>& start,
                                       double tol = kDefaultFlowTol) {
    controls.validate(frame.num_generators());
    if (static_cast<int>(start.size()) != frame.dimension())
        throw domain_error("horizontal_lift: start point dimension mismatch");
    HorizontalCurve curve;
    curve.base_point = start;
    curve.times = controls.times;
    curve.controls = controls.controls;
    integrate_states(frame, curve, tol);
    return curve;
}

// L = Σ_k sqrt(u_kᵀ G u_k) Δt_k — exact quadrature for piecewise-constant
// controls.
inline double curve_length(const Frame& frame, const HorizontalCurve& curve) {
    curve.validate(frame.dimension(), frame.num_generators());
    double L = 0.0;
    for (int k = 0; k < curve.intervals(); ++k) {
        const double dt = curve.times[static_cast<std::size_t>(k) + 1] -
                          curve.times[static_cast<std::size_t>(k)];
        L += std::sqrt(frame.metric().quadratic_form(curve.controls[static_cast<std::size_t>(k)])) *
             dt;
    }
    return L;
}

// Joins b after a; b is re-based on a's endpoint. Gaps above the limit are
// input errors, smaller gaps are absorbed by the re-basing.
inline HorizontalCurve concatenate(const Frame& frame, const HorizontalCurve& a,
                                   const HorizontalCurve& b, double tol = kDefaultFlowTol) {
    HorizontalCurve left = a;
    if (!left.has_states()) integrate_states(frame, left, tol);
    const auto& join = left.endpoint();
    if (b.base_point.size() != join.size())
        throw domain_error("concatenate: dimension mismatch");
    double gap = 0.0;
    for (std::size_t i = 0; i < join.size(); ++i)
        gap = std::max(gap, std::abs(join[i] - b.base_point[i]));
    if (gap > kConcatenationGapLimit)
        throw domain_error("concatenate: endpoint/base gap exceeds 1e-9");

    HorizontalCurve out;
    out.base_point = left.base_point;
    out.times = left.times;
    out.controls = left.controls;
    const double shift = left.t1() - b.t0();
    for (std::size_t k = 1; k < b.times.size(); ++k) out.times.push_back(b.times[k] + shift);
    for (const auto& u : b.controls) out.controls.push_back(u);
    integrate_states(frame, out, tol);
    return out;
}

// Time-reversal: traverses the trajectory backwards. Controls are negated and
// re-ordered; the base point becomes the original endpoint.
inline HorizontalCurve reverse_curve(const Frame& frame, const HorizontalCurve& curve,
                                     double tol = kDefaultFlowTol) {
    HorizontalCurve src = curve;
    if (!src.has_states()) integrate_states(frame, src, tol);
    HorizontalCurve out;
    out.base_point = src.endpoint();
    const double t0 = src.t0(), t1 = src.t1();
    out.times.reserve(src.times.size());
    for (std::size_t k = src.times.size(); k-- > 0;) out.times.push_back(t0 + (t1 - src.times[k]));
    out.controls.reserve(src.controls.size());
    for (std::size_t k = src.controls.size(); k-- > 0;) {
        auto u = src.controls[k];
        for (double& c : u) c = -c;
        out.controls.push_back(std::move(u));
    }
    integrate_states(frame, out, tol);
    return out;
}

// x = exp(Σ c_i X_i)(0): unit-time flow of the combined field from the origin.
inline std::vector<double> exp_coords_first(const AdaptedBasis& basis,
                                            const std::vector<double>& coords,
                                            double tol = kDefaultFlowTol) {
    if (basis.fields.empty() || coords.size() != basis.fields.size())
        throw domain_error("exp_coords_first: coordinate count mismatch");
    const int n = basis.fields.front().dimension();
    auto combined = CompiledVectorField::linear_combination(basis.fields, coords);
    return flow(combined, std::vector<double>(static_cast<std::size_t>(n), 0.0), 1.0, tol);
}

// x = exp(c₁X₁) ∘ … ∘ exp(c_nX_n)(0), rightmost factor applied first.
inline std::vector<double> exp_coords_second(const AdaptedBasis& basis,
                                             const std::vector<double>& coords,
                                             double tol = kDefaultFlowTol) {
    if (basis.fields.empty() || coords.size() != basis.fields.size())
        throw domain_error("exp_coords_second: coordinate count mismatch");
    const int n = basis.fields.front().dimension();
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = basis.fields.size(); i-- > 0;) {
        if (coords[i] == 0.0) continue;
        p = flow(CompiledVectorField(basis.fields[i]), p, coords[i], tol);
    }
    return p;
}

namespace detail {

template <typename ForwardMap>
std::vector<double> damped_newton_inverse(ForwardMap&& fwd, const std::vector<double>& target,
                                          std::vector<double> guess, double tol, int max_iter) {
    const std::size_t n = target.size();
    auto residual = [&](const std::vector<double>& c) {
        auto y = fwd(c);
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - target[i];
        return r;
    };
    auto sup = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double c : v) m = std::max(m, std::abs(c));
        return m;
    };

    std::vector<double> c = std::move(guess);
    std::vector<double> r = residual(c);
    for (int it = 0; it < max_iter; ++it) {
        const double rn = sup(r);
        if (rn <= tol) return c;
        // Finite-difference Jacobian of the forward map at c.
        Eigen::MatrixXd J(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            const double delta = 1e-6 * std::max(1.0, std::abs(c[j]));
            auto cj = c;
            cj[j] += delta;
            auto rj = residual(cj);
            for (std::size_t i = 0; i < n; ++i)
                J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    (rj[i] - r[i]) / delta;
        }
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = -r[i];
        Eigen::VectorXd step = J.fullPivLu().solve(rhs);

        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            auto cand = c;
            for (std::size_t i = 0; i < n; ++i)
                cand[i] += lambda * step(static_cast<Eigen::Index>(i));
            auto rc = residual(cand);
            if (sup(rc) < rn) {
                c = std::move(cand);
                r = std::move(rc);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted)
            throw domain_error("exponential coordinates: Newton step failed to reduce the residual");
    }
    throw domain_error("exponential coordinates: Newton did not converge in 100 iterations");
}

inline std::vector<double> linear_init(const AdaptedBasis& basis,
                                       const std::vector<double>& target) {
    const std::size_t n = target.size();
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> origin(n, 0.0);
    for (std::size_t j = 0; j < basis.fields.size(); ++j) {
        auto col = basis.fields[j].eval(origin);
        for (std::size_t i = 0; i < n; ++i)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) b(static_cast<Eigen::Index>(i)) = target[i];
    Eigen::VectorXd c = A.fullPivLu().solve(b);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = c(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace detail

inline std::vector<double> exp_coords_first_inverse(const AdaptedBasis& basis,
                                                    const std::vector<double>& point,
                                                    double tol = kNewtonTol) {
    if (basis.fields.empty() || point.size() != basis.fields.size())
        throw domain_error("exp_coords_first_inverse: dimension mismatch");
    return detail::damped_newton_inverse(
        [&](const std::vector<double>& c) { return exp_coords_first(basis, c); }, point,
        detail::linear_init(basis, point), tol, kNewtonMaxIter);
}

inline std::vector<double> exp_coords_second_inverse(const AdaptedBasis& basis,
                                                     const std::vector<double>& point,
                                                     double tol = kNewtonTol) {
    if (basis.fields.empty() || point.size() != basis.fields.size())
        throw domain_error("exp_coords_second_inverse: dimension mismatch");
    return detail::damped_newton_inverse(
        [&](const std::vector<double>& c) { return exp_coords_second(basis, c); }, point,
        detail::linear_init(basis, point), tol, kNewtonMaxIter);
}

}  // namespace srgeo
