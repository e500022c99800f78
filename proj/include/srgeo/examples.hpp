#pragma once

#include <vector>

#include "srgeo/curve.hpp"
#include "srgeo/frame.hpp"

namespace srgeo {
namespace examples {

namespace detail {

struct TermSpec {
    const char* coeff;            // rational literal "p/q"
    std::vector<std::uint32_t> e;  // exponents per axis
};

inline Polynomial build_poly(int dim, std::initializer_list<TermSpec> terms) {
    Polynomial p(dim);
    for (const auto& t : terms) p.add_term(Exponents(t.e), parse_rational(t.coeff));
    return p;
}

}  // namespace detail

// R⁴ system: X₁ = ∂₁ + 2x₂∂₃ + x₃²∂₄, X₂ = ∂₂ − 2x₁∂₃, identity metric.
inline Frame ag_frame() {
    using detail::build_poly;
    VectorField X1(4), X2(4);
    X1.set_coeff(0, build_poly(4, {{"1", {0, 0, 0, 0}}}));
    X1.set_coeff(2, build_poly(4, {{"2", {0, 1, 0, 0}}}));
    X1.set_coeff(3, build_poly(4, {{"1", {0, 0, 2, 0}}}));
    X2.set_coeff(1, build_poly(4, {{"1", {0, 0, 0, 0}}}));
    X2.set_coeff(2, build_poly(4, {{"-2", {1, 0, 0, 0}}}));
    return Frame(4, {X1, X2});
}

inline std::vector<int> ag_weights() { return {1, 1, 2, 5}; }

// Heisenberg frame: ∂₁, ∂₂ + x₁∂₃; triangular graded with weights (1,1,2).
inline Frame heisenberg_frame() {
    using detail::build_poly;
    VectorField X1(3), X2(3);
    X1.set_coeff(0, build_poly(3, {{"1", {0, 0, 0}}}));
    X2.set_coeff(1, build_poly(3, {{"1", {0, 0, 0}}}));
    X2.set_coeff(2, build_poly(3, {{"1", {1, 0, 0}}}));
    return Frame(3, {X1, X2});
}

inline std::vector<int> heisenberg_weights() { return {1, 1, 2}; }

// Flat plane: ∂₁, ∂₂.
inline Frame euclidean2_frame() {
    using detail::build_poly;
    VectorField X1(2), X2(2);
    X1.set_coeff(0, build_poly(2, {{"1", {0, 0}}}));
    X2.set_coeff(1, build_poly(2, {{"1", {0, 0}}}));
    return Frame(2, {X1, X2});
}

inline std::vector<int> euclidean2_weights() { return {1, 1}; }

// Triangular graded model of the R⁴ system in corner-adapted coordinates:
// T₁ = ∂₁, T₂ = ∂₂ + x₁∂₃ + p₄(x)∂₄ with
// p₄ = x₁³x₂/6 − x₁²x₂²/8 − (3/4)x₁²x₃ + (3/2)x₁x₂x₃  (weighted degree 4).
// The corner maps to ê₂ → 0 → ê₁ and the generators pull back to
// (X₁+X₂, −X₁+X₂), so chart controls v transfer to u = (v₁−v₂, v₁+v₂).
inline Frame ag_triangular_frame() {
    using detail::build_poly;
    VectorField T1(4), T2(4);
    T1.set_coeff(0, build_poly(4, {{"1", {0, 0, 0, 0}}}));
    T2.set_coeff(1, build_poly(4, {{"1", {0, 0, 0, 0}}}));
    T2.set_coeff(2, build_poly(4, {{"1", {1, 0, 0, 0}}}));
    T2.set_coeff(3, build_poly(4, {{"1/6", {3, 1, 0, 0}},
                                   {"-1/8", {2, 2, 0, 0}},
                                   {"-3/4", {2, 0, 1, 0}},
                                   {"3/2", {1, 1, 1, 0}}}));
    return Frame(4, {T1, T2});
}

inline std::vector<int> ag_triangular_weights() { return {1, 1, 2, 5}; }

// Polynomial chart map from the triangular coordinates y to the original
// coordinates x of the R⁴ system (component i is x_i as a polynomial in y).
inline std::vector<Polynomial> ag_chart_to_plain() {
    using detail::build_poly;
    return {
        build_poly(4, {{"1", {1, 0, 0, 0}}, {"-1", {0, 1, 0, 0}}}),
        build_poly(4, {{"1", {1, 0, 0, 0}}, {"1", {0, 1, 0, 0}}}),
        build_poly(4, {{"4", {1, 1, 0, 0}}, {"-8", {0, 0, 1, 0}}}),
        build_poly(4, {{"16/3", {3, 2, 0, 0}},
                       {"-32", {2, 1, 1, 0}},
                       {"64", {1, 0, 2, 0}},
                       {"-64", {0, 1, 2, 0}},
                       {"128", {0, 0, 0, 1}}}),
    };
}

// Inverse chart map: y as polynomials in x.
inline std::vector<Polynomial> ag_plain_to_chart() {
    using detail::build_poly;
    return {
        build_poly(4, {{"1/2", {1, 0, 0, 0}}, {"1/2", {0, 1, 0, 0}}}),
        build_poly(4, {{"-1/2", {1, 0, 0, 0}}, {"1/2", {0, 1, 0, 0}}}),
        build_poly(4, {{"-1/8", {2, 0, 0, 0}}, {"1/8", {0, 2, 0, 0}}, {"-1/8", {0, 0, 1, 0}}}),
        build_poly(4, {{"-1/192", {5, 0, 0, 0}},
                       {"1/384", {4, 1, 0, 0}},
                       {"1/96", {3, 2, 0, 0}},
                       {"-3/256", {3, 0, 1, 0}},
                       {"-1/192", {2, 3, 0, 0}},
                       {"1/256", {2, 1, 1, 0}},
                       {"-1/192", {1, 4, 0, 0}},
                       {"3/256", {1, 2, 1, 0}},
                       {"-1/128", {1, 0, 2, 0}},
                       {"1/384", {0, 5, 0, 0}},
                       {"-1/256", {0, 3, 1, 0}},
                       {"1/128", {0, 0, 0, 1}}}),
    };
}

inline std::vector<Rational> eval_map(const std::vector<Polynomial>& map,
                                      const std::vector<Rational>& x) {
    std::vector<Rational> y;
    y.reserve(map.size());
    for (const auto& p : map) y.push_back(p.eval(x));
    return y;
}

inline std::vector<double> eval_map(const std::vector<Polynomial>& map,
                                    const std::vector<double>& x) {
    std::vector<double> y;
    y.reserve(map.size());
    for (const auto& p : map) y.push_back(p.eval(x));
    return y;
}

// Chart controls v (for T₁,T₂) to original controls u (for X₁,X₂).
inline std::vector<double> ag_transfer_controls(const std::vector<double>& v) {
    if (v.size() != 2) throw domain_error("ag_transfer_controls: expected 2 controls");
    return {v[0] - v[1], v[0] + v[1]};
}

// Transfers a whole chart control signal to the original frame's controls on
// the same time grid; lengths pick up a factor of √2.
inline ControlCurve ag_transfer_curve(const ControlCurve& chart) {
    ControlCurve out;
    out.times = chart.times;
    out.controls.reserve(chart.controls.size());
    for (const auto& v : chart.controls) out.controls.push_back(ag_transfer_controls(v));
    return out;
}

// The α=1 corner of the R⁴ system: (t, |t|, 0, 0) on [−1,1], endpoints
// (−1,1,0,0) → (1,1,0,0); controls are the transferred corner controls.
inline HorizontalCurve ag_corner() {
    HorizontalCurve c;
    c.base_point = {-1.0, 1.0, 0.0, 0.0};
    c.times = {-1.0, 0.0, 1.0};
    c.controls = {{1.0, -1.0}, {1.0, 1.0}};
    return c;
}

}  // namespace examples
}  // namespace srgeo
