#pragma once

#include <utility>
#include <vector>

#include "srgeo/bracket_engine.hpp"
#include "srgeo/frame.hpp"
#include "srgeo/nilpotentization.hpp"

namespace srgeo {

// Graded frame in corner-adapted coordinates: two generators
//   X₁ = ∂₁,   X₂ = ∂₂ + Σ_{i≥3} p_i(x) ∂_i,
// with w₁ = w₂ = 1 and each p_i weighted-homogeneous of degree w_i − 1,
// depending only on x₁,…,x_{i−1}, and vanishing on the x₂-axis (so the
// model corner ê₂ → 0 → ê₁ is horizontal with unit controls).
class TriangularFrame {
public:
    TriangularFrame(Frame frame, std::vector<int> weights)
        : frame_(std::move(frame)), weights_(std::move(weights)) {
        validate();
    }

    const Frame& frame() const { return frame_; }
    const std::vector<int>& weights() const { return weights_; }
    int dimension() const { return frame_.dimension(); }
    int top_weight() const { return weights_.back(); }

    // p_i as stored on the second generator; i is the 1-based axis, i ≥ 3.
    const Polynomial& p(int i) const { return frame_.generator(2).coeff(i - 1); }

private:
    void validate() const {
        const int n = frame_.dimension();
        validate_weights(weights_, n);
        if (n < 2) throw domain_error("triangular frame: dimension must be >= 2");
        if (frame_.num_generators() != 2)
            throw domain_error("triangular frame: exactly two generators required");
        if (weights_[0] != 1 || weights_[1] != 1)
            throw domain_error("triangular frame: the first two weights must be 1");
        for (int i = 2; i < n; ++i)
            if (weights_[static_cast<std::size_t>(i)] < 2)
                throw domain_error("triangular frame: weights beyond the plane must be >= 2");

        const VectorField& X1 = frame_.generator(1);
        const VectorField& X2 = frame_.generator(2);
        if (X1 != VectorField::coordinate(n, 0))
            throw domain_error("triangular frame: first generator must be d/dx1");
        if (!X2.coeff(0).is_zero() || !(X2.coeff(1) == Polynomial::constant(n, Rational(1))))
            throw domain_error("triangular frame: second generator must be d/dx2 + sum p_i d/dx_i");
        for (int i = 2; i < n; ++i) {
            const Polynomial& p = X2.coeff(i);
            if (p.is_zero()) continue;
            const auto degs = p.weighted_degrees(weights_);
            for (long d : degs)
                if (d != weights_[static_cast<std::size_t>(i)] - 1)
                    throw domain_error("triangular frame: p_i must be homogeneous of degree w_i - 1");
            for (const auto& [exps, coeff] : p.terms()) {
                (void)coeff;
                for (std::size_t a = static_cast<std::size_t>(i); a < exps.size(); ++a)
                    if (exps[a] != 0)
                        throw domain_error("triangular frame: p_i may only involve x1..x_{i-1}");
            }
            // Horizontality of the model corner: p_i(0, x2, 0, ...) = 0.
            std::vector<Rational> axis_scale(static_cast<std::size_t>(n), Rational(0));
            axis_scale[1] = Rational(1);
            if (!p.diagonal_substitute(axis_scale).is_zero())
                throw domain_error("triangular frame: p_i must vanish on the x2-axis");
        }
    }

    Frame frame_;
    std::vector<int> weights_;
};

// Forgets the top coordinate: both generators lose their ∂_n components,
// which is well defined because no p_j involves x_n.
inline TriangularFrame project(const TriangularFrame& tf) {
    const int n = tf.dimension();
    if (n < 3) throw domain_error("project: dimension must be >= 3");
    std::vector<VectorField> gens;
    for (int j = 1; j <= 2; ++j) {
        const VectorField& X = tf.frame().generator(j);
        VectorField Y(n - 1);
        for (int i = 0; i < n - 1; ++i) {
            Polynomial q(n - 1);
            for (const auto& [exps, coeff] : X.coeff(i).terms()) {
                if (exps[static_cast<std::size_t>(n - 1)] != 0)
                    throw domain_error("project: coefficient involves the dropped coordinate");
                Exponents cut(exps.begin(), exps.end() - 1);
                q.add_term(std::move(cut), coeff);
            }
            Y.set_coeff(i, std::move(q));
        }
        gens.push_back(std::move(Y));
    }
    std::vector<int> w(tf.weights().begin(), tf.weights().end() - 1);
    return TriangularFrame(Frame(n - 1, std::move(gens), tf.frame().metric()), std::move(w));
}

// The commutator direction used to patch the top coordinate. Derived from the
// adapted-basis element β reaching ∂_n at 0: β̂ drops β's outermost entry, and
// Z = X_β̂ is rescaled so that the x_{outer}-coefficient of its top-axis
// entry b_n equals 1.
struct ZChoice {
    VectorField Z;        // rescaled; equals Σ_{w_j = w_n} b_j ∂_j with b_j linear
    MultiIndex beta;      // adapted-basis index with ∂_n = X_β at 0
    MultiIndex beta_hat;  // β with the outermost entry removed
    int outer = 0;        // the removed entry, in {1, 2}
    Rational scale;       // Z = X_β̂ / scale
};

inline ZChoice choose_Z(const TriangularFrame& tf, const AdaptedBasis& basis) {
    const int n = tf.dimension();
    const int wn = tf.top_weight();
    if (wn < 3) throw domain_error("choose_Z: top weight must be >= 3 (base case otherwise)");
    if (basis.indices.size() != static_cast<std::size_t>(n))
        throw domain_error("choose_Z: adapted basis size mismatch");

    // Brackets of length w_n − 1 must add nothing at the origin.
    const std::vector<Rational> origin(static_cast<std::size_t>(n), Rational(0));
    if (!layer_at(tf.frame(), origin, wn - 1).indices.empty())
        throw domain_error("choose_Z: brackets of length w_n - 1 are nonzero at the origin");

    // Scan weight-w_n basis elements from the back for one whose commutator,
    // with the outermost flow removed, reaches the top axis through x_outer.
    for (std::size_t bi = basis.indices.size(); bi-- > 0;) {
        if (basis.weights[bi] != wn) break;
        const MultiIndex& beta = basis.indices[bi];
        if (beta.length() != wn) continue;
        const int outer = beta.entries.back();
        MultiIndex beta_hat(std::vector<int>(beta.entries.begin(), beta.entries.end() - 1));
        VectorField Z = iterated_commutator(tf.frame(), beta_hat);

        bool structured = true;
        for (int i = 0; i < n && structured; ++i) {
            const Polynomial& b = Z.coeff(i);
            if (b.is_zero()) continue;
            if (tf.weights()[static_cast<std::size_t>(i)] != wn) { structured = false; break; }
            for (long d : b.weighted_degrees(tf.weights()))
                if (d != 1) { structured = false; break; }
        }
        if (!structured) continue;

        // c = coefficient of x_outer in b_n.
        Exponents unit(static_cast<std::size_t>(n), 0);
        unit[static_cast<std::size_t>(outer - 1)] = 1;
        const Rational c = Z.coeff(n - 1).coefficient(unit);
        if (c == 0) continue;
        return ZChoice{Z.scaled(Rational(1) / c), beta, std::move(beta_hat), outer, c};
    }
    throw domain_error(
        "choose_Z: no adapted-basis commutator of top weight reaches the top axis with a unit "
        "linear coefficient");
}

}  // namespace srgeo
