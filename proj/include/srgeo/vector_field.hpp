#pragma once

#include <string>
#include <vector>

#include "srgeo/polynomial.hpp"

namespace srgeo {

// Polynomial vector field X = Σ a_i(x) ∂/∂x_i, stored as one coefficient
// polynomial per axis.
class VectorField {
public:
    explicit VectorField(int dimension = 0)
        : dim_(dimension), coeffs_(static_cast<std::size_t>(dimension), Polynomial(dimension)) {
        if (dimension < 0) throw domain_error("vector field dimension must be nonnegative");
    }

    explicit VectorField(std::vector<Polynomial> coeffs)
        : dim_(static_cast<int>(coeffs.size())), coeffs_(std::move(coeffs)) {
        for (const auto& c : coeffs_)
            if (c.dimension() != dim_)
                throw domain_error("vector field coefficient dimension mismatch");
    }

    static VectorField zero(int dimension) { return VectorField(dimension); }

    // ∂/∂x_{axis} (0-based).
    static VectorField coordinate(int dimension, int axis) {
        VectorField v(dimension);
        v.set_coeff(axis, Polynomial::constant(dimension, Rational(1)));
        return v;
    }

    int dimension() const { return dim_; }
    const Polynomial& coeff(int axis) const { return coeffs_.at(static_cast<std::size_t>(axis)); }
    const std::vector<Polynomial>& coeffs() const { return coeffs_; }

    void set_coeff(int axis, Polynomial p) {
        if (p.dimension() != dim_) throw domain_error("coefficient dimension mismatch");
        coeffs_.at(static_cast<std::size_t>(axis)) = std::move(p);
    }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }

    bool operator==(const VectorField& rhs) const {
        return dim_ == rhs.dim_ && coeffs_ == rhs.coeffs_;
    }
    bool operator!=(const VectorField& rhs) const { return !(*this == rhs); }

    VectorField& operator+=(const VectorField& rhs) {
        require_same_dim(rhs);
        for (int i = 0; i < dim_; ++i) coeffs_[static_cast<std::size_t>(i)] += rhs.coeff(i);
        return *this;
    }
    VectorField& operator-=(const VectorField& rhs) {
        require_same_dim(rhs);
        for (int i = 0; i < dim_; ++i) coeffs_[static_cast<std::size_t>(i)] -= rhs.coeff(i);
        return *this;
    }
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }

    VectorField operator-() const {
        VectorField out(dim_);
        for (int i = 0; i < dim_; ++i) out.set_coeff(i, -coeff(i));
        return out;
    }

    VectorField scaled(const Rational& s) const {
        VectorField out(dim_);
        for (int i = 0; i < dim_; ++i) out.set_coeff(i, coeff(i).scaled(s));
        return out;
    }

    // X acting on f as a derivation: Σ a_i ∂f/∂x_i.
    Polynomial apply(const Polynomial& f) const {
        if (f.dimension() != dim_) throw domain_error("apply: dimension mismatch");
        Polynomial out(dim_);
        for (int i = 0; i < dim_; ++i) out += coeffs_[static_cast<std::size_t>(i)] * f.partial(i);
        return out;
    }

    std::vector<Rational> eval(const std::vector<Rational>& x) const {
        std::vector<Rational> v;
        v.reserve(coeffs_.size());
        for (const auto& c : coeffs_) v.push_back(c.eval(x));
        return v;
    }

    std::vector<double> eval(const std::vector<double>& x) const {
        std::vector<double> v;
        v.reserve(coeffs_.size());
        for (const auto& c : coeffs_) v.push_back(c.eval(x));
        return v;
    }

    std::string to_string() const {
        std::string s = "(";
        for (int i = 0; i < dim_; ++i) {
            if (i) s += ", ";
            s += coeff(i).to_string();
        }
        return s + ")";
    }

private:
    void require_same_dim(const VectorField& rhs) const {
        if (dim_ != rhs.dim_) throw domain_error("vector field dimension mismatch");
    }

    int dim_;
    std::vector<Polynomial> coeffs_;
};

// [X,Y]_i = X(Y_i) − Y(X_i), exact.
inline VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    if (X.dimension() != Y.dimension()) throw domain_error("lie_bracket: dimension mismatch");
    VectorField out(X.dimension());
    for (int i = 0; i < X.dimension(); ++i)
        out.set_coeff(i, X.apply(Y.coeff(i)) - Y.apply(X.coeff(i)));
    return out;
}

// Multi-index β = (β₁,…,β_k), entries 1-based generator indices. The commutator
// convention is right-nested with β₁ innermost: X_β = [X_{β_k}, [... [X_{β₂}, X_{β₁}] ...]].
struct MultiIndex {
    std::vector<int> entries;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {}

    int length() const { return static_cast<int>(entries.size()); }

    void validate(int num_generators) const {
        if (entries.empty()) throw domain_error("multi-index must be nonempty");
        for (int b : entries)
            if (b < 1 || b > num_generators) throw domain_error("multi-index entry out of range");
    }

    bool operator==(const MultiIndex& rhs) const { return entries == rhs.entries; }
    bool operator<(const MultiIndex& rhs) const { return entries < rhs.entries; }

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(entries[i]);
        }
        return s + ")";
    }
};

}  // namespace srgeo
