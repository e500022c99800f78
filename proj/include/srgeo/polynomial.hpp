#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "srgeo/rational.hpp"

namespace srgeo {

using Exponents = std::vector<std::uint32_t>;

// Graded-lexicographic order on exponent vectors: total degree first, then lex.
// This is the canonical term order used for storage and serialization.
struct GradedLexLess {
    bool operator()(const Exponents& a, const Exponents& b) const {
        const auto da = std::accumulate(a.begin(), a.end(), std::uint64_t{0});
        const auto db = std::accumulate(b.begin(), b.end(), std::uint64_t{0});
        if (da != db) return da < db;
        return a < b;
    }
};

// Exact multivariate polynomial over Q in a fixed number of variables.
// Invariant: no stored coefficient is zero; all exponent vectors have size dimension().
class Polynomial {
public:
    using TermMap = std::map<Exponents, Rational, GradedLexLess>;

    explicit Polynomial(int dimension = 0) : dim_(check_dim(dimension)) {}

    static Polynomial zero(int dimension) { return Polynomial(dimension); }

    static Polynomial constant(int dimension, Rational value) {
        Polynomial p(dimension);
        p.add_term(Exponents(static_cast<std::size_t>(dimension), 0), std::move(value));
        return p;
    }

    // x_{axis} with 0-based axis.
    static Polynomial variable(int dimension, int axis) {
        Polynomial p(dimension);
        Exponents e(static_cast<std::size_t>(dimension), 0);
        e.at(static_cast<std::size_t>(axis)) = 1;
        p.add_term(std::move(e), Rational(1));
        return p;
    }

    static Polynomial monomial(int dimension, Exponents exps, Rational coeff) {
        Polynomial p(dimension);
        if (static_cast<int>(exps.size()) != dimension)
            throw domain_error("monomial exponent vector has wrong length");
        p.add_term(std::move(exps), std::move(coeff));
        return p;
    }

    int dimension() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }

    Rational coefficient(const Exponents& exps) const {
        if (exps.size() != static_cast<std::size_t>(dim_))
            throw domain_error("coefficient: exponent vector has wrong length");
        const auto it = terms_.find(exps);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(Exponents exps, Rational coeff) {
        if (coeff == 0) return;
        auto [it, inserted] = terms_.try_emplace(std::move(exps), std::move(coeff));
        if (!inserted) {
            it->second += coeff;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& rhs) {
        require_same_dim(rhs);
        for (const auto& [e, c] : rhs.terms_) add_term(e, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& rhs) {
        require_same_dim(rhs);
        for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.require_same_dim(b);
        Polynomial out(a.dim_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e = ea;
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                out.add_term(std::move(e), ca * cb);
            }
        return out;
    }

    Polynomial operator-() const {
        Polynomial out(dim_);
        for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
        return out;
    }

    Polynomial scaled(const Rational& s) const {
        Polynomial out(dim_);
        if (s == 0) return out;
        for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * s);
        return out;
    }

    bool operator==(const Polynomial& rhs) const {
        return dim_ == rhs.dim_ && terms_ == rhs.terms_;
    }
    bool operator!=(const Polynomial& rhs) const { return !(*this == rhs); }

    // Formal partial derivative with respect to x_{axis} (0-based).
    Polynomial partial(int axis) const {
        if (axis < 0 || axis >= dim_) throw domain_error("partial: axis out of range");
        Polynomial out(dim_);
        const auto a = static_cast<std::size_t>(axis);
        for (const auto& [e, c] : terms_) {
            if (e[a] == 0) continue;
            Exponents de = e;
            --de[a];
            out.add_term(std::move(de), c * Rational(e[a]));
        }
        return out;
    }

    Rational eval(const std::vector<Rational>& x) const {
        if (static_cast<int>(x.size()) != dim_) throw domain_error("eval: point has wrong dimension");
        Rational total(0);
        for (const auto& [e, c] : terms_) {
            Rational term = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                for (std::uint32_t k = 0; k < e[i]; ++k) term *= x[i];
            total += term;
        }
        return total;
    }

    double eval(const std::vector<double>& x) const {
        double total = 0.0;
        for (const auto& [e, c] : terms_) {
            double term = to_double(c);
            for (std::size_t i = 0; i < e.size(); ++i)
                for (std::uint32_t k = 0; k < e[i]; ++k) term *= x[i];
            total += term;
        }
        return total;
    }

    static long weighted_degree_of(const Exponents& e, const std::vector<int>& weights) {
        long d = 0;
        for (std::size_t i = 0; i < e.size(); ++i) d += static_cast<long>(e[i]) * weights[i];
        return d;
    }

    // Sum of the terms whose weighted degree equals `degree`.
    Polynomial weighted_part(const std::vector<int>& weights, long degree) const {
        if (static_cast<int>(weights.size()) != dim_)
            throw domain_error("weighted_part: weights have wrong length");
        Polynomial out(dim_);
        for (const auto& [e, c] : terms_)
            if (weighted_degree_of(e, weights) == degree) out.terms_.emplace(e, c);
        return out;
    }

    // All weighted degrees present, ascending.
    std::vector<long> weighted_degrees(const std::vector<int>& weights) const {
        std::vector<long> ds;
        for (const auto& [e, c] : terms_) {
            const long d = weighted_degree_of(e, weights);
            if (ds.empty() || ds.back() != d) {
                if (std::find(ds.begin(), ds.end(), d) == ds.end()) ds.push_back(d);
            }
        }
        std::sort(ds.begin(), ds.end());
        return ds;
    }

    // p(x) with x_i replaced by s_i * x_i (diagonal substitution; exact).
    Polynomial diagonal_substitute(const std::vector<Rational>& scale) const {
        if (static_cast<int>(scale.size()) != dim_)
            throw domain_error("diagonal_substitute: wrong scale length");
        Polynomial out(dim_);
        for (const auto& [e, c] : terms_) {
            Rational factor = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                factor *= rational_pow(scale[i], static_cast<long>(e[i]));
            out.add_term(e, std::move(factor));
        }
        return out;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) s += " + ";
            first = false;
            s += format_rational(c);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                s += "*x" + std::to_string(i + 1);
                if (e[i] > 1) s += "^" + std::to_string(e[i]);
            }
        }
        return s;
    }

private:
    static int check_dim(int d) {
        if (d < 0) throw domain_error("polynomial dimension must be nonnegative");
        return d;
    }
    void require_same_dim(const Polynomial& rhs) const {
        if (dim_ != rhs.dim_) throw domain_error("polynomial dimension mismatch");
    }

    int dim_;
    TermMap terms_;
};

}  // namespace srgeo
