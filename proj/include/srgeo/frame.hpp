#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srgeo/vector_field.hpp"

namespace srgeo {

// Constant symmetric positive-definite quadratic form on the horizontal layer.
// Cost of a control u is u^T G u. The default is the identity.
class Metric {
public:
    Metric() = default;

    static Metric identity() { return Metric(); }

    static Metric from_matrix(std::vector<std::vector<Rational>> g) {
        Metric m;
        const std::size_t n = g.size();
        if (n == 0) throw domain_error("metric matrix must be nonempty");
        for (const auto& row : g)
            if (row.size() != n) throw domain_error("metric matrix must be square");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (g[i][j] != g[j][i]) throw domain_error("metric matrix must be symmetric");
        // Positive definiteness: all leading principal minors positive (exact).
        std::vector<std::vector<Rational>> a = g;
        for (std::size_t k = 0; k < n; ++k) {
            // Determinant of the leading k+1 block by fraction-free-ish elimination on a copy.
            std::vector<std::vector<Rational>> blk(k + 1, std::vector<Rational>(k + 1));
            for (std::size_t i = 0; i <= k; ++i)
                for (std::size_t j = 0; j <= k; ++j) blk[i][j] = g[i][j];
            Rational det(1);
            for (std::size_t c = 0; c <= k; ++c) {
                std::size_t piv = c;
                while (piv <= k && blk[piv][c] == 0) ++piv;
                if (piv > k) { det = 0; break; }
                if (piv != c) { std::swap(blk[piv], blk[c]); det = -det; }
                det *= blk[c][c];
                for (std::size_t r = c + 1; r <= k; ++r) {
                    Rational f = blk[r][c] / blk[c][c];
                    for (std::size_t j = c; j <= k; ++j) blk[r][j] -= f * blk[c][j];
                }
            }
            if (!(det > 0)) throw domain_error("metric matrix must be positive definite");
        }
        m.matrix_ = std::move(a);
        return m;
    }

    bool is_identity() const { return !matrix_.has_value(); }
    std::size_t rank_size() const { return matrix_ ? matrix_->size() : 0; }

    const std::vector<std::vector<Rational>>& matrix() const {
        if (!matrix_) throw domain_error("identity metric has no explicit matrix");
        return *matrix_;
    }

    // out = G·u for a double control vector.
    void apply(const std::vector<double>& u, std::vector<double>& out) const {
        out.assign(u.size(), 0.0);
        if (!matrix_) {
            out = u;
            return;
        }
        const auto& g = *matrix_;
        if (u.size() != g.size()) throw domain_error("control size does not match metric");
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) out[i] += to_double(g[i][j]) * u[j];
    }

    // u^T G u for a double control vector.
    double quadratic_form(const std::vector<double>& u) const {
        if (!matrix_) {
            double s = 0.0;
            for (double c : u) s += c * c;
            return s;
        }
        const auto& g = *matrix_;
        if (u.size() != g.size()) throw domain_error("control size does not match metric");
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j)
                s += to_double(g[i][j]) * u[i] * u[j];
        return s;
    }

private:
    std::optional<std::vector<std::vector<Rational>>> matrix_;
};

// A frame of polynomial generators on R^n together with a metric making them
// orthonormal-or-weighted on the horizontal layer.
class Frame {
public:
    Frame(int dimension, std::vector<VectorField> generators, Metric metric = Metric::identity())
        : dim_(dimension), generators_(std::move(generators)), metric_(std::move(metric)) {
        if (dim_ <= 0) throw domain_error("frame dimension must be positive");
        if (generators_.empty()) throw domain_error("frame needs at least one generator");
        for (const auto& g : generators_)
            if (g.dimension() != dim_) throw domain_error("generator dimension mismatch");
        if (!metric_.is_identity() && metric_.rank_size() != generators_.size())
            throw domain_error("metric size does not match generator count");
    }

    int dimension() const { return dim_; }
    int num_generators() const { return static_cast<int>(generators_.size()); }
    const std::vector<VectorField>& generators() const { return generators_; }
    const VectorField& generator(int idx1) const {  // 1-based, matching multi-index entries
        if (idx1 < 1 || idx1 > num_generators()) throw domain_error("generator index out of range");
        return generators_[static_cast<std::size_t>(idx1 - 1)];
    }
    const Metric& metric() const { return metric_; }

private:
    int dim_;
    std::vector<VectorField> generators_;
    Metric metric_;
};

}  // namespace srgeo
