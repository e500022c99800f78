#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "srgeo/frame.hpp"

namespace srgeo {

// Double-precision view of a polynomial vector field for integration loops.
// Terms keep the polynomial's canonical order and are evaluated with a fixed
// multiplication sequence, so evaluation is deterministic and commutes exactly
// with power-of-two coordinate dilations on graded fields.
class CompiledVectorField {
public:
    CompiledVectorField() : dim_(0) {}

    explicit CompiledVectorField(const VectorField& X) : dim_(X.dimension()), axes_(X.coeffs().size()) {
        for (int i = 0; i < dim_; ++i)
            for (const auto& [exps, coeff] : X.coeff(i).terms())
                axes_[static_cast<std::size_t>(i)].push_back(make_term(exps, to_double(coeff)));
    }

    // Σ_j w_j · X_j, with double weights (used for exponential coordinates).
    static CompiledVectorField linear_combination(const std::vector<VectorField>& fields,
                                                  const std::vector<double>& w) {
        if (fields.empty() || fields.size() != w.size())
            throw domain_error("linear_combination: size mismatch");
        CompiledVectorField out;
        out.dim_ = fields.front().dimension();
        out.axes_.assign(static_cast<std::size_t>(out.dim_), {});
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (fields[j].dimension() != out.dim_)
                throw domain_error("linear_combination: dimension mismatch");
            if (w[j] == 0.0) continue;
            for (int i = 0; i < out.dim_; ++i)
                for (const auto& [exps, coeff] : fields[j].coeff(i).terms())
                    out.axes_[static_cast<std::size_t>(i)].push_back(
                        make_term(exps, w[j] * to_double(coeff)));
        }
        return out;
    }

    int dimension() const { return dim_; }

    void eval(const double* x, double* out) const {
        for (int i = 0; i < dim_; ++i) {
            double acc = 0.0;
            for (const auto& t : axes_[static_cast<std::size_t>(i)]) {
                double v = t.coeff;
                for (const auto& [axis, e] : t.powers) {
                    const double xi = x[axis];
                    for (std::uint32_t r = 0; r < e; ++r) v *= xi;
                }
                acc += v;
            }
            out[i] = acc;
        }
    }

    std::vector<double> eval(const std::vector<double>& x) const {
        std::vector<double> out(static_cast<std::size_t>(dim_));
        eval(x.data(), out.data());
        return out;
    }

private:
    struct Term {
        double coeff;
        std::vector<std::pair<int, std::uint32_t>> powers;  // (axis, exponent), sparse
    };

    static Term make_term(const Exponents& exps, double coeff) {
        Term t;
        t.coeff = coeff;
        for (std::size_t a = 0; a < exps.size(); ++a)
            if (exps[a] != 0) t.powers.emplace_back(static_cast<int>(a), exps[a]);
        return t;
    }

    int dim_;
    std::vector<std::vector<Term>> axes_;
};

inline constexpr int kMaxFlowDimension = 16;

// All generators of a frame compiled once; evaluates ẋ = Σ_j u_j X_j(x).
class CompiledFrame {
public:
    explicit CompiledFrame(const Frame& frame) : dim_(frame.dimension()) {
        if (dim_ > kMaxFlowDimension)
            throw domain_error("compiled frame: dimension exceeds the flow-state limit");
        generators_.reserve(frame.generators().size());
        for (const auto& g : frame.generators()) generators_.emplace_back(g);
    }

    int dimension() const { return dim_; }
    int num_generators() const { return static_cast<int>(generators_.size()); }
    const CompiledVectorField& generator(int j1) const {  // 1-based
        return generators_.at(static_cast<std::size_t>(j1 - 1));
    }

    void eval_combination(const double* x, const double* u, double* out) const {
        double tmp[kMaxFlowDimension];
        for (int i = 0; i < dim_; ++i) out[i] = 0.0;
        for (std::size_t j = 0; j < generators_.size(); ++j) {
            generators_[j].eval(x, tmp);
            for (int i = 0; i < dim_; ++i) out[i] += u[j] * tmp[i];
        }
    }

private:
    int dim_;
    std::vector<CompiledVectorField> generators_;
};

}  // namespace srgeo
