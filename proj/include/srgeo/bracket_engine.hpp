#pragma once

#include <utility>
#include <vector>

#include "srgeo/frame.hpp"
#include "srgeo/linalg.hpp"

namespace srgeo {

inline constexpr int kDefaultBracketCap = 8;

// X_β = [X_{β_k}, [ ... [X_{β_2}, X_{β_1}] ... ]], β₁ innermost.
inline VectorField iterated_commutator(const Frame& frame, const MultiIndex& beta) {
    beta.validate(frame.num_generators());
    VectorField acc = frame.generator(beta.entries.front());
    for (std::size_t k = 1; k < beta.entries.size(); ++k)
        acc = lie_bracket(frame.generator(beta.entries[k]), acc);
    return acc;
}

// Right-nested multi-indices of a fixed length in lexicographic order,
// restricted to the canonical subset β₁ > β₂ for lengths ≥ 2. Tuples with
// β₁ = β₂ are identically zero and tuples with β₁ < β₂ are sign-flips of a
// canonical tuple, so the restriction spans the same layers. Symbolically
// zero fields are pruned: every further bracket of a zero field is zero.
inline std::vector<std::vector<std::pair<MultiIndex, VectorField>>>
canonical_layer_fields(const Frame& frame, int max_length) {
    if (max_length < 1) throw domain_error("canonical_layer_fields: max_length must be >= 1");
    const int m = frame.num_generators();
    std::vector<std::vector<std::pair<MultiIndex, VectorField>>> layers;
    layers.reserve(static_cast<std::size_t>(max_length));

    std::vector<std::pair<MultiIndex, VectorField>> current;
    for (int j = 1; j <= m; ++j)
        current.emplace_back(MultiIndex({j}), frame.generator(j));
    layers.push_back(current);

    for (int len = 2; len <= max_length; ++len) {
        std::vector<std::pair<MultiIndex, VectorField>> next;
        for (const auto& [beta, field] : layers.back()) {
            for (int j = 1; j <= m; ++j) {
                if (len == 2 && !(beta.entries[0] > j)) continue;
                VectorField br = lie_bracket(frame.generator(j), field);
                if (br.is_zero()) continue;
                MultiIndex extended = beta;
                extended.entries.push_back(j);
                next.emplace_back(std::move(extended), std::move(br));
            }
        }
        layers.push_back(std::move(next));
    }
    return layers;
}

struct LayerBasis {
    std::vector<MultiIndex> indices;
    std::vector<std::vector<Rational>> vectors;  // evaluations X_β(x), rational points
};

struct LayerBasisNumeric {
    std::vector<MultiIndex> indices;
    std::vector<std::vector<double>> vectors;
};

// Maximal linearly independent set of evaluations X_β(x), length(β) = i, exact.
inline LayerBasis layer_at(const Frame& frame, const std::vector<Rational>& x, int i,
                           int cap = kDefaultBracketCap) {
    if (i < 1) throw domain_error("layer_at: layer index must be >= 1");
    (void)cap;  // enumeration depth for this op is the layer index itself
    auto layers = canonical_layer_fields(frame, i);
    LayerBasis basis;
    std::vector<std::vector<Rational>> rows;
    for (const auto& [beta, field] : layers[static_cast<std::size_t>(i - 1)]) {
        auto v = field.eval(x);
        rows.push_back(v);
        if (exact_rank(rows) == static_cast<int>(rows.size())) {
            basis.indices.push_back(beta);
            basis.vectors.push_back(std::move(v));
        } else {
            rows.pop_back();
        }
    }
    return basis;
}

inline LayerBasisNumeric layer_at(const Frame& frame, const std::vector<double>& x, int i,
                                  int cap = kDefaultBracketCap, double rel_tol = 1e-9) {
    if (i < 1) throw domain_error("layer_at: layer index must be >= 1");
    (void)cap;
    auto layers = canonical_layer_fields(frame, i);
    LayerBasisNumeric basis;
    std::vector<std::vector<double>> rows;
    for (const auto& [beta, field] : layers[static_cast<std::size_t>(i - 1)]) {
        auto v = field.eval(x);
        rows.push_back(v);
        if (numeric_rank(rows, rel_tol) == static_cast<int>(rows.size())) {
            basis.indices.push_back(beta);
            basis.vectors.push_back(std::move(v));
        } else {
            rows.pop_back();
        }
    }
    return basis;
}

struct GrowthReport {
    std::vector<double> base_point;  // display copy of the query point
    std::vector<int> layer_dims;     // dim L_i(x), i = 1..step (or 1..cap if never full)
    int step = -1;                   // first i with dim L_i(x) = n; -1 if not reached by cap
    std::vector<int> weights;        // w_k = min{i : dim L_i(x) >= k}; empty if not generating
    bool layer_bracket_condition = false;  // [D_i, D_j](x) stays inside L_{i+j-1}(x)
    bool growth_pause_condition = false;   // each growth depth >= 2 is followed by a pause
    bool bracket_generating = false;
    bool exact = false;  // ranks computed in exact rational arithmetic
};

namespace detail {

inline std::vector<int> weights_from_dims(const std::vector<int>& dims, int n) {
    std::vector<int> w;
    w.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        int wk = 0;
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (dims[i] >= k) { wk = static_cast<int>(i) + 1; break; }
        if (wk == 0) return {};  // not bracket generating within the computed range
        w.push_back(wk);
    }
    return w;
}

// dims has one entry per depth 1..range; entries beyond full rank are clamped
// at n. Growth at depth i must be followed by stagnation at i+1, for i >= 2.
inline bool growth_pause_from_dims(const std::vector<int>& dims, int n) {
    const int range = static_cast<int>(dims.size());
    auto dim_at = [&](int i) {
        if (i <= range) return dims[static_cast<std::size_t>(i - 1)];
        return dims.back() == n ? n : -1;  // -1: unknown beyond the cap
    };
    for (int i = 2; i <= range; ++i) {
        if (dim_at(i) > dim_at(i - 1)) {
            const int next = dim_at(i + 1);
            if (next == -1) continue;  // cannot be decided past the cap; skip
            if (next != dim_at(i)) return false;
        }
    }
    return true;
}

template <typename Scalar, typename RankFn>
bool layer_bracket_generic(
    const std::vector<std::vector<std::pair<MultiIndex, VectorField>>>& layers,
    const std::vector<Scalar>& x, const std::vector<std::vector<std::vector<Scalar>>>& cum_rows,
    int cap, RankFn&& rank_fn) {
    // Pointwise test [D_i, D_j](x) ⊆ L_{i+j-1}(x) for i,j >= 2, i+j > 4,
    // restricted to i+j-1 <= cap so the target span is available.
    for (int i = 2; i <= cap; ++i) {
        for (int j = i; j <= cap; ++j) {
            if (i + j <= 4 || i + j - 1 > cap) continue;
            const auto& fi = layers[static_cast<std::size_t>(i - 1)];
            const auto& fj = layers[static_cast<std::size_t>(j - 1)];
            const auto& span_rows = cum_rows[static_cast<std::size_t>(i + j - 2)];
            const int span_rank = static_cast<int>(span_rows.size());
            for (std::size_t a = 0; a < fi.size(); ++a) {
                const std::size_t b0 = (i == j) ? a + 1 : 0;
                for (std::size_t b = b0; b < fj.size(); ++b) {
                    VectorField br = lie_bracket(fi[a].second, fj[b].second);
                    if (br.is_zero()) continue;
                    auto rows = span_rows;
                    rows.push_back(br.eval(x));
                    if (rank_fn(rows) > span_rank) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace detail

inline GrowthReport growth_report(const Frame& frame, const std::vector<Rational>& x,
                                  int cap = kDefaultBracketCap) {
    if (cap < 1) throw domain_error("growth_report: cap must be >= 1");
    const int n = frame.dimension();
    if (static_cast<int>(x.size()) != n) throw domain_error("growth_report: point dimension mismatch");
    auto layers = canonical_layer_fields(frame, cap);

    GrowthReport rep;
    rep.exact = true;
    rep.base_point.reserve(x.size());
    for (const auto& c : x) rep.base_point.push_back(to_double(c));

    // Cumulative independent rows spanning L_i(x), plus dims per depth.
    std::vector<std::vector<std::vector<Rational>>> cum_rows(static_cast<std::size_t>(cap));
    std::vector<std::vector<Rational>> rows;
    std::vector<int> dims;
    for (int i = 1; i <= cap; ++i) {
        for (const auto& [beta, field] : layers[static_cast<std::size_t>(i - 1)]) {
            auto v = field.eval(x);
            rows.push_back(std::move(v));
            if (exact_rank(rows) != static_cast<int>(rows.size())) rows.pop_back();
        }
        dims.push_back(static_cast<int>(rows.size()));
        cum_rows[static_cast<std::size_t>(i - 1)] = rows;
        if (rep.step < 0 && dims.back() == n) rep.step = i;
    }
    rep.bracket_generating = rep.step > 0;
    rep.layer_dims = rep.bracket_generating
                         ? std::vector<int>(dims.begin(), dims.begin() + rep.step)
                         : dims;
    rep.weights = detail::weights_from_dims(dims, n);
    rep.growth_pause_condition = detail::growth_pause_from_dims(dims, n);
    rep.layer_bracket_condition = detail::layer_bracket_generic(
        layers, x, cum_rows, cap,
        [](const std::vector<std::vector<Rational>>& r) { return exact_rank(r); });
    return rep;
}

inline GrowthReport growth_report(const Frame& frame, const std::vector<double>& x,
                                  int cap = kDefaultBracketCap, double rel_tol = 1e-9) {
    if (cap < 1) throw domain_error("growth_report: cap must be >= 1");
    const int n = frame.dimension();
    if (static_cast<int>(x.size()) != n) throw domain_error("growth_report: point dimension mismatch");
    auto layers = canonical_layer_fields(frame, cap);

    GrowthReport rep;
    rep.exact = false;
    rep.base_point = x;

    std::vector<std::vector<std::vector<double>>> cum_rows(static_cast<std::size_t>(cap));
    std::vector<std::vector<double>> rows;
    std::vector<int> dims;
    for (int i = 1; i <= cap; ++i) {
        for (const auto& [beta, field] : layers[static_cast<std::size_t>(i - 1)]) {
            auto v = field.eval(x);
            rows.push_back(std::move(v));
            if (numeric_rank(rows, rel_tol) != static_cast<int>(rows.size())) rows.pop_back();
        }
        dims.push_back(static_cast<int>(rows.size()));
        cum_rows[static_cast<std::size_t>(i - 1)] = rows;
        if (rep.step < 0 && dims.back() == n) rep.step = i;
    }
    rep.bracket_generating = rep.step > 0;
    rep.layer_dims = rep.bracket_generating
                         ? std::vector<int>(dims.begin(), dims.begin() + rep.step)
                         : dims;
    rep.weights = detail::weights_from_dims(dims, n);
    rep.growth_pause_condition = detail::growth_pause_from_dims(dims, n);
    rep.layer_bracket_condition = detail::layer_bracket_generic(
        layers, x, cum_rows, cap,
        [rel_tol](const std::vector<std::vector<double>>& r) { return numeric_rank(r, rel_tol); });
    return rep;
}

struct AdaptedBasis {
    std::vector<MultiIndex> indices;
    std::vector<VectorField> fields;
    std::vector<int> weights;  // per element: length of its multi-index
};

// Greedy completion: scan lengths in increasing order, within a length scan
// the canonical right-nested multi-indices lexicographically, keep a field
// iff its evaluation at x increases the running rank.
inline AdaptedBasis adapted_basis(const Frame& frame, const std::vector<Rational>& x,
                                  int cap = kDefaultBracketCap) {
    const int n = frame.dimension();
    if (static_cast<int>(x.size()) != n) throw domain_error("adapted_basis: point dimension mismatch");
    auto layers = canonical_layer_fields(frame, cap);
    AdaptedBasis out;
    std::vector<std::vector<Rational>> rows;
    for (int len = 1; len <= cap && static_cast<int>(rows.size()) < n; ++len) {
        for (const auto& [beta, field] : layers[static_cast<std::size_t>(len - 1)]) {
            auto v = field.eval(x);
            rows.push_back(std::move(v));
            if (exact_rank(rows) == static_cast<int>(rows.size())) {
                out.indices.push_back(beta);
                out.fields.push_back(field);
                out.weights.push_back(len);
                if (static_cast<int>(rows.size()) == n) break;
            } else {
                rows.pop_back();
            }
        }
    }
    if (static_cast<int>(rows.size()) < n)
        throw domain_error("adapted_basis: frame is not bracket generating at the point within the cap");
    return out;
}

inline AdaptedBasis adapted_basis(const Frame& frame, const std::vector<double>& x,
                                  int cap = kDefaultBracketCap, double rel_tol = 1e-9) {
    const int n = frame.dimension();
    if (static_cast<int>(x.size()) != n) throw domain_error("adapted_basis: point dimension mismatch");
    auto layers = canonical_layer_fields(frame, cap);
    AdaptedBasis out;
    std::vector<std::vector<double>> rows;
    for (int len = 1; len <= cap && static_cast<int>(rows.size()) < n; ++len) {
        for (const auto& [beta, field] : layers[static_cast<std::size_t>(len - 1)]) {
            auto v = field.eval(x);
            rows.push_back(std::move(v));
            if (numeric_rank(rows, rel_tol) == static_cast<int>(rows.size())) {
                out.indices.push_back(beta);
                out.fields.push_back(field);
                out.weights.push_back(len);
                if (static_cast<int>(rows.size()) == n) break;
            } else {
                rows.pop_back();
            }
        }
    }
    if (static_cast<int>(rows.size()) < n)
        throw domain_error("adapted_basis: frame is not bracket generating at the point within the cap");
    return out;
}

// Gap condition on adapted weights: whenever w_j >= 2 and w_k > w_j, the
// heavier weight must clear the lighter one by at least two.
inline bool weight_gap_check(const GrowthReport& report) {
    if (!report.growth_pause_condition)
        throw domain_error("weight_gap_check: requires the growth-pause condition at the base point");
    const auto& w = report.weights;
    for (std::size_t j = 0; j < w.size(); ++j)
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[j] >= 2 && w[k] > w[j] && w[k] < w[j] + 2) return false;
    return true;
}

inline bool weight_gap_check(const std::vector<int>& weights) {
    for (std::size_t j = 0; j < weights.size(); ++j)
        for (std::size_t k = 0; k < weights.size(); ++k)
            if (weights[j] >= 2 && weights[k] > weights[j] && weights[k] < weights[j] + 2)
                return false;
    return true;
}

}  // namespace srgeo
