#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "srgeo/rational.hpp"

namespace srgeo {

// Exact rank of a rational matrix (rows = vectors) by Gaussian elimination.
inline int exact_rank(std::vector<std::vector<Rational>> m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size();
    const std::size_t cols = m[0].size();
    for (const auto& r : m)
        if (r.size() != cols) throw domain_error("exact_rank: ragged matrix");
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t piv = row;
        while (piv < rows && m[piv][col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[row]);
        for (std::size_t r = row + 1; r < rows; ++r) {
            if (m[r][col] == 0) continue;
            Rational f = m[r][col] / m[row][col];
            for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
        }
        ++row;
        ++rank;
    }
    return rank;
}

// Numerical rank via SVD with a relative singular-value threshold.
inline int numeric_rank(const std::vector<std::vector<double>>& m, double rel_tol = 1e-9) {
    if (m.empty()) return 0;
    const Eigen::Index rows = static_cast<Eigen::Index>(m.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(m[0].size());
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(m[static_cast<std::size_t>(i)].size()) != cols)
            throw domain_error("numeric_rank: ragged matrix");
        for (Eigen::Index j = 0; j < cols; ++j)
            a(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = rel_tol * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

}  // namespace srgeo
