#pragma once

/** \file linalg.hpp
 *
 * Small dense exact linear algebra over a field K: Gaussian elimination
 * with a caller-supplied pivot preference, nullspace computation, and
 * characteristic polynomials via the Faddeev-LeVerrier recursion.  Sizes
 * here are tiny (tens at most), so clarity beats asymptotics.
 */

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "polynomial.hpp"

namespace fingap {

template <class K> class Matrix {
  public:
    Matrix() : m_rows(0), m_cols(0) {}
    Matrix(std::size_t rows, std::size_t cols)
        : m_rows(rows), m_cols(cols), m_a(rows * cols, K{}) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = K(1);
        }
        return m;
    }

    std::size_t rows() const { return m_rows; }
    std::size_t cols() const { return m_cols; }
    K &operator()(std::size_t i, std::size_t j) { return m_a[i * m_cols + j]; }
    const K &operator()(std::size_t i, std::size_t j) const {
        return m_a[i * m_cols + j];
    }

    friend Matrix operator*(const Matrix &a, const Matrix &b) {
        if (a.m_cols != b.m_rows) {
            throw Error("Matrix: dimension mismatch in product");
        }
        Matrix c(a.m_rows, b.m_cols);
        for (std::size_t i = 0; i < a.m_rows; ++i) {
            for (std::size_t k = 0; k < a.m_cols; ++k) {
                if (a(i, k) == K(0)) {
                    continue;
                }
                for (std::size_t j = 0; j < b.m_cols; ++j) {
                    c(i, j) += a(i, k) * b(k, j);
                }
            }
        }
        return c;
    }
    friend Matrix operator+(Matrix a, const Matrix &b) {
        if (a.m_rows != b.m_rows || a.m_cols != b.m_cols) {
            throw Error("Matrix: dimension mismatch in sum");
        }
        for (std::size_t i = 0; i < a.m_a.size(); ++i) {
            a.m_a[i] += b.m_a[i];
        }
        return a;
    }
    friend Matrix operator*(const K &s, Matrix a) {
        for (auto &x : a.m_a) {
            x *= s;
        }
        return a;
    }
    friend bool operator==(const Matrix &a, const Matrix &b) {
        return a.m_rows == b.m_rows && a.m_cols == b.m_cols && a.m_a == b.m_a;
    }

    K trace() const {
        K t{};
        for (std::size_t i = 0; i < m_rows && i < m_cols; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

  private:
    std::size_t m_rows, m_cols;
    std::vector<K> m_a;
};

/** Pivot preference: return a cost for a candidate pivot; the smallest cost
 * among nonzero entries of the current column block wins.  The default
 * treats all nonzero entries alike (first one wins).
 */
template <class K> struct default_pivot_cost {
    long operator()(const K &) const { return 0; }
};

/** Reduce to row echelon form in place.  Returns the pivot columns.
 * CostFn steers pivot selection (e.g. lowest-degree entry for polynomial
 * fields, to limit expression swell).
 */
template <class K, class CostFn = default_pivot_cost<K>>
std::vector<std::size_t> row_echelon(Matrix<K> &m, CostFn cost = CostFn{}) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::optional<std::size_t> best;
        long best_cost = 0;
        for (std::size_t r = row; r < m.rows(); ++r) {
            if (m(r, col) == K(0)) {
                continue;
            }
            long c = cost(m(r, col));
            if (!best || c < best_cost) {
                best = r;
                best_cost = c;
            }
        }
        if (!best) {
            continue;
        }
        if (*best != row) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                std::swap(m(row, j), m(*best, j));
            }
        }
        const K inv = K(1) / m(row, col);
        for (std::size_t j = col; j < m.cols(); ++j) {
            m(row, j) *= inv;
        }
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == row || m(r, col) == K(0)) {
                continue;
            }
            const K f = m(r, col);
            for (std::size_t j = col; j < m.cols(); ++j) {
                m(r, j) -= f * m(row, j);
            }
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

/// Basis of the right nullspace of m (vectors of length cols()).
template <class K, class CostFn = default_pivot_cost<K>>
std::vector<std::vector<K>> nullspace(Matrix<K> m, CostFn cost = CostFn{}) {
    const auto pivots = row_echelon(m, cost);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) {
        is_pivot[c] = true;
    }
    std::vector<std::vector<K>> basis;
    for (std::size_t free_col = 0; free_col < m.cols(); ++free_col) {
        if (is_pivot[free_col]) {
            continue;
        }
        std::vector<K> v(m.cols(), K{});
        v[free_col] = K(1);
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            v[pivots[r]] = -m(r, free_col);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solve m x = rhs for square nonsingular m.
template <class K>
std::vector<K> solve_linear(Matrix<K> m, std::vector<K> rhs) {
    if (m.rows() != m.cols() || rhs.size() != m.rows()) {
        throw Error("solve_linear: shape mismatch");
    }
    const std::size_t n = m.rows();
    Matrix<K> aug(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            aug(i, j) = m(i, j);
        }
        aug(i, n) = rhs[i];
    }
    auto pivots = row_echelon(aug);
    if (pivots.size() != n) {
        throw Error("solve_linear: singular matrix");
    }
    std::vector<K> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = aug(i, n);
    }
    return x;
}

/** Characteristic polynomial det(E I - M) by Faddeev-LeVerrier.
 * Exact over any field of characteristic zero; returns a monic polynomial.
 */
template <class K> Polynomial<K> charpoly(const Matrix<K> &m) {
    if (m.rows() != m.cols()) {
        throw Error("charpoly: matrix not square");
    }
    const std::size_t n = m.rows();
    std::vector<K> c(n + 1, K{});
    c[n] = K(1);
    Matrix<K> mk = Matrix<K>::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        mk = m * mk;
        K ck = -(mk.trace() / field_from_long<K>(static_cast<long>(k)));
        c[n - k] = ck;
        for (std::size_t i = 0; i < n; ++i) {
            mk(i, i) += ck;
        }
    }
    return Polynomial<K>(std::move(c));
}

} // namespace fingap
