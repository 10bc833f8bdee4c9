#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace higgsstrat {

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        for (const auto& row : init) {
            if (row.size() != cols_) throw DimensionMismatch("ragged matrix literal");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool is_zero() const {
        for (const auto& x : data_)
            if (!(x == T(0))) return false;
        return true;
    }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        Matrix b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }

    void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }

    Matrix select_columns(const std::vector<int>& cols0) const {
        Matrix b(rows_, cols0.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols0.size(); ++j) b(i, j) = (*this)(i, cols0[j]);
        return b;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product shapes");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k) == T(0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) = c(i, j) + a(i, k) * b(k, j);
            }
        return c;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix sum shapes");
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] = a.data_[i] + b.data_[i];
        return a;
    }
    friend Matrix operator-(Matrix a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix difference shapes");
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] = a.data_[i] - b.data_[i];
        return a;
    }
    friend Matrix operator*(const T& s, Matrix a) {
        for (auto& x : a.data_) x = s * x;
        return a;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using RMatrix = Matrix<Rational>;

// a + b eps with eps^2 = 0
template <class T>
struct Dual {
    T a{0}, b{0};
    Dual() = default;
    Dual(int x) : a(x), b(0) {}
    Dual(const T& x) : a(x), b(0) {}
    Dual(const T& x, const T& y) : a(x), b(y) {}
    friend Dual operator+(const Dual& x, const Dual& y) { return {x.a + y.a, x.b + y.b}; }
    friend Dual operator-(const Dual& x, const Dual& y) { return {x.a - y.a, x.b - y.b}; }
    friend Dual operator-(const Dual& x) { return {-x.a, -x.b}; }
    friend Dual operator*(const Dual& x, const Dual& y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }
    friend bool operator==(const Dual& x, const Dual& y) { return x.a == y.a && x.b == y.b; }
};

// Division-free determinant by dynamic programming over column subsets.
template <class T>
T determinant(const Matrix<T>& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionMismatch("determinant of non-square matrix");
    if (n == 0) return T(1);
    if (n > 20) throw InvalidArgument("determinant size too large");
    std::vector<T> f(std::size_t(1) << n, T(0));
    f[0] = T(1);
    for (std::size_t mask = 0; mask < f.size(); ++mask) {
        if (f[mask] == T(0)) continue;
        const std::size_t row = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (row == n) continue;
        for (std::size_t c = 0; c < n; ++c) {
            if (mask & (std::size_t(1) << c)) continue;
            if (a(row, c) == T(0)) continue;
            const int above = __builtin_popcountll(mask >> (c + 1));
            const T term = f[mask] * a(row, c);
            auto& slot = f[mask | (std::size_t(1) << c)];
            slot = (above % 2) ? slot - term : slot + term;
        }
    }
    return f.back();
}

template <class T>
Matrix<T> minor_matrix(const Matrix<T>& a, std::size_t skip_row, std::size_t skip_col) {
    const std::size_t n = a.rows();
    Matrix<T> m(n - 1, n - 1);
    for (std::size_t i = 0, ii = 0; i < n; ++i) {
        if (i == skip_row) continue;
        for (std::size_t j = 0, jj = 0; j < n; ++j) {
            if (j == skip_col) continue;
            m(ii, jj++) = a(i, j);
        }
        ++ii;
    }
    return m;
}

template <class T>
Matrix<T> adjugate(const Matrix<T>& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionMismatch("adjugate of non-square matrix");
    Matrix<T> adj(n, n);
    if (n == 1) {
        adj(0, 0) = T(1);
        return adj;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const T d = determinant(minor_matrix(a, j, i));
            adj(i, j) = ((i + j) % 2) ? T(0) - d : d;
        }
    return adj;
}

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(RMatrix& a) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        std::size_t p = row;
        while (p < a.rows() && a(p, col) == 0) ++p;
        if (p == a.rows()) continue;
        if (p != row)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(row, j));
        const Rational inv = 1 / a(row, col);
        for (std::size_t j = col; j < a.cols(); ++j) a(row, j) *= inv;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == row || a(i, col) == 0) continue;
            const Rational f = a(i, col);
            for (std::size_t j = col; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline std::size_t rank(RMatrix a) { return rref(a).size(); }

inline std::vector<RVector> nullspace(RMatrix a) {
    const auto pivots = rref(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<RVector> basis;
    for (std::size_t free = 0; free < a.cols(); ++free) {
        if (is_pivot[free]) continue;
        RVector v(a.cols(), Rational(0));
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a(i, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Unique solution of a x = b, or nullopt when singular or inconsistent.
inline std::optional<RVector> solve_unique(const RMatrix& a, const RVector& b) {
    const std::size_t n = a.cols();
    if (a.rows() != b.size()) throw DimensionMismatch("solve: rhs length");
    RMatrix aug(a.rows(), n + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n) = b[i];
    }
    const auto pivots = rref(aug);
    if (pivots.size() != n) return std::nullopt;
    RVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
    return x;
}

// Row-by-row rank accumulator; stops growing once full column rank is reached.
class RankAccumulator {
public:
    explicit RankAccumulator(std::size_t cols) : cols_(cols) {}

    bool add(RVector row) {
        if (row.size() != cols_) throw DimensionMismatch("rank accumulator row length");
        if (full()) return false;
        for (std::size_t b = 0; b < basis_.size(); ++b) {
            const auto p = pivots_[b];
            if (row[p] == 0) continue;
            const Rational f = row[p];
            for (std::size_t j = 0; j < cols_; ++j)
                if (basis_[b][j] != 0) row[j] -= f * basis_[b][j];
        }
        std::size_t p = 0;
        while (p < cols_ && row[p] == 0) ++p;
        if (p == cols_) return false;
        const Rational inv = 1 / row[p];
        for (auto& x : row) x *= inv;
        for (auto& v : basis_) {
            if (v[p] == 0) continue;
            const Rational f = v[p];
            for (std::size_t j = 0; j < cols_; ++j) v[j] -= f * row[j];
        }
        basis_.push_back(std::move(row));
        pivots_.push_back(p);
        return true;
    }

    std::size_t rank() const { return basis_.size(); }
    bool full() const { return basis_.size() == cols_; }

private:
    std::size_t cols_;
    std::vector<RVector> basis_;
    std::vector<std::size_t> pivots_;
};

}  // namespace higgsstrat
