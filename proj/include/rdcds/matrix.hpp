#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rdcds/error.hpp"
#include "rdcds/field.hpp"

namespace rdcds {

/// Dense row-major rectangle of values. Element type is anything default-constructible
/// whose default value plays the role of zero (field residues, linear forms).
template <class T>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, const T& fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Grid&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

class FieldMatrix : public Grid<Symbol> {
public:
    FieldMatrix() : q_(2) {}
    FieldMatrix(std::size_t rows, std::size_t cols, std::uint32_t modulus)
        : Grid<Symbol>(rows, cols, 0), q_(modulus) {}
    FieldMatrix(Grid<Symbol> grid, std::uint32_t modulus) : Grid<Symbol>(std::move(grid)), q_(modulus) {}

    /// Builds from nested rows of (possibly negative) integers, reduced mod q.
    static FieldMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows, std::uint32_t modulus) {
        const Field f(modulus);
        const std::size_t c = rows.empty() ? 0 : rows.front().size();
        FieldMatrix m(rows.size(), c, modulus);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != c) throw Error(ErrorCode::ShapeMismatch, "ragged matrix rows");
            for (std::size_t j = 0; j < c; ++j) m.at(i, j) = f.reduce(rows[i][j]);
        }
        return m;
    }

    static FieldMatrix identity(std::size_t n, std::uint32_t modulus) {
        FieldMatrix m(n, n, modulus);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::uint32_t modulus() const noexcept { return q_; }
    Field field() const { return Field(q_); }
    FieldElement element(std::size_t r, std::size_t c) const { return FieldElement(at(r, c), q_); }

    bool is_zero() const {
        return std::all_of(data().begin(), data().end(), [](Symbol s) { return s == 0; });
    }

    bool operator==(const FieldMatrix& o) const {
        return q_ == o.q_ && static_cast<const Grid<Symbol>&>(*this) == static_cast<const Grid<Symbol>&>(o);
    }

private:
    std::uint32_t q_;
};

inline void require_same_field(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.modulus() != b.modulus()) throw Error(ErrorCode::ShapeMismatch, "matrices over different fields");
}

inline FieldMatrix multiply(const FieldMatrix& a, const FieldMatrix& b) {
    require_same_field(a, b);
    if (a.cols() != b.rows())
        throw Error(ErrorCode::ShapeMismatch, "multiply: inner dimensions " + std::to_string(a.cols()) + " vs " +
                                                  std::to_string(b.rows()));
    const Field f = a.field();
    const std::uint64_t q = f.modulus();
    FieldMatrix out(a.rows(), b.cols(), a.modulus());
    std::vector<std::uint64_t> acc(b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const std::uint64_t c = a.at(i, k);
            if (c == 0) continue;
            auto brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) acc[j] = (acc[j] + c * brow[j]) % q;
        }
        for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) = static_cast<Symbol>(acc[j]);
    }
    return out;
}

inline FieldMatrix add(const FieldMatrix& a, const FieldMatrix& b) {
    require_same_field(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::ShapeMismatch, "add: shape mismatch");
    const Field f = a.field();
    FieldMatrix out = a;
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = f.add(a.data()[i], b.data()[i]);
    return out;
}

inline FieldMatrix subtract(const FieldMatrix& a, const FieldMatrix& b) {
    require_same_field(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::ShapeMismatch, "subtract: shape mismatch");
    const Field f = a.field();
    FieldMatrix out = a;
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = f.sub(a.data()[i], b.data()[i]);
    return out;
}

inline FieldMatrix transpose(const FieldMatrix& a) {
    FieldMatrix t(a.cols(), a.rows(), a.modulus());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t.at(j, i) = a.at(i, j);
    return t;
}

/// Submatrix V(rows, cols) with 0-based index lists.
inline FieldMatrix select(const FieldMatrix& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    FieldMatrix out(rows.size(), cols.size(), a.modulus());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out.at(i, j) = a.at(rows[i], cols[j]);
    return out;
}

inline std::vector<std::size_t> index_range(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> v;
    for (std::size_t i = begin; i < end; ++i) v.push_back(i);
    return v;
}

inline FieldMatrix column_slice(const FieldMatrix& a, std::size_t begin, std::size_t end) {
    return select(a, index_range(0, a.rows()), index_range(begin, end));
}

inline FieldMatrix row_slice(const FieldMatrix& a, std::size_t begin, std::size_t end) {
    return select(a, index_range(begin, end), index_range(0, a.cols()));
}

inline FieldMatrix hstack(const std::vector<FieldMatrix>& parts, std::size_t rows, std::uint32_t modulus) {
    std::size_t cols = 0;
    for (const auto& p : parts) {
        if (p.rows() != rows) throw Error(ErrorCode::ShapeMismatch, "hstack: row count mismatch");
        cols += p.cols();
    }
    FieldMatrix out(rows, cols, modulus);
    std::size_t off = 0;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < p.cols(); ++j) out.at(i, off + j) = p.at(i, j);
        off += p.cols();
    }
    return out;
}

/// Solves A X = B by Gauss-Jordan elimination on [A | B], picking the first nonzero pivot
/// in each column. SingularMatrix when A is not invertible.
inline FieldMatrix mat_solve(const FieldMatrix& a, const FieldMatrix& b) {
    require_same_field(a, b);
    const std::size_t n = a.rows();
    if (a.cols() != n) throw Error(ErrorCode::ShapeMismatch, "mat_solve: A must be square");
    if (b.rows() != n) throw Error(ErrorCode::ShapeMismatch, "mat_solve: rows(A) != rows(B)");
    const Field f = a.field();
    const std::uint64_t q = f.modulus();
    const std::size_t m = b.cols();
    const std::size_t w = n + m;
    std::vector<Symbol> aug(n * w);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(a.row(i).begin(), a.row(i).end(), aug.begin() + i * w);
        std::copy(b.row(i).begin(), b.row(i).end(), aug.begin() + i * w + n);
    }
    auto row = [&](std::size_t r) { return aug.data() + r * w; };
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && row(piv)[col] == 0) ++piv;
        if (piv == n) throw Error(ErrorCode::SingularMatrix, "mat_solve: matrix is singular");
        if (piv != col) std::swap_ranges(row(piv), row(piv) + w, row(col));
        Symbol* p = row(col);
        const std::uint64_t s = f.inv(p[col]);
        for (std::size_t j = col; j < w; ++j) p[j] = static_cast<Symbol>(p[j] * s % q);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            Symbol* t = row(r);
            const std::uint64_t factor = t[col];
            if (factor == 0) continue;
            const std::uint64_t negf = q - factor;
            for (std::size_t j = col; j < w; ++j) t[j] = static_cast<Symbol>((t[j] + negf * p[j]) % q);
        }
    }
    FieldMatrix x(n, m, a.modulus());
    for (std::size_t i = 0; i < n; ++i) std::copy(row(i) + n, row(i) + w, x.row(i).begin());
    return x;
}

inline FieldMatrix mat_inverse(const FieldMatrix& a) { return mat_solve(a, FieldMatrix::identity(a.rows(), a.modulus())); }

/// Rank over F_q by row reduction.
inline std::size_t mat_rank(const FieldMatrix& a) {
    FieldMatrix m = a;
    const Field f = a.field();
    const std::uint64_t q = f.modulus();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
        std::size_t piv = rank;
        while (piv < m.rows() && m.at(piv, col) == 0) ++piv;
        if (piv == m.rows()) continue;
        if (piv != rank) std::swap_ranges(m.row(piv).begin(), m.row(piv).end(), m.row(rank).begin());
        const std::uint64_t s = f.inv(m.at(rank, col));
        for (std::size_t j = col; j < m.cols(); ++j) m.at(rank, j) = static_cast<Symbol>(m.at(rank, j) * s % q);
        for (std::size_t r = rank + 1; r < m.rows(); ++r) {
            const std::uint64_t factor = m.at(r, col);
            if (factor == 0) continue;
            for (std::size_t j = col; j < m.cols(); ++j)
                m.at(r, j) = static_cast<Symbol>((m.at(r, j) + (q - factor) * m.at(rank, j)) % q);
        }
        ++rank;
    }
    return rank;
}

} // namespace rdcds
