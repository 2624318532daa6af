#pragma once

#include <cassert>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cob/rational.hpp"

namespace cob::exactalg {

using Vector = std::vector<Rational>;

// Dense matrix over the rationals, row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
    static Matrix from_rows(const std::vector<Vector>& rows) {
        if (rows.empty()) return Matrix(0, 0);
        Matrix m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            assert(rows[i].size() == m.cols_);
            for (std::size_t j = 0; j < m.cols_; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rational& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rational& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Vector row(std::size_t i) const {
        return Vector(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
    }
    void append_row(const Vector& v) {
        assert(rows_ == 0 || v.size() == cols_);
        if (rows_ == 0) cols_ = v.size();
        a_.insert(a_.end(), v.begin(), v.end());
        ++rows_;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    friend bool operator==(const Matrix& x, const Matrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> a_;
};

inline Vector mat_vec(const Matrix& m, const Vector& v) {
    assert(v.size() == m.cols());
    Vector out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m.at(i, j) != 0) s += m.at(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

inline Matrix mat_mul(const Matrix& x, const Matrix& y) {
    assert(x.cols() == y.rows());
    Matrix out(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
            const Rational& xik = x.at(i, k);
            if (xik == 0) continue;
            for (std::size_t j = 0; j < y.cols(); ++j)
                if (y.at(k, j) != 0) out.at(i, j) += xik * y.at(k, j);
        }
    return out;
}

inline Rational dot(const Vector& x, const Vector& y) {
    assert(x.size() == y.size());
    Rational s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0 && y[i] != 0) s += x[i] * y[i];
    return s;
}

inline bool is_zero(const Vector& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

struct RrefResult {
    Matrix m;                        // reduced row echelon form
    std::vector<std::size_t> pivots; // pivot column per pivot row, ascending
};

// Unique reduced row echelon form: leading 1 per nonzero row, zeros above and
// below each pivot, zero rows last. Deterministic (first nonzero pivot scan).
inline RrefResult rref(Matrix m) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t sel = r;
        while (sel < m.rows() && m.at(sel, c) == 0) ++sel;
        if (sel == m.rows()) continue;
        if (sel != r)
            for (std::size_t j = 0; j < m.cols(); ++j)
                std::swap(m.at(sel, j), m.at(r, j));
        const Rational p = m.at(r, c);
        for (std::size_t j = c; j < m.cols(); ++j) m.at(r, j) /= p;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            const Rational f = m.at(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (m.at(r, j) != 0) m.at(i, j) -= f * m.at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Matrix& m) { return rref(m).pivots.size(); }

// Canonical null-space basis of m (as a map ℚ^cols → ℚ^rows): one basis
// vector per free column, that free variable set to 1, in increasing column
// order.
inline std::vector<Vector> kernel(const Matrix& m) {
    const auto rr = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : rr.pivots) is_pivot[c] = true;
    std::vector<Vector> basis;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (is_pivot[c]) continue;
        Vector v(m.cols(), Rational(0));
        v[c] = 1;
        for (std::size_t i = 0; i < rr.pivots.size(); ++i)
            v[rr.pivots[i]] = -rr.m.at(i, c);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Residual of v against the column space of span: v reduced by the rref of
// span's transpose. Zero iff v is expressible in the columns of span.
inline Vector residual(Vector v, const Matrix& span) {
    assert(v.size() == span.rows());
    const auto rr = rref(span.transposed());
    for (std::size_t i = 0; i < rr.pivots.size(); ++i) {
        const std::size_t c = rr.pivots[i];
        if (v[c] == 0) continue;
        const Rational f = v[c];
        for (std::size_t j = 0; j < v.size(); ++j)
            if (rr.m.at(i, j) != 0) v[j] -= f * rr.m.at(i, j);
    }
    return v;
}

// Reduce v against rows already in rref (pivot columns given). Same
// elimination as residual() but reusing a precomputed decomposition.
inline Vector reduce_against_rref(Vector v, const RrefResult& rr) {
    for (std::size_t i = 0; i < rr.pivots.size(); ++i) {
        const std::size_t c = rr.pivots[i];
        if (c >= v.size() || v[c] == 0) continue;
        const Rational f = v[c];
        for (std::size_t j = 0; j < v.size() && j < rr.m.cols(); ++j)
            if (rr.m.at(i, j) != 0) v[j] -= f * rr.m.at(i, j);
    }
    return v;
}

// Exact solution of A x = b with free variables pinned to zero (the rref-pivot
// solution). Returns nullopt when the system is inconsistent.
inline std::optional<Vector> solve(const Matrix& a, const Vector& b) {
    assert(b.size() == a.rows());
    Matrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, a.cols()) = b[i];
    }
    const auto rr = rref(std::move(aug));
    for (auto c : rr.pivots)
        if (c == a.cols()) return std::nullopt;
    Vector x(a.cols(), Rational(0));
    for (std::size_t i = 0; i < rr.pivots.size(); ++i)
        x[rr.pivots[i]] = rr.m.at(i, a.cols());
    return x;
}

// Smallest direction space containing `directions` that is closed under
// d ↦ A·d and contains the drift vector A·point + b. Point + result spans the
// smallest flow-invariant affine set of x' = A x + b containing the input
// affine set. Directions are rows; the result is in rref. Converges in at
// most dim steps.
inline Matrix affine_hull_closure(const Vector& point,
                                  const Matrix& directions,
                                  const Matrix& a,
                                  const Vector& b) {
    assert(a.rows() == a.cols());
    assert(point.size() == a.cols());
    Matrix basis = rref(directions).m;
    // drop zero rows
    {
        Matrix cleaned(0, a.cols());
        for (std::size_t i = 0; i < basis.rows(); ++i)
            if (!is_zero(basis.row(i))) cleaned.append_row(basis.row(i));
        basis = std::move(cleaned);
    }
    Vector drift = mat_vec(a, point);
    for (std::size_t j = 0; j < b.size(); ++j) drift[j] += b[j];

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Vector> candidates;
        candidates.push_back(drift);
        for (std::size_t i = 0; i < basis.rows(); ++i)
            candidates.push_back(mat_vec(a, basis.row(i)));
        for (auto& cand : candidates) {
            Vector r = residual(std::move(cand), basis.transposed());
            if (!is_zero(r)) {
                basis.append_row(r);
                basis = rref(std::move(basis)).m;
                Matrix cleaned(0, a.cols());
                for (std::size_t i = 0; i < basis.rows(); ++i)
                    if (!is_zero(basis.row(i))) cleaned.append_row(basis.row(i));
                basis = std::move(cleaned);
                changed = true;
            }
        }
    }
    return basis;
}

}  // namespace cob::exactalg
