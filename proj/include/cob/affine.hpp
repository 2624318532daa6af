#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cob/matrix.hpp"

namespace cob::invariants {

using exactalg::Matrix;
using exactalg::Rational;
using exactalg::Vector;

// Affine subspace of Q^m in canonical form: either bottom (empty), or a base
// point plus direction rows in rref with the base point reduced against the
// pivot columns. The canonical form is unique per subspace, so operator== is
// subspace equality.
class AffineSubspace {
public:
    static AffineSubspace bottom(std::size_t m) {
        AffineSubspace s(m);
        s.empty_ = true;
        return s;
    }
    static AffineSubspace point(Vector p) {
        AffineSubspace s(p.size());
        s.base_ = std::move(p);
        return s;
    }
    static AffineSubspace make(Vector base, Matrix direction_rows) {
        AffineSubspace s(base.size());
        s.base_ = std::move(base);
        s.dirs_ = std::move(direction_rows);
        s.canonicalize();
        return s;
    }

    std::size_t space_dim() const { return m_; }
    bool is_bottom() const { return empty_; }
    std::size_t dim() const { return empty_ ? 0 : dirs_.rows(); }
    const Vector& base() const { return base_; }
    const Matrix& directions() const { return dirs_; }

    bool contains_point(const Vector& x) const {
        if (empty_) return false;
        Vector d(m_);
        for (std::size_t j = 0; j < m_; ++j) d[j] = x[j] - base_[j];
        return exactalg::is_zero(exactalg::residual(std::move(d), dirs_.transposed()));
    }

    bool contains(const AffineSubspace& o) const {
        if (o.empty_) return true;
        if (empty_) return false;
        if (!contains_point(o.base_)) return false;
        for (std::size_t i = 0; i < o.dirs_.rows(); ++i)
            if (!exactalg::is_zero(exactalg::residual(o.dirs_.row(i), dirs_.transposed())))
                return false;
        return true;
    }

    // Affine equations c.w = e holding on the subspace: c ranges over the
    // canonical kernel basis of the direction rows (all of Q^m for a point).
    std::vector<std::pair<Vector, Rational>> equalities() const {
        std::vector<std::pair<Vector, Rational>> out;
        if (empty_) return out;
        for (auto& c : exactalg::kernel(dirs_)) {
            Rational e = exactalg::dot(c, base_);
            out.emplace_back(std::move(c), std::move(e));
        }
        return out;
    }

    friend bool operator==(const AffineSubspace& a, const AffineSubspace& b) {
        if (a.empty_ != b.empty_ || a.m_ != b.m_) return false;
        if (a.empty_) return true;
        return a.base_ == b.base_ && a.dirs_ == b.dirs_;
    }
    friend bool operator!=(const AffineSubspace& a, const AffineSubspace& b) {
        return !(a == b);
    }

private:
    explicit AffineSubspace(std::size_t m)
        : m_(m), base_(m, Rational(0)), dirs_(0, m) {}

    // rref the directions, drop zero rows, then zero the base point on every
    // pivot column by subtracting direction rows
    void canonicalize() {
        dirs_ = exactalg::rref(std::move(dirs_)).m;
        Matrix cleaned(0, m_);
        for (std::size_t i = 0; i < dirs_.rows(); ++i)
            if (!exactalg::is_zero(dirs_.row(i))) cleaned.append_row(dirs_.row(i));
        dirs_ = std::move(cleaned);
        const auto rr = exactalg::rref(dirs_);
        for (std::size_t i = 0; i < rr.pivots.size(); ++i) {
            const Rational f = base_[rr.pivots[i]];
            if (f == 0) continue;
            for (std::size_t j = 0; j < m_; ++j) base_[j] -= f * dirs_.at(i, j);
        }
    }

    std::size_t m_;
    bool empty_ = false;
    Vector base_;
    Matrix dirs_;
};

// Affine hull of the union (the abstract-domain join).
inline AffineSubspace join(const AffineSubspace& a, const AffineSubspace& b) {
    if (a.is_bottom()) return b;
    if (b.is_bottom()) return a;
    Matrix dirs = a.directions();
    for (std::size_t i = 0; i < b.directions().rows(); ++i)
        dirs.append_row(b.directions().row(i));
    Vector gap(a.space_dim());
    for (std::size_t j = 0; j < a.space_dim(); ++j)
        gap[j] = b.base()[j] - a.base()[j];
    dirs.append_row(std::move(gap));
    return AffineSubspace::make(a.base(), std::move(dirs));
}

// Image under the affine map x -> Ax + c.
inline AffineSubspace transfer(const AffineSubspace& s, const Matrix& a, const Vector& c) {
    if (s.is_bottom()) return AffineSubspace::bottom(a.rows());
    Vector base = exactalg::mat_vec(a, s.base());
    for (std::size_t j = 0; j < c.size(); ++j) base[j] += c[j];
    Matrix dirs(0, a.rows());
    for (std::size_t i = 0; i < s.directions().rows(); ++i)
        dirs.append_row(exactalg::mat_vec(a, s.directions().row(i)));
    return AffineSubspace::make(std::move(base), std::move(dirs));
}

// Intersection with the hyperplane c.x = e.
inline AffineSubspace intersect_hyperplane(const AffineSubspace& s, const Vector& c,
                                           const Rational& e) {
    if (s.is_bottom()) return s;
    const std::size_t m = s.space_dim();
    std::vector<Rational> cd(s.dim());
    std::size_t pivot = s.dim();
    for (std::size_t i = 0; i < s.dim(); ++i) {
        cd[i] = exactalg::dot(c, s.directions().row(i));
        if (pivot == s.dim() && cd[i] != 0) pivot = i;
    }
    const Rational gap = e - exactalg::dot(c, s.base());
    if (pivot == s.dim())  // c is constant on s
        return gap == 0 ? s : AffineSubspace::bottom(m);
    Vector base = s.base();
    const Rational t = gap / cd[pivot];
    for (std::size_t j = 0; j < m; ++j) base[j] += t * s.directions().at(pivot, j);
    Matrix dirs(0, m);
    for (std::size_t i = 0; i < s.dim(); ++i) {
        if (i == pivot) continue;
        Vector d = s.directions().row(i);
        const Rational f = cd[i] / cd[pivot];
        for (std::size_t j = 0; j < m; ++j) d[j] -= f * s.directions().at(pivot, j);
        dirs.append_row(std::move(d));
    }
    return AffineSubspace::make(std::move(base), std::move(dirs));
}

// Smallest flow-invariant affine subspace of dx/dt = Ax + c containing s.
inline AffineSubspace flow_closure(const AffineSubspace& s, const Matrix& a,
                                   const Vector& c) {
    if (s.is_bottom()) return s;
    Matrix closed = exactalg::affine_hull_closure(s.base(), s.directions(), a, c);
    return AffineSubspace::make(s.base(), std::move(closed));
}

}  // namespace cob::invariants
