#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cob/matrix.hpp"
#include "cob/polynomial.hpp"
#include "cob/vartable.hpp"

namespace cob::closure {

using exactalg::Matrix;
using exactalg::Rational;
using exactalg::Vector;
using poly::Monomial;
using poly::MonomialLess;
using poly::Polynomial;

struct ProductCapExceeded : std::runtime_error {
    std::size_t requested;
    explicit ProductCapExceeded(std::size_t n)
        : std::runtime_error("product generation cap exceeded: " +
                             std::to_string(n) + " products required"),
          requested(n) {}
};

struct SweepCapExceeded : std::runtime_error {
    SweepCapExceeded() : std::runtime_error("refinement sweep cap exceeded") {}
};

// Canonical subspace of polynomial space: an ascending monomial index that is
// exactly the support of the basis, plus basis rows in reduced row echelon
// form. Two spans are equal iff they are the same subspace.
struct Span {
    std::size_t arity = 0;
    std::vector<Monomial> index;
    Matrix rows;

    std::size_t dim() const { return rows.rows(); }

    std::vector<Polynomial> elements() const {
        std::vector<Polynomial> out;
        out.reserve(rows.rows());
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            Polynomial p(arity);
            for (std::size_t j = 0; j < index.size(); ++j)
                p.add_term(index[j], rows.at(i, j));
            out.push_back(std::move(p));
        }
        return out;
    }

    friend bool operator==(const Span& a, const Span& b) {
        return a.arity == b.arity && a.index == b.index && a.rows == b.rows;
    }
    friend bool operator!=(const Span& a, const Span& b) { return !(a == b); }
};

inline Span make_span(const std::vector<Polynomial>& gens, std::size_t arity) {
    std::set<Monomial, MonomialLess> sup;
    for (const auto& g : gens)
        for (const auto& [m, c] : g.terms()) sup.insert(m);
    std::vector<Monomial> index(sup.begin(), sup.end());

    std::vector<Vector> coord_rows;
    coord_rows.reserve(gens.size());
    for (const auto& g : gens) {
        if (g.is_zero()) continue;
        coord_rows.push_back(poly::to_coordinates(g, index));
    }
    Matrix reduced = exactalg::rref(Matrix::from_rows(coord_rows)).m;

    // keep nonzero rows, then drop columns no surviving row uses
    std::vector<Vector> live;
    for (std::size_t i = 0; i < reduced.rows(); ++i)
        if (!exactalg::is_zero(reduced.row(i))) live.push_back(reduced.row(i));
    std::vector<bool> used(index.size(), false);
    for (const auto& r : live)
        for (std::size_t j = 0; j < r.size(); ++j)
            if (r[j] != 0) used[j] = true;

    Span s;
    s.arity = arity;
    for (std::size_t j = 0; j < index.size(); ++j)
        if (used[j]) s.index.push_back(index[j]);
    std::vector<Vector> packed;
    packed.reserve(live.size());
    for (const auto& r : live) {
        Vector v;
        v.reserve(s.index.size());
        for (std::size_t j = 0; j < index.size(); ++j)
            if (used[j]) v.push_back(r[j]);
        packed.push_back(std::move(v));
    }
    s.rows = Matrix::from_rows(packed);
    if (s.rows.rows() == 0) s.rows = Matrix(0, s.index.size());
    return s;
}

inline bool member(const Polynomial& p, const Span& s) {
    if (p.is_zero()) return true;
    Vector v;
    try {
        v = poly::to_coordinates(p, s.index);
    } catch (const poly::MonomialNotIndexed&) {
        return false;
    }
    if (s.dim() == 0) return exactalg::is_zero(v);
    return exactalg::is_zero(exactalg::residual(v, s.rows.transposed()));
}

// All monomials of degree 1..k, in ascending order.
inline std::vector<Polynomial> initial_basis(const poly::VarTable& vars,
                                             std::uint32_t k) {
    std::set<Monomial, MonomialLess> sup;
    Monomial cur(vars.size());
    auto rec = [&](auto&& self, std::size_t i, std::uint32_t left) -> void {
        if (i == vars.size()) {
            if (cur.degree() > 0) sup.insert(cur);
            return;
        }
        for (std::uint32_t e = 0; e <= left; ++e) {
            cur.e[i] = e;
            self(self, i + 1, left - e);
        }
        cur.e[i] = 0;
    };
    rec(rec, 0, k);
    std::vector<Polynomial> out;
    out.reserve(sup.size());
    for (const auto& m : sup) out.push_back(Polynomial::monomial(m));
    return out;
}

// Number of multisets of size <= d over s elements: C(s+d, d). Saturates at
// cap+1 so callers can test the cap without overflow.
inline std::size_t product_count(std::size_t s, std::uint32_t d, std::size_t cap) {
    unsigned long long n = 1;
    for (std::uint32_t i = 1; i <= d; ++i) {
        n = n * (s + i) / i;  // exact: C(s+i, i) builds incrementally
        if (n > cap) return cap + 1;
    }
    return static_cast<std::size_t>(n);
}

// One product of basis elements: the ascending multiset of factor indices
// (empty for the constant 1) and its expanded polynomial value.
struct ProductTerm {
    std::vector<std::size_t> factors;
    Polynomial value;
};

// Products of at most d basis elements of s, including the empty product 1,
// in a fixed deterministic order (non-decreasing factor multisets).
inline std::vector<ProductTerm> pp_product_terms(const Span& s, std::uint32_t d,
                                                 std::size_t cap) {
    const auto elems = s.elements();
    if (product_count(elems.size(), d, cap) > cap)
        throw ProductCapExceeded(product_count(elems.size(), d, cap));
    std::vector<ProductTerm> out;
    std::vector<std::size_t> factors;
    auto rec = [&](auto&& self, std::size_t start, std::uint32_t left,
                   const Polynomial& acc) -> void {
        out.push_back({factors, acc});
        if (left == 0) return;
        for (std::size_t i = start; i < elems.size(); ++i) {
            factors.push_back(i);
            self(self, i, left - 1, acc * elems[i]);
            factors.pop_back();
        }
    };
    rec(rec, 0, d, Polynomial::constant(s.arity, 1));
    return out;
}

inline std::vector<Polynomial> pp_products(const Span& s, std::uint32_t d,
                                           std::size_t cap) {
    auto terms = pp_product_terms(s, d, cap);
    std::vector<Polynomial> out;
    out.reserve(terms.size());
    for (auto& t : terms) out.push_back(std::move(t.value));
    return out;
}

// Span of all products of at most d elements (the "degree-d closure target").
inline Span pp_span(const Span& s, std::uint32_t d, std::size_t cap) {
    return make_span(pp_products(s, d, cap), s.arity);
}

}  // namespace cob::closure
