#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cob/abstraction.hpp"
#include "cob/affine.hpp"
#include "cob/interval.hpp"
#include "cob/matrix.hpp"
#include "cob/polynomial.hpp"

namespace cob::invariants {

using exactalg::Int;
using poly::Polynomial;

struct NotAffine : std::runtime_error {
    NotAffine() : std::runtime_error("operation requires an affine (degree-1) abstraction") {}
};

// Affine hull of a box: point coordinates pin the base, every non-point
// coordinate contributes a full line.
inline AffineSubspace box_hull(const model::Box& box) {
    const std::size_t m = box.size();
    Vector base(m, Rational(0));
    Matrix dirs(0, m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto& iv = box.iv[j];
        if (iv.is_point()) {
            base[j] = *iv.lo;
            continue;
        }
        if (iv.lo)
            base[j] = *iv.lo;
        else if (iv.hi)
            base[j] = *iv.hi;
        Vector e(m, Rational(0));
        e[j] = 1;
        dirs.append_row(std::move(e));
    }
    return AffineSubspace::make(std::move(base), std::move(dirs));
}

namespace detail {

inline Rational trace(const Matrix& a) {
    Rational t(0);
    for (std::size_t i = 0; i < a.rows(); ++i) t += a.at(i, i);
    return t;
}

// Splits a degree-<=1 polynomial over w into a coefficient row and constant.
inline std::pair<Vector, Rational> affine_parts(const Polynomial& p) {
    Vector row(p.nvars(), Rational(0));
    Rational c(0);
    for (const auto& [mo, coef] : p.terms()) {
        if (mo.is_one()) {
            c = coef;
            continue;
        }
        for (std::size_t j = 0; j < mo.e.size(); ++j)
            if (mo.e[j] > 0) row[j] = coef;
    }
    return {std::move(row), std::move(c)};
}

inline std::pair<Matrix, Vector> affine_map(const std::vector<Polynomial>& polys) {
    const std::size_t m = polys.size();
    Matrix a(m, m);
    Vector b(m, Rational(0));
    for (std::size_t j = 0; j < m; ++j) {
        auto [row, c] = affine_parts(polys[j]);
        for (std::size_t k = 0; k < m; ++k) a.at(j, k) = row[k];
        b[j] = c;
    }
    return {std::move(a), std::move(b)};
}

// Positive divisors of |n|, via trial division up to 1e6; a remaining
// cofactor is treated as prime (complete unless two factors exceed the
// bound, far outside desk scale).
inline std::vector<Int> divisors(Int n) {
    if (n < 0) n = -n;
    std::vector<std::pair<Int, unsigned>> factors;
    for (Int p = 2; p <= 1000000 && p * p <= n; ++p) {
        if (n % p != 0) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        factors.emplace_back(p, e);
    }
    if (n > 1) factors.emplace_back(n, 1);
    std::vector<Int> out{Int(1)};
    for (const auto& [p, e] : factors) {
        const std::size_t base = out.size();
        Int pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
        }
    }
    return out;
}

}  // namespace detail

// Exact characteristic polynomial of a (monic, ascending coefficients:
// result[k] is the lambda^k coefficient), by the Faddeev-LeVerrier recurrence.
inline std::vector<Rational> char_poly(const Matrix& a) {
    const std::size_t n = a.rows();
    std::vector<Rational> c(n + 1, Rational(0));
    c[n] = 1;
    if (n == 0) return c;
    Matrix mk = a;
    c[n - 1] = -detail::trace(mk);
    for (std::size_t k = 2; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i) mk.at(i, i) += c[n - k + 1];
        mk = exactalg::mat_mul(a, mk);
        c[n - k] = -detail::trace(mk) / Rational(k);
    }
    return c;
}

// All rational roots of a polynomial with rational coefficients (ascending),
// by the rational-root theorem after clearing denominators.
inline std::vector<Rational> rational_roots(const std::vector<Rational>& coeffs) {
    std::size_t deg = coeffs.size();
    while (deg > 0 && coeffs[deg - 1] == 0) --deg;
    if (deg <= 1) return {};  // zero or constant polynomial

    std::set<Rational> roots;
    std::size_t low = 0;
    while (low < deg - 1 && coeffs[low] == 0) ++low;
    if (low > 0) roots.insert(Rational(0));

    Int lcm = 1;
    for (std::size_t i = low; i < deg; ++i)
        lcm = boost::multiprecision::lcm(lcm, exactalg::den(coeffs[i]));
    const Int a0 = exactalg::num(coeffs[low] * Rational(lcm));
    const Int an = exactalg::num(coeffs[deg - 1] * Rational(lcm));

    auto eval = [&](const Rational& x) {
        Rational v(0);
        for (std::size_t i = deg; i-- > low;) v = v * x + coeffs[i];
        return v;
    };
    for (const Int& p : detail::divisors(a0))
        for (const Int& q : detail::divisors(an)) {
            const Rational cand(p, q);  // both positive by construction
            if (eval(cand) == 0) roots.insert(cand);
            if (eval(-cand) == 0) roots.insert(-cand);
        }
    return {roots.begin(), roots.end()};
}

// Conserved or scale-invariant observable of dw/dt = Aw + b: the concrete
// polynomial f = c.alpha satisfies lie(f) = lambda f exactly.
struct ConservedQuantity {
    Vector c;
    Rational lambda;  // 0 marks strong scale
    Polynomial concrete;
};

inline std::vector<ConservedQuantity> scale_functions(
    const Matrix& a, const Vector& b, const std::vector<Polynomial>& alpha) {
    const std::size_t m = a.rows();
    const std::size_t n_src = alpha.empty() ? 0 : alpha[0].nvars();
    auto emit = [&](std::vector<ConservedQuantity>& out, const Rational& lambda) {
        Matrix stack = a.transposed();
        for (std::size_t i = 0; i < m; ++i) stack.at(i, i) -= lambda;
        stack.append_row(b);
        for (auto& c : exactalg::kernel(stack)) {
            Polynomial f(n_src);
            for (std::size_t j = 0; j < m; ++j)
                if (c[j] != 0) f += c[j] * alpha[j];
            out.push_back({std::move(c), lambda, std::move(f)});
        }
    };
    std::vector<ConservedQuantity> out;
    emit(out, Rational(0));
    for (const auto& lambda : rational_roots(char_poly(a))) {
        if (lambda == 0) continue;  // covered by strong scale
        emit(out, lambda);
    }
    return out;
}

// Writes the original-variable form of the abstract equation c.w = e.
inline Polynomial back_substitute(const Vector& c, const Rational& e,
                                  const std::vector<Polynomial>& alpha) {
    const std::size_t n_src = alpha.empty() ? 0 : alpha[0].nvars();
    Polynomial out = Polynomial::constant(n_src, -e);
    for (std::size_t j = 0; j < c.size(); ++j)
        if (c[j] != 0) out += c[j] * alpha[j];
    return out;
}

namespace detail {

// Equality guard atoms rewritten as hyperplanes over w: p(x) must be an
// affine combination of 1 and the source map components (solved exactly);
// inexpressible or inequality atoms are ignored, which is sound.
inline std::optional<std::pair<Vector, Rational>> affine_in_map(
    const Polynomial& p, const std::vector<Polynomial>& alpha) {
    std::set<poly::Monomial, poly::MonomialLess> sup;
    sup.insert(poly::Monomial::one(p.nvars()));
    for (const auto& h : alpha)
        for (const auto& [mo, c] : h.terms()) sup.insert(mo);
    for (const auto& [mo, c] : p.terms()) sup.insert(mo);
    const std::vector<poly::Monomial> ext(sup.begin(), sup.end());

    Matrix a(ext.size(), alpha.size() + 1);
    const auto unit = poly::to_coordinates(
        Polynomial::constant(p.nvars(), Rational(1)), ext);
    for (std::size_t i = 0; i < ext.size(); ++i) a.at(i, 0) = unit[i];
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        const auto col = poly::to_coordinates(alpha[j], ext);
        for (std::size_t i = 0; i < ext.size(); ++i) a.at(i, j + 1) = col[i];
    }
    const auto sol = exactalg::solve(a, poly::to_coordinates(p, ext));
    if (!sol) return std::nullopt;
    Vector c((*sol).begin() + 1, (*sol).end());
    return std::make_pair(std::move(c), -(*sol)[0]);
}

// Triangular substitution describing the initial set: point-valued variables
// map to their values, and each equality atom that isolates a variable
// linearly (nonzero constant coefficient, no other occurrence) maps it to the
// solved expression. Entries stay free of every solved variable. Atoms the
// form cannot consume are returned substituted.
inline std::pair<std::vector<Polynomial>, std::vector<Polynomial>> solved_init_form(
    const model::Box& box, const model::Condition& cond) {
    const std::size_t n = box.iv.size();
    std::vector<Polynomial> sub;
    std::vector<bool> solved(n, false);
    sub.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (box.iv[i].is_point()) {
            sub.push_back(Polynomial::constant(n, *box.iv[i].lo));
            solved[i] = true;
        } else {
            sub.push_back(Polynomial::variable(n, i));
        }
    }
    std::vector<Polynomial> leftover;
    for (const auto& atom : cond.atoms) {
        if (atom.rel != model::Rel::Eq) continue;
        Polynomial p = poly::substitute(atom.poly, sub);
        std::size_t pick = n;
        Rational coef(0);
        for (std::size_t i = 0; i < n && pick == n; ++i) {
            if (solved[i]) continue;
            Rational ci(0);
            bool clean = true;
            for (const auto& [mo, c] : p.terms()) {
                if (mo.e[i] == 0) continue;
                if (mo.e[i] == 1 && mo.degree() == 1)
                    ci = c;
                else {
                    clean = false;
                    break;
                }
            }
            if (clean && ci != 0) {
                pick = i;
                coef = ci;
            }
        }
        if (pick == n) {
            leftover.push_back(std::move(p));
            continue;
        }
        const Polynomial rest = p - coef * Polynomial::variable(n, pick);
        sub[pick] = (Rational(-1) / coef) * rest;
        solved[pick] = true;
        for (std::size_t j = 0; j < n; ++j)
            if (j != pick) sub[j] = poly::substitute(sub[j], sub);
    }
    return {std::move(sub), std::move(leftover)};
}

}  // namespace detail

// Hull of the abstract initial set: the mapped box hull, cut by every affine
// relation among the map components that holds identically once the initial
// equalities are substituted in solved form (sound: on the initial set the
// substituted components agree with the real ones). Unconsumed equality atoms
// still cut when they are affine over the substituted components.
inline AffineSubspace initial_hull(const abstraction::AbstractSystem& abs,
                                   const abstraction::CobMap& alpha) {
    AffineSubspace s = box_hull(abs.init_box);
    auto [sub, leftover] =
        detail::solved_init_form(abs.source_init_box, abs.init_cond);
    const auto& comp = alpha.at(abs.init_location);
    const std::size_t m = comp.size();
    std::vector<Polynomial> q;
    q.reserve(m);
    for (const auto& h : comp) q.push_back(poly::substitute(h, sub));

    std::set<poly::Monomial, poly::MonomialLess> sup;
    sup.insert(poly::Monomial::one(alpha.source_arity));
    for (const auto& g : q)
        for (const auto& [mo, c] : g.terms()) sup.insert(mo);
    const std::vector<poly::Monomial> ext(sup.begin(), sup.end());
    Matrix a(ext.size(), m + 1);
    {
        const auto col = poly::to_coordinates(
            Polynomial::constant(alpha.source_arity, Rational(1)), ext);
        for (std::size_t i = 0; i < ext.size(); ++i) a.at(i, 0) = col[i];
    }
    for (std::size_t j = 0; j < m; ++j) {
        const auto col = poly::to_coordinates(q[j], ext);
        for (std::size_t i = 0; i < ext.size(); ++i) a.at(i, j + 1) = col[i];
    }
    for (const auto& v : exactalg::kernel(a)) {
        if (s.is_bottom()) break;
        Vector c(v.begin() + 1, v.end());
        s = intersect_hyperplane(s, c, -v[0]);
    }
    for (const auto& p : leftover) {
        if (s.is_bottom()) break;
        if (auto h = detail::affine_in_map(p, q))
            s = intersect_hyperplane(s, h->first, h->second);
    }
    return s;
}

// Least fixpoint of per-location reachable affine hulls: the initial hull at
// the initial location, closed under every flow (smallest flow-invariant
// affine superset) and every transition (guard-intersected affine image,
// joined into the target). Monotone in the domain, so it terminates.
inline std::vector<AffineSubspace> reachable_hulls(const abstraction::AbstractSystem& abs,
                                                   const abstraction::CobMap& alpha) {
    if (abs.degree != 1) throw NotAffine();
    const std::size_t m = abs.arity();

    struct Jump {
        Matrix a;
        Vector b;
        std::vector<std::pair<Vector, Rational>> eq_guards;
    };
    std::vector<Jump> jumps;
    jumps.reserve(abs.transitions.size());
    for (const auto& t : abs.transitions) {
        auto [a, b] = detail::affine_map(t.update);
        Jump j{std::move(a), std::move(b), {}};
        for (const auto& atom : t.guard.atoms) {
            if (atom.rel != model::Rel::Eq) continue;
            if (auto h = detail::affine_in_map(atom.poly, alpha.at(t.src)))
                j.eq_guards.push_back(std::move(*h));
        }
        jumps.push_back(std::move(j));
    }

    std::vector<AffineSubspace> s(abs.locations.size(), AffineSubspace::bottom(m));
    s[abs.init_location] = initial_hull(abs, alpha);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t l = 0; l < s.size(); ++l) {
            if (!abs.locations[l].has_flow || s[l].is_bottom()) continue;
            auto closed = flow_closure(s[l], abs.locations[l].a, abs.locations[l].b);
            if (closed != s[l]) {
                s[l] = std::move(closed);
                changed = true;
            }
        }
        for (std::size_t k = 0; k < jumps.size(); ++k) {
            AffineSubspace cur = s[abs.transitions[k].src];
            for (const auto& [c, e] : jumps[k].eq_guards) {
                if (cur.is_bottom()) break;
                cur = intersect_hyperplane(cur, c, e);
            }
            if (cur.is_bottom()) continue;
            auto next = join(s[abs.transitions[k].dst],
                             transfer(cur, jumps[k].a, jumps[k].b));
            if (next != s[abs.transitions[k].dst]) {
                s[abs.transitions[k].dst] = std::move(next);
                changed = true;
            }
        }
    }
    return s;
}

// Karr-style affine reachability for discrete abstractions.
inline std::vector<AffineSubspace> karr(const abstraction::AbstractSystem& abs,
                                        const abstraction::CobMap& alpha) {
    if (abs.kind != model::SystemKind::Discrete)
        throw std::invalid_argument("karr expects a discrete abstraction");
    return reachable_hulls(abs, alpha);
}

// Smallest flow-invariant affine subspace containing the abstract init hull.
inline AffineSubspace ode_equalities(const abstraction::AbstractSystem& abs,
                                     const abstraction::CobMap& alpha) {
    if (abs.kind != model::SystemKind::Continuous)
        throw std::invalid_argument("ode_equalities expects a continuous abstraction");
    if (abs.degree != 1) throw NotAffine();
    return flow_closure(initial_hull(abs, alpha), abs.locations[0].a, abs.locations[0].b);
}

// One affine equality c.w = e valid at a location, with its original-variable
// polynomial (concrete == 0 wherever the location is reached).
struct EqualityInvariant {
    std::size_t location = 0;
    Vector c;
    Rational e;
    Polynomial concrete;
};

inline std::vector<EqualityInvariant> equality_invariants(
    const abstraction::CobMap& alpha, const std::vector<AffineSubspace>& hulls) {
    std::vector<EqualityInvariant> out;
    for (std::size_t l = 0; l < hulls.size(); ++l) {
        if (hulls[l].is_bottom()) continue;
        for (auto& [c, e] : hulls[l].equalities())
            out.push_back({l, c, e, back_substitute(c, e, alpha.at(l))});
    }
    return out;
}

}  // namespace cob::invariants
