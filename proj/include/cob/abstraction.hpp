#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cob/closure.hpp"
#include "cob/interval.hpp"
#include "cob/model.hpp"
#include "cob/subspace.hpp"

namespace cob::abstraction {

using exactalg::Matrix;
using exactalg::Rational;
using exactalg::Vector;
using poly::Monomial;
using poly::Polynomial;
using poly::VarTable;

struct NotClosed : std::runtime_error {
    NotClosed() : std::runtime_error("space collection is not closed for the model") {}
};

// Thrown when an image polynomial cannot be written in the product span.
// Unreachable when the closure certificate holds; kept as a hard error so a
// builder bug cannot silently emit wrong dynamics.
struct RepresentationFailure : std::runtime_error {
    explicit RepresentationFailure(const std::string& what) : std::runtime_error(what) {}
};

// Per-location change-of-basis components over the original variables. All
// locations share the abstract arity m; locations with fewer basis elements
// are padded with zero components, whose abstract dynamics are zero too.
struct CobMap {
    std::size_t source_arity = 0;
    std::size_t arity = 0;
    std::vector<std::vector<Polynomial>> components;
    std::vector<std::size_t> live;  // per location: components before padding

    const std::vector<Polynomial>& at(std::size_t loc) const { return components[loc]; }
};

struct AbstractLocation {
    std::string name;
    bool has_flow = false;
    std::vector<Polynomial> dynamics;  // over w, size m, degree <= d; empty without flow
    Matrix a;                          // populated iff degree == 1 and has_flow
    Vector b;
};

struct AbstractTransition {
    std::string name;
    std::size_t src = 0;
    std::size_t dst = 0;
    std::vector<Polynomial> update;  // over w, size m, degree <= d
    model::Condition guard;          // pass-through condition over the original vars
};

struct AbstractSystem {
    model::SystemKind kind = model::SystemKind::Continuous;
    std::string name;
    std::uint32_t degree = 1;
    VarTable wvars;
    std::vector<AbstractLocation> locations;
    std::vector<AbstractTransition> transitions;
    std::size_t init_location = 0;
    model::Box init_box;  // arity m

    // pass-through original-variable initial data, kept for downstream
    // analyses that can translate parts of it exactly
    model::Box source_init_box;
    model::Condition init_cond;

    std::size_t arity() const { return wvars.size(); }
};

namespace detail {

// Writes target as a rational combination of the given products (rref-pivot
// solution, hence deterministic) and returns it as a polynomial over the
// abstract variables: factor multiset {j1..jk} becomes the monomial wj1...wjk.
inline Polynomial express_as_abstract(const Polynomial& target,
                                      const std::vector<closure::ProductTerm>& prods,
                                      std::size_t abstract_arity,
                                      const std::string& context) {
    std::set<Monomial, poly::MonomialLess> sup;
    for (const auto& q : prods)
        for (const auto& [mo, c] : q.value.terms()) sup.insert(mo);
    for (const auto& [mo, c] : target.terms()) sup.insert(mo);
    const std::vector<Monomial> ext(sup.begin(), sup.end());

    Matrix a(ext.size(), prods.size());
    for (std::size_t j = 0; j < prods.size(); ++j) {
        const Vector col = poly::to_coordinates(prods[j].value, ext);
        for (std::size_t i = 0; i < ext.size(); ++i) a.at(i, j) = col[i];
    }
    const auto lambda = exactalg::solve(a, poly::to_coordinates(target, ext));
    if (!lambda) throw RepresentationFailure(context);

    Polynomial out(abstract_arity);
    Polynomial recon(target.nvars());
    for (std::size_t j = 0; j < prods.size(); ++j) {
        if ((*lambda)[j] == 0) continue;
        recon += (*lambda)[j] * prods[j].value;
        Monomial mo = Monomial::one(abstract_arity);
        for (std::size_t f : prods[j].factors) ++mo.e[f];
        out.add_term(mo, (*lambda)[j]);
    }
    if (recon != target) throw RepresentationFailure(context + ": reconstruction mismatch");
    return out;
}

// Splits a degree-1 abstract polynomial into its row of (A, b).
inline void affine_row(const Polynomial& p, std::size_t row, Matrix& a, Vector& b) {
    for (const auto& [mo, c] : p.terms()) {
        if (mo.is_one()) {
            b[row] = c;
            continue;
        }
        for (std::size_t j = 0; j < mo.e.size(); ++j)
            if (mo.e[j] > 0) a.at(row, j) = c;
    }
}

}  // namespace detail

// Sound abstract initial box: each component is the interval evaluation of the
// corresponding map component over the initial box, after substituting
// point-valued variables exactly (which restores cancellation across terms).
inline model::Box map_initial_box(const model::Box& box, const model::Condition& cond,
                                  const std::vector<Polynomial>& alpha) {
    (void)cond;  // side conditions do not tighten the interval image
    std::vector<Polynomial> subst;
    const std::size_t n = box.iv.size();
    subst.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (box.iv[i].is_point())
            subst.push_back(Polynomial::constant(n, *box.iv[i].lo));
        else
            subst.push_back(Polynomial::variable(n, i));
    }
    model::Box out(alpha.size());
    for (std::size_t j = 0; j < alpha.size(); ++j)
        out.iv[j] = model::eval_interval(poly::substitute(alpha[j], subst), box);
    return out;
}

// Builds the abstract system for a d-closed collection: abstract variables
// w1..wm, per-location degree-<=d dynamics, per-transition degree-<=d updates,
// pass-through guards, and the mapped initial box.
inline std::pair<CobMap, AbstractSystem> build(const model::SystemModel& m,
                                               const std::vector<closure::Span>& spaces,
                                               std::uint32_t d,
                                               std::size_t product_cap = 200000) {
    if (!closure::closure_certificate(m, spaces, d, product_cap)) throw NotClosed();

    std::size_t arity = 0;
    for (const auto& s : spaces) arity = std::max(arity, s.dim());

    CobMap alpha;
    alpha.source_arity = m.vars.size();
    alpha.arity = arity;
    for (const auto& s : spaces) {
        auto comps = s.elements();
        alpha.live.push_back(comps.size());
        comps.resize(arity, Polynomial(m.vars.size()));
        alpha.components.push_back(std::move(comps));
    }

    AbstractSystem abs;
    abs.kind = m.kind;
    abs.name = m.name;
    abs.degree = d;
    abs.wvars = poly::abstract_vars(arity);
    abs.init_location = m.init_location;

    std::vector<std::vector<closure::ProductTerm>> prods(spaces.size());
    for (std::size_t l = 0; l < spaces.size(); ++l)
        prods[l] = closure::pp_product_terms(spaces[l], d, product_cap);

    const bool flow = m.kind != model::SystemKind::Discrete;
    for (std::size_t l = 0; l < spaces.size(); ++l) {
        AbstractLocation loc;
        loc.name = m.locations[l].name;
        loc.has_flow = flow;
        if (flow) {
            const auto field = m.full_field(m.locations[l]);
            loc.dynamics.reserve(arity);
            for (std::size_t j = 0; j < arity; ++j) {
                if (j >= alpha.live[l]) {
                    loc.dynamics.emplace_back(arity);
                    continue;
                }
                loc.dynamics.push_back(detail::express_as_abstract(
                    poly::lie_derivative(alpha.components[l][j], field), prods[l], arity,
                    "flow at " + loc.name + " component " + std::to_string(j + 1)));
            }
            if (d == 1) {
                loc.a = Matrix(arity, arity);
                loc.b = Vector(arity, Rational(0));
                for (std::size_t j = 0; j < arity; ++j)
                    detail::affine_row(loc.dynamics[j], j, loc.a, loc.b);
            }
        }
        abs.locations.push_back(std::move(loc));
    }

    for (const auto& t : m.transitions) {
        AbstractTransition at;
        at.name = t.name;
        at.src = t.src;
        at.dst = t.dst;
        at.guard = t.guard;
        const auto update = m.full_update(t);
        at.update.reserve(arity);
        for (std::size_t j = 0; j < arity; ++j) {
            if (j >= alpha.live[t.dst]) {
                at.update.emplace_back(arity);
                continue;
            }
            at.update.push_back(detail::express_as_abstract(
                poly::fpre(alpha.components[t.dst][j], update), prods[t.src], arity,
                "transition " + t.name + " component " + std::to_string(j + 1)));
        }
        abs.transitions.push_back(std::move(at));
    }

    abs.init_box = map_initial_box(m.init_box, m.init_cond, alpha.components[m.init_location]);
    abs.source_init_box = m.init_box;
    abs.init_cond = m.init_cond;
    return {std::move(alpha), std::move(abs)};
}

// One commutation obligation: the exact residual polynomials over the original
// variables, all identically zero iff the obligation holds.
struct Obligation {
    std::string label;
    std::vector<Polynomial> residuals;

    bool ok() const {
        for (const auto& r : residuals)
            if (!r.is_zero()) return false;
        return true;
    }
};

struct CommutationCertificate {
    std::vector<Obligation> flows;
    std::vector<Obligation> jumps;

    bool ok() const {
        for (const auto& o : flows)
            if (!o.ok()) return false;
        for (const auto& o : jumps)
            if (!o.ok()) return false;
        return true;
    }
};

// Exact symbolic commutation check, independent of the builder's solves: at
// each flow location G(alpha(x)) - Jalpha(x) * F(x) == 0, and per transition
// F'(alpha_src(x)) - alpha_dst(F(x)) == 0.
inline CommutationCertificate check_commutation(const model::SystemModel& m,
                                                const CobMap& alpha,
                                                const AbstractSystem& abs) {
    CommutationCertificate cert;
    for (std::size_t l = 0; l < abs.locations.size(); ++l) {
        if (!abs.locations[l].has_flow) continue;
        const auto field = m.full_field(m.locations[l]);
        Obligation o;
        o.label = "flow " + abs.locations[l].name;
        for (std::size_t j = 0; j < abs.arity(); ++j) {
            const Polynomial lhs =
                poly::substitute(abs.locations[l].dynamics[j], alpha.components[l]);
            const Polynomial rhs = poly::lie_derivative(alpha.components[l][j], field);
            o.residuals.push_back(lhs - rhs);
        }
        cert.flows.push_back(std::move(o));
    }
    for (std::size_t k = 0; k < abs.transitions.size(); ++k) {
        const auto& t = abs.transitions[k];
        const auto update = m.full_update(m.transitions[k]);
        Obligation o;
        o.label = "transition " + t.name;
        for (std::size_t j = 0; j < abs.arity(); ++j) {
            const Polynomial lhs = poly::substitute(t.update[j], alpha.components[t.src]);
            const Polynomial rhs = poly::substitute(alpha.components[t.dst][j], update);
            o.residuals.push_back(lhs - rhs);
        }
        cert.jumps.push_back(std::move(o));
    }
    return cert;
}

// Multilinear rewriting of a continuous system: variable xk whose maximal
// power in the field is r becomes copies yk1..ykr, each power xk^p rewriting
// to the product yk1...ykp; every copy carries the rewritten dynamics of xk.
// Copies start equal (init equalities) and stay equal by uniqueness.
struct Multilinearization {
    model::SystemModel system;
    std::vector<std::size_t> copy_of;  // new var index -> original var index
};

inline Multilinearization multilinearize(const model::SystemModel& m) {
    if (m.kind != model::SystemKind::Continuous)
        throw std::invalid_argument("multilinearize expects a continuous system");
    const std::size_t n_state = m.num_state_vars;
    const std::size_t n_old = m.vars.size();
    const auto& field = m.locations[0].field;

    std::vector<std::uint32_t> copies(n_state, 1);
    for (const auto& f : field)
        for (const auto& [mo, c] : f.terms())
            for (std::size_t k = 0; k < n_state; ++k)
                copies[k] = std::max(copies[k], mo.e[k]);

    // new variable layout: copies of each state var in order, then params
    std::vector<std::size_t> first(n_state, 0);
    std::size_t n_new_state = 0;
    for (std::size_t k = 0; k < n_state; ++k) {
        first[k] = n_new_state;
        n_new_state += copies[k];
    }
    const std::size_t n_new = n_new_state + (n_old - n_state);

    Multilinearization res;
    res.system.kind = model::SystemKind::Continuous;
    res.system.name = m.name;
    res.system.num_state_vars = n_new_state;
    res.system.init_location = 0;

    std::set<std::string> taken;
    auto claim = [&](std::string s) {
        while (taken.count(s)) s += "_";
        taken.insert(s);
        return s;
    };
    for (std::size_t k = 0; k < n_state; ++k) {
        const std::string base = m.vars.name(k);
        for (std::uint32_t i = 1; i <= copies[k]; ++i) {
            res.system.vars.add(
                claim(copies[k] == 1 ? base : base + "_" + std::to_string(i)));
            res.copy_of.push_back(k);
        }
    }
    for (std::size_t k = n_state; k < n_old; ++k) {
        res.system.vars.add(claim(m.vars.name(k)));
        res.copy_of.push_back(k);
    }

    // xk^p -> yk1...ykp term by term; params keep their exponents
    auto rewrite = [&](const Polynomial& p) {
        Polynomial out(n_new);
        for (const auto& [mo, c] : p.terms()) {
            Monomial nm = Monomial::one(n_new);
            for (std::size_t k = 0; k < n_state; ++k)
                for (std::uint32_t i = 0; i < mo.e[k]; ++i) ++nm.e[first[k] + i];
            for (std::size_t k = n_state; k < n_old; ++k)
                nm.e[n_new_state + (k - n_state)] = mo.e[k];
            out.add_term(nm, c);
        }
        return out;
    };
    // conditions are not required multilinear: plain first-copy substitution
    std::vector<Polynomial> to_first;
    to_first.reserve(n_old);
    for (std::size_t k = 0; k < n_state; ++k)
        to_first.push_back(Polynomial::variable(n_new, first[k]));
    for (std::size_t k = n_state; k < n_old; ++k)
        to_first.push_back(Polynomial::variable(n_new, n_new_state + (k - n_state)));
    auto subst_cond = [&](const model::Condition& c) {
        model::Condition out;
        for (const auto& a : c.atoms)
            out.atoms.push_back({poly::substitute(a.poly, to_first), a.rel});
        return out;
    };

    model::Location loc;
    loc.name = m.locations[0].name;
    for (std::size_t k = 0; k < n_state; ++k) {
        const Polynomial rf = rewrite(field[k]);
        for (std::uint32_t i = 0; i < copies[k]; ++i) loc.field.push_back(rf);
    }
    loc.domain = subst_cond(m.locations[0].domain);
    res.system.locations.push_back(std::move(loc));

    res.system.init_box = model::Box(n_new);
    for (std::size_t j = 0; j < n_new; ++j)
        res.system.init_box.iv[j] = m.init_box.iv[res.copy_of[j]];
    res.system.init_cond = subst_cond(m.init_cond);
    for (std::size_t k = 0; k < n_state; ++k)
        for (std::uint32_t i = 1; i < copies[k]; ++i) {
            const Polynomial tie = Polynomial::variable(n_new, first[k] + i) -
                                   Polynomial::variable(n_new, first[k]);
            res.system.init_cond.atoms.push_back({tie, model::Rel::Eq});
        }
    return res;
}

}  // namespace cob::abstraction
