#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "cob/log.hpp"
#include "cob/model.hpp"
#include "cob/subspace.hpp"

namespace cob::closure {

struct ClosureConfig {
    std::uint32_t degree_out = 1;   // d: degree bound of the abstract system
    std::uint32_t degree_init = 2;  // k: degree of the seed monomial basis
    std::size_t product_cap = 200000;
    std::size_t sweep_cap_factor = 10;
};

struct ClosureResult {
    std::vector<Span> spaces;  // one per location
    // dims per location: entry 0 is the seed, then one entry per sweep
    std::vector<std::vector<std::size_t>> sweep_dims;
    std::size_t sweeps = 0;          // sweeps executed (last one is a no-op)
    std::size_t changed_sweeps = 0;  // sweeps that shrank some location
};

namespace detail {

// Rows of `w` re-indexed into `ext` (a superset of w.index), still in rref.
inline Matrix extend_rows(const Span& w, const std::vector<Monomial>& ext) {
    std::map<Monomial, std::size_t, MonomialLess> where;
    for (std::size_t j = 0; j < ext.size(); ++j) where[ext[j]] = j;
    Matrix out(w.rows.rows(), ext.size());
    for (std::size_t i = 0; i < w.rows.rows(); ++i)
        for (std::size_t j = 0; j < w.index.size(); ++j)
            out.at(i, where.at(w.index[j])) = w.rows.at(i, j);
    return out;
}

// Appends to `stack` one homogeneous constraint row per extended-index
// monomial: a combination sum c_i g_i survives iff sum c_i targets[i] lies in
// the span `w`.
inline void add_membership_constraints(Matrix& stack,
                                       const std::vector<Polynomial>& targets,
                                       const Span& w) {
    std::set<Monomial, MonomialLess> sup(w.index.begin(), w.index.end());
    for (const auto& t : targets)
        for (const auto& [m, c] : t.terms()) sup.insert(m);
    const std::vector<Monomial> ext(sup.begin(), sup.end());

    const auto wr = exactalg::rref(extend_rows(w, ext));
    std::vector<Vector> residuals;
    residuals.reserve(targets.size());
    for (const auto& t : targets)
        residuals.push_back(exactalg::reduce_against_rref(
            poly::to_coordinates(t, ext), wr));

    for (std::size_t mrow = 0; mrow < ext.size(); ++mrow) {
        Vector row(targets.size(), Rational(0));
        bool nonzero = false;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            row[i] = residuals[i][mrow];
            if (row[i] != 0) nonzero = true;
        }
        if (nonzero) stack.append_row(row);
    }
}

}  // namespace detail

// Greatest collection of subspaces of span(B0) that is closed under the
// degree-d requirement: per location, Lie derivatives of members land in the
// span of products of at most d members; per transition, pulled-back members
// of the target space land in the product span of the source space. Jacobi
// round-robin: every sweep refines all locations against the start-of-sweep
// collection, so the result is independent of location order.
inline ClosureResult greatest_closed_collection(const model::SystemModel& m,
                                                const ClosureConfig& cfg) {
    const std::size_t nloc = m.locations.size();
    const auto b0 = initial_basis(m.vars, cfg.degree_init);

    ClosureResult res;
    res.spaces.assign(nloc, make_span(b0, m.vars.size()));
    res.sweep_dims.push_back(std::vector<std::size_t>(nloc, b0.size()));

    const std::size_t sweep_cap =
        cfg.sweep_cap_factor * std::max<std::size_t>(1, nloc * b0.size());

    while (true) {
        if (res.sweeps >= sweep_cap) throw SweepCapExceeded();

        std::vector<Span> pp(nloc);
        for (std::size_t l = 0; l < nloc; ++l)
            pp[l] = pp_span(res.spaces[l], cfg.degree_out, cfg.product_cap);

        std::vector<Span> next(nloc);
        bool changed = false;
        for (std::size_t l = 0; l < nloc; ++l) {
            const auto basis = res.spaces[l].elements();
            Matrix stack(0, basis.size());

            if (!m.locations[l].field.empty()) {
                const auto field = m.full_field(m.locations[l]);
                std::vector<Polynomial> targets;
                targets.reserve(basis.size());
                for (const auto& g : basis)
                    targets.push_back(poly::lie_derivative(g, field));
                detail::add_membership_constraints(stack, targets, pp[l]);
            }
            for (const auto& t : m.transitions) {
                if (t.dst != l) continue;
                const auto update = m.full_update(t);
                std::vector<Polynomial> targets;
                targets.reserve(basis.size());
                for (const auto& g : basis)
                    targets.push_back(poly::fpre(g, update));
                detail::add_membership_constraints(stack, targets, pp[t.src]);
            }

            if (stack.rows() == 0) {
                next[l] = res.spaces[l];
            } else {
                std::vector<Polynomial> gens;
                for (const auto& c : exactalg::kernel(stack)) {
                    Polynomial g(m.vars.size());
                    for (std::size_t i = 0; i < basis.size(); ++i)
                        if (c[i] != 0) g += c[i] * basis[i];
                    gens.push_back(std::move(g));
                }
                next[l] = make_span(gens, m.vars.size());
            }
            if (next[l].dim() != res.spaces[l].dim()) changed = true;
        }

        res.spaces = std::move(next);
        ++res.sweeps;
        std::vector<std::size_t> dims;
        dims.reserve(nloc);
        for (const auto& s : res.spaces) dims.push_back(s.dim());
        res.sweep_dims.push_back(dims);
        COB_LOG_DEBUG("closure sweep " << res.sweeps << (changed ? " shrank" : " stable"));
        if (!changed) break;
        ++res.changed_sweeps;
    }
    return res;
}

// Independent closure check: every required image is re-expressed as an
// explicit rational combination of products and verified by re-multiplying,
// avoiding the residual-based path the fixpoint uses.
inline bool express_in_products(const Polynomial& target,
                                const std::vector<Polynomial>& prods) {
    std::set<Monomial, MonomialLess> sup;
    for (const auto& q : prods)
        for (const auto& [m, c] : q.terms()) sup.insert(m);
    for (const auto& [m, c] : target.terms()) sup.insert(m);
    const std::vector<Monomial> ext(sup.begin(), sup.end());

    Matrix a(ext.size(), prods.size());
    for (std::size_t j = 0; j < prods.size(); ++j) {
        const Vector col = poly::to_coordinates(prods[j], ext);
        for (std::size_t i = 0; i < ext.size(); ++i) a.at(i, j) = col[i];
    }
    const auto lambda = exactalg::solve(a, poly::to_coordinates(target, ext));
    if (!lambda) return false;

    Polynomial recon(target.nvars());
    for (std::size_t j = 0; j < prods.size(); ++j)
        if ((*lambda)[j] != 0) recon += (*lambda)[j] * prods[j];
    return recon == target;
}

inline bool closure_certificate(const model::SystemModel& m,
                                const std::vector<Span>& spaces,
                                std::uint32_t d,
                                std::size_t product_cap = 200000) {
    std::vector<std::vector<Polynomial>> prods(spaces.size());
    for (std::size_t l = 0; l < spaces.size(); ++l)
        prods[l] = pp_products(spaces[l], d, product_cap);

    for (std::size_t l = 0; l < spaces.size(); ++l) {
        if (m.locations[l].field.empty()) continue;
        const auto field = m.full_field(m.locations[l]);
        for (const auto& g : spaces[l].elements())
            if (!express_in_products(poly::lie_derivative(g, field), prods[l]))
                return false;
    }
    for (const auto& t : m.transitions) {
        const auto update = m.full_update(t);
        for (const auto& g : spaces[t.dst].elements())
            if (!express_in_products(poly::fpre(g, update), prods[t.src]))
                return false;
    }
    return true;
}

}  // namespace cob::closure
