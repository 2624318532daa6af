#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cob/abstraction.hpp"
#include "cob/closure.hpp"
#include "cob/invariants.hpp"
#include "cob/model.hpp"
#include "cob/validate.hpp"

// End-to-end orchestration: optional clock augmentation, closure, abstract
// system construction, invariant generation, and numeric validation.
namespace cob::pipeline {

using exactalg::Rational;
using exactalg::Vector;
using poly::Polynomial;

struct Options {
    std::uint32_t degree_out = 1;
    std::uint32_t degree_init = 2;
    bool with_time = false;  // append a clock to flowing systems
    std::size_t product_cap = 200000;
    std::size_t max_exec_steps = 100;
    validate::SimConfig sim;
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

// p with a fresh variable slot inserted at position `at`.
inline Polynomial shift_vars(const Polynomial& p, std::size_t at,
                             std::size_t new_arity) {
    std::vector<Polynomial> sub;
    sub.reserve(p.nvars());
    for (std::size_t i = 0; i < p.nvars(); ++i)
        sub.push_back(Polynomial::variable(new_arity, i < at ? i : i + 1));
    return poly::substitute(p, sub);
}

inline model::Condition shift_vars(const model::Condition& c, std::size_t at,
                                   std::size_t n) {
    model::Condition out;
    for (const auto& a : c.atoms)
        out.atoms.push_back({shift_vars(a.poly, at, n), a.rel});
    return out;
}

}  // namespace detail

// The model with a clock appended as the last state variable: unit derivative
// in every flowing location, identity across jumps, initial value zero.
inline model::SystemModel with_clock(const model::SystemModel& m) {
    if (m.kind == model::SystemKind::Discrete) return m;
    const std::size_t at = m.num_state_vars;  // params stay last
    const std::size_t n = m.vars.size() + 1;

    std::string clock = "t";
    while (m.vars.find(clock)) clock += "_";

    model::SystemModel out;
    out.kind = m.kind;
    out.name = m.name;
    out.num_state_vars = m.num_state_vars + 1;
    for (std::size_t i = 0; i < m.num_state_vars; ++i)
        out.vars.add(m.vars.name(i));
    out.vars.add(clock);
    for (std::size_t i = m.num_state_vars; i < m.vars.size(); ++i)
        out.vars.add(m.vars.name(i));

    for (const auto& loc : m.locations) {
        model::Location nl;
        nl.name = loc.name;
        for (const auto& f : loc.field)
            nl.field.push_back(detail::shift_vars(f, at, n));
        if (!loc.field.empty())
            nl.field.push_back(Polynomial::constant(n, Rational(1)));
        nl.domain = detail::shift_vars(loc.domain, at, n);
        out.locations.push_back(std::move(nl));
    }
    for (const auto& t : m.transitions) {
        model::Transition nt;
        nt.name = t.name;
        nt.src = t.src;
        nt.dst = t.dst;
        nt.guard = detail::shift_vars(t.guard, at, n);
        for (const auto& u : t.update)
            nt.update.push_back(detail::shift_vars(u, at, n));
        nt.update.push_back(Polynomial::variable(n, at));
        out.transitions.push_back(std::move(nt));
    }
    out.init_location = m.init_location;
    out.init_box = model::Box(n);
    for (std::size_t i = 0; i < m.vars.size(); ++i)
        out.init_box.iv[i < at ? i : i + 1] = m.init_box.iv[i];
    out.init_box.iv[at] = model::Interval::point(Rational(0));
    out.init_cond = detail::shift_vars(m.init_cond, at, n);
    return out;
}

// Number of basis elements involving at least one state variable; benchmark
// tables discard parameter-only elements from the reported count.
inline std::size_t state_relevant_dim(const closure::Span& s,
                                      std::size_t num_state_vars) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < s.rows.rows(); ++i) {
        bool relevant = false;
        for (std::size_t j = 0; j < s.index.size() && !relevant; ++j) {
            if (s.rows.at(i, j) == 0) continue;
            for (std::size_t v = 0; v < num_state_vars && !relevant; ++v)
                relevant = s.index[j].e[v] > 0;
        }
        out += relevant ? 1 : 0;
    }
    return out;
}

struct StageTimes {
    double closure_ms = 0;
    double abstraction_ms = 0;
    double invariants_ms = 0;
    double validation_ms = 0;
};

struct Run {
    model::SystemModel m;  // the analyzed model (clock included when asked)
    closure::ClosureResult closure;
    bool trivial = false;  // every location space is zero-dimensional
    abstraction::CobMap alpha;        // meaningful iff !trivial
    abstraction::AbstractSystem abs;  // meaningful iff !trivial
    StageTimes times;
};

inline Run run_abstraction(model::SystemModel m, const Options& opt) {
    Run out;
    if (opt.with_time) m = with_clock(std::move(m));
    closure::ClosureConfig cc;
    cc.degree_out = opt.degree_out;
    cc.degree_init = opt.degree_init;
    cc.product_cap = opt.product_cap;
    auto t0 = std::chrono::steady_clock::now();
    out.closure = closure::greatest_closed_collection(m, cc);
    out.times.closure_ms = detail::ms_since(t0);
    out.trivial = true;
    for (const auto& s : out.closure.spaces)
        if (s.dim() > 0) out.trivial = false;
    if (!out.trivial) {
        t0 = std::chrono::steady_clock::now();
        auto [alpha, abs] = abstraction::build(m, out.closure.spaces,
                                               opt.degree_out, opt.product_cap);
        out.times.abstraction_ms = detail::ms_since(t0);
        out.alpha = std::move(alpha);
        out.abs = std::move(abs);
    }
    out.m = std::move(m);
    return out;
}

struct InvariantReport {
    std::vector<invariants::AffineSubspace> hulls;  // one per location
    std::vector<invariants::EqualityInvariant> equalities;
    std::vector<invariants::ConservedQuantity> conserved;  // flows only
};

// Affine reachability plus, for a single flowing location, the eigenvalue
// scale-function search. Requires a degree-1 abstraction.
inline InvariantReport run_invariants(const Run& r) {
    InvariantReport out;
    out.hulls = invariants::reachable_hulls(r.abs, r.alpha);
    out.equalities = invariants::equality_invariants(r.alpha, out.hulls);
    if (r.abs.locations.size() == 1 && r.abs.locations[0].has_flow &&
        r.abs.degree == 1)
        out.conserved = invariants::scale_functions(
            r.abs.locations[0].a, r.abs.locations[0].b, r.alpha.at(0));
    return out;
}

// Exact rational initial states: the solved initial form evaluated over a
// small integer grid on the free variables (shifted to the box when one side
// is bounded). Capped cartesian product.
inline std::vector<Vector> init_grid(const model::SystemModel& m,
                                     std::size_t per_var,
                                     std::size_t cap = 400) {
    auto [sub, leftover] =
        invariants::detail::solved_init_form(m.init_box, m.init_cond);
    (void)leftover;
    const std::size_t n = m.vars.size();
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i)
        if (sub[i] == Polynomial::variable(n, i)) free.push_back(i);

    std::vector<std::vector<Rational>> choices(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) {
        const auto& iv = m.init_box.iv[free[k]];
        Rational start(0);
        Rational dir(1);
        if (iv.lo)
            start = exactalg::ceil_rat(*iv.lo);
        else if (iv.hi) {
            start = exactalg::floor_rat(*iv.hi);
            dir = -1;
        }
        for (std::size_t j = 0; j < per_var; ++j) {
            const Rational v = start + dir * Rational(j);
            if (iv.contains(v)) choices[k].push_back(v);
        }
        if (choices[k].empty()) choices[k].push_back(start);
    }

    std::vector<Vector> out;
    std::vector<std::size_t> idx(free.size(), 0);
    while (out.size() < cap) {
        Vector probe(n, Rational(0));
        for (std::size_t k = 0; k < free.size(); ++k)
            probe[free[k]] = choices[k][idx[k]];
        Vector x0(n);
        for (std::size_t i = 0; i < n; ++i) x0[i] = sub[i].eval(probe);
        out.push_back(std::move(x0));
        std::size_t k = 0;
        for (; k < idx.size(); ++k) {
            if (++idx[k] < choices[k].size()) break;
            idx[k] = 0;
        }
        if (k == idx.size()) break;
    }
    return out;
}

struct ValidationReport {
    bool ran_flow = false;
    validate::FlowSuite flow;
    bool ran_exp = false;
    double worst_exp_drift = 0;
    bool exp_pass = true;
    bool ran_exec = false;
    Rational worst_violation = Rational(0);
    bool exec_pass = true;
    bool pass = true;
};

// Numeric flow commutation and exponential conservation for flowing
// locations; exact execution of discrete systems against the emitted
// equality invariants.
inline ValidationReport run_validation(const Run& r,
                                       const InvariantReport* inv,
                                       const Options& opt) {
    ValidationReport out;
    bool any_flow = false;
    for (const auto& l : r.abs.locations) any_flow = any_flow || l.has_flow;

    if (any_flow) {
        out.ran_flow = true;
        out.flow = validate::flow_commutation_suite(r.m, r.alpha, r.abs,
                                                    opt.sim);
        if (r.abs.degree == 1) {
            out.ran_exp = true;
            std::mt19937_64 rng(opt.sim.seed);
            const std::size_t tries =
                std::min<std::size_t>(opt.sim.samples, 5);
            for (std::size_t s = 0; s < tries; ++s) {
                const auto x0 = validate::sample_box(r.m.init_box, rng);
                for (std::size_t l = 0; l < r.abs.locations.size(); ++l) {
                    const auto& loc = r.abs.locations[l];
                    if (!loc.has_flow) continue;
                    const auto ec = validate::check_exp_conservation(
                        r.m.full_field(r.m.locations[l]), r.alpha.at(l),
                        loc.a, loc.b, x0, opt.sim);
                    out.worst_exp_drift =
                        std::max(out.worst_exp_drift, ec.drift);
                    out.exp_pass = out.exp_pass && ec.pass;
                }
            }
        }
    }
    if (r.m.kind == model::SystemKind::Discrete && inv &&
        !inv->equalities.empty()) {
        out.ran_exec = true;
        for (const auto& x0 : init_grid(r.m, 5)) {
            const auto tr =
                validate::run_discrete(r.m, x0, opt.max_exec_steps);
            const auto v = validate::max_violation(tr, inv->equalities);
            if (v > out.worst_violation) out.worst_violation = v;
        }
        out.exec_pass = out.worst_violation == 0;
    }
    out.pass = (!out.ran_flow || out.flow.pass) &&
               (!out.ran_exp || out.exp_pass) &&
               (!out.ran_exec || out.exec_pass);
    return out;
}

}  // namespace cob::pipeline
