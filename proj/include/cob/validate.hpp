#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <vector>

#include "cob/abstraction.hpp"
#include "cob/invariants.hpp"
#include "cob/model.hpp"

// Numeric and execution-based validation: fixed-step RK4 simulation of
// concrete and abstract flows, matrix-exponential conservation probes, and
// exact rational execution traces of discrete systems used as oracles for
// emitted equality invariants.
namespace cob::validate {

using exactalg::Matrix;
using exactalg::Rational;
using exactalg::Vector;
using poly::Polynomial;

// ---------------------------------------------------------------------------
// double-precision polynomial evaluation

inline double eval(const Polynomial& p, const std::vector<double>& x) {
    double out = 0;
    for (const auto& [mo, c] : p.terms()) {
        double t = exactalg::to_double(c);
        for (std::size_t i = 0; i < mo.e.size(); ++i)
            for (std::uint32_t k = 0; k < mo.e[i]; ++k) t *= x[i];
        out += t;
    }
    return out;
}

inline std::vector<double> eval(const std::vector<Polynomial>& ps,
                                const std::vector<double>& x) {
    std::vector<double> out(ps.size());
    for (std::size_t j = 0; j < ps.size(); ++j) out[j] = eval(ps[j], x);
    return out;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double t : v) m = std::max(m, std::abs(t));
    return m;
}

// ---------------------------------------------------------------------------
// simulation

struct SimConfig {
    double step = 1e-3;
    double horizon = 1.0;
    std::size_t samples = 20;
    double tol = 1e-4;
    std::uint64_t seed = 0xC0B;
};

struct Trajectory {
    std::vector<double> grid;                 // grid[0] = 0
    std::vector<std::vector<double>> states;  // states[i] at grid[i]
    bool blew_up = false;                     // stopped at the state cap
};

// Classic fixed-step fourth-order Runge-Kutta; stops early once the state
// leaves the cap or turns non-finite.
inline Trajectory integrate(const std::vector<Polynomial>& field,
                            const std::vector<double>& x0, double step,
                            double horizon, double cap = 1e8) {
    Trajectory tr;
    const std::size_t n = x0.size();
    const auto steps = static_cast<std::size_t>(std::llround(horizon / step));
    tr.grid.push_back(0);
    tr.states.push_back(x0);
    std::vector<double> tmp(n);
    for (std::size_t s = 1; s <= steps; ++s) {
        const auto& x = tr.states.back();
        const auto k1 = eval(field, x);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * step * k1[i];
        const auto k2 = eval(field, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * step * k2[i];
        const auto k3 = eval(field, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + step * k3[i];
        const auto k4 = eval(field, tmp);
        std::vector<double> nx(n);
        for (std::size_t i = 0; i < n; ++i)
            nx[i] = x[i] + step / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        const double mag = max_abs(nx);
        if (!std::isfinite(mag) || mag > cap) {
            tr.blew_up = true;
            break;
        }
        tr.grid.push_back(static_cast<double>(s) * step);
        tr.states.push_back(std::move(nx));
    }
    return tr;
}

// ---------------------------------------------------------------------------
// box sampling; an unbounded side is clamped to a unit-width window

inline double sample_interval(const model::Interval& iv, std::mt19937_64& rng) {
    double lo, hi;
    if (iv.lo && iv.hi) {
        lo = exactalg::to_double(*iv.lo);
        hi = exactalg::to_double(*iv.hi);
    } else if (iv.lo) {
        lo = exactalg::to_double(*iv.lo);
        hi = lo + 1;
    } else if (iv.hi) {
        hi = exactalg::to_double(*iv.hi);
        lo = hi - 1;
    } else {
        lo = -1;
        hi = 1;
    }
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::vector<double> sample_box(const model::Box& box,
                                      std::mt19937_64& rng) {
    std::vector<double> x(box.size());
    for (std::size_t i = 0; i < box.size(); ++i)
        x[i] = sample_interval(box.iv[i], rng);
    return x;
}

// ---------------------------------------------------------------------------
// flow commutation: alpha(x(t)) must track the abstract trajectory started at
// alpha(x0). The identity is algebraic, so any start point is a valid probe.
// Comparison stops once the fixed step no longer resolves either side (local
// change above 10% per step), which keeps finite-time blow-ups from drowning
// the check in integration error.

struct FlowCheck {
    double residual = 0;     // max deviation over compared grid points
    double scale = 1;        // 1 + max abstract magnitude over the window
    std::size_t compared = 0;
    bool pass = false;
};

inline FlowCheck check_flow_commutation(const std::vector<Polynomial>& field,
                                        const std::vector<Polynomial>& alpha_l,
                                        const std::vector<Polynomial>& dynamics,
                                        const std::vector<double>& x0,
                                        const SimConfig& cfg) {
    FlowCheck out;
    const auto cx = integrate(field, x0, cfg.step, cfg.horizon);
    const auto w0 = eval(alpha_l, x0);
    const auto aw = integrate(dynamics, w0, cfg.step, cfg.horizon);
    const std::size_t upto = std::min(cx.states.size(), aw.states.size());
    for (std::size_t i = 0; i < upto; ++i) {
        const auto& x = cx.states[i];
        const auto& w = aw.states[i];
        if (cfg.step * max_abs(eval(field, x)) > 0.1 * (1 + max_abs(x))) break;
        if (cfg.step * max_abs(eval(dynamics, w)) > 0.1 * (1 + max_abs(w)))
            break;
        const auto wx = eval(alpha_l, x);
        out.scale = std::max(out.scale, 1 + max_abs(w));
        double dev = 0;
        for (std::size_t j = 0; j < wx.size(); ++j)
            dev = std::max(dev, std::abs(wx[j] - w[j]));
        out.residual = std::max(out.residual, dev);
        ++out.compared;
    }
    out.pass = out.compared > 0 && out.residual <= cfg.tol * out.scale;
    return out;
}

struct FlowSuite {
    double residual = 0;
    std::size_t compared = 0;
    bool pass = true;
};

// Samples the init box and probes flow commutation of every flowing location
// from each sample; location domains and reachability do not restrict the
// validity of the probe.
inline FlowSuite flow_commutation_suite(const model::SystemModel& m,
                                        const abstraction::CobMap& alpha,
                                        const abstraction::AbstractSystem& abs,
                                        const SimConfig& cfg) {
    FlowSuite out;
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        const auto x0 = sample_box(m.init_box, rng);
        for (std::size_t l = 0; l < abs.locations.size(); ++l) {
            if (!abs.locations[l].has_flow) continue;
            const auto fc = check_flow_commutation(
                m.full_field(m.locations[l]), alpha.at(l),
                abs.locations[l].dynamics, x0, cfg);
            out.residual = std::max(out.residual, fc.residual);
            out.compared += fc.compared;
            out.pass = out.pass && fc.pass;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// matrix exponential conservation: for an affine abstract flow w' = Aw + b
// the augmented state (w, 1) evolves linearly, so exp(-t M)(w(t), 1) with the
// augmented matrix M stays constant along exact trajectories.

using DMatrix = std::vector<std::vector<double>>;

inline DMatrix dmat_identity(std::size_t n) {
    DMatrix m(n, std::vector<double>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline DMatrix dmat_mul(const DMatrix& a, const DMatrix& b) {
    const std::size_t n = a.size();
    DMatrix c(n, std::vector<double>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double f = a[i][k];
            if (f == 0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] += f * b[k][j];
        }
    return c;
}

inline std::vector<double> dmat_vec(const DMatrix& a,
                                    const std::vector<double>& v) {
    std::vector<double> out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
    return out;
}

// Scaling-and-squaring with a Taylor series on the scaled matrix.
inline DMatrix expm(DMatrix a) {
    const std::size_t n = a.size();
    double norm = 0;
    for (const auto& row : a) {
        double s = 0;
        for (double v : row) s += std::abs(v);
        norm = std::max(norm, s);
    }
    int sq = 0;
    while (norm > 0.25) {
        norm /= 2;
        ++sq;
    }
    const double f = std::ldexp(1.0, -sq);
    for (auto& row : a)
        for (double& v : row) v *= f;
    DMatrix sum = dmat_identity(n);
    DMatrix term = dmat_identity(n);
    for (int k = 1; k <= 40; ++k) {
        term = dmat_mul(term, a);
        double tn = 0;
        for (auto& row : term)
            for (double& v : row) {
                v /= k;
                tn = std::max(tn, std::abs(v));
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) sum[i][j] += term[i][j];
        if (tn < 1e-18) break;
    }
    for (int i = 0; i < sq; ++i) sum = dmat_mul(sum, sum);
    return sum;
}

struct ExpCheck {
    double drift = 0;        // max segment residual relative to local scale
    double scale = 1;        // 1 + max abstract magnitude over the probes
    std::size_t segments = 0;
    bool pass = false;
};

// Segment-wise: back-transporting the state over one short segment must land
// on the segment start. Local relative residuals keep the probe sensitive at
// every magnitude of a growing trajectory.
inline ExpCheck check_exp_conservation(const std::vector<Polynomial>& field,
                                       const std::vector<Polynomial>& alpha_l,
                                       const Matrix& a, const Vector& b,
                                       const std::vector<double>& x0,
                                       const SimConfig& cfg) {
    ExpCheck out;
    const std::size_t m = a.rows();
    DMatrix aug(m + 1, std::vector<double>(m + 1, 0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            aug[i][j] = exactalg::to_double(a.at(i, j));
        aug[i][m] = exactalg::to_double(b[i]);
    }
    const auto tr = integrate(field, x0, cfg.step, cfg.horizon);
    const std::size_t probes =
        std::min<std::size_t>(std::max<std::size_t>(cfg.samples, 2),
                              tr.states.size());
    std::vector<std::size_t> at(probes);
    for (std::size_t k = 0; k < probes; ++k)
        at[k] = k * (tr.states.size() - 1) / (probes - 1);
    for (std::size_t k = 0; k + 1 < probes; ++k) {
        const std::size_t i = at[k], j = at[k + 1];
        if (j <= i) continue;
        const auto& xj = tr.states[j];
        if (cfg.step * max_abs(eval(field, xj)) > 0.1 * (1 + max_abs(xj)))
            break;
        auto vi = eval(alpha_l, tr.states[i]);
        vi.push_back(1);
        auto vj = eval(alpha_l, xj);
        vj.push_back(1);
        const double local = 1 + max_abs(vi);
        out.scale = std::max(out.scale, local);
        DMatrix neg = aug;
        for (auto& row : neg)
            for (double& v : row) v *= -(tr.grid[j] - tr.grid[i]);
        const auto back = dmat_vec(expm(std::move(neg)), vj);
        double dev = 0;
        for (std::size_t c = 0; c <= m; ++c)
            dev = std::max(dev, std::abs(back[c] - vi[c]));
        out.drift = std::max(out.drift, dev / local);
        ++out.segments;
    }
    out.pass = out.segments > 0 && out.drift <= cfg.tol;
    return out;
}

// ---------------------------------------------------------------------------
// integrator self-check: the endpoint defect against a half-step run decays
// like h^4, so halving h should shrink it by roughly 16

inline double endpoint_defect(const std::vector<Polynomial>& field,
                              const std::vector<double>& x0, double step,
                              double horizon) {
    const auto a = integrate(field, x0, step, horizon);
    const auto b = integrate(field, x0, step / 2, horizon);
    const auto& xa = a.states.back();
    const auto& xb = b.states.back();
    double d = 0;
    for (std::size_t i = 0; i < xa.size(); ++i)
        d = std::max(d, std::abs(xa[i] - xb[i]));
    return d;
}

inline double order_factor(const std::vector<Polynomial>& field,
                           const std::vector<double>& x0, double step,
                           double horizon) {
    return endpoint_defect(field, x0, step, horizon) /
           endpoint_defect(field, x0, step / 2, horizon);
}

// ---------------------------------------------------------------------------
// exact discrete execution, used as an oracle for emitted invariants

inline bool holds(const model::Condition& c, const Vector& x) {
    for (const auto& a : c.atoms) {
        const Rational v = a.poly.eval(x);
        bool ok = true;
        switch (a.rel) {
            case model::Rel::Lt: ok = v < 0; break;
            case model::Rel::Le: ok = v <= 0; break;
            case model::Rel::Eq: ok = v == 0; break;
            case model::Rel::Ge: ok = v >= 0; break;
            case model::Rel::Gt: ok = v > 0; break;
        }
        if (!ok) return false;
    }
    return true;
}

struct DiscreteTrace {
    std::vector<std::size_t> locations;
    std::vector<Vector> states;  // parallel to locations
    bool exhausted = false;      // step cap hit with a transition still enabled
};

// From a rational state, fire the first enabled transition in declaration
// order until none is enabled or max_steps firings happened.
inline DiscreteTrace run_discrete(const model::SystemModel& m, Vector x0,
                                  std::size_t max_steps) {
    DiscreteTrace tr;
    std::size_t loc = m.init_location;
    Vector x = std::move(x0);
    tr.locations.push_back(loc);
    tr.states.push_back(x);
    for (std::size_t s = 0; s < max_steps; ++s) {
        const model::Transition* fire = nullptr;
        for (const auto& t : m.transitions)
            if (t.src == loc && holds(t.guard, x)) {
                fire = &t;
                break;
            }
        if (!fire) return tr;
        const auto u = m.full_update(*fire);
        Vector nx(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) nx[i] = u[i].eval(x);
        x = std::move(nx);
        loc = fire->dst;
        tr.locations.push_back(loc);
        tr.states.push_back(x);
    }
    tr.exhausted = true;
    return tr;
}

// Worst absolute violation of the invariants over every visited state at
// their locations; exact zero means the execution supports them all.
inline Rational max_violation(
    const DiscreteTrace& tr,
    const std::vector<invariants::EqualityInvariant>& invs) {
    Rational worst(0);
    for (std::size_t i = 0; i < tr.states.size(); ++i)
        for (const auto& inv : invs) {
            if (inv.location != tr.locations[i]) continue;
            Rational v = inv.concrete.eval(tr.states[i]);
            if (v < 0) v = -v;
            if (v > worst) worst = v;
        }
    return worst;
}

}  // namespace cob::validate
