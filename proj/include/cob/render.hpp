#pragma once

#include <string>
#include <vector>

#include "cob/model.hpp"
#include "cob/polynomial.hpp"
#include "cob/rational.hpp"

namespace cob::render {

using exactalg::Rational;
using poly::Monomial;
using poly::Polynomial;

inline std::string render_monomial(const Monomial& m,
                                   const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < m.nvars(); ++i) {
        if (m.e[i] == 0) continue;
        if (!out.empty()) out += "*";
        out += names[i];
        if (m.e[i] > 1) out += "^" + std::to_string(m.e[i]);
    }
    return out;
}

// Canonical text: terms in descending monomial order, unit coefficients
// omitted except on the constant term, e.g. "1/2*x*y^2 + 9*x*y + x".
inline std::string render_poly(const Polynomial& p,
                               const std::vector<std::string>& names) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        const bool neg = c < 0;
        const Rational mag = neg ? Rational(-c) : c;
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        if (m.is_one()) {
            out += exactalg::to_string(mag);
        } else {
            if (mag != 1) out += exactalg::to_string(mag) + "*";
            out += render_monomial(m, names);
        }
        first = false;
    }
    return out;
}

inline std::string render_atom(const model::GuardAtom& a,
                               const std::vector<std::string>& names) {
    return render_poly(a.poly, names) + " " + model::rel_text(a.rel) + " 0";
}

inline std::string render_cond(const model::Condition& c,
                               const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < c.atoms.size(); ++i) {
        if (i) out += " && ";
        out += render_atom(c.atoms[i], names);
    }
    return out;
}

namespace detail {

inline void render_init(const model::SystemModel& m, std::string& out,
                        const std::string& ind) {
    const auto& names = m.vars.names();
    out += ind + "init {\n";
    for (std::size_t i = 0; i < m.init_box.size(); ++i) {
        const auto& iv = m.init_box.iv[i];
        if (!iv.lo && !iv.hi) continue;
        if (iv.is_point()) {
            out += ind + "  " + names[i] + " = " + exactalg::to_string(*iv.lo) + ";\n";
        } else if (iv.is_bounded()) {
            out += ind + "  " + names[i] + " in [" + exactalg::to_string(*iv.lo) +
                   ", " + exactalg::to_string(*iv.hi) + "];\n";
        } else if (iv.lo) {
            out += ind + "  " + names[i] + " >= " + exactalg::to_string(*iv.lo) + ";\n";
        } else {
            out += ind + "  " + names[i] + " <= " + exactalg::to_string(*iv.hi) + ";\n";
        }
    }
    for (const auto& a : m.init_cond.atoms)
        out += ind + "  " + render_atom(a, names) + ";\n";
    out += ind + "}\n";
}

inline void render_field(const model::SystemModel& m, const model::Location& loc,
                         std::string& out, const std::string& ind) {
    const auto& names = m.vars.names();
    out += ind + "field {\n";
    for (std::size_t i = 0; i < loc.field.size(); ++i)
        out += ind + "  " + names[i] + "' = " + render_poly(loc.field[i], names) +
               ";\n";
    out += ind + "}\n";
}

inline void render_transition(const model::SystemModel& m,
                              const model::Transition& t, std::string& out) {
    const auto& names = m.vars.names();
    out += "  transition " + t.name + " {\n";
    out += "    from " + m.locations[t.src].name + ";\n";
    out += "    to " + m.locations[t.dst].name + ";\n";
    if (!t.guard.is_true())
        out += "    guard: " + render_cond(t.guard, names) + ";\n";
    out += "    update {\n";
    for (std::size_t i = 0; i < t.update.size(); ++i) {
        if (t.update[i] == Polynomial::variable(m.vars.size(), i)) continue;
        out += "      " + names[i] + "' = " + render_poly(t.update[i], names) + ";\n";
    }
    out += "    }\n";
    out += "  }\n";
}

}  // namespace detail

// Source text that parses back to an identical model.
inline std::string render_model(const model::SystemModel& m) {
    const auto& names = m.vars.names();
    std::string out;
    switch (m.kind) {
        case model::SystemKind::Continuous: out += "continuous "; break;
        case model::SystemKind::Discrete: out += "discrete "; break;
        case model::SystemKind::Hybrid: out += "hybrid "; break;
    }
    out += m.name + " {\n";
    out += "  vars: ";
    for (std::size_t i = 0; i < m.num_state_vars; ++i)
        out += (i ? ", " : "") + names[i];
    out += ";\n";
    if (m.num_params() > 0) {
        out += "  params: ";
        for (std::size_t i = m.num_state_vars; i < names.size(); ++i)
            out += (i > m.num_state_vars ? ", " : "") + names[i];
        out += ";\n";
    }
    if (m.kind == model::SystemKind::Continuous) {
        detail::render_field(m, m.locations[0], out, "  ");
        detail::render_init(m, out, "  ");
        if (!m.locations[0].domain.is_true())
            out += "  inv: " + render_cond(m.locations[0].domain, names) + ";\n";
    } else if (m.kind == model::SystemKind::Discrete) {
        out += "  locations:";
        for (const auto& l : m.locations) out += " " + l.name;
        out += ";\n";
        out += "  initloc: " + m.locations[m.init_location].name + ";\n";
        for (const auto& t : m.transitions) detail::render_transition(m, t, out);
        detail::render_init(m, out, "  ");
    } else {
        for (const auto& l : m.locations) {
            out += "  mode " + l.name + " {\n";
            detail::render_field(m, l, out, "    ");
            if (!l.domain.is_true())
                out += "    inv: " + render_cond(l.domain, names) + ";\n";
            out += "  }\n";
        }
        if (m.init_location != 0)
            out += "  initloc: " + m.locations[m.init_location].name + ";\n";
        for (const auto& t : m.transitions) detail::render_transition(m, t, out);
        detail::render_init(m, out, "  ");
    }
    out += "}\n";
    return out;
}

}  // namespace cob::render
