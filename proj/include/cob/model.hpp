#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cob/interval.hpp"
#include "cob/polynomial.hpp"
#include "cob/vartable.hpp"

namespace cob::model {

using poly::Polynomial;
using poly::VarTable;

enum class SystemKind { Continuous, Discrete, Hybrid };

enum class Rel { Lt, Le, Eq, Ge, Gt };

inline const char* rel_text(Rel r) {
    switch (r) {
        case Rel::Lt: return "<";
        case Rel::Le: return "<=";
        case Rel::Eq: return "=";
        case Rel::Ge: return ">=";
        case Rel::Gt: return ">";
    }
    return "?";
}

// Atomic constraint: poly REL 0.
struct GuardAtom {
    Polynomial poly;
    Rel rel;
    friend bool operator==(const GuardAtom& a, const GuardAtom& b) {
        return a.rel == b.rel && a.poly == b.poly;
    }
};

// Conjunction of atoms; empty means true.
struct Condition {
    std::vector<GuardAtom> atoms;
    bool is_true() const { return atoms.empty(); }
    friend bool operator==(const Condition& a, const Condition& b) {
        return a.atoms == b.atoms;
    }
};

// Guarded jump between locations. `update` has one entry per state variable;
// parameters are implicitly unchanged.
struct Transition {
    std::string name;
    std::size_t src = 0, dst = 0;
    Condition guard;
    std::vector<Polynomial> update;
    friend bool operator==(const Transition& a, const Transition& b) {
        return a.name == b.name && a.src == b.src && a.dst == b.dst &&
               a.guard == b.guard && a.update == b.update;
    }
};

// One mode of the system. `field` has one entry per state variable and is
// empty for purely discrete systems.
struct Location {
    std::string name;
    std::vector<Polynomial> field;
    Condition domain;
    friend bool operator==(const Location& a, const Location& b) {
        return a.name == b.name && a.field == b.field && a.domain == b.domain;
    }
};

// Polynomial system: continuous (one location, no transitions), discrete
// (no fields), or hybrid. Variable order is state variables first, then
// parameters; every Polynomial is indexed over the full table.
struct SystemModel {
    SystemKind kind = SystemKind::Continuous;
    std::string name;
    VarTable vars;                // state vars then params
    std::size_t num_state_vars = 0;
    std::vector<Location> locations;
    std::vector<Transition> transitions;
    std::size_t init_location = 0;
    Box init_box;                 // one interval per variable
    Condition init_cond;          // constraints not expressible as bounds

    std::size_t num_params() const { return vars.size() - num_state_vars; }
    bool is_param(std::size_t var) const { return var >= num_state_vars; }

    // Full-arity update vector for a transition: state updates followed by
    // parameter identities.
    std::vector<Polynomial> full_update(const Transition& t) const {
        std::vector<Polynomial> u = t.update;
        for (std::size_t i = num_state_vars; i < vars.size(); ++i)
            u.push_back(Polynomial::variable(vars.size(), i));
        return u;
    }

    // Full-arity vector field for a location: parameter derivatives are zero.
    std::vector<Polynomial> full_field(const Location& loc) const {
        std::vector<Polynomial> f = loc.field;
        for (std::size_t i = num_state_vars; i < vars.size(); ++i)
            f.push_back(Polynomial(vars.size()));
        return f;
    }

    friend bool operator==(const SystemModel& a, const SystemModel& b) {
        return a.kind == b.kind && a.name == b.name && a.vars == b.vars &&
               a.num_state_vars == b.num_state_vars && a.locations == b.locations &&
               a.transitions == b.transitions && a.init_location == b.init_location &&
               a.init_box == b.init_box && a.init_cond == b.init_cond;
    }
};

}  // namespace cob::model
