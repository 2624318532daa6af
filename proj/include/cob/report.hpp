#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "cob/pipeline.hpp"
#include "cob/render.hpp"

// JSON reports. Keys are kept in sorted order by the json type, rationals are
// exact "p/q" strings, and the digest covers everything except timings, so
// two runs of the same input produce byte-identical reports up to the
// timings block.
namespace cob::report {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline const char* kind_text(model::SystemKind k) {
    switch (k) {
        case model::SystemKind::Continuous: return "continuous";
        case model::SystemKind::Discrete: return "discrete";
        case model::SystemKind::Hybrid: return "hybrid";
    }
    return "?";
}

inline json interval_json(const model::Interval& iv) {
    json j;
    j["lo"] = iv.lo ? json(exactalg::to_string(*iv.lo)) : json(nullptr);
    j["hi"] = iv.hi ? json(exactalg::to_string(*iv.hi)) : json(nullptr);
    return j;
}

inline json box_json(const model::Box& box) {
    json j = json::array();
    for (const auto& iv : box.iv) j.push_back(interval_json(iv));
    return j;
}

inline json vector_json(const exactalg::Vector& v) {
    json j = json::array();
    for (const auto& q : v) j.push_back(exactalg::to_string(q));
    return j;
}

inline json matrix_json(const exactalg::Matrix& m) {
    json j = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) j.push_back(vector_json(m.row(i)));
    return j;
}

inline json span_json(const closure::Span& s,
                      const std::vector<std::string>& names) {
    json j;
    j["dim"] = s.dim();
    json els = json::array();
    for (const auto& p : s.elements())
        els.push_back(render::render_poly(p, names));
    j["elements"] = std::move(els);
    return j;
}

inline json polys_json(const std::vector<poly::Polynomial>& ps,
                       const std::vector<std::string>& names) {
    json j = json::array();
    for (const auto& p : ps) j.push_back(render::render_poly(p, names));
    return j;
}

inline json closure_json(const pipeline::Run& r) {
    json j;
    j["sweeps"] = r.closure.sweeps;
    j["changed_sweeps"] = r.closure.changed_sweeps;
    json spaces = json::array();
    for (std::size_t l = 0; l < r.closure.spaces.size(); ++l) {
        json s = span_json(r.closure.spaces[l], r.m.vars.names());
        s["location"] = r.m.locations[l].name;
        s["state_relevant_dim"] = pipeline::state_relevant_dim(
            r.closure.spaces[l], r.m.num_state_vars);
        spaces.push_back(std::move(s));
    }
    j["spaces"] = std::move(spaces);
    // one row per sweep, one entry per location
    j["sweep_dims"] = r.closure.sweep_dims;
    return j;
}

inline json abstraction_json(const pipeline::Run& r) {
    const auto& abs = r.abs;
    json j;
    j["arity"] = abs.arity();
    j["degree"] = abs.degree;
    j["wvars"] = abs.wvars.names();
    json map = json::object();
    for (std::size_t l = 0; l < abs.locations.size(); ++l)
        map[r.m.locations[l].name] = polys_json(r.alpha.at(l),
                                                r.m.vars.names());
    j["map"] = std::move(map);
    json locs = json::array();
    for (std::size_t l = 0; l < abs.locations.size(); ++l) {
        const auto& loc = abs.locations[l];
        json lj;
        lj["name"] = loc.name;
        lj["has_flow"] = loc.has_flow;
        if (loc.has_flow) {
            lj["dynamics"] = polys_json(loc.dynamics, abs.wvars.names());
            if (abs.degree == 1) {
                lj["a"] = matrix_json(loc.a);
                lj["b"] = vector_json(loc.b);
            }
        }
        locs.push_back(std::move(lj));
    }
    j["locations"] = std::move(locs);
    json trs = json::array();
    for (const auto& t : abs.transitions) {
        json tj;
        tj["name"] = t.name;
        tj["from"] = r.m.locations[t.src].name;
        tj["to"] = r.m.locations[t.dst].name;
        tj["update"] = polys_json(t.update, abs.wvars.names());
        tj["guard"] = render::render_cond(t.guard, r.m.vars.names());
        trs.push_back(std::move(tj));
    }
    j["transitions"] = std::move(trs);
    j["init_location"] = r.m.locations[abs.init_location].name;
    j["init_box"] = box_json(abs.init_box);
    return j;
}

inline json invariants_json(const pipeline::Run& r,
                            const pipeline::InvariantReport& inv) {
    json j;
    json hulls = json::array();
    for (std::size_t l = 0; l < inv.hulls.size(); ++l) {
        json h;
        h["location"] = r.m.locations[l].name;
        h["bottom"] = inv.hulls[l].is_bottom();
        if (!inv.hulls[l].is_bottom()) h["dim"] = inv.hulls[l].dim();
        hulls.push_back(std::move(h));
    }
    j["hulls"] = std::move(hulls);
    json eqs = json::array();
    for (const auto& e : inv.equalities) {
        json ej;
        ej["location"] = r.m.locations[e.location].name;
        ej["coefficients"] = vector_json(e.c);
        ej["value"] = exactalg::to_string(e.e);
        ej["concrete"] = render::render_poly(e.concrete, r.m.vars.names());
        eqs.push_back(std::move(ej));
    }
    j["equalities"] = std::move(eqs);
    json cons = json::array();
    for (const auto& c : inv.conserved) {
        json cj;
        cj["scale"] = exactalg::to_string(c.lambda);
        cj["coefficients"] = vector_json(c.c);
        cj["concrete"] = render::render_poly(c.concrete, r.m.vars.names());
        cons.push_back(std::move(cj));
    }
    j["conserved"] = std::move(cons);
    return j;
}

inline json validation_json(const pipeline::ValidationReport& val) {
    json j;
    if (val.ran_flow) {
        json f;
        f["pass"] = val.flow.pass;
        f["residual"] = val.flow.residual;
        f["compared"] = val.flow.compared;
        j["flow_commutation"] = std::move(f);
    } else {
        j["flow_commutation"] = nullptr;
    }
    if (val.ran_exp) {
        json e;
        e["pass"] = val.exp_pass;
        e["drift"] = val.worst_exp_drift;
        j["exp_conservation"] = std::move(e);
    } else {
        j["exp_conservation"] = nullptr;
    }
    if (val.ran_exec) {
        json x;
        x["pass"] = val.exec_pass;
        x["worst_violation"] = exactalg::to_string(val.worst_violation);
        j["execution_oracle"] = std::move(x);
    } else {
        j["execution_oracle"] = nullptr;
    }
    j["pass"] = val.pass;
    return j;
}

// Full report; `source` is the input text the run was parsed from.
inline json build_report(const pipeline::Run& r,
                         const pipeline::InvariantReport* inv,
                         const pipeline::ValidationReport* val,
                         const pipeline::Options& opt,
                         const std::string& source) {
    json j;
    j["version"] = kVersion;
    j["tool"] = "cob";
    json sys;
    sys["name"] = r.m.name;
    sys["kind"] = kind_text(r.m.kind);
    sys["variables"] = r.m.vars.names();
    sys["num_state_vars"] = r.m.num_state_vars;
    sys["source"] = source;
    j["system"] = std::move(sys);
    json o;
    o["degree_out"] = opt.degree_out;
    o["degree_init"] = opt.degree_init;
    o["with_time"] = opt.with_time;
    j["options"] = std::move(o);
    j["closure"] = closure_json(r);
    j["trivial"] = r.trivial;
    j["abstraction"] = r.trivial ? json(nullptr) : abstraction_json(r);
    j["invariants"] = inv ? invariants_json(r, *inv) : json(nullptr);
    j["validation"] = val ? validation_json(*val) : json(nullptr);
    j["digest"] = hex64(fnv1a(j.dump()));
    json t;
    t["closure"] = r.times.closure_ms;
    t["abstraction"] = r.times.abstraction_ms;
    t["invariants"] = r.times.invariants_ms;
    t["validation"] = r.times.validation_ms;
    j["timings_ms"] = std::move(t);
    return j;
}

}  // namespace cob::report
