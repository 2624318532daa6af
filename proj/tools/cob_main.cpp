// cob: discovers change-of-basis abstractions of polynomial systems into
// degree-bounded ones, derives affine equality invariants of the abstraction,
// and maps them back to polynomial invariants of the input system.
//
// Exit codes: 0 success, 1 error, 2 abstraction not affine, 3 trivial result,
// 4 validation failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <cob.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cob;
using exactalg::Rational;
using poly::Polynomial;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// Input resolution: a model file is used as-is with the command-line options;
// a JSON report re-runs the pipeline from its embedded source and recorded
// options, and its abstract matrices take precedence over recomputed ones.
struct Loaded {
    std::string source;
    pipeline::Options opt;
    bool from_report = false;
    json report;
};

bool looks_like_report(const std::string& path, const std::string& text) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return true;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        return c == '{';
    }
    return false;
}

Loaded load_input(const std::string& path, const pipeline::Options& flags) {
    Loaded l;
    l.opt = flags;
    const std::string text = read_file(path);
    if (!looks_like_report(path, text)) {
        l.source = text;
        return l;
    }
    l.from_report = true;
    l.report = json::parse(text);
    l.source = l.report.at("system").at("source").get<std::string>();
    const auto& o = l.report.at("options");
    l.opt.degree_out = o.at("degree_out").get<std::uint32_t>();
    l.opt.degree_init = o.at("degree_init").get<std::uint32_t>();
    l.opt.with_time = o.at("with_time").get<bool>();
    return l;
}

Rational parse_rat(const json& j) {
    const auto r = exactalg::parse_rational(j.get<std::string>());
    if (!r) throw std::runtime_error("bad rational in report: " + j.dump());
    return *r;
}

// The report's affine forms override the recomputed ones so that validation
// exercises the matrices the report actually records.
void apply_report_matrices(pipeline::Run& r, const json& report) {
    if (!report.contains("abstraction") || report["abstraction"].is_null())
        return;
    const auto& locs = report["abstraction"]["locations"];
    if (locs.size() != r.abs.locations.size()) return;
    const std::size_t n = r.abs.arity();
    for (std::size_t l = 0; l < r.abs.locations.size(); ++l) {
        auto& loc = r.abs.locations[l];
        const auto& jl = locs[l];
        if (!loc.has_flow || r.abs.degree != 1) continue;
        if (!jl.contains("a") || !jl.contains("b")) continue;
        const auto& ja = jl["a"];
        const auto& jb = jl["b"];
        if (ja.size() != n || jb.size() != n) continue;
        exactalg::Matrix a(n, n);
        exactalg::Vector b(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a.at(i, j) = parse_rat(ja[i][j]);
            b[i] = parse_rat(jb[i]);
        }
        loc.a = a;
        loc.b = b;
        for (std::size_t i = 0; i < n; ++i) {
            Polynomial p = Polynomial::constant(n, b[i]);
            for (std::size_t j = 0; j < n; ++j)
                p = p + a.at(i, j) * Polynomial::variable(n, j);
            loc.dynamics[i] = p;
        }
    }
}

std::string interval_text(const model::Interval& iv) {
    std::string lo = iv.lo ? exactalg::to_string(*iv.lo) : "-inf";
    std::string hi = iv.hi ? exactalg::to_string(*iv.hi) : "inf";
    return "[" + lo + ", " + hi + "]";
}

void print_polys(std::ostream& os, const std::vector<Polynomial>& ps,
                 const std::vector<std::string>& names,
                 const std::string& indent, std::size_t cap = 12) {
    for (std::size_t i = 0; i < ps.size() && i < cap; ++i)
        os << indent << render::render_poly(ps[i], names) << "\n";
    if (ps.size() > cap)
        os << indent << "... (" << ps.size() - cap << " more)\n";
}

void print_run_summary(std::ostream& os, const pipeline::Run& r,
                       const pipeline::Options& opt) {
    const auto names = r.m.vars.names();
    os << "system " << r.m.name << " (" << report::kind_text(r.m.kind) << "), "
       << r.m.vars.size() << " variables (" << r.m.num_state_vars
       << " state)\n";
    os << "closure: degree-out " << opt.degree_out << ", degree-init "
       << opt.degree_init << ", " << r.closure.sweeps << " sweeps ("
       << r.closure.changed_sweeps << " changed)\n";
    for (std::size_t l = 0; l < r.closure.spaces.size(); ++l) {
        const auto& s = r.closure.spaces[l];
        os << "space at " << r.m.locations[l].name << ": dimension " << s.dim()
           << "\n";
        print_polys(os, s.elements(), names, "  ");
    }
    if (r.trivial) {
        os << "result: trivial (every space is zero-dimensional)\n";
        return;
    }
    const auto wnames = r.abs.wvars.names();
    os << "abstraction: degree " << r.abs.degree << ", " << r.abs.arity()
       << " abstract variables\n";
    for (std::size_t l = 0; l < r.abs.locations.size(); ++l) {
        const auto& loc = r.abs.locations[l];
        if (!loc.has_flow) continue;
        os << "flow at " << loc.name << ":\n";
        for (std::size_t i = 0; i < loc.dynamics.size() && i < 12; ++i)
            os << "  " << wnames[i] << "' = "
               << render::render_poly(loc.dynamics[i], wnames) << "\n";
        if (loc.dynamics.size() > 12)
            os << "  ... (" << loc.dynamics.size() - 12 << " more)\n";
    }
    for (const auto& t : r.abs.transitions) {
        os << "jump " << t.name << ": " << r.m.locations[t.src].name << " -> "
           << r.m.locations[t.dst].name << " when "
           << render::render_cond(t.guard, names) << "\n";
        for (std::size_t i = 0; i < t.update.size() && i < 12; ++i)
            os << "  " << wnames[i] << " := "
               << render::render_poly(t.update[i], wnames) << "\n";
        if (t.update.size() > 12)
            os << "  ... (" << t.update.size() - 12 << " more)\n";
    }
    os << "abstract init box:\n";
    for (std::size_t i = 0; i < r.abs.init_box.iv.size(); ++i)
        os << "  " << wnames[i] << " in "
           << interval_text(r.abs.init_box.iv[i]) << "\n";
}

void print_invariant_summary(std::ostream& os, const pipeline::Run& r,
                             const pipeline::InvariantReport& inv) {
    const auto names = r.m.vars.names();
    os << "invariants:\n";
    for (std::size_t l = 0; l < inv.hulls.size(); ++l) {
        os << "  hull at " << r.m.locations[l].name << ": ";
        if (inv.hulls[l].is_bottom())
            os << "unreachable\n";
        else
            os << "dimension " << inv.hulls[l].dim() << "\n";
    }
    if (inv.equalities.empty()) os << "  no equality invariants\n";
    for (const auto& e : inv.equalities)
        os << "  at " << r.m.locations[e.location].name << ": "
           << render::render_poly(e.concrete, names) << " = 0\n";
    for (const auto& c : inv.conserved)
        os << "  conserved (scale " << exactalg::to_string(c.lambda)
           << "): " << render::render_poly(c.concrete, names) << "\n";
}

void print_validation_summary(std::ostream& os,
                              const pipeline::ValidationReport& val) {
    os << "validation:\n";
    if (val.ran_flow) {
        std::ostringstream d;
        d.precision(3);
        d << val.flow.residual;
        os << "  flow commutation: " << (val.flow.pass ? "PASS" : "FAIL")
           << " (worst residual " << d.str() << ", " << val.flow.compared
           << " comparisons)\n";
    } else {
        os << "  flow commutation: skipped\n";
    }
    if (val.ran_exp) {
        std::ostringstream d;
        d.precision(3);
        d << val.worst_exp_drift;
        os << "  exp conservation: " << (val.exp_pass ? "PASS" : "FAIL")
           << " (worst drift " << d.str() << ")\n";
    } else {
        os << "  exp conservation: skipped\n";
    }
    if (val.ran_exec) {
        os << "  execution oracle: " << (val.exec_pass ? "PASS" : "FAIL")
           << " (worst violation "
           << exactalg::to_string(val.worst_violation) << ")\n";
    } else {
        os << "  execution oracle: skipped\n";
    }
    os << "  overall: " << (val.pass ? "PASS" : "FAIL") << "\n";
}

// Writes the JSON report to `out` when given ("-" replaces the summary with
// JSON on stdout), otherwise prints the summary alone.
void emit(const pipeline::Run& r, const pipeline::InvariantReport* inv,
          const pipeline::ValidationReport* val, const pipeline::Options& opt,
          const std::string& source, const std::string& out) {
    const json j = report::build_report(r, inv, val, opt, source);
    if (out == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    if (!out.empty()) write_file(out, j.dump(2) + "\n");
    print_run_summary(std::cout, r, opt);
    if (inv) print_invariant_summary(std::cout, r, *inv);
    if (val) print_validation_summary(std::cout, *val);
    if (!out.empty()) std::cout << "report written to " << out << "\n";
}

int cmd_abstract(const std::string& input, const pipeline::Options& flags,
                 const std::string& out) {
    const Loaded l = load_input(input, flags);
    const auto m = model::parse_system(l.source);
    const auto r = pipeline::run_abstraction(m, l.opt);
    emit(r, nullptr, nullptr, l.opt, l.source, out);
    return r.trivial ? 3 : 0;
}

int cmd_invariants(const std::string& input, const pipeline::Options& flags,
                   const std::string& out) {
    const Loaded l = load_input(input, flags);
    if (l.opt.degree_out != 1) {
        std::cerr << "error: equality invariants require an affine "
                     "abstraction (degree-out 1), got degree-out "
                  << l.opt.degree_out << "\n";
        return 2;
    }
    const auto m = model::parse_system(l.source);
    auto r = pipeline::run_abstraction(m, l.opt);
    if (r.trivial) {
        emit(r, nullptr, nullptr, l.opt, l.source, out);
        return 3;
    }
    const auto inv = pipeline::run_invariants(r);
    emit(r, &inv, nullptr, l.opt, l.source, out);
    return 0;
}

int cmd_validate(const std::string& input, const pipeline::Options& flags,
                 const std::string& out) {
    const Loaded l = load_input(input, flags);
    const auto m = model::parse_system(l.source);
    auto r = pipeline::run_abstraction(m, l.opt);
    if (r.trivial) {
        emit(r, nullptr, nullptr, l.opt, l.source, out);
        return 3;
    }
    if (l.from_report) apply_report_matrices(r, l.report);
    pipeline::InvariantReport inv;
    const bool affine = r.abs.degree == 1;
    if (affine) inv = pipeline::run_invariants(r);
    const auto t0 = std::chrono::steady_clock::now();
    const auto val =
        pipeline::run_validation(r, affine ? &inv : nullptr, l.opt);
    r.times.validation_ms = pipeline::detail::ms_since(t0);
    emit(r, affine ? &inv : nullptr, &val, l.opt, l.source, out);
    return val.pass ? 0 : 4;
}

int cmd_multilinearize(const std::string& input, const std::string& out) {
    const auto m = model::parse_system(read_file(input));
    const auto ml = abstraction::multilinearize(m);
    std::ostringstream os;
    os << "// multilinear copies:";
    for (std::size_t i = 0; i < ml.copy_of.size(); ++i)
        os << " " << ml.system.vars.name(i) << "<-" << m.vars.name(ml.copy_of[i]);
    os << "\n" << render::render_model(ml.system);
    if (out.empty() || out == "-")
        std::cout << os.str();
    else {
        write_file(out, os.str());
        std::cout << "model written to " << out << "\n";
    }
    return 0;
}

struct CorpusRow {
    std::string id;
    std::size_t nvars = 0;
    std::uint32_t sys_degree = 0;
    std::uint32_t degree_init = 0;
    std::size_t seed_dim = 0;
    std::size_t final_dim = 0;
    std::size_t reported_dim = 0;
    double time_ms = 0;
    std::string cmp = "-";
    bool drift = false;
};

std::uint32_t system_degree(const model::SystemModel& m) {
    std::uint32_t d = 0;
    for (const auto& loc : m.locations)
        for (const auto& p : loc.field) d = std::max(d, p.degree());
    for (const auto& t : m.transitions)
        for (const auto& p : t.update) d = std::max(d, p.degree());
    return d;
}

int cmd_corpus(const std::string& dir, bool table,
               const std::string& expected_path) {
    std::vector<fs::path> files;
    if (fs::exists(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".cob") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    json expected = json::object();
    const std::string epath =
        expected_path.empty() ? (fs::path(dir) / "expected.json").string()
                              : expected_path;
    if (fs::exists(epath)) expected = json::parse(read_file(epath));

    std::vector<CorpusRow> rows;
    for (const auto& f : files) {
        const std::string id = f.stem().string();
        const auto m = model::parse_system(read_file(f.string()));
        json runs = json::array();
        if (expected.contains(id))
            runs = expected[id];
        else
            runs.push_back(json{{"degree_init", 2}});
        for (const auto& spec : runs) {
            pipeline::Options opt;
            opt.degree_init = spec.value("degree_init", 2u);
            opt.with_time = spec.value("with_time", false);
            const auto r = pipeline::run_abstraction(m, opt);
            CorpusRow row;
            row.id = id;
            row.nvars = r.m.vars.size();
            row.sys_degree = system_degree(r.m);
            row.degree_init = opt.degree_init;
            const std::size_t init = r.m.init_location;
            row.seed_dim = r.closure.sweep_dims.empty()
                               ? 0
                               : r.closure.sweep_dims[0][init];
            row.final_dim = r.closure.spaces[init].dim();
            row.reported_dim =
                spec.value("discard_params", false)
                    ? pipeline::state_relevant_dim(r.closure.spaces[init],
                                                   r.m.num_state_vars)
                    : row.final_dim;
            row.time_ms = r.times.closure_ms + r.times.abstraction_ms;
            if (spec.contains("table"))
                row.cmp = row.reported_dim == spec["table"].get<std::size_t>()
                              ? "match"
                              : "MISMATCH";
            if (spec.contains("dim"))
                row.drift = row.final_dim != spec["dim"].get<std::size_t>();
            rows.push_back(row);
        }
    }

    if (table) {
        std::printf("%-14s %4s %4s %3s %5s %5s %9s %6s %-9s %9s\n", "ID", "#V",
                    "Deg", "k", "#B0", "#B*", "reported", "table", "cmp",
                    "time");
        for (const auto& r : rows) {
            std::string tbl = "-";
            for (const auto& spec : expected.value(r.id, json::array()))
                if (spec.value("degree_init", 2u) == r.degree_init &&
                    spec.contains("table"))
                    tbl = std::to_string(spec["table"].get<std::size_t>());
            std::printf("%-14s %4zu %4u %3u %5zu %5zu %9zu %6s %-9s %7.1fms\n",
                        r.id.c_str(), r.nvars, r.sys_degree, r.degree_init,
                        r.seed_dim, r.final_dim, r.reported_dim, tbl.c_str(),
                        r.cmp.c_str(), r.time_ms);
            if (r.drift)
                std::printf("%-14s computed dimension drifted from recorded "
                            "value\n",
                            "");
        }
    } else {
        for (const auto& r : rows)
            std::printf("%s: k=%u dim=%zu reported=%zu cmp=%s%s (%.1f ms)\n",
                        r.id.c_str(), r.degree_init, r.final_dim,
                        r.reported_dim, r.cmp.c_str(),
                        r.drift ? " DRIFT" : "", r.time_ms);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "cob: change-of-basis abstraction of polynomial systems into "
        "degree-bounded ones, with affine invariant generation"};
    app.require_subcommand(1);

    std::string input, out, dir = "corpus", expected_path;
    bool table = false;
    pipeline::Options opt;

    auto add_common = [&](CLI::App* c) {
        c->add_option("input", input, "model file or JSON report")->required();
        c->add_option("--out", out,
                      "write the JSON report here ('-' for stdout)");
        c->add_option("--degree-out", opt.degree_out,
                      "degree bound of the abstract system");
        c->add_option("--degree-init", opt.degree_init,
                      "degree of the initial monomial basis");
        c->add_flag("--with-time", opt.with_time,
                    "adjoin a clock variable with unit dynamics");
    };

    auto* a = app.add_subcommand("abstract",
                                 "discover and build the abstract system");
    add_common(a);
    auto* i = app.add_subcommand("invariants",
                                 "abstract + affine equality invariants");
    add_common(i);
    auto* v = app.add_subcommand("validate",
                                 "abstract + invariants + numeric checks");
    add_common(v);
    v->add_option("--samples", opt.sim.samples, "random initial states");
    v->add_option("--horizon", opt.sim.horizon, "integration horizon");
    v->add_option("--step", opt.sim.step, "integration step size");
    v->add_option("--tol", opt.sim.tol, "acceptance tolerance");
    v->add_option("--seed", opt.sim.seed, "sampling seed");
    v->add_option("--max-steps", opt.max_exec_steps,
                  "execution oracle step bound");

    auto* ml = app.add_subcommand(
        "multilinearize", "rewrite a continuous system multilinearly");
    ml->add_option("input", input, "model file")->required();
    ml->add_option("--out", out, "write the rewritten model here");

    auto* c = app.add_subcommand("corpus", "run the benchmark corpus");
    c->add_option("dir", dir, "corpus directory");
    c->add_flag("--table", table, "print an aligned table");
    c->add_option("--expected", expected_path,
                  "recorded dimensions (default: <dir>/expected.json)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (a->parsed()) return cmd_abstract(input, opt, out);
        if (i->parsed()) return cmd_invariants(input, opt, out);
        if (v->parsed()) return cmd_validate(input, opt, out);
        if (ml->parsed()) return cmd_multilinearize(input, out);
        if (c->parsed()) return cmd_corpus(dir, table, expected_path);
    } catch (const model::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
