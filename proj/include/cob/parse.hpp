#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cob/model.hpp"
#include "cob/rational.hpp"

namespace cob::model {

struct ParseError : std::runtime_error {
    std::size_t line, col;
    ParseError(const std::string& msg, std::size_t l, std::size_t c)
        : std::runtime_error(msg + " (line " + std::to_string(l) + ", col " +
                             std::to_string(c) + ")"),
          line(l),
          col(c) {}
};

namespace detail {

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1, col = 1;
};

inline bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
inline bool digit(char c) { return c >= '0' && c <= '9'; }

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++col;
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            t.kind = Tok::Ident;
            t.text.assign(src.substr(i, j - i));
        } else if (digit(c) || (c == '.' && i + 1 < src.size() && digit(src[i + 1]))) {
            std::size_t j = i;
            bool dot = false;
            while (j < src.size() && (digit(src[j]) || (src[j] == '.' && !dot))) {
                if (src[j] == '.') dot = true;
                ++j;
            }
            t.kind = Tok::Number;
            t.text.assign(src.substr(i, j - i));
        } else if (src.substr(i, 2) == "<=" || src.substr(i, 2) == ">=" ||
                   src.substr(i, 2) == "&&") {
            t.kind = Tok::Punct;
            t.text.assign(src.substr(i, 2));
        } else if (std::string_view("{}[](),;:'^*/+-=<>").find(c) !=
                   std::string_view::npos) {
            t.kind = Tok::Punct;
            t.text.assign(1, c);
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        col += t.text.size();
        i += t.text.size();
        out.push_back(std::move(t));
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

inline bool reserved(const std::string& s) {
    static const std::set<std::string> kw = {
        "continuous", "discrete", "hybrid", "vars",   "params", "field",
        "mode",       "inv",      "locations", "initloc", "transition", "from",
        "to",         "guard",    "update", "init",   "in"};
    return kw.count(s) > 0;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    std::vector<SystemModel> parse_all() {
        std::vector<SystemModel> out;
        while (!at_end()) out.push_back(parse_system_decl());
        if (out.empty()) throw ParseError("no system declaration", 1, 1);
        return out;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t k = 0) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
    }
    bool at_end() const { return peek().kind == Tok::End; }
    Token next() {
        Token t = peek();
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool accept(std::string_view text) {
        if (peek().kind != Tok::End && peek().text == text) {
            next();
            return true;
        }
        return false;
    }
    void expect(std::string_view text) {
        if (!accept(text)) err("expected '" + std::string(text) + "'");
    }
    [[noreturn]] void err(const std::string& msg) const {
        const std::string got =
            peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
        throw ParseError(msg + ", got " + got, peek().line, peek().col);
    }
    std::string expect_ident() {
        if (peek().kind != Tok::Ident) err("expected identifier");
        return next().text;
    }

    static std::size_t location_index(const SystemModel& m, const std::string& n,
                                      const Token& t) {
        for (std::size_t i = 0; i < m.locations.size(); ++i)
            if (m.locations[i].name == n) return i;
        throw ParseError("unknown location: " + n, t.line, t.col);
    }

    SystemModel parse_system_decl() {
        SystemModel m;
        if (accept("continuous"))
            m.kind = SystemKind::Continuous;
        else if (accept("discrete"))
            m.kind = SystemKind::Discrete;
        else if (accept("hybrid"))
            m.kind = SystemKind::Hybrid;
        else
            err("expected 'continuous', 'discrete', or 'hybrid'");
        m.name = expect_ident();
        expect("{");
        parse_vars(m);
        if (m.kind == SystemKind::Continuous) {
            Location loc;
            loc.name = "main";
            loc.field = parse_field(m);
            m.locations.push_back(std::move(loc));
            parse_init(m);
            if (accept("inv")) {
                expect(":");
                m.locations[0].domain = parse_cond(m.vars);
                expect(";");
            }
        } else if (m.kind == SystemKind::Discrete) {
            parse_locations(m);
            while (peek().text == "transition") parse_transition(m);
            if (m.transitions.empty()) err("expected at least one transition");
            parse_init(m);
        } else {
            while (peek().text == "mode") parse_mode(m);
            if (m.locations.empty()) err("expected at least one mode");
            if (accept("initloc")) {
                expect(":");
                Token t = peek();
                m.init_location = location_index(m, expect_ident(), t);
                expect(";");
            }
            while (peek().text == "transition") parse_transition(m);
            parse_init(m);
        }
        expect("}");
        return m;
    }

    void parse_vars(SystemModel& m) {
        expect("vars");
        expect(":");
        do {
            Token t = peek();
            std::string v = expect_ident();
            if (reserved(v))
                throw ParseError("reserved word used as variable: " + v, t.line, t.col);
            if (m.vars.find(v))
                throw ParseError("duplicate variable: " + v, t.line, t.col);
            m.vars.add(v);
        } while (accept(","));
        expect(";");
        m.num_state_vars = m.vars.size();
        if (accept("params")) {
            expect(":");
            do {
                Token t = peek();
                std::string v = expect_ident();
                if (reserved(v))
                    throw ParseError("reserved word used as variable: " + v, t.line,
                                     t.col);
                if (m.vars.find(v))
                    throw ParseError("duplicate variable: " + v, t.line, t.col);
                m.vars.add(v);
            } while (accept(","));
            expect(";");
        }
        m.init_box = Box(m.vars.size());
    }

    std::vector<Polynomial> parse_field(SystemModel& m) {
        expect("field");
        expect("{");
        std::vector<Polynomial> f(m.num_state_vars, Polynomial(m.vars.size()));
        std::vector<bool> seen(m.num_state_vars, false);
        while (!accept("}")) {
            Token t = peek();
            std::string v = expect_ident();
            auto idx = m.vars.find(v);
            if (!idx) throw ParseError("unknown variable: " + v, t.line, t.col);
            if (m.is_param(*idx))
                throw ParseError("cannot assign to parameter: " + v, t.line, t.col);
            if (seen[*idx])
                throw ParseError("duplicate assignment to: " + v, t.line, t.col);
            expect("'");
            expect("=");
            f[*idx] = parse_polyexpr(m.vars);
            seen[*idx] = true;
            expect(";");
        }
        return f;
    }

    void parse_mode(SystemModel& m) {
        expect("mode");
        Token t = peek();
        Location loc;
        loc.name = expect_ident();
        for (const auto& l : m.locations)
            if (l.name == loc.name)
                throw ParseError("duplicate location: " + loc.name, t.line, t.col);
        expect("{");
        loc.field = parse_field(m);
        if (accept("inv")) {
            expect(":");
            loc.domain = parse_cond(m.vars);
            expect(";");
        }
        expect("}");
        m.locations.push_back(std::move(loc));
    }

    void parse_locations(SystemModel& m) {
        expect("locations");
        expect(":");
        while (peek().kind == Tok::Ident && peek().text != "initloc") {
            Token t = peek();
            std::string n = expect_ident();
            for (const auto& l : m.locations)
                if (l.name == n)
                    throw ParseError("duplicate location: " + n, t.line, t.col);
            Location loc;
            loc.name = n;
            m.locations.push_back(std::move(loc));
        }
        if (m.locations.empty()) err("expected location name");
        expect(";");
        expect("initloc");
        expect(":");
        Token t = peek();
        m.init_location = location_index(m, expect_ident(), t);
        expect(";");
    }

    void parse_transition(SystemModel& m) {
        expect("transition");
        Token tn = peek();
        Transition tr;
        tr.name = expect_ident();
        for (const auto& q : m.transitions)
            if (q.name == tr.name)
                throw ParseError("duplicate transition: " + tr.name, tn.line, tn.col);
        expect("{");
        expect("from");
        Token tf = peek();
        tr.src = location_index(m, expect_ident(), tf);
        expect(";");
        expect("to");
        Token tt = peek();
        tr.dst = location_index(m, expect_ident(), tt);
        expect(";");
        if (accept("guard")) {
            expect(":");
            tr.guard = parse_cond(m.vars);
            expect(";");
        }
        expect("update");
        expect("{");
        tr.update.reserve(m.num_state_vars);
        for (std::size_t i = 0; i < m.num_state_vars; ++i)
            tr.update.push_back(Polynomial::variable(m.vars.size(), i));
        std::vector<bool> seen(m.num_state_vars, false);
        while (!accept("}")) {
            Token t = peek();
            std::string v = expect_ident();
            auto idx = m.vars.find(v);
            if (!idx) throw ParseError("unknown variable: " + v, t.line, t.col);
            if (m.is_param(*idx))
                throw ParseError("cannot assign to parameter: " + v, t.line, t.col);
            if (seen[*idx])
                throw ParseError("duplicate assignment to: " + v, t.line, t.col);
            expect("'");
            expect("=");
            tr.update[*idx] = parse_polyexpr(m.vars);
            seen[*idx] = true;
            expect(";");
        }
        expect("}");
        m.transitions.push_back(std::move(tr));
    }

    Rel parse_rel() {
        if (accept("<=")) return Rel::Le;
        if (accept(">=")) return Rel::Ge;
        if (accept("<")) return Rel::Lt;
        if (accept(">")) return Rel::Gt;
        if (accept("=")) return Rel::Eq;
        err("expected relation");
    }

    Condition parse_cond(const VarTable& vars) {
        Condition c;
        do {
            Polynomial lhs = parse_polyexpr(vars);
            Rel r = parse_rel();
            Polynomial rhs = parse_polyexpr(vars);
            c.atoms.push_back({lhs - rhs, r});
        } while (accept("&&"));
        return c;
    }

    exactalg::Rational parse_const_expr(const VarTable& vars) {
        Token t = peek();
        Polynomial p = parse_polyexpr(vars);
        if (!p.is_constant())
            throw ParseError("expected a constant", t.line, t.col);
        return p.constant_term();
    }

    void tighten(SystemModel& m, std::size_t idx, const exactalg::Rational& v,
                 bool is_lo, const Token& t) {
        auto& iv = m.init_box.iv[idx];
        if (is_lo) {
            if (!iv.lo || v > *iv.lo) iv.lo = v;
        } else {
            if (!iv.hi || v < *iv.hi) iv.hi = v;
        }
        if (iv.lo && iv.hi && *iv.lo > *iv.hi)
            throw ParseError("empty initial range for " + m.vars.name(idx), t.line,
                             t.col);
    }

    // Single-variable affine atoms become box bounds (strict bounds are taken
    // as their closures); everything else is kept as a side condition.
    void classify_init_atom(SystemModel& m, const Polynomial& p, Rel r,
                            const Token& t) {
        if (p.degree() == 1) {
            std::optional<std::size_t> var;
            bool single = true;
            exactalg::Rational c = 0, d = 0;
            for (const auto& [mono, coeff] : p.terms()) {
                if (mono.is_one()) {
                    d = coeff;
                    continue;
                }
                std::size_t vi = 0;
                for (std::size_t i = 0; i < mono.nvars(); ++i)
                    if (mono.e[i] > 0) vi = i;
                if (var && *var != vi) {
                    single = false;
                    break;
                }
                var = vi;
                c = coeff;
            }
            if (single && var) {
                const exactalg::Rational bound = -d / c;
                const bool flip = c < 0;
                switch (r) {
                    case Rel::Eq:
                        tighten(m, *var, bound, true, t);
                        tighten(m, *var, bound, false, t);
                        return;
                    case Rel::Le:
                    case Rel::Lt:
                        tighten(m, *var, bound, flip, t);
                        return;
                    case Rel::Ge:
                    case Rel::Gt:
                        tighten(m, *var, bound, !flip, t);
                        return;
                }
            }
        }
        m.init_cond.atoms.push_back({p, r});
    }

    void parse_init(SystemModel& m) {
        expect("init");
        expect("{");
        while (!accept("}")) {
            if (peek().kind == Tok::Ident && peek(1).text == "in") {
                Token t = peek();
                std::string v = expect_ident();
                auto idx = m.vars.find(v);
                if (!idx) throw ParseError("unknown variable: " + v, t.line, t.col);
                expect("in");
                expect("[");
                exactalg::Rational lo = parse_const_expr(m.vars);
                expect(",");
                exactalg::Rational hi = parse_const_expr(m.vars);
                expect("]");
                expect(";");
                if (lo > hi)
                    throw ParseError("empty interval for " + v, t.line, t.col);
                tighten(m, *idx, lo, true, t);
                tighten(m, *idx, hi, false, t);
                continue;
            }
            Token t = peek();
            Polynomial lhs = parse_polyexpr(m.vars);
            Rel r = parse_rel();
            Polynomial rhs = parse_polyexpr(m.vars);
            expect(";");
            classify_init_atom(m, lhs - rhs, r, t);
        }
    }

    Polynomial parse_polyexpr(const VarTable& vars) {
        Polynomial p = parse_pterm(vars);
        while (true) {
            if (accept("+"))
                p += parse_pterm(vars);
            else if (accept("-"))
                p -= parse_pterm(vars);
            else
                return p;
        }
    }

    Polynomial parse_pterm(const VarTable& vars) {
        Polynomial p = parse_pfactor(vars);
        while (true) {
            if (accept("*")) {
                p = p * parse_pfactor(vars);
            } else if (accept("/")) {
                Token t = peek();
                Polynomial q = parse_pfactor(vars);
                if (!q.is_constant() || q.is_zero())
                    throw ParseError("division requires a nonzero constant", t.line,
                                     t.col);
                p = (exactalg::Rational(1) / q.constant_term()) * p;
            } else {
                return p;
            }
        }
    }

    Polynomial parse_pfactor(const VarTable& vars) {
        if (accept("-")) return -parse_pfactor(vars);
        if (accept("+")) return parse_pfactor(vars);
        Polynomial base = parse_patom(vars);
        if (accept("^")) {
            Token t = peek();
            if (t.kind != Tok::Number || t.text.find('.') != std::string::npos)
                err("expected integer exponent");
            next();
            return base.pow(static_cast<std::uint32_t>(std::stoul(t.text)));
        }
        return base;
    }

    Polynomial parse_patom(const VarTable& vars) {
        Token t = peek();
        if (t.kind == Tok::Number) {
            next();
            auto r = exactalg::parse_rational(t.text);
            if (!r) throw ParseError("bad number: " + t.text, t.line, t.col);
            return Polynomial::constant(vars.size(), *r);
        }
        if (t.kind == Tok::Ident) {
            next();
            if (reserved(t.text))
                throw ParseError("reserved word in expression: " + t.text, t.line,
                                 t.col);
            auto idx = vars.find(t.text);
            if (!idx)
                throw ParseError("unknown variable: " + t.text, t.line, t.col);
            return Polynomial::variable(vars.size(), *idx);
        }
        if (accept("(")) {
            Polynomial p = parse_polyexpr(vars);
            expect(")");
            return p;
        }
        err("expected a number, variable, or parenthesized expression");
    }
};

}  // namespace detail

// Parses every system declaration in the source text.
inline std::vector<SystemModel> parse_systems(std::string_view src) {
    return detail::Parser(src).parse_all();
}

// Parses a source text expected to hold exactly one system.
inline SystemModel parse_system(std::string_view src) {
    auto all = parse_systems(src);
    if (all.size() != 1)
        throw ParseError("expected exactly one system declaration", 1, 1);
    return std::move(all.front());
}

}  // namespace cob::model
