#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cob/matrix.hpp"
#include "cob/monomial.hpp"
#include "cob/rational.hpp"

namespace cob::poly {

using exactalg::Rational;
using exactalg::Vector;

// Thrown by to_coordinates when a polynomial contains a monomial outside the
// given index (typically a degree overflow).
struct MonomialNotIndexed : std::runtime_error {
    Monomial monomial;
    explicit MonomialNotIndexed(Monomial m)
        : std::runtime_error("monomial not indexed"), monomial(std::move(m)) {}
};

// Sparse multivariate polynomial over ℚ with a fixed arity. Terms are kept in
// canonical ascending monomial order with no zero coefficients.
class Polynomial {
public:
    using TermMap = std::map<Monomial, Rational, MonomialLess>;

    explicit Polynomial(std::size_t nvars = 0) : nvars_(nvars) {}

    static Polynomial constant(std::size_t nvars, const Rational& c) {
        Polynomial p(nvars);
        if (c != 0) p.terms_[Monomial::one(nvars)] = c;
        return p;
    }
    static Polynomial variable(std::size_t nvars, std::size_t i) {
        Polynomial p(nvars);
        p.terms_[Monomial::var(nvars, i)] = 1;
        return p;
    }
    static Polynomial monomial(const Monomial& m, const Rational& c = 1) {
        Polynomial p(m.nvars());
        if (c != 0) p.terms_[m] = c;
        return p;
    }

    std::size_t nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
    }
    Rational constant_term() const {
        auto it = terms_.find(Monomial::one(nvars_));
        return it == terms_.end() ? Rational(0) : it->second;
    }
    std::uint32_t degree() const {
        std::uint32_t d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
        return d;
    }
    Rational coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(const Monomial& m, const Rational& c) {
        assert(m.nvars() == nvars_);
        if (c == 0) return;
        auto [it, fresh] = terms_.try_emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        assert(nvars_ == o.nvars_);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        assert(nvars_ == o.nvars_);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial r(a.nvars_);
        for (const auto& [m, c] : a.terms_) r.terms_[m] = -c;
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        assert(a.nvars_ == b.nvars_);
        Polynomial r(a.nvars_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    friend Polynomial operator*(const Rational& c, const Polynomial& p) {
        Polynomial r(p.nvars_);
        if (c == 0) return r;
        for (const auto& [m, v] : p.terms_) r.terms_[m] = c * v;
        return r;
    }

    Polynomial pow(std::uint32_t k) const {
        Polynomial r = constant(nvars_, 1);
        Polynomial base = *this;
        while (k > 0) {
            if (k & 1) r = r * base;
            base = base * base;
            k >>= 1;
        }
        return r;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }
    // Ordering for use as a map key; any total order works.
    friend bool operator<(const Polynomial& a, const Polynomial& b) {
        if (a.nvars_ != b.nvars_) return a.nvars_ < b.nvars_;
        auto ia = a.terms_.begin(), ib = b.terms_.begin();
        MonomialLess less;
        for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
            if (less(ia->first, ib->first)) return true;
            if (less(ib->first, ia->first)) return false;
            if (ia->second != ib->second) return ia->second < ib->second;
        }
        return ia == a.terms_.end() && ib != b.terms_.end();
    }

    Rational eval(const Vector& point) const {
        assert(point.size() == nvars_);
        Rational s = 0;
        for (const auto& [m, c] : terms_) {
            Rational t = c;
            for (std::size_t i = 0; i < nvars_; ++i)
                for (std::uint32_t k = 0; k < m.e[i]; ++k) t *= point[i];
            s += t;
        }
        return s;
    }

    double eval(const std::vector<double>& point) const {
        assert(point.size() == nvars_);
        double s = 0;
        for (const auto& [m, c] : terms_) {
            double t = exactalg::to_double(c);
            for (std::size_t i = 0; i < nvars_; ++i)
                for (std::uint32_t k = 0; k < m.e[i]; ++k) t *= point[i];
            s += t;
        }
        return s;
    }

private:
    std::size_t nvars_;
    TermMap terms_;
};

inline Polynomial partial(const Polynomial& p, std::size_t i) {
    Polynomial r(p.nvars());
    for (const auto& [m, c] : p.terms()) {
        if (m.e[i] == 0) continue;
        Monomial d = m;
        d.e[i] -= 1;
        r.add_term(d, c * Rational(m.e[i]));
    }
    return r;
}

// Substitutes subst[i] for variable i. The replacement polynomials share one
// arity, which becomes the arity of the result.
inline Polynomial substitute(const Polynomial& p, const std::vector<Polynomial>& subst) {
    assert(subst.size() == p.nvars());
    const std::size_t out_vars = subst.empty() ? 0 : subst[0].nvars();
    // power cache: pows[i][k] = subst[i]^k
    std::vector<std::vector<Polynomial>> pows(subst.size());
    auto power = [&](std::size_t i, std::uint32_t k) -> const Polynomial& {
        auto& cache = pows[i];
        if (cache.empty()) cache.push_back(Polynomial::constant(out_vars, 1));
        while (cache.size() <= k) cache.push_back(cache.back() * subst[i]);
        return cache[k];
    };
    Polynomial r(out_vars);
    for (const auto& [m, c] : p.terms()) {
        Polynomial t = Polynomial::constant(out_vars, c);
        for (std::size_t i = 0; i < subst.size(); ++i)
            if (m.e[i] > 0) t = t * power(i, m.e[i]);
        r += t;
    }
    return r;
}

// Lie derivative of p along the field f (one component per variable):
// sum over i of (∂p/∂x_i)·f_i. Linear in p; satisfies the Leibniz rule.
inline Polynomial lie_derivative(const Polynomial& p, const std::vector<Polynomial>& field) {
    assert(field.size() == p.nvars());
    Polynomial r(p.nvars());
    for (std::size_t i = 0; i < p.nvars(); ++i) {
        const Polynomial d = partial(p, i);
        if (!d.is_zero()) r += d * field[i];
    }
    return r;
}

// Functional pre-image of g under the (polynomial) update map: g ∘ update.
inline Polynomial fpre(const Polynomial& g, const std::vector<Polynomial>& update) {
    return substitute(g, update);
}

// Component-wise Lie derivative of a polynomial map: J_alpha · f.
inline std::vector<Polynomial> jacobian_times_field(const std::vector<Polynomial>& alpha,
                                                    const std::vector<Polynomial>& field) {
    std::vector<Polynomial> out;
    out.reserve(alpha.size());
    for (const auto& h : alpha) out.push_back(lie_derivative(h, field));
    return out;
}

// Coordinate vector of p over an ascending monomial index. Throws
// MonomialNotIndexed (carrying the offending monomial) when a term of p lies
// outside the index.
inline Vector to_coordinates(const Polynomial& p, const std::vector<Monomial>& index) {
    std::map<Monomial, std::size_t, MonomialLess> where;
    for (std::size_t i = 0; i < index.size(); ++i) where[index[i]] = i;
    Vector v(index.size(), Rational(0));
    for (const auto& [m, c] : p.terms()) {
        auto it = where.find(m);
        if (it == where.end()) throw MonomialNotIndexed(m);
        v[it->second] = c;
    }
    return v;
}

}  // namespace cob::poly
