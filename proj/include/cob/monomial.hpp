#pragma once

#include <cassert>
#include <cstdint>
#include <numeric>
#include <vector>

namespace cob::poly {

// Exponent vector over a fixed variable table.
struct Monomial {
    std::vector<std::uint32_t> e;

    explicit Monomial(std::size_t nvars = 0) : e(nvars, 0) {}
    static Monomial one(std::size_t nvars) { return Monomial(nvars); }
    static Monomial var(std::size_t nvars, std::size_t i, std::uint32_t p = 1) {
        Monomial m(nvars);
        m.e[i] = p;
        return m;
    }

    std::size_t nvars() const { return e.size(); }
    std::uint32_t degree() const {
        return std::accumulate(e.begin(), e.end(), std::uint32_t{0});
    }
    bool is_one() const { return degree() == 0; }

    Monomial operator*(const Monomial& o) const {
        assert(e.size() == o.e.size());
        Monomial m(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) m.e[i] = e[i] + o.e[i];
        return m;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
    friend bool operator!=(const Monomial& a, const Monomial& b) { return a.e != b.e; }
};

// Canonical ascending order: by total degree, ties broken lexicographically on
// the variable table (within a degree, higher power on an earlier variable
// sorts first: x² < xy < y²). Degree overflow terms sort last.
struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        assert(a.nvars() == b.nvars());
        const auto da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        for (std::size_t i = 0; i < a.nvars(); ++i)
            if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
        return false;
    }
};

}  // namespace cob::poly
