#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "cob/polynomial.hpp"
#include "cob/rational.hpp"

namespace cob::model {

using exactalg::Rational;

// Closed rational interval; a missing endpoint marks an unbounded side.
struct Interval {
    std::optional<Rational> lo, hi;  // nullopt = -inf / +inf

    static Interval point(const Rational& v) { return {v, v}; }
    static Interval whole() { return {std::nullopt, std::nullopt}; }

    bool is_point() const { return lo && hi && *lo == *hi; }
    bool is_bounded() const { return lo && hi; }
    bool contains(const Rational& v) const {
        if (lo && v < *lo) return false;
        if (hi && v > *hi) return false;
        return true;
    }
    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

// One interval per variable of the owning variable table.
struct Box {
    std::vector<Interval> iv;

    explicit Box(std::size_t nvars = 0) : iv(nvars, Interval::whole()) {}
    std::size_t size() const { return iv.size(); }
    friend bool operator==(const Box& a, const Box& b) { return a.iv == b.iv; }
};

namespace detail {

// Endpoint on the extended rational line.
struct XRat {
    int cls;  // -1 = -inf, 0 = finite, +1 = +inf
    Rational v;

    static XRat neg_inf() { return {-1, 0}; }
    static XRat pos_inf() { return {+1, 0}; }
    static XRat fin(const Rational& r) { return {0, r}; }

    friend bool operator<(const XRat& a, const XRat& b) {
        if (a.cls != b.cls) return a.cls < b.cls;
        if (a.cls != 0) return false;
        return a.v < b.v;
    }
};

inline XRat mul(const XRat& a, const XRat& b) {
    // Convention 0 · ±inf = 0: sound for monomial evaluation because a factor
    // interval that is exactly {0} forces the product to {0}.
    if (a.cls == 0 && b.cls == 0) return XRat::fin(a.v * b.v);
    int sa = a.cls != 0 ? a.cls : (a.v > 0 ? 1 : a.v < 0 ? -1 : 0);
    int sb = b.cls != 0 ? b.cls : (b.v > 0 ? 1 : b.v < 0 ? -1 : 0);
    if (sa == 0 || sb == 0) return XRat::fin(0);
    return sa * sb > 0 ? XRat::pos_inf() : XRat::neg_inf();
}

struct XInterval {
    XRat lo, hi;

    static XInterval from(const Interval& i) {
        return {i.lo ? XRat::fin(*i.lo) : XRat::neg_inf(),
                i.hi ? XRat::fin(*i.hi) : XRat::pos_inf()};
    }
    Interval to() const {
        Interval r;
        if (lo.cls == 0) r.lo = lo.v;
        if (hi.cls == 0) r.hi = hi.v;
        return r;
    }
};

inline XInterval xadd(const XInterval& a, const XInterval& b) {
    XRat lo = (a.lo.cls < 0 || b.lo.cls < 0)
                  ? XRat::neg_inf()
                  : XRat::fin(a.lo.v + b.lo.v);
    XRat hi = (a.hi.cls > 0 || b.hi.cls > 0)
                  ? XRat::pos_inf()
                  : XRat::fin(a.hi.v + b.hi.v);
    return {lo, hi};
}

inline XInterval xmul(const XInterval& a, const XInterval& b) {
    XRat c[4] = {mul(a.lo, b.lo), mul(a.lo, b.hi), mul(a.hi, b.lo), mul(a.hi, b.hi)};
    XRat lo = c[0], hi = c[0];
    for (int i = 1; i < 4; ++i) {
        if (c[i] < lo) lo = c[i];
        if (hi < c[i]) hi = c[i];
    }
    return {lo, hi};
}

inline XInterval xscale(const Rational& c, const XInterval& a) {
    if (c == 0) return {XRat::fin(0), XRat::fin(0)};
    XInterval b{mul(XRat::fin(c), a.lo), mul(XRat::fin(c), a.hi)};
    if (c < 0) std::swap(b.lo, b.hi);
    return b;
}

// Tight power: even exponents of an interval straddling zero start at 0.
inline XInterval xpow(const XInterval& a, std::uint32_t k) {
    if (k == 0) return {XRat::fin(1), XRat::fin(1)};
    XInterval r = a;
    if (k % 2 == 1) {
        for (std::uint32_t i = 1; i < k; ++i) r = xmul(r, a);
        return r;
    }
    // even: |a|^k over the magnitude range
    XRat mlo, mhi;
    const bool lo_neg = a.lo.cls < 0 || (a.lo.cls == 0 && a.lo.v < 0);
    const bool hi_pos = a.hi.cls > 0 || (a.hi.cls == 0 && a.hi.v > 0);
    if (lo_neg && hi_pos) {
        mlo = XRat::fin(0);
        XRat abs_lo = a.lo.cls < 0 ? XRat::pos_inf() : XRat::fin(-a.lo.v);
        XRat abs_hi = a.hi;
        mhi = abs_lo < abs_hi ? abs_hi : abs_lo;
    } else if (!lo_neg) {  // wholly nonnegative
        mlo = a.lo;
        mhi = a.hi;
    } else {  // wholly nonpositive
        mlo = a.hi.cls == 0 ? XRat::fin(-a.hi.v) : XRat::pos_inf();
        mhi = a.lo.cls < 0 ? XRat::pos_inf() : XRat::fin(-a.lo.v);
    }
    auto pw = [&](const XRat& x) -> XRat {
        if (x.cls != 0) return x;
        Rational p = 1;
        for (std::uint32_t i = 0; i < k; ++i) p *= x.v;
        return XRat::fin(p);
    };
    return {pw(mlo), pw(mhi)};
}

}  // namespace detail

// Interval image of p over the box: monomial-by-monomial interval arithmetic
// with tight power rules (x² over [-1,1] gives [0,1]).
inline Interval eval_interval(const poly::Polynomial& p, const Box& box) {
    using namespace detail;
    XInterval acc{XRat::fin(0), XRat::fin(0)};
    for (const auto& [m, c] : p.terms()) {
        XInterval t{XRat::fin(1), XRat::fin(1)};
        for (std::size_t i = 0; i < m.nvars(); ++i)
            if (m.e[i] > 0) t = xmul(t, xpow(XInterval::from(box.iv[i]), m.e[i]));
        acc = xadd(acc, xscale(c, t));
    }
    return acc.to();
}

}  // namespace cob::model
