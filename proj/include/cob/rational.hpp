#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cob::exactalg {

using Int = boost::multiprecision::cpp_int;

// Arbitrary-precision rational, always in lowest terms with positive
// denominator (maintained by the backend on every operation).
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long long num, long long den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rational(Int(num), Int(den));
}

inline Int num(const Rational& q) { return numerator(q); }
inline Int den(const Rational& q) { return denominator(q); }

// Canonical text form: "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Largest integer <= q, as a Rational.
inline Rational floor_rat(const Rational& q) {
    Int d = numerator(q) / denominator(q);
    if (numerator(q) < 0 && d * denominator(q) != numerator(q)) --d;
    return Rational(d);
}

// Smallest integer >= q, as a Rational.
inline Rational ceil_rat(const Rational& q) { return -floor_rat(-q); }

// Accepts "p", "p/q", and finite decimals like "3.25" or "-0.5".
// Returns nullopt on malformed input (including q == 0).
inline std::optional<Rational> parse_rational(std::string_view s) {
    auto is_digits = [](std::string_view v) {
        if (v.empty()) return false;
        for (char c : v)
            if (c < '0' || c > '9') return false;
        return true;
    };
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    Rational r;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view p = s.substr(0, slash), q = s.substr(slash + 1);
        if (!is_digits(p) || !is_digits(q)) return std::nullopt;
        Int d{std::string(q)};
        if (d == 0) return std::nullopt;
        r = Rational(Int(std::string(p)), d);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (!is_digits(ip) && !(ip.empty() && is_digits(fp))) return std::nullopt;
        if (!fp.empty() && !is_digits(fp)) return std::nullopt;
        Int scale = 1;
        for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
        Int whole = ip.empty() ? Int(0) : Int(std::string(ip));
        Int frac = fp.empty() ? Int(0) : Int(std::string(fp));
        r = Rational(whole * scale + frac, scale);
    } else {
        if (!is_digits(s)) return std::nullopt;
        r = Rational(Int(std::string(s)));
    }
    return neg ? Rational(-r) : r;
}

}  // namespace cob::exactalg
