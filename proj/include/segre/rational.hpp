#ifndef SEGRE_RATIONAL_HPP
#define SEGRE_RATIONAL_HPP

#include <gmpxx.h>

#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "segre/errors.hpp"

namespace segre {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat make_rat(long p, long q = 1) {
    Rat r{Int(p), Int(q)};
    r.canonicalize();
    return r;
}

/// Parses "p", "p/q" or "-p/q". Decimal points are rejected.
inline Rat parse_rational(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational string");
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') i = 1;
    bool slash = false, digit = false;
    for (std::size_t k = i; k < s.size(); ++k) {
        char c = s[k];
        if (c == '/') {
            if (slash || !digit) throw ParseError("malformed rational '" + s + "'");
            slash = true;
            digit = false;
        } else if (c >= '0' && c <= '9') {
            digit = true;
        } else {
            throw ParseError("malformed rational '" + s + "'");
        }
    }
    if (!digit) throw ParseError("malformed rational '" + s + "'");
    Rat r;
    if (r.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0)
        throw ParseError("malformed rational '" + s + "'");
    if (r.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

/// Canonical "p/q" text; integers print without a denominator.
inline std::string to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

inline std::optional<Int> exact_sqrt(const Int& n) {
    if (sgn(n) < 0) return std::nullopt;
    Int r = sqrt(n);
    if (r * r != n) return std::nullopt;
    return r;
}

inline std::optional<Rat> exact_sqrt(const Rat& q) {
    auto a = exact_sqrt(Int(q.get_num()));
    auto b = exact_sqrt(Int(q.get_den()));
    if (!a || !b) return std::nullopt;
    Rat r(*a, *b);
    r.canonicalize();
    return r;
}

/// Writes q = s^2 * d with d a squarefree integer; returns (d, s).
/// Trial division is bounded; a cofactor left over is kept inside d.
inline std::pair<Int, Rat> squarefree_decompose(const Rat& q) {
    Int n = q.get_num() * q.get_den();
    Rat s(1, q.get_den());
    Int sign = sgn(n) < 0 ? Int(-1) : Int(1);
    n = abs(n);
    Int d = 1, outside = 1;
    for (unsigned long p = 2; p < 100000; ++p) {
        Int pp = Int(p) * p;
        if (pp > n) break;
        while (n % pp == 0) {
            n /= pp;
            outside *= p;
        }
        if (n % p == 0) {
            n /= p;
            d *= p;
        }
    }
    if (auto r = exact_sqrt(n)) {
        outside *= *r;
    } else {
        d *= n;
    }
    s *= outside;
    s.canonicalize();
    return {sign * d, s};
}

/// Best rational with denominator at most maxden within tol of x.
inline std::optional<Rat> rational_approx(double x, long maxden, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(v);
        if (std::fabs(a) > 1e15) break;
        long ai = static_cast<long>(a);
        long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > maxden) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        if (std::fabs(static_cast<double>(h1) / static_cast<double>(k1) - x) < tol) {
            Rat r{Int(h1), Int(k1)};
            r.canonicalize();
            return r;
        }
        double frac = v - a;
        if (frac < 1e-300) break;
        v = 1.0 / frac;
    }
    return std::nullopt;
}

inline Rat random_rational(std::mt19937_64& rng, long lo, long hi, long maxden = 1) {
    std::uniform_int_distribution<long> num(lo, hi), den(1, maxden);
    return make_rat(num(rng), den(rng));
}

} // namespace segre

#endif
