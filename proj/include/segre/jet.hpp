#ifndef SEGRE_JET_HPP
#define SEGRE_JET_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "segre/qsqrt.hpp"
#include "segre/upoly.hpp"

namespace segre {

using Cplx = std::complex<double>;
inline bool is_zero(const Cplx& c) { return c == 0.0; }
inline std::string to_string(const Cplx& c) {
    return "(" + std::to_string(c.real()) + "," + std::to_string(c.imag()) + ")";
}

template <class K>
K from_rat(const Rat& r) { return K(r); }
template <>
inline Cplx from_rat<Cplx>(const Rat& r) { return Cplx(r.get_d(), 0.0); }

constexpr int kMaxVars = 4;
using Exps = std::array<int, kMaxVars>;

/// Monomial key: total degree in the top byte, then 6 bits per exponent.
/// Map order on keys is graded lexicographic.
inline std::uint32_t mono_key(const Exps& e) {
    std::uint32_t d = 0, k = 0;
    for (int i = 0; i < kMaxVars; ++i) {
        d += e[i];
        k = (k << 6) | static_cast<std::uint32_t>(e[i]);
    }
    return (d << 24) | k;
}
inline Exps mono_exps(std::uint32_t k) {
    Exps e{};
    for (int i = kMaxVars - 1; i >= 0; --i) {
        e[i] = static_cast<int>(k & 63u);
        k >>= 6;
    }
    return e;
}
inline int mono_deg(std::uint32_t k) { return static_cast<int>(k >> 24); }

/**
 * \brief Truncated power series in up to four variables.
 *
 * Terms of total degree above order() are unknown and never stored.
 * Zero coefficients are never stored. order() == kExact marks a polynomial.
 */
template <class K>
class Jet {
public:
    static constexpr int kExact = 1 << 20;
    using Terms = std::map<std::uint32_t, K>;

    Jet() = default;
    Jet(int nvars, int order) : n_(nvars), order_(order) {}

    static Jet constant(int nvars, int order, const K& c) {
        Jet j(nvars, order);
        j.set(Exps{}, c);
        return j;
    }
    static Jet variable(int nvars, int order, int i) {
        Exps e{};
        e[i] = 1;
        return monomial(nvars, order, e, K(1));
    }
    static Jet monomial(int nvars, int order, const Exps& e, const K& c) {
        Jet j(nvars, order);
        j.set(e, c);
        return j;
    }

    int nvars() const { return n_; }
    int order() const { return order_; }
    bool exact() const { return order_ >= kExact; }
    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }

    K coeff(const Exps& e) const {
        auto it = t_.find(mono_key(e));
        return it == t_.end() ? K(0) : it->second;
    }
    K constant_term() const { return coeff(Exps{}); }

    void set(const Exps& e, const K& c) {
        int d = 0;
        for (int x : e) d += x;
        if (d > order_) return;
        auto key = mono_key(e);
        if (segre::is_zero(c)) t_.erase(key);
        else t_[key] = c;
    }
    void add_term(std::uint32_t key, const K& c) {
        if (mono_deg(key) > order_) return;
        auto it = t_.find(key);
        if (it == t_.end()) {
            if (!segre::is_zero(c)) t_.emplace(key, c);
            return;
        }
        it->second += c;
        if (segre::is_zero(it->second)) t_.erase(it);
    }

    /// Lowest total degree present; order()+1 for a zero jet.
    int valuation() const {
        if (t_.empty()) return exact() ? kExact : order_ + 1;
        return mono_deg(t_.begin()->first);
    }
    int degree() const { return t_.empty() ? -1 : mono_deg(t_.rbegin()->first); }

    Jet truncated(int N) const {
        Jet r(n_, std::min(order_, N));
        for (auto& [k, c] : t_)
            if (mono_deg(k) <= r.order_) r.t_.emplace_hint(r.t_.end(), k, c);
        return r;
    }
    Jet homogeneous(int d) const {
        Jet r(n_, kExact);
        for (auto& [k, c] : t_)
            if (mono_deg(k) == d) r.t_.emplace(k, c);
        return r;
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet r(std::max(a.n_, b.n_), std::min(a.order_, b.order_));
        for (auto& [k, c] : a.t_) r.add_term(k, c);
        for (auto& [k, c] : b.t_) r.add_term(k, c);
        return r;
    }
    Jet operator-() const {
        Jet r = *this;
        for (auto& [k, c] : r.t_) c = -c;
        return r;
    }
    friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
    friend Jet operator*(const Jet& a, const Jet& b) { return mul(a, b, kExact); }
    friend Jet operator*(const K& s, const Jet& a) {
        Jet r(a.n_, a.order_);
        if (segre::is_zero(s)) return r;
        for (auto& [k, c] : a.t_) {
            K v = s * c;
            if (!segre::is_zero(v)) r.t_.emplace_hint(r.t_.end(), k, v);
        }
        return r;
    }
    friend Jet operator*(const Jet& a, const K& s) { return s * a; }
    Jet& operator+=(const Jet& b) { return *this = *this + b; }
    Jet& operator-=(const Jet& b) { return *this = *this - b; }
    Jet& operator*=(const Jet& b) { return *this = *this * b; }

    /// Product known up to min(cap, precision implied by the factors).
    static Jet mul(const Jet& a, const Jet& b, int cap) {
        long oa = a.order_, ob = b.order_;
        long va = a.valuation(), vb = b.valuation();
        long o = std::min<long>({oa + vb, ob + va, static_cast<long>(cap), static_cast<long>(kExact)});
        Jet r(std::max(a.n_, b.n_), static_cast<int>(o));
        for (auto& [ka, ca] : a.t_) {
            int da = mono_deg(ka);
            if (da > o) break;
            Exps ea = mono_exps(ka);
            for (auto& [kb, cb] : b.t_) {
                if (da + mono_deg(kb) > o) break;
                Exps eb = mono_exps(kb), e{};
                for (int i = 0; i < kMaxVars; ++i) e[i] = ea[i] + eb[i];
                r.add_term(mono_key(e), ca * cb);
            }
        }
        return r;
    }

    Jet derivative(int i) const {
        Jet r(n_, exact() ? kExact : order_ - 1);
        for (auto& [k, c] : t_) {
            Exps e = mono_exps(k);
            if (e[i] == 0) continue;
            K v = c * from_rat<K>(Rat(e[i]));
            --e[i];
            r.set(e, v);
        }
        return r;
    }

    template <class F>
    Jet map_coeffs(F f) const {
        Jet r(n_, order_);
        for (auto& [k, c] : t_) {
            K v = f(c);
            if (!segre::is_zero(v)) r.t_.emplace_hint(r.t_.end(), k, v);
        }
        return r;
    }

    template <class K2, class F>
    Jet<K2> convert(F f) const {
        Jet<K2> r(n_, order_);
        for (auto& [k, c] : t_) r.add_term(k, f(c));
        return r;
    }

    /// Multiplicative inverse to order N (defaults to the own order).
    Jet inverse(int N = -1) const {
        if (N < 0) N = order_;
        if (N >= kExact) throw PreconditionFailed("inverse of a polynomial needs an explicit order");
        K c0 = constant_term();
        if (segre::is_zero(c0)) throw NotInvertible("jet has zero constant term");
        K ic = K(1) / c0;
        Jet u = (ic * *this).truncated(N) - constant(n_, N, K(1));
        Jet r = constant(n_, N, K(1)), p = constant(n_, N, K(1));
        Jet mu = -u;
        for (int k = 1; k <= N; ++k) {
            p = mul(p, mu, N);
            if (p.is_zero()) break;
            r += p;
        }
        return ic * r.truncated(std::min(N, order_));
    }

    /// Substitutes subs[i] for variable i. Each substitute without a constant
    /// term unless this jet is an exact polynomial.
    Jet compose(const std::vector<Jet>& subs) const {
        int m = subs.empty() ? 0 : subs[0].n_;
        int vmin = kExact;
        bool all_exact = true;
        for (int i = 0; i < n_; ++i) {
            vmin = std::min(vmin, subs[i].valuation());
            all_exact = all_exact && subs[i].exact();
        }
        if (!exact() && vmin < 1)
            throw PreconditionFailed("substitution with a constant term into a truncated jet");
        long R = kExact;
        if (!exact()) R = std::min<long>(R, static_cast<long>(order_ + 1) * vmin - 1);
        for (int i = 0; i < n_; ++i)
            if (!subs[i].exact()) {
                // x_i appears with degree >= 1 in some term
                bool used = false;
                long best = kExact;
                for (auto& [k, c] : t_) {
                    Exps e = mono_exps(k);
                    if (e[i] == 0) continue;
                    used = true;
                    long tot = 0;
                    for (int j = 0; j < n_; ++j) tot += static_cast<long>(e[j]) * std::max(subs[j].valuation(), 0);
                    best = std::min(best, tot - std::max(subs[i].valuation(), 0) + subs[i].order_);
                }
                if (used) R = std::min(R, best);
            }
        (void)all_exact;
        int cap = static_cast<int>(std::min<long>(R, kExact));
        std::vector<std::vector<Jet>> pw(n_);
        Jet one = constant(m, cap, K(1));
        Jet r(m, cap);
        for (auto& [k, c] : t_) {
            Exps e = mono_exps(k);
            Jet term = one;
            for (int i = 0; i < n_; ++i) {
                if (e[i] == 0) continue;
                auto& P = pw[i];
                if (P.empty()) P.push_back(one);
                while (static_cast<int>(P.size()) <= e[i]) P.push_back(mul(P.back(), subs[i], cap));
                term = mul(term, P[e[i]], cap);
            }
            for (auto& [kk, cc] : term.t_) r.add_term(kk, c * cc);
        }
        r.order_ = cap;
        return r;
    }

    /// Sets variable i to zero.
    Jet restrict_zero(int i) const {
        Jet r(n_, order_);
        for (auto& [k, c] : t_)
            if (mono_exps(k)[i] == 0) r.t_.emplace_hint(r.t_.end(), k, c);
        return r;
    }

    /// Divides by x_i^p; every term must be divisible.
    Jet divide_var(int i, int p) const {
        Jet r(n_, exact() ? kExact : order_ - p);
        for (auto& [k, c] : t_) {
            Exps e = mono_exps(k);
            if (e[i] < p) throw PreconditionFailed("jet not divisible by the requested power");
            e[i] -= p;
            r.set(e, c);
        }
        return r;
    }

    /// Minimal exponent of variable i over all stored terms; -1 if none.
    int min_exponent(int i) const {
        int best = -1;
        for (auto& [k, c] : t_) {
            int e = mono_exps(k)[i];
            if (best < 0 || e < best) best = e;
        }
        return best;
    }

    std::string str(const std::vector<std::string>& names = {"x", "y", "z", "w"}) const {
        if (t_.empty()) return "0";
        std::string s;
        for (auto& [k, c] : t_) {
            Exps e = mono_exps(k);
            std::string m;
            for (int i = 0; i < n_; ++i) {
                if (e[i] == 0) continue;
                if (!m.empty()) m += "*";
                m += names[i];
                if (e[i] > 1) m += "^" + std::to_string(e[i]);
            }
            std::string cs = to_string(c);
            if (!s.empty()) s += " + ";
            if (m.empty()) s += cs;
            else if (cs == "1") s += m;
            else s += "(" + cs + ")*" + m;
        }
        if (!exact()) s += " + O(" + std::to_string(order_ + 1) + ")";
        return s;
    }

    friend bool operator==(const Jet& a, const Jet& b) {
        return a.n_ == b.n_ && a.order_ == b.order_ && a.t_ == b.t_;
    }

    /// Terms agree up to total degree N.
    bool agrees_with(const Jet& b, int N) const {
        return truncated(N).t_ == b.truncated(N).t_;
    }

private:
    int n_ = 0;
    int order_ = kExact;
    Terms t_;
};

template <class K>
Jet<K> make_var(int nvars, int order, int i) { return Jet<K>::variable(nvars, order, i); }

} // namespace segre

#endif
