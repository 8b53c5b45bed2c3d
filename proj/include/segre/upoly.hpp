#ifndef SEGRE_UPOLY_HPP
#define SEGRE_UPOLY_HPP

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "segre/rational.hpp"

namespace segre {

/// Dense univariate polynomial over Q, coefficients low degree first.
class UPoly {
public:
    UPoly() = default;
    UPoly(const Rat& c) { if (!is_zero(c)) c_.push_back(c); }
    UPoly(int c) : UPoly(Rat(c)) {}
    explicit UPoly(std::vector<Rat> c) : c_(std::move(c)) { trim(); }

    static UPoly x() { return UPoly(std::vector<Rat>{Rat(0), Rat(1)}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool zero() const { return c_.empty(); }
    Rat coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : Rat(0); }
    const Rat& lead() const { return c_.back(); }
    const std::vector<Rat>& coeffs() const { return c_; }

    UPoly operator-() const {
        UPoly r = *this;
        for (auto& a : r.c_) a = -a;
        return r;
    }
    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        std::vector<Rat> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
        return UPoly(std::move(r));
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.zero() || b.zero()) return UPoly();
        std::vector<Rat> r(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return UPoly(std::move(r));
    }
    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const UPoly& a, const UPoly& b) { return !(a == b); }

    UPoly scaled(const Rat& s) const {
        UPoly r = *this;
        for (auto& a : r.c_) a *= s;
        r.trim();
        return r;
    }
    UPoly monic() const { return zero() ? *this : scaled(1 / lead()); }

    /// Quotient and remainder; b must be nonzero.
    static std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
        if (b.zero()) throw NotInvertible("polynomial division by zero");
        std::vector<Rat> r = a.c_;
        int db = b.degree();
        if (a.degree() < db) return {UPoly(), a};
        std::vector<Rat> q(a.degree() - db + 1);
        Rat inv = 1 / b.lead();
        for (int i = a.degree(); i >= db; --i) {
            if (is_zero(r[i])) continue;
            Rat f = r[i] * inv;
            q[i - db] = f;
            for (int j = 0; j <= db; ++j) r[i - db + j] -= f * b.c_[j];
        }
        r.resize(db);
        return {UPoly(std::move(q)), UPoly(std::move(r))};
    }

    /// Monic gcd.
    static UPoly gcd(UPoly a, UPoly b) {
        while (!b.zero()) {
            UPoly r = divmod(a, b).second;
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }

    UPoly derivative() const {
        if (c_.size() <= 1) return UPoly();
        std::vector<Rat> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<long>(i);
        return UPoly(std::move(r));
    }

    template <class T>
    T eval(const T& t) const {
        T r(0);
        for (int i = degree(); i >= 0; --i) r = r * t + T(c_[i]);
        return r;
    }
    Rat eval(const Rat& t) const {
        Rat r(0);
        for (int i = degree(); i >= 0; --i) r = r * t + c_[i];
        return r;
    }

    UPoly squarefree() const {
        if (degree() <= 0) return monic();
        return divmod(*this, gcd(*this, derivative())).first.monic();
    }

    /// Rational roots with multiplicity.
    std::map<Rat, int> rational_roots() const;

    std::string str(const std::string& var = "x") const;

private:
    void trim() {
        while (!c_.empty() && is_zero(c_.back())) c_.pop_back();
    }
    std::vector<Rat> c_;
};

namespace detail {

inline std::vector<Int> divisors(Int n) {
    n = abs(n);
    std::vector<std::pair<Int, int>> f;
    for (Int p = 2; p * p <= n; ++p) {
        if (p > 2000000) throw RetryExhausted("integer too large to factor for the rational root test");
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) f.push_back({p, e});
    }
    if (n > 1) f.push_back({n, 1});
    std::vector<Int> d{Int(1)};
    for (auto& [p, e] : f) {
        std::size_t s = d.size();
        Int pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < s; ++i) d.push_back(d[i] * pk);
        }
    }
    return d;
}

} // namespace detail

inline std::map<Rat, int> UPoly::rational_roots() const {
    std::map<Rat, int> out;
    if (degree() <= 0) return out;
    UPoly p = *this;
    // strip x^k
    int k = 0;
    while (!p.zero() && is_zero(p.coeff(0))) {
        p = divmod(p, x()).first;
        ++k;
    }
    if (k) out[Rat(0)] = k;
    if (p.degree() <= 0) return out;
    // integral primitive form of the squarefree part
    UPoly s = p.squarefree();
    Int l = 1;
    for (auto& c : s.c_) l = lcm(l, Int(c.get_den()));
    std::vector<Int> z;
    for (auto& c : s.c_) z.push_back(Int(c * l));
    std::vector<Rat> cand;
    for (auto& a : detail::divisors(z.front()))
        for (auto& b : detail::divisors(z.back())) {
            Rat r(a, b);
            r.canonicalize();
            cand.push_back(r);
            cand.push_back(-r);
        }
    for (auto& r : cand) {
        if (out.count(r)) continue;
        if (!is_zero(s.eval(r))) continue;
        UPoly lin(std::vector<Rat>{-r, Rat(1)});
        int m = 0;
        UPoly q = p;
        while (true) {
            auto [qq, rr] = divmod(q, lin);
            if (!rr.zero()) break;
            q = qq;
            ++m;
        }
        out[r] = m;
    }
    return out;
}

inline std::string UPoly::str(const std::string& var) const {
    if (zero()) return "0";
    std::string s;
    for (int i = degree(); i >= 0; --i) {
        const Rat& a = c_[i];
        if (is_zero(a)) continue;
        bool neg = sgn(a) < 0;
        Rat m = neg ? Rat(-a) : a;
        if (s.empty()) s += neg ? "-" : "";
        else s += neg ? " - " : " + ";
        bool unit = (m == 1);
        if (i == 0 || !unit) s += to_string(m);
        if (i > 0) {
            if (!unit) s += "*";
            s += var;
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

/// Element of Q(x): reduced fraction with monic denominator.
class RatFunc {
public:
    RatFunc() : num_(), den_(1) {}
    RatFunc(int c) : num_(c), den_(1) {}
    RatFunc(const Rat& c) : num_(c), den_(1) {}
    RatFunc(UPoly n) : num_(std::move(n)), den_(1) {}
    RatFunc(UPoly n, UPoly d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

    static RatFunc x() { return RatFunc(UPoly::x()); }

    const UPoly& num() const { return num_; }
    const UPoly& den() const { return den_; }
    bool zero() const { return num_.zero(); }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
    RatFunc operator-() const {
        RatFunc r = *this;
        r.num_ = -r.num_;
        return r;
    }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        if (a.zero() || b.zero()) return RatFunc();
        UPoly g1 = UPoly::gcd(a.num_, b.den_), g2 = UPoly::gcd(b.num_, a.den_);
        RatFunc r;
        r.num_ = UPoly::divmod(a.num_, g1).first * UPoly::divmod(b.num_, g2).first;
        r.den_ = UPoly::divmod(a.den_, g2).first * UPoly::divmod(b.den_, g1).first;
        r.fix_lead();
        return r;
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.zero()) throw NotInvertible("division by zero in Q(x)");
        return a * RatFunc(b.den_, b.num_);
    }
    RatFunc& operator+=(const RatFunc& b) { return *this = *this + b; }
    RatFunc& operator-=(const RatFunc& b) { return *this = *this - b; }
    RatFunc& operator*=(const RatFunc& b) { return *this = *this * b; }
    RatFunc& operator/=(const RatFunc& b) { return *this = *this / b; }
    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    RatFunc derivative() const {
        return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
    }

    /// Value at a rational point; throws if the point is a pole.
    Rat eval(const Rat& t) const {
        Rat d = den_.eval(t);
        if (is_zero(d)) throw NotInvertible("pole at x = " + to_string(t));
        return num_.eval(t) / d;
    }

    std::string str(const std::string& var = "x") const {
        if (den_.degree() == 0) return num_.str(var);
        std::string n = num_.str(var), d = den_.str(var);
        bool nsimple = num_.degree() <= 0 || (num_.coeffs().size() - std::count_if(num_.coeffs().begin(), num_.coeffs().end(), [](const Rat& c) { return is_zero(c); })) == 1;
        bool dsimple = (den_.coeffs().size() - std::count_if(den_.coeffs().begin(), den_.coeffs().end(), [](const Rat& c) { return is_zero(c); })) == 1 && den_.lead() == 1;
        return (nsimple ? n : "(" + n + ")") + "/" + (dsimple ? d : "(" + d + ")");
    }

private:
    void normalize() {
        if (den_.zero()) throw NotInvertible("zero denominator in Q(x)");
        if (num_.zero()) {
            den_ = UPoly(1);
            return;
        }
        UPoly g = UPoly::gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = UPoly::divmod(num_, g).first;
            den_ = UPoly::divmod(den_, g).first;
        }
        fix_lead();
    }
    void fix_lead() {
        if (num_.zero()) {
            den_ = UPoly(1);
            return;
        }
        Rat l = den_.lead();
        if (l != 1) {
            num_ = num_.scaled(1 / l);
            den_ = den_.scaled(1 / l);
        }
    }
    UPoly num_, den_;
};

inline bool is_zero(const RatFunc& r) { return r.zero(); }
inline std::string to_string(const RatFunc& r) { return r.str(); }

} // namespace segre

#endif
