#ifndef SEGRE_QSQRT_HPP
#define SEGRE_QSQRT_HPP

#include <string>

#include "segre/rational.hpp"

namespace segre {

/// Element a + b*sqrt(d) of Q(sqrt d). d == 0 marks a plain rational whose
/// field is fixed by the first operand that carries a radical.
class QSqrt {
public:
    QSqrt() = default;
    QSqrt(int a) : a_(a) {}
    QSqrt(const Rat& a) : a_(a) {}
    QSqrt(const Rat& a, const Rat& b, const Int& d) : a_(a), b_(b), d_(d) {
        if (sgn(d_) == 0 && !is_zero(b_)) throw PreconditionFailed("radical part without radicand");
    }

    /// The generator sqrt(d); d must not be a rational square.
    static QSqrt root(const Int& d) {
        if (sgn(d) == 0 || exact_sqrt(d))
            throw PreconditionFailed("sqrt(" + d.get_str() + ") is rational");
        return QSqrt(Rat(0), Rat(1), d);
    }

    const Rat& a() const { return a_; }
    const Rat& b() const { return b_; }
    const Int& d() const { return d_; }
    bool rational() const { return is_zero(b_); }

    friend QSqrt operator+(const QSqrt& x, const QSqrt& y) {
        return QSqrt(x.a_ + y.a_, x.b_ + y.b_, join(x, y));
    }
    friend QSqrt operator-(const QSqrt& x, const QSqrt& y) {
        return QSqrt(x.a_ - y.a_, x.b_ - y.b_, join(x, y));
    }
    QSqrt operator-() const { return QSqrt(-a_, -b_, d_); }
    friend QSqrt operator*(const QSqrt& x, const QSqrt& y) {
        Int d = join(x, y);
        return QSqrt(x.a_ * y.a_ + x.b_ * y.b_ * d, x.a_ * y.b_ + x.b_ * y.a_, d);
    }
    friend QSqrt operator/(const QSqrt& x, const QSqrt& y) {
        Int d = join(x, y);
        Rat n = y.a_ * y.a_ - y.b_ * y.b_ * d;
        if (is_zero(n)) throw NotInvertible("division by zero in Q(sqrt d)");
        QSqrt conj(y.a_ / n, -y.b_ / n, d);
        return x * conj;
    }
    QSqrt& operator+=(const QSqrt& y) { return *this = *this + y; }
    QSqrt& operator-=(const QSqrt& y) { return *this = *this - y; }
    QSqrt& operator*=(const QSqrt& y) { return *this = *this * y; }
    QSqrt& operator/=(const QSqrt& y) { return *this = *this / y; }
    friend bool operator==(const QSqrt& x, const QSqrt& y) {
        return x.a_ == y.a_ && x.b_ == y.b_ && (is_zero(x.b_) || x.d_ == y.d_);
    }
    friend bool operator!=(const QSqrt& x, const QSqrt& y) { return !(x == y); }

    QSqrt conjugate() const { return QSqrt(a_, -b_, d_); }
    double approx() const { return a_.get_d() + b_.get_d() * std::sqrt(d_.get_d()); }

    std::string str() const {
        if (is_zero(b_)) return to_string(a_);
        std::string s = is_zero(a_) ? "" : to_string(a_) + (sgn(b_) > 0 ? "+" : "");
        return s + to_string(b_) + "*sqrt(" + d_.get_str() + ")";
    }

private:
    static Int join(const QSqrt& x, const QSqrt& y) {
        if (sgn(x.d_) == 0) return y.d_;
        if (sgn(y.d_) == 0 || x.d_ == y.d_) return x.d_;
        throw FieldMismatch("Q(sqrt " + x.d_.get_str() + ") vs Q(sqrt " + y.d_.get_str() + ")");
    }
    Rat a_{0}, b_{0};
    Int d_{0};
};

inline bool is_zero(const QSqrt& q) { return is_zero(q.a()) && is_zero(q.b()); }
inline std::string to_string(const QSqrt& q) { return q.str(); }

} // namespace segre

#endif
