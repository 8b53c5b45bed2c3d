#ifndef SEGRE_ALGEBRA_HPP
#define SEGRE_ALGEBRA_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "segre/jet.hpp"
#include "segre/matrix.hpp"

namespace segre {

constexpr int kDefaultOrder = 8;
constexpr int kMaxOrder = 32;

enum class FieldKind { Rationals, QuadraticExtension, RationalFunctions };

/// Descriptor of the scalar domain a computation ran over.
struct CoefficientField {
    FieldKind kind = FieldKind::Rationals;
    Int d = 0;              // QuadraticExtension: t^2 - d
    std::string variable;   // RationalFunctions

    static CoefficientField rationals() { return {}; }
    static CoefficientField quadratic(const Int& d) {
        if (sgn(d) == 0 || exact_sqrt(d)) throw PreconditionFailed("t^2 - " + d.get_str() + " is reducible over Q");
        return {FieldKind::QuadraticExtension, d, ""};
    }
    static CoefficientField rational_functions(std::string var) {
        return {FieldKind::RationalFunctions, 0, std::move(var)};
    }
    std::string str() const {
        switch (kind) {
        case FieldKind::Rationals: return "Q";
        case FieldKind::QuadraticExtension: return "Q(sqrt(" + d.get_str() + "))";
        case FieldKind::RationalFunctions: return "Q(" + variable + ")";
        }
        return "?";
    }
};

/// a*lambda^2 + b*lambda*mu + c*mu^2.
template <class T>
struct BinaryQuadratic {
    T a, b, c;
    T discriminant() const { return b * b - T(4) * a * c; }
};

template <class K>
struct BinaryQuadratic<Jet<K>> {
    Jet<K> a, b, c;
    Jet<K> discriminant() const {
        return b * b - from_rat<K>(Rat(4)) * (a * c);
    }
};

/// Vanishing order; infinite means zero through the known truncation.
struct YOrder {
    bool infinite = false;
    int value = 0;
    bool truncated = false;
    int known_to = 0;

    std::string str() const { return infinite ? "INFINITE" : std::to_string(value); }
};

/// Order of vanishing in variable `var`: the least exponent of var among
/// nonzero terms. For a one-variable jet this is its order.
template <class K>
YOrder y_order(const Jet<K>& s, int var = 0) {
    YOrder r;
    r.known_to = s.order();
    int e = s.min_exponent(var);
    if (e < 0) {
        r.infinite = true;
        r.truncated = !s.exact();
        return r;
    }
    r.value = e;
    return r;
}

/// Solves eqs = 0 for the last k variables as jets in the first nvars-k.
/// The k x k Jacobian at the origin must be invertible.
template <class K>
std::vector<Jet<K>> hensel_solve(const std::vector<Jet<K>>& eqs, int k, int order) {
    if (order < 2) throw OrderTooSmall("hensel lifting needs order >= 2, got " + std::to_string(order));
    if (static_cast<int>(eqs.size()) != k) throw PreconditionFailed("need as many equations as unknowns");
    int n = eqs[0].nvars();
    int nf = n - k;
    int N = order;
    for (auto& e : eqs) {
        if (!is_zero(e.constant_term())) throw PreconditionFailed("equation does not vanish at the origin");
        if (!e.exact()) N = std::min(N, e.order());
    }
    Mat<K> J(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            Exps ex{};
            ex[nf + j] = 1;
            J(i, j) = eqs[i].coeff(ex);
        }
    Mat<K> Ji;
    try {
        Ji = J.inverse();
    } catch (const NotInvertible&) {
        throw SingularJacobian("Jacobian block with respect to the solved variables is not invertible");
    }
    std::vector<Jet<K>> u(k, Jet<K>(nf, N));
    std::vector<Jet<K>> subs(n);
    for (int i = 0; i < nf; ++i) subs[i] = Jet<K>::variable(nf, N, i);
    for (int it = 0; it <= N + 2; ++it) {
        for (int j = 0; j < k; ++j) subs[nf + j] = u[j];
        std::vector<Jet<K>> r(k);
        bool done = true;
        for (int i = 0; i < k; ++i) {
            r[i] = eqs[i].compose(subs).truncated(N);
            if (!r[i].is_zero()) done = false;
        }
        if (done) {
            for (auto& x : u) x = x.truncated(N);
            return u;
        }
        for (int j = 0; j < k; ++j) {
            Jet<K> corr(nf, N);
            for (int i = 0; i < k; ++i) corr += Ji(j, i) * r[i];
            u[j] = (u[j] - corr).truncated(N);
        }
    }
    throw OrderTooSmall("hensel iteration did not stabilise");
}

/// Solves q1 = q2 = 0 for (z, w), the last two variables.
template <class K>
std::pair<Jet<K>, Jet<K>> hensel_solve_pair(const Jet<K>& q1, const Jet<K>& q2, int order) {
    auto s = hensel_solve<K>({q1, q2}, 2, order);
    return {s[0], s[1]};
}

/// h = u * s^2 with u a unit and s(0) = 0.
template <class K>
struct SquareFactor {
    Jet<K> u, s;
};

/// Square test for two-variable germs whose square root is smooth.
template <class K>
std::optional<SquareFactor<K>> try_extract_square(const Jet<K>& h) {
    if (h.nvars() != 2) throw PreconditionFailed("try_extract_square expects a two-variable jet");
    if (!is_zero(h.constant_term())) throw PreconditionFailed("h(0,0) must vanish");
    if (h.is_zero()) return std::nullopt;
    if (h.valuation() != 2) return std::nullopt;
    int N = h.order();
    if (N < 3) throw OrderTooSmall("square test needs order >= 3");
    K a = h.coeff({2, 0}), b = h.coeff({1, 1}), c = h.coeff({0, 2});
    if (!is_zero(b * b - from_rat<K>(Rat(4)) * a * c)) return std::nullopt;
    // t is the variable solved for, o the other one
    int t = is_zero(c) ? 0 : 1;
    int o = 1 - t;
    auto swapv = [&](const Jet<K>& j) {
        if (t == 1) return j;
        return j.compose({Jet<K>::variable(2, Jet<K>::kExact, 1), Jet<K>::variable(2, Jet<K>::kExact, 0)});
    };
    // in swapped coordinates the solved variable is y
    Jet<K> g = swapv(h);
    Jet<K> gy = g.derivative(1);
    auto phi = hensel_solve<K>({gy}, 1, N - 1)[0];  // y = phi(x)
    Jet<K> X = Jet<K>::variable(2, N, 0), Y = Jet<K>::variable(2, N, 1);
    Jet<K> phi2 = phi.compose({X});                     // as a jet in (x, y)
    Jet<K> shifted = g.compose({X, Y + phi2});          // g(x, y' + phi(x))
    int prec = shifted.order();
    Jet<K> c0 = shifted.restrict_zero(1);
    Jet<K> c1 = (shifted - c0).divide_var(1, 1).restrict_zero(1);
    if (!c0.is_zero() || !c1.is_zero()) return std::nullopt;
    Jet<K> U = shifted.divide_var(1, 2);
    Jet<K> u = U.compose({X, Y - phi2});
    Jet<K> s = Y - phi2;
    u = swapv(u);
    s = swapv(s);
    (void)o;
    (void)prec;
    Jet<K> check = (u * s * s - h);
    if (!check.truncated(std::min(N, check.order())).is_zero()) return std::nullopt;
    return SquareFactor<K>{u, s};
}

/// Result of the splitting lemma: rank of the Hessian and the residual germ
/// in the corank variables.
template <class K>
struct SplitResult {
    int rank = 0;
    Jet<K> residual;
    std::vector<K> diagonal;  // nonzero Hessian eigen-directions after congruence
};

/// Splitting lemma by iterated completion of squares.
template <class K>
SplitResult<K> splitting_reduce(const Jet<K>& f) {
    int n = f.nvars();
    if (!is_zero(f.constant_term())) throw PreconditionFailed("splitting_reduce: constant term present");
    for (int i = 0; i < n; ++i) {
        Exps e{};
        e[i] = 1;
        if (!is_zero(f.coeff(e))) throw PreconditionFailed("splitting_reduce: linear term present");
    }
    if (f.order() < 3) throw OrderTooSmall("splitting_reduce needs order >= 3");
    // Hessian at 0
    Mat<K> H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Exps e{};
            e[i] += 1;
            e[j] += 1;
            K c = f.coeff(e);
            H(i, j) = (i == j) ? from_rat<K>(Rat(2)) * c : c;
        }
    // symmetric elimination: columns of T are the new coordinate directions
    Mat<K> T = Mat<K>::identity(n);
    auto col_op = [&](int dst, int src, const K& s) {  // e_dst += s * e_src
        for (int i = 0; i < n; ++i) T(i, dst) += s * T(i, src);
        for (int i = 0; i < n; ++i) H(i, dst) += s * H(i, src);
        for (int j = 0; j < n; ++j) H(dst, j) += s * H(src, j);
    };
    auto swap_op = [&](int p, int q) {
        if (p == q) return;
        for (int i = 0; i < n; ++i) std::swap(T(i, p), T(i, q));
        for (int i = 0; i < n; ++i) std::swap(H(i, p), H(i, q));
        for (int j = 0; j < n; ++j) std::swap(H(p, j), H(q, j));
    };
    int r = 0;
    std::vector<K> diag;
    for (; r < n; ++r) {
        int p = -1;
        for (int i = r; i < n; ++i)
            if (!is_zero(H(i, i))) { p = i; break; }
        if (p < 0) {
            int pi = -1, pj = -1;
            for (int i = r; i < n && pi < 0; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (!is_zero(H(i, j))) { pi = i; pj = j; break; }
            if (pi < 0) break;
            col_op(pi, pj, K(1));
            p = pi;
        }
        swap_op(r, p);
        K inv = K(1) / H(r, r);
        for (int j = r + 1; j < n; ++j)
            if (!is_zero(H(r, j))) col_op(j, r, -(H(r, j) * inv));
        diag.push_back(H(r, r));
    }
    int rank = r;
    // reorder so the corank directions come first, rank directions last
    std::vector<int> perm;
    for (int i = rank; i < n; ++i) perm.push_back(i);
    for (int i = 0; i < rank; ++i) perm.push_back(i);
    std::vector<Jet<K>> lin(n);
    for (int i = 0; i < n; ++i) {
        Jet<K> s(n, Jet<K>::kExact);
        for (int q = 0; q < n; ++q) {
            // old variable i = sum_j T(i, perm[q]) * new_q
            Exps e{};
            e[q] = 1;
            s.add_term(mono_key(e), T(i, perm[q]));
        }
        lin[i] = s;
    }
    Jet<K> g = f.compose(lin);
    int c = n - rank;
    SplitResult<K> out;
    out.rank = rank;
    out.diagonal = diag;
    if (rank == 0) {
        out.residual = g;
        if (g.is_zero()) throw OrderTooSmall("germ vanishes through the truncation order");
        return out;
    }
    std::vector<Jet<K>> eqs;
    for (int q = c; q < n; ++q) eqs.push_back(g.derivative(q));
    auto phi = hensel_solve<K>(eqs, rank, g.order() - 1);
    std::vector<Jet<K>> subs;
    int N = g.order();
    for (int q = 0; q < c; ++q) subs.push_back(Jet<K>::variable(c, N, q));
    for (auto& p : phi) subs.push_back(p);
    if (c == 0) {
        out.residual = Jet<K>(0, N);
        return out;
    }
    out.residual = g.compose(subs);
    if (out.residual.is_zero())
        throw OrderTooSmall("residual vanishes through order " + std::to_string(out.residual.order()));
    return out;
}

/// dim K[[x]]/(grad f) computed modulo m^M for M = N-1 and N; nullopt if
/// the two values disagree (not yet stable at this truncation).
template <class K>
std::optional<int> milnor_number(const Jet<K>& f) {
    int n = f.nvars();
    int N = f.order();
    if (N >= Jet<K>::kExact) N = f.degree() + 2;
    std::vector<Jet<K>> grads;
    for (int i = 0; i < n; ++i) grads.push_back(f.derivative(i));
    auto quotient_dim = [&](int M) -> int {
        std::vector<std::uint32_t> monos;
        for (int d = 0; d < M; ++d) {
            std::vector<Exps> lvl;
            Exps e{};
            std::function<void(int, int)> rec = [&](int i, int left) {
                if (i == n - 1) {
                    e[i] = left;
                    lvl.push_back(e);
                    return;
                }
                for (int a = left; a >= 0; --a) {
                    e[i] = a;
                    rec(i + 1, left - a);
                }
            };
            if (n == 0) continue;
            rec(0, d);
            for (auto& x : lvl) monos.push_back(mono_key(x));
        }
        std::map<std::uint32_t, int> col;
        for (std::size_t i = 0; i < monos.size(); ++i) col[monos[i]] = static_cast<int>(i);
        std::vector<std::vector<K>> rows;
        for (auto& g : grads) {
            Jet<K> gt = g.truncated(M - 1);
            for (auto mk : monos) {
                Jet<K> m = Jet<K>::monomial(n, M - 1, mono_exps(mk), K(1));
                Jet<K> p = Jet<K>::mul(m, gt, M - 1);
                std::vector<K> row(monos.size(), K(0));
                bool nz = false;
                for (auto& [k, c] : p.terms()) {
                    row[col.at(k)] = c;
                    nz = true;
                }
                if (nz) rows.push_back(std::move(row));
            }
        }
        if (rows.empty()) return static_cast<int>(monos.size());
        Mat<K> A(static_cast<int>(rows.size()), static_cast<int>(monos.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < monos.size(); ++j) A(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
        return static_cast<int>(monos.size()) - A.rank();
    };
    if (N < 3) return std::nullopt;
    int a = quotient_dim(N - 1), b = quotient_dim(N);
    if (a != b) return std::nullopt;
    return b;
}

enum class CubicType { Zero, TripleFactor, DoubleSimple, ThreeDistinct };

/// Factorisation pattern of a binary cubic a x^3 + b x^2 y + c x y^2 + d y^3.
template <class K>
CubicType binary_cubic_type(const K& a, const K& b, const K& c, const K& d) {
    if (is_zero(a) && is_zero(b) && is_zero(c) && is_zero(d)) return CubicType::Zero;
    K disc = b * b * c * c - from_rat<K>(Rat(4)) * a * c * c * c - from_rat<K>(Rat(4)) * b * b * b * d -
             from_rat<K>(Rat(27)) * a * a * d * d + from_rat<K>(Rat(18)) * a * b * c * d;
    if (!is_zero(disc)) return CubicType::ThreeDistinct;
    K h0 = b * b - from_rat<K>(Rat(3)) * a * c;
    K h1 = b * c - from_rat<K>(Rat(9)) * a * d;
    K h2 = c * c - from_rat<K>(Rat(3)) * b * d;
    if (is_zero(h0) && is_zero(h1) && is_zero(h2)) return CubicType::TripleFactor;
    return CubicType::DoubleSimple;
}

} // namespace segre

#endif
