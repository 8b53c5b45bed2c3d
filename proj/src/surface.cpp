#include "segre/surface.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace segre {

using CMat = Eigen::MatrixXcd;
using CVecE = Eigen::VectorXcd;

QVec normalize_point(QVec v) {
    for (auto& c : v)
        if (!is_zero(c)) {
            Rat s = c;
            for (auto& x : v) x /= s;
            return v;
        }
    throw PreconditionFailed("zero vector is not a projective point");
}

bool same_point(const QVec& a, const QVec& b) { return normalize_point(a) == normalize_point(b); }

std::string point_str(const QVec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
    return s + ")";
}

std::string ade_multiset_str(std::vector<ADEClass> v) {
    if (v.empty()) return "none";
    std::sort(v.begin(), v.end());
    std::string s;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if (!s.empty()) s += "+";
        if (j - i > 1) s += std::to_string(j - i);
        s += v[i].str();
        i = j;
    }
    return s;
}

QVec LineOnSurface::point(const Rat& t) const {
    QVec r(5);
    for (int i = 0; i < 5; ++i) r[i] = a[i] + t * b[i];
    return r;
}

int SurfaceInstance::exact_line_count() const {
    int k = 0;
    for (auto& l : lines) k += l.exact;
    return k;
}

namespace {

QMat from_columns(const std::vector<QVec>& cols) {
    QMat m(5, static_cast<int>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (int i = 0; i < 5; ++i) m(i, static_cast<int>(j)) = cols[j][i];
    return m;
}

QMat from_rows(const std::vector<QVec>& rows) {
    QMat m(static_cast<int>(rows.size()), 5);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < 5; ++j) m(static_cast<int>(i), j) = rows[i][j];
    return m;
}

bool is_zero_vec(const QVec& v) {
    return std::all_of(v.begin(), v.end(), [](const Rat& r) { return is_zero(r); });
}

int rank_of(const std::vector<QVec>& vs) { return vs.empty() ? 0 : from_rows(vs).rank(); }

/// Extends `base` by vectors of `pool` (then unit vectors) up to `target` independent vectors.
std::vector<QVec> extend(std::vector<QVec> base, const std::vector<QVec>& pool, std::size_t target) {
    for (auto& v : pool) {
        if (base.size() >= target) break;
        base.push_back(v);
        if (rank_of(base) < static_cast<int>(base.size())) base.pop_back();
    }
    for (int i = 0; i < 5 && base.size() < target; ++i) {
        QVec e(5, Rat(0));
        e[i] = 1;
        base.push_back(e);
        if (rank_of(base) < static_cast<int>(base.size())) base.pop_back();
    }
    return base;
}

double max_abs(const QMat& A) {
    double m = 0;
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) m = std::max(m, std::fabs(A(i, j).get_d()));
    return m;
}

CMat to_cmat(const QMat& A, double scale = 1.0) {
    CMat m(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) m(i, j) = Cplx(A(i, j).get_d() / scale, 0.0);
    return m;
}

CVecE to_cvec(const QVec& v) {
    CVecE r(5);
    for (int i = 0; i < 5; ++i) r(i) = Cplx(v[i].get_d(), 0.0);
    return r;
}

CVec to_std(const CVecE& v) { return CVec(v.data(), v.data() + v.size()); }
CVecE to_eig(const CVec& v) {
    CVecE r(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<Eigen::Index>(i)) = v[i];
    return r;
}

CMat projector(const CVecE& p, const CVecE& q) {
    CMat M(5, 2);
    M.col(0) = p;
    M.col(1) = q;
    Eigen::HouseholderQR<CMat> qr(M);
    CMat U = qr.householderQ() * CMat::Identity(5, 2);
    return U * U.adjoint();
}

double distance_to_line(const CMat& proj, const CVecE& s) {
    CVecE u = s / s.norm();
    return (u - proj * u).norm();
}

// Members singular somewhere: one per eigenvalue.
std::vector<QMat> degenerate_members(const QuadricPencil& pc) {
    SegreSymbol s = pc.symbol ? *pc.symbol : segre_symbol(pc);
    std::vector<QMat> out;
    for (auto& u : s.units) out.push_back(pc.member(u.lambda, u.mu));
    return out;
}

QMat member_singular_at(const QuadricPencil& pc, const QVec& s) {
    for (auto& A : degenerate_members(pc))
        if (is_zero_vec(A.apply(s))) return A;
    throw PreconditionFailed("no member of the pencil is singular at " + point_str(s));
}

QMat member_smooth_at(const QuadricPencil& pc, const QVec& s) {
    for (int k = 0; k < 8; ++k) {
        QMat B = (k == 0) ? pc.Q : (k == 1 ? pc.P : pc.P + Rat(k - 1) * pc.Q);
        if (!is_zero_vec(B.apply(s))) return B;
    }
    throw PreconditionFailed("every member is singular at " + point_str(s));
}

// Roots (s:t) of a s^2 + 2 b s t + c t^2 over Q; nullopt if irrational.
std::optional<std::vector<std::pair<Rat, Rat>>> binary_roots(const Rat& a, const Rat& b, const Rat& c) {
    std::vector<std::pair<Rat, Rat>> r;
    if (is_zero(a)) {
        r.push_back({Rat(1), Rat(0)});
        if (!is_zero(b)) r.push_back({c, Rat(-2) * b});
        return r;
    }
    Rat disc = b * b - a * c;
    auto sq = exact_sqrt(disc);
    if (!sq) return std::nullopt;
    r.push_back({(-b + *sq) / a, Rat(1)});
    if (!is_zero(*sq)) r.push_back({(-b - *sq) / a, Rat(1)});
    return r;
}

QVec combo(const std::vector<QVec>& basis, const std::vector<Rat>& c) {
    QVec r(5, Rat(0));
    for (std::size_t k = 0; k < basis.size(); ++k)
        for (int i = 0; i < 5; ++i) r[i] += c[k] * basis[k][i];
    return r;
}

// Resultant in c of p2 c^2 + p1 c + p0 and q2 c^2 + q1 c + q0.
template <class T>
T res22(const T& p2, const T& p1, const T& p0, const T& q2, const T& q1, const T& q0) {
    T a = p2 * q0 - p0 * q2;
    return a * a - (p2 * q1 - p1 * q2) * (p1 * q0 - p0 * q1);
}

std::vector<Cplx> poly_roots(const UPoly& p) {
    int n = p.degree();
    std::vector<Cplx> r;
    if (n <= 0) return r;
    CMat C = CMat::Zero(n, n);
    double lead = p.lead().get_d();
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p.coeff(i).get_d() / lead;
    Eigen::ComplexEigenSolver<CMat> es(C);
    for (int i = 0; i < n; ++i) r.push_back(es.eigenvalues()(i));
    // polish with Newton on the original polynomial
    for (auto& z : r)
        for (int it = 0; it < 8; ++it) {
            Cplx f = 0, df = 0;
            for (int k = n; k >= 0; --k) {
                df = df * z + f;
                f = f * z + Cplx(p.coeff(k).get_d(), 0);
            }
            if (std::abs(df) < 1e-300) break;
            z -= f / df;
        }
    return r;
}

struct ConicPoint {
    bool rational = false;
    std::array<Rat, 3> q;
    std::array<Cplx, 3> c;
};

// Distinct intersection points of two conics in P^2 (3x3 symmetric matrices).
std::vector<ConicPoint> conic_intersection(const QMat& CA, const QMat& CB, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(-4, 4);
    std::vector<ConicPoint> best;
    int best_count = -1, good = 0;
    for (int attempt = 0; attempt < 40 && good < 3; ++attempt) {
        QMat M(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) M(i, j) = Rat(d(rng));
        if (is_zero(M.det())) continue;
        QMat A = M.transpose() * CA * M, B = M.transpose() * CB * M;
        // no common point on b = 0
        if (is_zero(res22<Rat>(A(2, 2), Rat(2) * A(0, 2), A(0, 0), B(2, 2), Rat(2) * B(0, 2), B(0, 0)))) continue;
        UPoly t = UPoly::x();
        auto coeffs = [&](const QMat& C) {
            return std::array<UPoly, 3>{UPoly(C(2, 2)), t.scaled(Rat(2) * C(0, 2)) + UPoly(Rat(2) * C(1, 2)),
                                        (t * t).scaled(C(0, 0)) + t.scaled(Rat(2) * C(0, 1)) + UPoly(C(1, 1))};
        };
        auto pa = coeffs(A), pb = coeffs(B);
        UPoly R = res22(pa[0], pa[1], pa[2], pb[0], pb[1], pb[2]);
        if (R.zero()) throw NonIsolatedSingularity("the two conics share a component");
        UPoly sf = R.squarefree();
        std::vector<ConicPoint> pts;
        bool bad = false;
        std::vector<Rat> rat_t;
        for (auto& [root, mult] : sf.rational_roots()) rat_t.push_back(root);
        auto lift = [&](const std::array<Rat, 3>& v) {
            std::array<Rat, 3> r;
            for (int i = 0; i < 3; ++i) r[i] = M(i, 0) * v[0] + M(i, 1) * v[1] + M(i, 2) * v[2];
            return r;
        };
        for (auto& tv : rat_t) {
            UPoly p(std::vector<Rat>{pa[2].eval(tv), pa[1].eval(tv), pa[0].eval(tv)});
            UPoly q(std::vector<Rat>{pb[2].eval(tv), pb[1].eval(tv), pb[0].eval(tv)});
            UPoly g = UPoly::gcd(p, q);
            if (g.degree() != 1) { bad = true; break; }
            Rat c = -g.coeff(0) / g.coeff(1);
            ConicPoint cp;
            cp.rational = true;
            cp.q = lift({tv, Rat(1), c});
            for (int i = 0; i < 3; ++i) cp.c[i] = Cplx(cp.q[i].get_d(), 0);
            pts.push_back(cp);
        }
        if (bad) continue;
        for (auto& z : poly_roots(sf)) {
            bool is_rat = false;
            for (auto& tv : rat_t)
                if (std::abs(z - Cplx(tv.get_d(), 0)) < 1e-7 * (1 + std::abs(z))) is_rat = true;
            if (is_rat) continue;
            auto ev = [&](const UPoly& u) {
                Cplx r = 0;
                for (int k = u.degree(); k >= 0; --k) r = r * z + Cplx(u.coeff(k).get_d(), 0);
                return r;
            };
            Cplx p2 = ev(pa[0]), p1 = ev(pa[1]), p0 = ev(pa[2]);
            Cplx q2 = ev(pb[0]), q1 = ev(pb[1]), q0 = ev(pb[2]);
            // common root: eliminate c^2
            Cplx num = p2 * q0 - q2 * p0, den = q2 * p1 - p2 * q1;
            Cplx c;
            if (std::abs(den) > 1e-12 * (std::abs(num) + 1)) {
                c = num / den;
            } else {
                Cplx disc = std::sqrt(p1 * p1 - 4.0 * p2 * p0);
                Cplx c1 = (-p1 + disc) / (2.0 * p2), c2 = (-p1 - disc) / (2.0 * p2);
                c = std::abs(q2 * c1 * c1 + q1 * c1 + q0) < std::abs(q2 * c2 * c2 + q1 * c2 + q0) ? c1 : c2;
            }
            ConicPoint cp;
            std::array<Cplx, 3> v{z, Cplx(1, 0), c};
            for (int i = 0; i < 3; ++i)
                cp.c[i] = M(i, 0).get_d() * v[0] + M(i, 1).get_d() * v[1] + M(i, 2).get_d() * v[2];
            pts.push_back(cp);
        }
        ++good;
        if (static_cast<int>(pts.size()) > best_count) {
            best_count = static_cast<int>(pts.size());
            best = pts;
        }
    }
    if (good == 0) throw RetryExhausted("no generic projection found for a conic intersection");
    return best;
}

CMat scaled(const QMat& A) { return to_cmat(A, std::max(max_abs(A), 1e-300)); }

double containment_residual(const CMat& P, const CMat& Q, const CVecE& p, const CVecE& q) {
    CVecE a = p / p.norm(), b = q / q.norm();
    double r = 0;
    for (const CMat* M : {&P, &Q}) {
        r = std::max(r, std::abs((a.transpose() * (*M) * a)(0, 0)));
        r = std::max(r, std::abs((a.transpose() * (*M) * b)(0, 0)));
        r = std::max(r, std::abs((b.transpose() * (*M) * b)(0, 0)));
    }
    return r;
}

LineOnSurface make_exact_line(const QuadricPencil& pc, const QVec& a, const QVec& b) {
    LineOnSurface l;
    l.exact = true;
    l.a = normalize_point(a);
    l.b = b;
    // second spanning point reduced against the first pivot
    int piv = 0;
    while (is_zero(l.a[piv])) ++piv;
    Rat f = l.b[piv];
    for (int i = 0; i < 5; ++i) l.b[i] -= f * l.a[i];
    l.b = normalize_point(l.b);
    l.na = to_std(to_cvec(l.a));
    l.nb = to_std(to_cvec(l.b));
    l.residual = containment_residual(scaled(pc.P), scaled(pc.Q), to_eig(l.na), to_eig(l.nb));
    return l;
}

bool exact_point_on_line(const QVec& a, const QVec& b, const QVec& p) { return rank_of({a, b, p}) == 2; }

} // namespace

bool on_surface(const QuadricPencil& pc, const QVec& x) {
    return is_zero(qform(pc.P, x)) && is_zero(qform(pc.Q, x));
}

bool is_smooth_point(const QuadricPencil& pc, const QVec& x) {
    return rank_of({pc.P.apply(x), pc.Q.apply(x)}) == 2;
}

bool line_on_surface(const QuadricPencil& pc, const QVec& a, const QVec& b) {
    for (const QMat* M : {&pc.P, &pc.Q})
        if (!is_zero(qform(*M, a)) || !is_zero(qform(*M, a, b)) || !is_zero(qform(*M, b))) return false;
    return true;
}

bool point_on_line(const LineOnSurface& l, const QVec& p) {
    if (l.exact) return exact_point_on_line(l.a, l.b, p);
    return distance_to_line(projector(to_eig(l.na), to_eig(l.nb)), to_cvec(p)) < 1e-8;
}

std::vector<QVec> singular_points(const QuadricPencil& pc, std::vector<std::string>* unresolved,
                                  std::uint64_t seed) {
    std::vector<QVec> pts;
    auto add = [&](const QVec& v) {
        QVec n = normalize_point(v);
        for (auto& p : pts)
            if (p == n) return;
        pts.push_back(n);
    };
    SegreSymbol sym = pc.symbol ? *pc.symbol : segre_symbol(pc);
    for (auto& u : sym.units) {
        QMat A = pc.member(u.lambda, u.mu);
        QMat B = is_zero(u.lambda) ? pc.P : pc.Q;
        auto K = A.kernel();
        if (K.size() == 1) {
            if (is_zero(qform(B, K[0]))) add(K[0]);
        } else if (K.size() == 2) {
            Rat a = qform(B, K[0]), b = qform(B, K[0], K[1]), c = qform(B, K[1]);
            if (is_zero(a) && is_zero(b) && is_zero(c))
                throw NonIsolatedSingularity("a line of singular points in the kernel of a member");
            auto roots = binary_roots(a, b, c);
            if (!roots) {
                if (unresolved) unresolved->push_back("irrational singular points on the kernel line of a member");
                continue;
            }
            for (auto& [s, t] : *roots) add(combo(K, {s, t}));
        } else if (K.size() >= 3) {
            throw NonIsolatedSingularity("member of corank >= 3");
        }
    }
    for (int i = 0; i < 5; ++i) {
        QVec e(5, Rat(0));
        e[i] = 1;
        if (on_surface(pc, e) && !is_smooth_point(pc, e)) add(e);
    }
    if (!unresolved) return pts;

    // numeric sweep on (P - t R) x = 0, x^T R x = 0, c^T x = 1
    QMat Rq = pc.ref_a * pc.P + pc.ref_b * pc.Q;
    double sc = std::max(max_abs(pc.P), max_abs(Rq));
    CMat P = to_cmat(pc.P, sc), R = to_cmat(Rq, sc);
    std::mt19937_64 rng(seed * 7919 + 17);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<CVecE> hits;
    for (int start = 0; start < 200; ++start) {
        CVecE c(5), x(5);
        for (int i = 0; i < 5; ++i) {
            c(i) = Cplx(g(rng), g(rng));
            x(i) = Cplx(g(rng), g(rng));
        }
        Cplx t(g(rng), g(rng));
        x /= (c.transpose() * x)(0, 0);
        double res = 1;
        for (int it = 0; it < 80; ++it) {
            CMat M = P - t * R;
            CVecE F(7);
            F.head(5) = M * x;
            F(5) = (x.transpose() * R * x)(0, 0);
            F(6) = (c.transpose() * x)(0, 0) - 1.0;
            res = F.norm();
            if (res < 1e-13 || !std::isfinite(res) || x.norm() > 1e8) break;
            CMat J = CMat::Zero(7, 6);
            J.block(0, 0, 5, 5) = M;
            J.block(0, 5, 5, 1) = -(R * x);
            J.block(5, 0, 1, 5) = 2.0 * (R * x).transpose();
            J.block(6, 0, 1, 5) = c.transpose();
            CVecE d = J.colPivHouseholderQr().solve(-F);
            x += d.head(5);
            t += d(5);
        }
        if (!(res < 1e-12)) continue;
        hits.push_back(x / x.norm());
    }
    for (auto& h : hits) {
        bool matched = false;
        for (auto& p : pts) {
            CVecE e = to_cvec(p);
            e /= e.norm();
            Cplx ip = e.adjoint() * h;
            if ((h - ip * e).norm() < 1e-4) matched = true;
        }
        if (!matched) {
            std::string s = "UNRESOLVED numeric singular point near (";
            for (int i = 0; i < 5; ++i) s += (i ? ", " : "") + std::to_string(std::abs(h(i)));
            unresolved->push_back(s + ")");
            // report each cluster once
            for (auto& other : hits)
                if ((other - (Cplx)(h.adjoint() * other) * h).norm() < 1e-4) other *= 0.0;
        }
    }
    std::sort(unresolved->begin(), unresolved->end());
    unresolved->erase(std::unique(unresolved->begin(), unresolved->end()), unresolved->end());
    return pts;
}

ADEClass classify_singularity(const QuadricPencil& pc, const QVec& s, int order) {
    if (!on_surface(pc, s)) throw PreconditionFailed("point is not on the surface");
    if (is_smooth_point(pc, s)) throw PreconditionFailed("point is smooth");
    QMat A = member_singular_at(pc, s);
    QMat B = member_smooth_at(pc, s);
    QVec ell = B.apply(s);
    QMat row(1, 5);
    for (int i = 0; i < 5; ++i) row(0, i) = ell[i];
    auto H = row.kernel();  // contains s
    auto basis = extend({s}, H, 4);
    QVec w4;
    for (int i = 0; i < 5; ++i)
        if (!is_zero(ell[i])) {
            w4.assign(5, Rat(0));
            w4[i] = 1;
            break;
        }
    basis.push_back(w4);
    QMat V = from_columns(basis);
    QJet qb = chart_quadric(B, V), qa = chart_quadric(A, V);
    // qb in (u1..u4): solve for u4
    auto phi = hensel_solve<Rat>({qb}, 1, order)[0];
    std::vector<QJet> subs{QJet::variable(3, order, 0), QJet::variable(3, order, 1), QJet::variable(3, order, 2),
                           phi};
    QJet f = qa.compose(subs).truncated(order);
    auto sp = splitting_reduce<Rat>(f);
    if (sp.rank == 3) return {ADEFamily::A, 1};
    if (sp.rank == 2) {
        int k = sp.residual.valuation() - 1;
        if (k > 4) throw UnsupportedType("A" + std::to_string(k) + " does not occur on a Segre surface");
        return {ADEFamily::A, k};
    }
    if (sp.rank == 1) {
        const QJet& r = sp.residual;
        auto ct = binary_cubic_type(r.coeff({3, 0}), r.coeff({2, 1}), r.coeff({1, 2}), r.coeff({0, 3}));
        if (ct == CubicType::ThreeDistinct) return {ADEFamily::D, 4};
        if (ct == CubicType::DoubleSimple) {
            auto mu = milnor_number<Rat>(r);
            if (!mu) throw OrderTooSmall("Milnor number not stable at order " + std::to_string(order));
            if (*mu != 5) throw UnsupportedType("D" + std::to_string(*mu) + " does not occur on a Segre surface");
            return {ADEFamily::D, 5};
        }
        throw UnsupportedType("corank 2 point with a triple cubic factor (E type)");
    }
    throw UnsupportedType("corank 3 singular point");
}

QJet chart_quadric(const QMat& B, const QMat& V) {
    QMat W = V.transpose() * B * V;
    QJet q(4, QJet::kExact);
    auto key = [](int i, int j) {
        Exps e{};
        if (i > 0) e[i - 1] += 1;
        if (j > 0) e[j - 1] += 1;
        return mono_key(e);
    };
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) q.add_term(key(i, j), W(i, j));
    return q;
}

SingularLines lines_through_singularities(const QuadricPencil& pc, const std::vector<QVec>& sing,
                                          std::uint64_t seed) {
    SingularLines out;
    std::mt19937_64 rng(seed * 104729 + 3);
    std::vector<LineOnSurface> two;
    for (std::size_t i = 0; i < sing.size(); ++i)
        for (std::size_t j = i + 1; j < sing.size(); ++j)
            if (line_on_surface(pc, sing[i], sing[j])) two.push_back(make_exact_line(pc, sing[i], sing[j]));
    out.n2 = static_cast<int>(two.size());
    out.lines = two;
    CMat Pn = scaled(pc.P), Qn = scaled(pc.Q);
    for (auto& s : sing) {
        QMat A = member_singular_at(pc, s);
        QMat B = member_smooth_at(pc, s);
        QVec ell = B.apply(s);
        QMat row(1, 5);
        for (int i = 0; i < 5; ++i) row(0, i) = ell[i];
        auto basis = extend({s}, row.kernel(), 4);
        std::vector<QVec> w(basis.begin() + 1, basis.end());
        QMat CA(3, 3), CB(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                CA(i, j) = qform(A, w[i], w[j]);
                CB(i, j) = qform(B, w[i], w[j]);
            }
        auto pts = conic_intersection(CA, CB, rng);
        for (auto& cp : pts) {
            if (cp.rational) {
                QVec u = combo(w, {cp.q[0], cp.q[1], cp.q[2]});
                bool through_other = false;
                for (auto& o : sing)
                    if (o != s && exact_point_on_line(s, u, o)) through_other = true;
                if (through_other) continue;
                if (!line_on_surface(pc, s, u)) throw CrossCheckMismatch("computed line through a singular point is not on S");
                out.lines.push_back(make_exact_line(pc, s, u));
                ++out.n1;
            } else {
                CVecE u = CVecE::Zero(5);
                for (int k = 0; k < 3; ++k) u += cp.c[k] * to_cvec(w[k]);
                LineOnSurface l;
                l.exact = false;
                l.na = to_std(to_cvec(s));
                l.nb = to_std(u);
                l.residual = containment_residual(Pn, Qn, to_cvec(s), u);
                out.lines.push_back(l);
                ++out.n1;
            }
        }
    }
    return out;
}

namespace {

std::optional<LineOnSurface> exactify(const QuadricPencil& pc, const CVecE& p, const CVecE& q) {
    int bi = 0, bj = 1;
    double best = -1;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            double m = std::abs(p(i) * q(j) - p(j) * q(i));
            if (m > best) { best = m; bi = i; bj = j; }
        }
    Eigen::Matrix2cd M;
    M << p(bi), p(bj), q(bi), q(bj);
    Eigen::Matrix2cd Mi = M.inverse();
    CVecE r0 = Mi(0, 0) * p + Mi(0, 1) * q, r1 = Mi(1, 0) * p + Mi(1, 1) * q;
    QVec a(5), b(5);
    for (int k = 0; k < 5; ++k) {
        for (auto [src, dst] : {std::pair<const CVecE*, QVec*>{&r0, &a}, {&r1, &b}}) {
            Cplx z = (*src)(k);
            if (std::fabs(z.imag()) > 1e-8 * (1 + std::abs(z))) return std::nullopt;
            auto r = rational_approx(z.real(), 1000000, 1e-9 * (1 + std::fabs(z.real())));
            if (!r) return std::nullopt;
            (*dst)[k] = *r;
        }
    }
    if (!line_on_surface(pc, a, b)) return std::nullopt;
    return make_exact_line(pc, a, b);
}

} // namespace

NumericLineResult enumerate_lines_numeric(const QuadricPencil& pc, const std::vector<QVec>& sing,
                                          const SurfaceOptions& opt) {
    NumericLineResult out;
    auto sl = lines_through_singularities(pc, sing, opt.seed);
    CMat P = scaled(pc.P), Q = scaled(pc.Q);
    std::mt19937_64 rng(opt.seed * 6151 + 11);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::pair<CVecE, CVecE>> found;
    std::vector<CMat> projs;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            std::vector<int> o;
            for (int k = 0; k < 5; ++k)
                if (k != i && k != j) o.push_back(k);
            for (int st = 0; st < opt.starts_per_chart; ++st) {
                Eigen::VectorXcd z(6);
                for (int k = 0; k < 6; ++k) z(k) = Cplx(g(rng), g(rng));
                double res = 1, cond = 0, last_step = 1;
                int polish = -1;
                CVecE p(5), q(5);
                for (int it = 0; it < 80; ++it) {
                    p.setZero();
                    q.setZero();
                    p(i) = 1;
                    q(j) = 1;
                    for (int k = 0; k < 3; ++k) {
                        p(o[k]) = z(k);
                        q(o[k]) = z(3 + k);
                    }
                    Eigen::VectorXcd F(6);
                    CMat J = CMat::Zero(6, 6);
                    int r = 0;
                    for (const CMat* M : {&P, &Q}) {
                        CVecE Mp = (*M) * p, Mq = (*M) * q;
                        F(r) = (p.transpose() * Mp)(0, 0);
                        F(r + 1) = (p.transpose() * Mq)(0, 0);
                        F(r + 2) = (q.transpose() * Mq)(0, 0);
                        for (int k = 0; k < 3; ++k) {
                            J(r, k) = 2.0 * Mp(o[k]);
                            J(r + 1, k) = Mq(o[k]);
                            J(r + 1, 3 + k) = Mp(o[k]);
                            J(r + 2, 3 + k) = 2.0 * Mq(o[k]);
                        }
                        r += 3;
                    }
                    res = F.norm();
                    if (polish < 0 && res < opt.tolerance) {
                        Eigen::JacobiSVD<CMat> svd(J);
                        cond = svd.singularValues()(5) / svd.singularValues()(0);
                        polish = 0;
                    }
                    if (polish == 3) break;
                    if (!std::isfinite(res) || z.norm() > 1e6) break;
                    Eigen::VectorXcd step = J.partialPivLu().solve(F);
                    z -= step;
                    last_step = step.norm() / (1 + z.norm());
                    if (polish >= 0) ++polish;
                }
                // multiple solutions (lines through singular points) converge only linearly
                if (polish < 3 || !(res < opt.tolerance) || cond < 1e-7 || last_step > 1e-10) continue;
                if (containment_residual(P, Q, p, q) > 1e-10) continue;
                CMat pr = projector(p, q);
                bool dup = false;
                for (auto& e : projs)
                    if ((e - pr).norm() < opt.dedup_radius) { dup = true; break; }
                if (dup) continue;
                projs.push_back(pr);
                found.push_back({p, q});
            }
        }
    // deterministic order: sort by projector entries
    std::vector<std::size_t> idx(found.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    auto key = [&](std::size_t k) {
        std::vector<double> v;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) v.push_back(std::round(projs[k](a, b).real() * 1e6) / 1e6);
        return v;
    };
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    int n0 = 0, incident_numeric = 0;
    std::vector<LineOnSurface> generic;
    for (auto k : idx) {
        bool incident = false;
        for (auto& s : sing)
            if (distance_to_line(projs[k], to_cvec(s)) < opt.dedup_radius) incident = true;
        if (incident) {
            ++incident_numeric;
            continue;
        }
        ++n0;
        auto [p, q] = found[k];
        if (auto ex = exactify(pc, p, q)) {
            generic.push_back(*ex);
        } else {
            LineOnSurface l;
            l.exact = false;
            l.na = to_std(p);
            l.nb = to_std(q);
            l.residual = containment_residual(P, Q, p, q);
            generic.push_back(l);
        }
    }
    if (incident_numeric > 0)
        out.anomalies.push_back("numeric search found " + std::to_string(incident_numeric) +
                                " simple solutions through singular points");
    out.counts = {n0, sl.n1, sl.n2};
    out.lines = sl.lines;
    out.lines.insert(out.lines.end(), generic.begin(), generic.end());
    return out;
}

SurfaceInstance build_surface(const QuadricPencil& pc0, const SurfaceOptions& opt) {
    SurfaceInstance S;
    S.options = opt;
    S.pencil = pc0.symbol ? pc0 : with_symbol(pc0);
    auto pts = singular_points(S.pencil, &S.anomalies, opt.seed);
    for (auto& p : pts) S.singular.push_back({p, classify_singularity(S.pencil, p, opt.order)});
    if (opt.enumerate_lines) {
        auto lr = enumerate_lines_numeric(S.pencil, pts, opt);
        S.lines = lr.lines;
        S.counts = lr.counts;
        S.anomalies.insert(S.anomalies.end(), lr.anomalies.begin(), lr.anomalies.end());
        for (auto& l : S.lines)
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (point_on_line(l, pts[i])) l.incident.push_back(static_cast<int>(i));
    }
    return S;
}

AdaptedChart chart_from_basis(const QuadricPencil& pc, const QMat& V, bool aligned) {
    AdaptedChart c;
    c.V = V;
    c.Vinv = V.inverse();
    c.base.resize(5);
    for (int i = 0; i < 5; ++i) c.base[i] = V(i, 0);
    c.aligned = aligned;
    c.q1 = chart_quadric(pc.P, V);
    c.q2 = chart_quadric(pc.Q, V);
    return c;
}

AdaptedChart adapted_chart(const SurfaceInstance& S, const QVec& p, const LineOnSurface* line, int variant) {
    const auto& pc = S.pencil;
    if (!on_surface(pc, p)) throw PreconditionFailed("point is not on the surface");
    if (!is_smooth_point(pc, p)) throw PointSingular("point " + point_str(p) + " is singular");
    QMat rows = from_rows({pc.P.apply(p), pc.Q.apply(p)});
    auto T = rows.kernel();  // T_pS as a 3-space containing p
    std::vector<QVec> b{p};
    if (line) {
        if (!line->exact) throw PreconditionFailed("chart alignment needs an exact line");
        if (!exact_point_on_line(line->a, line->b, p)) throw PointNotOnLine("point " + point_str(p) + " is not on the line");
        b = extend(b, {line->a, line->b}, 2);
    }
    b = extend(b, T, 3);
    if (b.size() != 3 || rank_of(b) != 3) throw PreconditionFailed("tangent plane is degenerate");
    b = extend(b, {}, 5);
    if (variant > 0) {
        // elementary column operations, applied in sequence
        Rat k(variant);
        auto axpy = [&](int dst, const Rat& c, int src) {
            for (int i = 0; i < 5; ++i) b[dst][i] += c * b[src][i];
        };
        axpy(2, k, 1);
        if (!line) axpy(1, Rat(variant % 3), 2);
        axpy(3, k, 4);
        axpy(3, k + 1, 1);
        axpy(4, k, 2);
        axpy(4, Rat(variant % 2), 3);
    }
    return chart_from_basis(pc, from_columns(b), line != nullptr);
}

std::optional<QVec> point_via_line(const QuadricPencil& pc, const LineOnSurface& l, std::mt19937_64& rng) {
    if (!l.exact) return std::nullopt;
    QVec c(5);
    for (auto& x : c) x = random_rational(rng, -6, 6, 3);
    if (rank_of({l.a, l.b, c}) < 3) return std::nullopt;
    // residual lines of the plane span(a, b, c) in both quadrics
    std::array<std::array<Rat, 3>, 2> L;
    int k = 0;
    for (const QMat* M : {&pc.P, &pc.Q}) {
        L[k] = {Rat(2) * qform(*M, l.a, c), Rat(2) * qform(*M, l.b, c), qform(*M, c)};
        ++k;
    }
    Rat s = L[0][1] * L[1][2] - L[0][2] * L[1][1];
    Rat t = L[0][2] * L[1][0] - L[0][0] * L[1][2];
    Rat u = L[0][0] * L[1][1] - L[0][1] * L[1][0];
    if (is_zero(u)) return std::nullopt;
    QVec p(5);
    for (int i = 0; i < 5; ++i) p[i] = s * l.a[i] + t * l.b[i] + u * c[i];
    return normalize_point(p);
}

QVec sample_point(const SurfaceInstance& S, std::mt19937_64& rng) {
    std::vector<const LineOnSurface*> ex;
    for (auto& l : S.lines)
        if (l.exact) ex.push_back(&l);
    const auto& pc = S.pencil;
    auto acceptable = [&](const QVec& p) {
        if (!on_surface(pc, p) || !is_smooth_point(pc, p)) return false;
        for (auto& l : S.lines)
            if (point_on_line(l, p)) return false;
        return true;
    };
    for (int attempt = 0; attempt < 400 && !ex.empty(); ++attempt) {
        const auto* l = ex[std::uniform_int_distribution<std::size_t>(0, ex.size() - 1)(rng)];
        auto p = point_via_line(pc, *l, rng);
        if (p && acceptable(*p)) return *p;
    }
    // projection from a singular point onto its tangent cone
    for (auto& sp : S.singular) {
        QMat A = member_singular_at(pc, sp.point);
        QMat B = member_smooth_at(pc, sp.point);
        std::optional<QVec> v0;
        std::uniform_int_distribution<int> d(-3, 3);
        for (int attempt = 0; attempt < 20000 && !v0; ++attempt) {
            QVec v(5);
            for (auto& x : v) x = d(rng);
            if (is_zero(qform(A, v)) && !is_zero_vec(A.apply(v))) v0 = v;
        }
        if (!v0) continue;
        for (int attempt = 0; attempt < 200; ++attempt) {
            QVec w(5);
            for (auto& x : w) x = random_rational(rng, -5, 5, 2);
            Rat aw = qform(A, w);
            if (is_zero(aw)) continue;
            Rat r = Rat(-2) * qform(A, *v0, w) / aw;
            QVec v(5);
            for (int i = 0; i < 5; ++i) v[i] = (*v0)[i] + r * w[i];
            Rat bv = qform(B, v);
            if (is_zero(bv)) continue;
            Rat bs = qform(B, sp.point, v);
            QVec p(5);
            for (int i = 0; i < 5; ++i) p[i] = bv * sp.point[i] - Rat(2) * bs * v[i];
            if (is_zero_vec(p)) continue;
            p = normalize_point(p);
            if (acceptable(p)) return p;
        }
    }
    throw NoRationalPoints("could not sample a rational smooth point off the lines");
}

SurfaceInstance surface_through_line(std::uint64_t seed, const SurfaceOptions& opt) {
    std::mt19937_64 rng(seed * 2654435761ULL + 97);
    std::uniform_int_distribution<int> d(-3, 3);
    for (int attempt = 0; attempt < 50; ++attempt) {
        std::vector<Rat> al;
        while (al.size() < 5) {
            Rat r = random_rational(rng, -7, 7, 2);
            if (std::find(al.begin(), al.end(), r) == al.end()) al.push_back(r);
        }
        // S: sum c_j x_j^2 = sum alpha_j c_j x_j^2 = 0 with c_j = 1/f'(alpha_j) contains x_j = s + t alpha_j
        QMat Dq(5, 5), Dp(5, 5);
        for (int j = 0; j < 5; ++j) {
            Rat fp(1);
            for (int k = 0; k < 5; ++k)
                if (k != j) fp *= al[j] - al[k];
            Dq(j, j) = 1 / fp;
            Dp(j, j) = al[j] / fp;
        }
        QMat A(5, 5);
        for (int i = 0; i < 5; ++i) {
            A(i, 0) = 1;
            A(i, 1) = al[i];
            for (int j = 2; j < 5; ++j) A(i, j) = Rat(d(rng));
        }
        if (is_zero(A.det())) continue;
        QMat P = A.transpose() * Dp * A, Q = A.transpose() * Dq * A;
        // mix the pencil and clear denominators
        QMat P2 = P + Rat(d(rng)) * Q, Q2 = Q;
        Int den = 1;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) den = lcm(den, lcm(Int(P2(i, j).get_den()), Int(Q2(i, j).get_den())));
        P2 = Rat(den) * P2;
        Q2 = Rat(den) * Q2;
        for (const QMat* M : {&P2, &Q2})
            if (!is_zero((*M)(0, 0)) || !is_zero((*M)(0, 1)) || !is_zero((*M)(1, 1)))
                throw CrossCheckMismatch("constructed quadric does not contain the coordinate line");
        QuadricPencil pc;
        try {
            pc = with_symbol(make_pencil(P2, Q2));
        } catch (const Error&) {
            continue;
        }
        if (!validate_segre(pc).ok()) continue;
        SurfaceInstance S = build_surface(pc, opt);
        QVec e0(5, Rat(0)), e1(5, Rat(0));
        e0[0] = 1;
        e1[1] = 1;
        LineOnSurface l = make_exact_line(pc, e0, e1);
        bool ok = true;
        for (auto& sp : S.singular)
            if (exact_point_on_line(l.a, l.b, sp.point)) ok = false;
        for (int t = 0; t < 5 && ok; ++t)
            if (!is_smooth_point(pc, l.point(Rat(t)))) ok = false;
        if (!ok) continue;
        // the coordinate line first
        auto it = std::find_if(S.lines.begin(), S.lines.end(), [&](const LineOnSurface& x) {
            return x.exact && exact_point_on_line(x.a, x.b, e0) && exact_point_on_line(x.a, x.b, e1);
        });
        if (it == S.lines.end()) {
            S.lines.insert(S.lines.begin(), l);
        } else {
            std::rotate(S.lines.begin(), it, it + 1);
        }
        return S;
    }
    throw RetryExhausted("no valid surface through the coordinate line");
}

QVec double_conic_hyperplane(const QuadricPencil& pc, const RankMember& member, const Rat& t, const QVec& through) {
    QMat A = pc.member(member.lambda, member.mu);
    int rk = A.rank();
    if (rk < 3) throw ReducibleImageConic("member of rank " + std::to_string(rk) + " has a reducible image conic");
    if (rk != 3) throw PreconditionFailed("member is not of rank 3");
    if (!is_zero(qform(A, through)) || is_zero_vec(A.apply(through)))
        throw PreconditionFailed("base point must lie on the cone and off its vertex");
    auto K = A.kernel();
    std::vector<QVec> base = K;
    base.push_back(through);
    auto full = extend(base, {}, 5);
    QVec w1 = full[3], w2 = full[4];
    QVec dir(5);
    for (int i = 0; i < 5; ++i) dir[i] = w1[i] + t * w2[i];
    Rat add = qform(A, dir), axd = qform(A, through, dir);
    QVec x(5);
    for (int i = 0; i < 5; ++i) x[i] = add * through[i] - Rat(2) * axd * dir[i];
    if (is_zero_vec(A.apply(x))) x = through;
    return normalize_point(A.apply(x));
}

std::vector<QVec> double_conic_points(const QuadricPencil& pc, const RankMember& member, const QVec& p, int count,
                                      std::mt19937_64& rng) {
    QMat A = pc.member(member.lambda, member.mu);
    auto K = A.kernel();
    if (K.size() != 2) throw PreconditionFailed("member is not of rank 3");
    QMat B = is_zero(member.lambda) ? pc.P : pc.Q;
    std::vector<QVec> out;
    for (int attempt = 0; attempt < 200 && static_cast<int>(out.size()) < count; ++attempt) {
        Rat s = random_rational(rng, -9, 9, 4), r = random_rational(rng, -9, 9, 4);
        QVec u(5);
        for (int i = 0; i < 5; ++i) u[i] = K[0][i] + s * K[1][i] + r * p[i];
        Rat buu = qform(B, u), bpu = qform(B, p, u);
        if (is_zero(buu)) continue;
        QVec x(5);
        for (int i = 0; i < 5; ++i) x[i] = buu * p[i] - Rat(2) * bpu * u[i];
        if (is_zero_vec(x)) continue;
        x = normalize_point(x);
        if (same_point(x, p) || !is_smooth_point(pc, x)) continue;
        out.push_back(x);
    }
    return out;
}

} // namespace segre
