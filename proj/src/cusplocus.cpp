#include "segre/cusplocus.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace segre {

namespace {

using CMat = Eigen::MatrixXcd;
using CVecE = Eigen::VectorXcd;

Exps ex(int a, int b) { return Exps{a, b, 0, 0}; }

Rat dot(const QVec& h, const QVec& v) {
    Rat s = 0;
    for (int i = 0; i < 5; ++i) s += h[i] * v[i];
    return s;
}

QVec column(const QMat& V, int j) {
    QVec v(5);
    for (int i = 0; i < 5; ++i) v[i] = V(i, j);
    return v;
}

SJet to_sjet(const QJet& j) {
    return j.convert<QSqrt>([](const Rat& r) { return QSqrt(r); });
}

} // namespace

bool same_root(const DualRoot& a, const DualRoot& b) {
    try {
        return is_zero(a.lambda * b.mu - a.mu * b.lambda);
    } catch (const FieldMismatch&) {
        return false;
    }
}

std::vector<DualRoot> binary_roots(const BinaryQuadratic<Rat>& f) {
    const Rat &a = f.a, &b = f.b, &c = f.c;
    if (is_zero(a) && is_zero(b) && is_zero(c)) return {};
    if (is_zero(a)) {
        if (is_zero(b)) return {{QSqrt(1), QSqrt(0)}};
        return {{QSqrt(1), QSqrt(0)}, {QSqrt(-c), QSqrt(b)}};
    }
    Rat D = f.discriminant();
    if (is_zero(D)) return {{QSqrt(-b / (2 * a)), QSqrt(1)}};
    auto [d, s] = squarefree_decompose(D);
    QSqrt root = (d == 1) ? QSqrt(s) : QSqrt(Rat(0), s, d);
    QSqrt mb(-b), den(2 * a);
    return {{(mb + root) / den, QSqrt(1)}, {(mb - root) / den, QSqrt(1)}};
}

HessianAtPoint hessian_form_at(const SurfaceInstance& S, const QVec& p, const AdaptedChart* chart, int variant,
                               int order) {
    if (!on_surface(S.pencil, p)) throw PreconditionFailed("point is not on the surface");
    if (!is_smooth_point(S.pencil, p)) throw PointSingular("point " + point_str(p) + " is singular");
    HessianAtPoint h;
    h.point = p;
    h.chart = chart ? *chart : adapted_chart(S, p, nullptr, variant);
    if (!same_point(h.chart.base, p)) throw PreconditionFailed("chart is not centred at the point");
    auto sol = hensel_solve<Rat>({h.chart.q1, h.chart.q2}, 2, order);
    h.F = sol[0];
    h.G = sol[1];
    for (const QJet* J : {&h.F, &h.G})
        if (!is_zero(J->coeff(ex(1, 0))) || !is_zero(J->coeff(ex(0, 1))))
            throw PreconditionFailed("chart directions x, y do not span the tangent plane");
    Rat fxx = 2 * h.F.coeff(ex(2, 0)), fxy = h.F.coeff(ex(1, 1)), fyy = 2 * h.F.coeff(ex(0, 2));
    Rat gxx = 2 * h.G.coeff(ex(2, 0)), gxy = h.G.coeff(ex(1, 1)), gyy = 2 * h.G.coeff(ex(0, 2));
    h.form = {fxx * fyy - fxy * fxy, fxx * gyy + gxx * fyy - 2 * fxy * gxy, gxx * gyy - gxy * gxy};
    h.roots = binary_roots(h.form);
    return h;
}

std::vector<QSqrt> root_hyperplane(const AdaptedChart& c, const DualRoot& r) {
    std::vector<QSqrt> h(5);
    for (int j = 0; j < 5; ++j) h[j] = r.lambda * QSqrt(c.Vinv(3, j)) + r.mu * QSqrt(c.Vinv(4, j));
    // first nonzero coordinate 1
    for (auto& x : h)
        if (!is_zero(x)) {
            QSqrt s = x;
            for (auto& y : h) y = y / s;
            break;
        }
    return h;
}

std::string SectionGermClass::str() const {
    switch (kind) {
    case GermKind::Smooth: return "Smooth";
    case GermKind::A1Node: return "A1_node";
    case GermKind::A2Cusp: return "A2_cusp";
    case GermKind::A3Tacnode: return "A3_tacnode";
    case GermKind::PerfectSquare: return "PerfectSquare";
    case GermKind::NonReducedLineMultiple: return "NonReducedLineMultiple(" + std::to_string(k) + ")";
    case GermKind::Other: return "Other(" + detail + ")";
    }
    return "?";
}

template <class K>
SectionGermClass classify_germ(const Jet<K>& h, bool aligned) {
    if (h.nvars() != 2) throw PreconditionFailed("section germ must be a two-variable jet");
    if (!is_zero(h.constant_term())) throw PreconditionFailed("section germ does not pass through the point");
    SectionGermClass r;
    if (!is_zero(h.coeff(ex(1, 0))) || !is_zero(h.coeff(ex(0, 1)))) {
        r.kind = GermKind::Smooth;
        return r;
    }
    if (h.is_zero()) {
        r.detail = "vanishes through order " + std::to_string(h.order());
        return r;
    }
    if (aligned) {
        int k = h.min_exponent(1);
        if (k >= 2) {
            r.kind = GermKind::NonReducedLineMultiple;
            r.k = k;
            return r;
        }
    }
    K a = h.coeff(ex(2, 0)), b = h.coeff(ex(1, 1)), c = h.coeff(ex(0, 2));
    if (!is_zero(b * b - from_rat<K>(Rat(4)) * a * c)) {
        r.kind = GermKind::A1Node;
        return r;
    }
    if (try_extract_square<K>(h)) {
        r.kind = GermKind::PerfectSquare;
        return r;
    }
    SplitResult<K> sp;
    try {
        sp = splitting_reduce<K>(h);
    } catch (const OrderTooSmall& e) {
        r.detail = "undetermined at order " + std::to_string(h.order());
        return r;
    }
    if (sp.rank == 1) {
        int v = sp.residual.valuation();
        if (v == 3) r.kind = GermKind::A2Cusp;
        else if (v == 4) r.kind = GermKind::A3Tacnode;
        else r.detail = "A" + std::to_string(v - 1);
        return r;
    }
    r.detail = "corank 2, multiplicity " + std::to_string(h.valuation());
    return r;
}

template SectionGermClass classify_germ<Rat>(const Jet<Rat>&, bool);
template SectionGermClass classify_germ<QSqrt>(const Jet<QSqrt>&, bool);

SectionGermClass classify_section_germ(const SurfaceInstance& S, const QVec& p, const QVec& H,
                                       const LineOnSurface* line, int order) {
    if (!is_zero(dot(H, p))) throw HyperplaneNotTangent("hyperplane does not contain the point");
    auto chart = adapted_chart(S, p, line);
    if (!is_zero(dot(H, column(chart.V, 1))) || !is_zero(dot(H, column(chart.V, 2)))) {
        SectionGermClass r;
        r.kind = GermKind::Smooth;
        return r;
    }
    auto hp = hessian_form_at(S, p, &chart, 0, order);
    Rat l = dot(H, column(chart.V, 3)), m = dot(H, column(chart.V, 4));
    return classify_germ<Rat>(l * hp.F + m * hp.G, chart.aligned);
}

SectionGermClass classify_root_section(const HessianAtPoint& hp, const DualRoot& r) {
    try {
        if (r.rational()) return classify_germ<Rat>(r.lambda.a() * hp.F + r.mu.a() * hp.G, hp.chart.aligned);
        return classify_germ<QSqrt>(r.lambda * to_sjet(hp.F) + r.mu * to_sjet(hp.G), hp.chart.aligned);
    } catch (const FieldMismatch& e) {
        throw RootFieldUnsupported(e.what());
    }
}

std::string to_string(PointCase c) {
    switch (c) {
    case PointCase::CaseI: return "CaseI";
    case PointCase::CaseII: return "CaseII";
    case PointCase::CaseIII: return "CaseIII";
    }
    return "?";
}

namespace {

// Confirms a perfect-square section at two more points of its conic.
int confirm_double_conic(const SurfaceInstance& S, const QVec& p, const QVec& h, std::mt19937_64& rng, int order) {
    for (auto& m : rank_drop_members(S.pencil)) {
        if (!m.flagged) continue;
        QMat A = S.pencil.member(m.lambda, m.mu);
        bool contains_vertex = true;
        for (auto& k : A.kernel()) contains_vertex = contains_vertex && is_zero(dot(h, k));
        if (!contains_vertex) continue;
        auto pts = double_conic_points(S.pencil, m, p, 2, rng);
        int ok = 0;
        for (auto& q : pts) {
            if (!is_zero(dot(h, q)))
                throw CrossCheckMismatch("conic point " + point_str(q) + " is off the square hyperplane");
            auto g = classify_section_germ(S, q, h, nullptr, order);
            if (g.kind != GermKind::PerfectSquare)
                throw CrossCheckMismatch("section is " + g.str() + " at conic point " + point_str(q));
            ++ok;
        }
        return ok;
    }
    throw CrossCheckMismatch("perfect-square section at " + point_str(p) + " matches no rank-3 member");
}

} // namespace

PointCaseReport point_case(const SurfaceInstance& S, const QVec& p, const PointCaseOptions& opt) {
    PointCaseReport rep;
    rep.hessian = hessian_form_at(S, p, nullptr, opt.variant, opt.order);
    if (rep.hessian.roots.size() != 2)
        throw PreconditionFailed("Hessian form at " + point_str(p) + " has no two distinct roots");
    int squares = 0;
    std::mt19937_64 rng(opt.seed * 31337 + 5);
    for (int i = 0; i < 2; ++i) {
        const auto& r = rep.hessian.roots[i];
        rep.classes[i] = classify_root_section(rep.hessian, r);
        rep.hyperplanes.push_back(root_hyperplane(rep.hessian.chart, r));
        if (rep.classes[i].kind != GermKind::PerfectSquare) continue;
        ++squares;
        if (!opt.cross_check) continue;
        if (!r.rational()) throw CrossCheckMismatch("perfect-square section with an irrational root");
        QVec h(5);
        for (int j = 0; j < 5; ++j) h[j] = rep.hyperplanes.back()[j].a();
        rep.square_checks += confirm_double_conic(S, p, h, rng, opt.order);
    }
    int cusps = (rep.classes[0].kind == GermKind::A2Cusp) + (rep.classes[1].kind == GermKind::A2Cusp);
    if (squares == 2) rep.kind = PointCase::CaseI;
    else if (squares == 1 && cusps == 1) rep.kind = PointCase::CaseII;
    else if (cusps == 2)
        rep.kind = PointCase::CaseIII;
    else
        throw PreconditionFailed("non-generic point: root sections " + rep.classes[0].str() + ", " +
                                 rep.classes[1].str());
    return rep;
}

PointCaseReport sample_point_case(const SurfaceInstance& S, std::mt19937_64& rng, const PointCaseOptions& opt) {
    for (int attempt = 0; attempt < 20; ++attempt) {
        QVec p = sample_point(S, rng);
        try {
            return point_case(S, p, opt);
        } catch (const PreconditionFailed&) {
            continue;
        }
    }
    throw RetryExhausted("no generic point found for a point case");
}

namespace {

// n / D^e for a fixed polynomial D: sums and products need no gcds.
struct DFrac {
    UPoly n;
    int e = 0;
    bool zero() const { return n.zero(); }
};

class DenomRing {
public:
    explicit DenomRing(UPoly D) : D_(std::move(D)), Dp_(D_.derivative()) { pw_.push_back(UPoly(1)); }
    const UPoly& pow(int e) {
        while (static_cast<int>(pw_.size()) <= e) pw_.push_back(pw_.back() * D_);
        return pw_[e];
    }
    DFrac add(const DFrac& a, const DFrac& b) {
        if (a.zero()) return b;
        if (b.zero()) return a;
        int e = std::max(a.e, b.e);
        DFrac r{a.n * pow(e - a.e) + b.n * pow(e - b.e), e};
        if (r.zero()) r.e = 0;
        return r;
    }
    DFrac neg(const DFrac& a) { return {a.n.scaled(Rat(-1)), a.e}; }
    DFrac mul(const DFrac& a, const DFrac& b) {
        if (a.zero() || b.zero()) return {};
        return {a.n * b.n, a.e + b.e};
    }
    DFrac scale(const Rat& c, const DFrac& a) {
        if (is_zero(c) || a.zero()) return {};
        return {a.n.scaled(c), a.e};
    }
    DFrac dx(const DFrac& a) {
        if (a.zero()) return {};
        if (a.e == 0) return {a.n.derivative(), 0};
        DFrac r{a.n.derivative() * D_ - (a.n * Dp_).scaled(Rat(a.e)), a.e + 1};
        if (r.zero()) r.e = 0;
        return r;
    }
    RatFunc value(const DFrac& a) { return a.zero() ? RatFunc() : RatFunc(a.n, pow(a.e)); }

private:
    UPoly D_, Dp_;
    std::vector<UPoly> pw_;
};

using Series = std::vector<DFrac>;  // coefficients of y^k, k = 0..N

Series ser_mul(DenomRing& R, const Series& a, const Series& b, int N) {
    Series c(N + 1);
    for (int i = 0; i <= N; ++i) {
        if (i >= static_cast<int>(a.size()) || a[i].zero()) continue;
        for (int j = 0; i + j <= N && j < static_cast<int>(b.size()); ++j)
            if (!b[j].zero()) c[i + j] = R.add(c[i + j], R.mul(a[i], b[j]));
    }
    return c;
}

Series ser_sub(DenomRing& R, const Series& a, const Series& b) {
    Series c(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
        DFrac x = i < a.size() ? a[i] : DFrac{}, y = i < b.size() ? b[i] : DFrac{};
        c[i] = R.add(x, R.neg(y));
    }
    return c;
}

Series ser_dx(DenomRing& R, const Series& a) {
    Series c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = R.dx(a[i]);
    return c;
}

Series ser_dy(DenomRing& R, const Series& a) {
    Series c(a.empty() ? 0 : a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) c[i - 1] = R.scale(Rat(static_cast<long>(i)), a[i]);
    return c;
}

RJet to_rjet(DenomRing& R, const Series& a, int order) {
    RJet j(1, order);
    for (int i = 0; i <= order && i < static_cast<int>(a.size()); ++i)
        if (!a[i].zero()) j.set(Exps{i, 0, 0, 0}, R.value(a[i]));
    return j;
}

YOrder series_order(const Series& a, int known_to) {
    YOrder r;
    r.known_to = known_to;
    for (int i = 0; i <= known_to && i < static_cast<int>(a.size()); ++i)
        if (!a[i].zero()) {
            r.value = i;
            return r;
        }
    r.infinite = true;
    r.truncated = true;
    return r;
}

UPoly lin(const Rat& c0, const Rat& c1) { return UPoly(std::vector<Rat>{c0, c1}); }

} // namespace

std::pair<RJet, RJet> line_graph_by_hensel(const QuadricPencil& pc, const QMat& V, int order) {
    const RatFunc X = RatFunc::x();
    std::vector<RJet> eqs;
    for (const QMat* B : {&pc.P, &pc.Q}) {
        QMat W = V.transpose() * (*B) * V;
        RJet q(3, RJet::kExact);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                if (is_zero(W(i, j))) continue;
                RatFunc c(W(i, j));
                if (i == 1) c *= X;
                if (j == 1) c *= X;
                Exps e{};
                if (i >= 2) e[i - 2]++;
                if (j >= 2) e[j - 2]++;
                q.add_term(mono_key(e), c);
            }
        if (!is_zero(q.constant_term())) throw PreconditionFailed("chart line is not on the surface");
        eqs.push_back(q);
    }
    auto sol = hensel_solve<RatFunc>(eqs, 2, order);
    return {sol[0], sol[1]};
}

HessianAlongLine line_report_in_basis(const QuadricPencil& pc, const QMat& V, int order) {
    if (order < 3) throw OrderTooSmall("line report needs order >= 3");
    HessianAlongLine out;
    out.V = V;
    out.order = order;
    const int N = order;
    // B(c, c) with c = v0 + x v1 + y v2 + z v3 + w v4: linear in (y, z, w) over Q[x]
    // plus a quadratic form with constant coefficients
    std::array<std::array<UPoly, 3>, 2> L;
    std::array<QMat, 2> W;
    int i = 0;
    for (const QMat* B : {&pc.P, &pc.Q}) {
        W[i] = V.transpose() * (*B) * V;
        UPoly c0(std::vector<Rat>{W[i](0, 0), 2 * W[i](0, 1), W[i](1, 1)});
        if (!c0.zero()) throw PreconditionFailed("chart line is not on the surface");
        for (int v = 2; v <= 4; ++v) L[i][v - 2] = lin(2 * W[i](0, v), 2 * W[i](1, v));
        ++i;
    }
    UPoly D = L[0][1] * L[1][2] - L[0][2] * L[1][1];
    if (D.zero()) throw SingularJacobian("chart Jacobian vanishes identically along the line");
    DenomRing R(D);
    // s[0] = y, s[1] = z, s[2] = w as series in y
    std::array<Series, 3> s;
    for (auto& x : s) x.assign(N + 1, DFrac{});
    s[0][1] = {UPoly(1), 0};
    for (int k = 1; k <= N; ++k) {
        std::array<DFrac, 2> rhs;
        for (int e = 0; e < 2; ++e) {
            DFrac r = (k == 1) ? DFrac{L[e][0], 0} : DFrac{};
            for (int u = 0; u < 3; ++u)
                for (int v = 0; v < 3; ++v) {
                    const Rat& c = W[e](u + 2, v + 2);
                    if (is_zero(c)) continue;
                    for (int j = 1; j < k; ++j)
                        if (!s[u][j].zero() && !s[v][k - j].zero()) r = R.add(r, R.scale(c, R.mul(s[u][j], s[v][k - j])));
                }
            rhs[e] = r;
        }
        // (z_k, w_k) = -J^{-1} rhs
        DFrac z = R.add(R.mul({L[1][2], 0}, rhs[0]), R.neg(R.mul({L[0][2], 0}, rhs[1])));
        DFrac w = R.add(R.neg(R.mul({L[1][1], 0}, rhs[0])), R.mul({L[0][1], 0}, rhs[1]));
        s[1][k] = z.zero() ? DFrac{} : DFrac{z.n.scaled(Rat(-1)), z.e + 1};
        s[2][k] = w.zero() ? DFrac{} : DFrac{w.n.scaled(Rat(-1)), w.e + 1};
    }
    out.F = to_rjet(R, s[1], N);
    out.G = to_rjet(R, s[2], N);
    auto parts = [&](const Series& F) {
        Series Fx = ser_dx(R, F);
        return std::array<Series, 3>{ser_dx(R, Fx), ser_dy(R, Fx), ser_dy(R, ser_dy(R, F))};
    };
    auto [fxx, fxy, fyy] = parts(s[1]);
    auto [gxx, gxy, gyy] = parts(s[2]);
    const int M = N - 2;  // coefficients known through y^M
    Series a = ser_sub(R, ser_mul(R, fxx, fyy, M), ser_mul(R, fxy, fxy, M));
    Series b1 = ser_mul(R, fxx, gyy, M), b2 = ser_mul(R, gxx, fyy, M), b3 = ser_mul(R, fxy, gxy, M);
    Series b(M + 1);
    for (int k = 0; k <= M; ++k) b[k] = R.add(R.add(b1[k], b2[k]), R.scale(Rat(-2), b3[k]));
    Series c = ser_sub(R, ser_mul(R, gxx, gyy, M), ser_mul(R, gxy, gxy, M));
    Series ac = ser_mul(R, a, c, M);
    Series disc(M + 1);
    Series bb = ser_mul(R, b, b, M);
    for (int k = 0; k <= M; ++k) disc[k] = R.add(bb[k], R.scale(Rat(-4), ac[k]));
    out.form.a = to_rjet(R, a, M);
    out.form.b = to_rjet(R, b, M);
    out.form.c = to_rjet(R, c, M);
    out.hess_f = series_order(a, M);
    out.k = series_order(b, M);
    out.hess_g = series_order(c, M);
    out.disc = series_order(disc, M);
    int m = -1;
    for (auto* o : {&out.hess_f, &out.k, &out.hess_g})
        if (!o->infinite) m = (m < 0) ? o->value : std::min(m, o->value);
    if (m < 0) throw TruncationInsufficient("Hessian coefficients vanish through order " + std::to_string(M));
    if (out.disc.infinite)
        throw TruncationInsufficient("discriminant vanishes through order " + std::to_string(M));
    out.m = m;
    out.disc_order = out.disc.value;
    out.branch_mult = out.disc_order - 2 * m;
    if (out.branch_mult < 0) throw CrossCheckMismatch("discriminant order below twice the line multiplicity");
    return out;
}

HessianAlongLine line_report(const SurfaceInstance& S, const LineOnSurface& l, const LineReportOptions& opt) {
    if (!l.exact) throw PreconditionFailed("line report needs an exact line");
    int seen = 0;
    for (int t = 1; t <= 20; ++t) {
        QVec p = l.point(Rat(t));
        if (!is_smooth_point(S.pencil, p)) continue;
        bool other = false;
        for (auto& o : S.lines)
            if (&o != &l && !(o.exact && o.a == l.a && o.b == l.b) && point_on_line(o, p)) other = true;
        if (other) continue;
        if (seen++ < opt.base_choice) continue;
        auto chart = adapted_chart(S, p, &l);
        for (int N = opt.order;; N *= 2) {
            try {
                auto r = line_report_in_basis(S.pencil, chart.V, N);
                r.line = l;
                r.base_param = t;
                return r;
            } catch (const TruncationInsufficient&) {
                if (N * 2 > opt.max_order) throw;
            }
        }
    }
    throw RetryExhausted("no admissible base point on the line");
}

NumericLineEvidence numeric_line_evidence(const SurfaceInstance& S, const LineOnSurface& l) {
    NumericLineEvidence ev;
    ev.residual = l.residual;
    CVecE a(5), b(5);
    for (int i = 0; i < 5; ++i) {
        a(i) = l.na[i];
        b(i) = l.nb[i];
    }
    a /= a.norm();
    b -= (a.adjoint() * b)(0, 0) * a;
    b /= b.norm();
    CVecE p = a + Cplx(0.6180339887, 0.2718281828) * b;
    p /= p.norm();
    auto cm = [](const QMat& M) {
        double s = 0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) s = std::max(s, std::fabs(M(i, j).get_d()));
        CMat r(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) r(i, j) = M(i, j).get_d() / s;
        return r;
    };
    CMat P = cm(S.pencil.P), Q = cm(S.pencil.Q);
    CMat rows(2, 5);
    rows.row(0) = (P * p).transpose();
    rows.row(1) = (Q * p).transpose();
    Eigen::JacobiSVD<CMat> svd(rows, Eigen::ComputeFullV);
    CMat T = svd.matrixV().rightCols(3);  // tangent space at p
    // v2: tangent direction orthogonal to p and the line
    CMat L(5, 2);
    L.col(0) = p;
    L.col(1) = b;
    Eigen::HouseholderQR<CMat> ql(L);
    CMat Ql = ql.householderQ();
    CVecE v2 = T.col(0);
    for (int k = 0; k < 3; ++k) {
        CVecE c = T.col(k) - Ql.leftCols(2) * (Ql.leftCols(2).adjoint() * T.col(k));
        if (c.norm() > v2.norm() * 0.5 || k == 0) v2 = c;
    }
    v2 /= v2.norm();
    CMat B3(5, 3);
    B3.col(0) = p;
    B3.col(1) = b;
    B3.col(2) = v2;
    Eigen::HouseholderQR<CMat> q3(B3);
    CMat Q3 = q3.householderQ();
    CMat Vc(5, 5);
    Vc.col(0) = p;
    Vc.col(1) = b;
    Vc.col(2) = v2;
    Vc.col(3) = Q3.col(3);
    Vc.col(4) = Q3.col(4);
    auto chart_jet = [&](const CMat& M) {
        CMat W = Vc.transpose() * M * Vc;
        Jet<Cplx> q(4, Jet<Cplx>::kExact);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                Exps e{};
                if (i) e[i - 1]++;
                if (j) e[j - 1]++;
                Cplx c = W(i, j);
                if (std::abs(c) < 1e-14) continue;
                if (e == Exps{} || (i + j) == 0) continue;  // p is on S
                q.add_term(mono_key(e), c);
            }
        return q;
    };
    Jet<Cplx> q1 = chart_jet(P), q2 = chart_jet(Q);
    // the x-axis lies on S: drop round-off in pure x terms
    for (auto* q : {&q1, &q2})
        for (int k = 1; k <= 2; ++k) q->set(Exps{k, 0, 0, 0}, Cplx(0));
    // degree-by-degree solve; round-off never gives an exactly zero residual
    const int N = 10;
    using CJet = Jet<Cplx>;
    Eigen::Matrix2cd J;
    J << q1.coeff(Exps{0, 0, 1, 0}), q1.coeff(Exps{0, 0, 0, 1}), q2.coeff(Exps{0, 0, 1, 0}), q2.coeff(Exps{0, 0, 0, 1});
    Eigen::Matrix2cd Ji = J.inverse();
    CJet X = CJet::variable(2, N, 0), Y = CJet::variable(2, N, 1), F(2, N), G(2, N);
    for (int k = 1; k <= N; ++k) {
        CJet e1 = q1.compose({X, Y, F, G}).homogeneous(k), e2 = q2.compose({X, Y, F, G}).homogeneous(k);
        F = F - (Ji(0, 0) * e1 + Ji(0, 1) * e2);
        G = G - (Ji(1, 0) * e1 + Ji(1, 1) * e2);
    }
    auto coeffs_at = [&](double y) {
        auto d = [&](const CJet& Jt, int i, int j) {
            // d^{i+j}/dx^i dy^j at (0, y)
            Cplx s = 0;
            for (int k = 0; k + i + j <= N; ++k) {
                Cplx c = Jt.coeff(Exps{i, j + k, 0, 0});
                double f = 1;
                for (int t = 1; t <= i; ++t) f *= t;
                for (int t = 0; t < j; ++t) f *= (j + k - t);
                s += c * f * std::pow(y, k);
            }
            return s;
        };
        Cplx fxx = d(F, 2, 0), fxy = d(F, 1, 1), fyy = d(F, 0, 2);
        Cplx gxx = d(G, 2, 0), gxy = d(G, 1, 1), gyy = d(G, 0, 2);
        std::array<Cplx, 4> r{fxx * fyy - fxy * fxy, fxx * gyy + gxx * fyy - 2.0 * fxy * gxy, gxx * gyy - gxy * gxy, 0};
        r[3] = r[1] * r[1] - 4.0 * r[0] * r[2];
        return r;
    };
    auto c0 = coeffs_at(0.0);
    double scale = std::abs(c0[0]) + std::abs(c0[1]) + std::abs(c0[2]);
    ev.disc_on_line = scale > 0 ? std::abs(c0[3]) / (scale * scale) : 1.0;
    auto c1 = coeffs_at(1e-2), c2 = coeffs_at(1e-3);
    auto slope = [&](int i) {
        double a1 = std::abs(c1[i]), a2 = std::abs(c2[i]);
        if (a1 < 1e-300 || a2 < 1e-300) return 99;
        return static_cast<int>(std::lround(std::log10(a1 / a2)));
    };
    ev.m_estimate = std::min({slope(0), slope(1), slope(2)});
    ev.branch_estimate = slope(3) - 2 * ev.m_estimate;
    return ev;
}

TacnodalResult tacnodal_hyperplane_on_line(const SurfaceInstance& S, const LineOnSurface& l, const QVec& p,
                                           int order) {
    if (!l.exact) throw PreconditionFailed("tacnodal hyperplane needs an exact line");
    for (auto& s : S.singular)
        if (point_on_line(l, s.point)) throw PreconditionFailed("line meets the singular locus");
    auto chart = adapted_chart(S, p, &l);
    TacnodalResult out;
    out.point = p;
    out.hessian = hessian_form_at(S, p, &chart, 0, order);
    const QJet &F = out.hessian.F, &G = out.hessian.G;
    for (const QJet* J : {&F, &G})
        if (J->min_exponent(1) < 1) throw CrossCheckMismatch("aligned chart: section does not contain the line");
    Rat fxy = F.coeff(ex(1, 1)), gxy = G.coeff(ex(1, 1));
    if (is_zero(fxy) && is_zero(gxy)) throw NoDoubleRoot("restriction to the line vanishes to first order for all sections");
    Rat lam = gxy, mu = -fxy;
    QJet h = lam * F + mu * G;
    if (is_zero(h.coeff(ex(2, 1)))) throw NoDoubleRoot("restriction has a root of order > 2 at the point");
    out.root = {QSqrt(lam), QSqrt(mu)};
    auto hs = root_hyperplane(chart, out.root);
    out.hyperplane.resize(5);
    for (int j = 0; j < 5; ++j) out.hyperplane[j] = hs[j].a();
    out.germ = classify_germ<Rat>(h, true);
    return out;
}

std::array<Rat, 3> dual_plane_coords(const LineOnSurface& l, const QVec& h) {
    QMat R(2, 5);
    for (int j = 0; j < 5; ++j) {
        R(0, j) = l.a[j];
        R(1, j) = l.b[j];
    }
    auto N = R.kernel();
    QMat M(5, 4);
    for (int i = 0; i < 5; ++i) {
        for (int k = 0; k < 3; ++k) M(i, k) = N[k][i];
        M(i, 3) = h[i];
    }
    auto K = M.kernel();
    if (K.size() != 1 || is_zero(K[0][3])) throw PreconditionFailed("hyperplane does not contain the line");
    return {-K[0][0] / K[0][3], -K[0][1] / K[0][3], -K[0][2] / K[0][3]};
}

namespace {
std::array<Rat, 6> conic_monomials(const std::array<Rat, 3>& p) {
    return {p[0] * p[0], p[0] * p[1], p[0] * p[2], p[1] * p[1], p[1] * p[2], p[2] * p[2]};
}
} // namespace

std::optional<std::array<Rat, 6>> fit_conic(const std::vector<std::array<Rat, 3>>& pts) {
    if (pts.size() < 5) throw PreconditionFailed("a conic needs five points");
    QMat M(5, 6);
    for (int i = 0; i < 5; ++i) {
        auto m = conic_monomials(pts[i]);
        for (int j = 0; j < 6; ++j) M(i, j) = m[j];
    }
    auto K = M.kernel();
    if (K.size() != 1) return std::nullopt;
    std::array<Rat, 6> c;
    for (int j = 0; j < 6; ++j) c[j] = K[0][j];
    return c;
}

Rat eval_conic(const std::array<Rat, 6>& c, const std::array<Rat, 3>& p) {
    auto m = conic_monomials(p);
    Rat s = 0;
    for (int j = 0; j < 6; ++j) s += c[j] * m[j];
    return s;
}

BranchReport branch_scan(const SurfaceInstance& S, int off_line_points, std::uint64_t seed) {
    BranchReport rep;
    for (std::size_t i = 0; i < S.lines.size(); ++i) {
        LineBranchRecord rec;
        rec.line_index = static_cast<int>(i);
        const auto& l = S.lines[i];
        try {
            if (l.exact) {
                rec.exact = line_report(S, l);
                if (rec.exact->branch_mult >= 1) ++rep.branch_components;
            } else {
                rec.numeric = numeric_line_evidence(S, l);
                if (rec.numeric->branch_estimate >= 1) ++rep.branch_components;
            }
        } catch (const Error& e) {
            rec.error = e.what();
            rep.anomalies.push_back("line " + std::to_string(i) + ": " + e.what());
        }
        rep.lines.push_back(rec);
    }
    std::mt19937_64 rng(seed * 7727 + 1);
    for (int k = 0; k < off_line_points; ++k) {
        QVec p = sample_point(S, rng);
        auto h = hessian_form_at(S, p);
        ++rep.off_line_points;
        if (h.roots.size() != 2) {
            ++rep.off_line_double_roots;
            rep.anomalies.push_back("off-line point " + point_str(p) + " has a double Hessian root");
        }
    }
    return rep;
}

std::string to_string(CuspLocus c) {
    switch (c) {
    case CuspLocus::Empty: return "Empty";
    case CuspLocus::BirationalToS: return "BirationalToS";
    case CuspLocus::DoubleCoverOfS: return "DoubleCoverOfS";
    }
    return "?";
}

CuspSummary cusp_locus_summary(const SurfaceInstance& S, int points, std::uint64_t seed) {
    CuspSummary out;
    out.double_conic_pencils = double_conic_pencil_count(S.pencil);
    PointCase expect;
    switch (out.double_conic_pencils) {
    case 2: out.kind = CuspLocus::Empty; expect = PointCase::CaseI; break;
    case 1: out.kind = CuspLocus::BirationalToS; expect = PointCase::CaseII; break;
    case 0: out.kind = CuspLocus::DoubleCoverOfS; expect = PointCase::CaseIII; break;
    default: throw CrossCheckMismatch("more than two double-conic pencils");
    }
    std::mt19937_64 rng(seed * 104723 + 9);
    PointCaseOptions opt;
    opt.seed = seed;
    for (int k = 0; k < std::max(points, 3); ++k) {
        auto rep = sample_point_case(S, rng, opt);
        out.points.push_back(rep.hessian.point);
        if (rep.kind != expect)
            throw CrossCheckMismatch("point " + point_str(rep.hessian.point) + " is " + to_string(rep.kind) +
                                     ", symbol predicts " + to_string(expect));
        out.cases.push_back(std::move(rep));
    }
    return out;
}

} // namespace segre
