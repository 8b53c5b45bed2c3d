#include <gtest/gtest.h>

#include <map>
#include <random>

#include "segre/cusplocus.hpp"

using namespace segre;

namespace {

QVec e(int i) {
    QVec v(5, Rat(0));
    v[i] = 1;
    return v;
}

QMat basis(std::initializer_list<QVec> cols) {
    QMat V(5, 5);
    int j = 0;
    for (auto& c : cols) {
        for (int i = 0; i < 5; ++i) V(i, j) = c[i];
        ++j;
    }
    return V;
}

QuadricPencil plain(const std::string& sym, std::map<std::string, Rat> p) {
    return normal_form(SegreSymbol::parse(sym), p, NormalFormStyle::Plain);
}

RatFunc over_x(const Rat& c, int k) {
    std::vector<Rat> d(k + 1, Rat(0));
    d[k] = 1;
    return RatFunc(UPoly(c), UPoly(d));
}

RatFunc ycoef(const RJet& J, int k) { return J.coeff(Exps{k, 0, 0, 0}); }

// Literal charts: line = v0 + x v1, y along v2, z and w along v3 and v4.
struct LiteralCase {
    std::string symbol;
    std::map<std::string, Rat> params;
    QMat V;
    int m, bm;
    int f_order, g_order;
    int hyper_coord;  // coordinate hyperplane cutting a multiple of the line, -1 if none
    int hyper_mult;
};

std::vector<LiteralCase> literal_cases() {
    auto abc = std::map<std::string, Rat>{{"a", 3}, {"b", 5}, {"c", 7}};
    auto ab = std::map<std::string, Rat>{{"a", 3}, {"b", 5}};
    QMat V02 = basis({e(0), e(2), e(4), e(3), e(1)});
    QMat V03 = basis({e(0), e(3), e(1), e(4), e(2)});
    return {
        {"[(11)(11)1]", abc, V02, 2, 0, 2, 2, -1, 0},
        {"[2(11)1]", abc, V02, 2, 0, 2, 2, -1, 0},
        {"[221]", abc, V02, 2, 0, 2, 2, -1, 0},
        {"[3(11)]", ab, V03, 3, 0, 3, 2, 4, 3},
        {"[32]", ab, V03, 3, 0, 3, 2, 4, 3},
        {"[(21)(11)]", ab, basis({e(0), e(3), e(2), e(4), e(1)}), 4, 0, 4, 2, 4, 4},
        {"[2(21)]", ab, basis({e(2), e(0), e(4), e(1), e(3)}), 4, 0, 4, 2, 1, 4},
    };
}

bool proportional(const std::vector<QSqrt>& a, const std::vector<QSqrt>& b) {
    try {
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = i + 1; j < a.size(); ++j)
                if (!is_zero(a[i] * b[j] - a[j] * b[i])) return false;
    } catch (const FieldMismatch&) {
        return false;
    }
    return true;
}

PointCase expected_case(const std::string& sym) {
    static const std::map<std::string, PointCase> t{
        {"[11111]", PointCase::CaseIII},   {"[1112]", PointCase::CaseIII},   {"[111(11)]", PointCase::CaseII},
        {"[12(11)]", PointCase::CaseII},   {"[1(11)(11)]", PointCase::CaseI}, {"[113]", PointCase::CaseIII},
        {"[122]", PointCase::CaseIII},     {"[11(12)]", PointCase::CaseII},  {"[14]", PointCase::CaseIII},
        {"[1(13)]", PointCase::CaseII},    {"[(11)3]", PointCase::CaseII},   {"[(12)2]", PointCase::CaseII},
        {"[(11)(12)]", PointCase::CaseI},  {"[(14)]", PointCase::CaseII},    {"[23]", PointCase::CaseIII},
        {"[5]", PointCase::CaseIII}};
    return t.at(sym);
}

SurfaceInstance surface(const std::string& sym) {
    SurfaceOptions o;
    o.starts_per_chart = 150;
    return build_surface(normal_form(sym, NormalFormStyle::Weighted), o);
}

} // namespace

TEST(CuspLocus, BinaryRoots) {
    EXPECT_TRUE(binary_roots({Rat(0), Rat(0), Rat(0)}).empty());
    auto d = binary_roots({Rat(1), Rat(2), Rat(1)});
    ASSERT_EQ(d.size(), 1u);
    EXPECT_TRUE(same_root(d[0], {QSqrt(-1), QSqrt(1)}));
    auto r = binary_roots({Rat(1), Rat(0), Rat(-8)});
    ASSERT_EQ(r.size(), 2u);
    for (auto& x : r) {
        EXPECT_FALSE(x.rational());
        QSqrt v = x.lambda * x.lambda - QSqrt(8) * x.mu * x.mu;
        EXPECT_TRUE(is_zero(v));
    }
    EXPECT_FALSE(same_root(r[0], r[1]));
}

TEST(CuspLocus, ClosedFormsOnLineThroughFourNodes) {
    for (auto [a, b, c] : {std::array<int, 3>{1, 2, 3}, {3, 5, 7}, {-2, 4, 9}}) {
        auto pc = plain("[(11)(11)1]", {{"a", a}, {"b", b}, {"c", c}});
        auto r = line_report_in_basis(pc, basis({e(0), e(2), e(4), e(3), e(1)}), 8);
        Rat cf = Rat(a - c) / Rat(b - a), cg = Rat(c - b) / Rat(b - a);
        Rat ck = Rat(4 * (a - c) * (c - b)) / Rat((b - a) * (b - a));
        for (int k = 0; k <= 8; ++k) {
            EXPECT_TRUE(is_zero(ycoef(r.F, k) - (k == 2 ? over_x(cf, 1) : RatFunc()))) << k;
            EXPECT_TRUE(is_zero(ycoef(r.G, k) - (k == 2 ? RatFunc(cg) : RatFunc()))) << k;
        }
        for (int k = 0; k <= 6; ++k) {
            EXPECT_TRUE(is_zero(ycoef(r.form.a, k)));
            EXPECT_TRUE(is_zero(ycoef(r.form.c, k)));
            EXPECT_TRUE(is_zero(ycoef(r.form.b, k) - (k == 2 ? over_x(ck, 3) : RatFunc()))) << k;
        }
        EXPECT_EQ(r.m, 2);
        EXPECT_EQ(r.branch_mult, 0);
    }
}

TEST(CuspLocus, ClosedFormsOnLineThroughCusp) {
    Rat al = 3, be = 5, dl = al - be;
    auto pc = plain("[3(11)]", {{"a", al}, {"b", be}});
    const int N = 10;
    auto r = line_report_in_basis(pc, basis({e(0), e(3), e(1), e(4), e(2)}), N);
    // F = -y^3 / (x (y + d)), x2 = -(1/2) d y^2 / (y + d)
    Rat s = 1;
    for (int k = 0; k + 3 <= N; ++k, s *= Rat(-1) / dl)
        EXPECT_TRUE(is_zero(ycoef(r.F, k + 3) - over_x(-s / dl, 1))) << k;
    s = 1;
    for (int k = 0; k + 2 <= N; ++k, s *= Rat(-1) / dl) EXPECT_TRUE(is_zero(ycoef(r.G, k + 2) - RatFunc(-s / 2))) << k;
    for (int k = 0; k < 2; ++k) EXPECT_TRUE(is_zero(ycoef(r.G, k)));
}

TEST(CuspLocus, LiteralChartMultiplicities) {
    for (auto& c : literal_cases()) {
        auto pc = plain(c.symbol, c.params);
        HessianAlongLine r;
        for (int N = 8;; N *= 2) {
            try {
                r = line_report_in_basis(pc, c.V, N);
                break;
            } catch (const TruncationInsufficient&) {
                ASSERT_LE(N, 16) << c.symbol;
            }
        }
        EXPECT_EQ(r.m, c.m) << c.symbol;
        EXPECT_EQ(r.branch_mult, c.bm) << c.symbol;
        EXPECT_EQ(y_order(r.F).value, c.f_order) << c.symbol;
        EXPECT_EQ(y_order(r.G).value, c.g_order) << c.symbol;
    }
}

TEST(CuspLocus, HyperplaneCutsMultipleLine) {
    for (auto& c : literal_cases()) {
        if (c.hyper_coord < 0) continue;
        auto S = build_surface(plain(c.symbol, c.params));
        LineOnSurface l;
        for (int i = 0; i < 5; ++i) {
            l.a.push_back(c.V(i, 0));
            l.b.push_back(c.V(i, 1));
        }
        ASSERT_TRUE(line_on_surface(S.pencil, l.a, l.b));
        QVec p = l.point(Rat(2));
        auto g = classify_section_germ(S, p, e(c.hyper_coord), &l);
        EXPECT_EQ(g.kind, GermKind::NonReducedLineMultiple) << c.symbol << " " << g.str();
        EXPECT_EQ(g.k, c.hyper_mult) << c.symbol;
    }
}

TEST(CuspLocus, LineGraphRoutesAgree) {
    auto pc = plain("[(11)(11)1]", {{"a", 3}, {"b", 5}, {"c", 7}});
    QMat V = basis({e(0), e(2), e(4), e(3), e(1)});
    auto S = surface("[11111]");
    // the literal line needs order 8 before its discriminant shows up
    std::vector<std::tuple<QuadricPencil, QMat, int>> cases{{pc, V, 8}};
    for (int i = 0; i < 2; ++i) {
        auto r = line_report(S, S.lines[i], {4, 4, 0});
        cases.push_back({S.pencil, r.V, 5});
    }
    for (auto& [P, W, N] : cases) {
        auto fast = line_report_in_basis(P, W, N);
        auto [F, G] = line_graph_by_hensel(P, W, N);
        for (int k = 0; k <= N; ++k) {
            EXPECT_TRUE(is_zero(ycoef(fast.F, k) - F.coeff(Exps{k, 0, 0, 0}))) << k;
            EXPECT_TRUE(is_zero(ycoef(fast.G, k) - G.coeff(Exps{k, 0, 0, 0}))) << k;
        }
    }
}

TEST(CuspLocus, HessianAtPointMatchesClosedForm) {
    // alpha, beta, gamma = 1, 2, 3; the point (x, y) = (1, 1) of the literal chart
    auto S = build_surface(plain("[(11)(11)1]", {{"a", 1}, {"b", 2}, {"c", 3}}));
    QVec p{Rat(1), Rat(1), Rat(1), Rat(-2), Rat(1)};
    ASSERT_TRUE(on_surface(S.pencil, p));
    // F = -2 y^2 / x, G = y^2: tangent directions carry the first derivatives
    QVec vx = e(2), vy = e(4);
    vx[3] = 2;
    vy[3] = -4;
    vy[1] = 2;
    auto chart = chart_from_basis(S.pencil, basis({p, vx, vy, e(3), e(1)}), false);
    auto h = hessian_form_at(S, p, &chart);
    EXPECT_EQ(h.form.a, Rat(0));
    EXPECT_EQ(h.form.b, Rat(-8));
    EXPECT_EQ(h.form.c, Rat(0));
    ASSERT_EQ(h.roots.size(), 2u);
}

TEST(CuspLocus, Trichotomy) {
    std::mt19937_64 rng(21);
    for (auto& sym : table1_symbols()) {
        auto S = surface(sym);
        for (int k = 0; k < 3; ++k) {
            auto rep = sample_point_case(S, rng);
            EXPECT_EQ(rep.kind, expected_case(sym)) << sym;
            int squares = 0, cusps = 0;
            for (auto& c : rep.classes) {
                squares += c.kind == GermKind::PerfectSquare;
                cusps += c.kind == GermKind::A2Cusp;
            }
            switch (rep.kind) {
            case PointCase::CaseI:
                EXPECT_EQ(squares, 2) << sym;
                EXPECT_TRUE(rep.hessian.roots.size() == 2);
                break;
            case PointCase::CaseII:
                EXPECT_EQ(squares, 1) << sym;
                EXPECT_EQ(cusps, 1) << sym << " " << rep.classes[0].str() << " " << rep.classes[1].str();
                break;
            case PointCase::CaseIII:
                EXPECT_EQ(cusps, 2) << sym;
                break;
            }
            EXPECT_EQ(rep.square_checks, 2 * squares) << sym;
        }
    }
}

TEST(CuspLocus, ChartIndependence) {
    std::mt19937_64 rng(22);
    for (auto sym : {"[11111]", "[12(11)]", "[(11)(12)]"}) {
        auto S = surface(sym);
        for (int k = 0; k < 2; ++k) {
            QVec p = sample_point(S, rng);
            PointCaseOptions o;
            auto base = point_case(S, p, o);
            for (int v = 1; v < 3; ++v) {
                o.variant = v;
                auto rep = point_case(S, p, o);
                EXPECT_EQ(rep.kind, base.kind) << sym;
                ASSERT_EQ(rep.hyperplanes.size(), base.hyperplanes.size());
                for (auto& h : rep.hyperplanes) {
                    bool found = false;
                    for (auto& g : base.hyperplanes) found = found || proportional(h, g);
                    EXPECT_TRUE(found) << sym << " variant " << v;
                }
            }
        }
    }
}

TEST(CuspLocus, CuspRootsAgreeWithDirectCheck) {
    // Independent check of the cusp roots: the quadratic part of the section
    // is a square and its cubic part does not vanish on the square's kernel.
    std::mt19937_64 rng(23);
    auto S = surface("[11111]");
    for (int k = 0; k < 3; ++k) {
        auto h = hessian_form_at(S, sample_point(S, rng));
        ASSERT_EQ(h.roots.size(), 2u);
        for (auto& r : h.roots) {
            auto F = h.F.convert<QSqrt>([](const Rat& c) { return QSqrt(c); });
            auto G = h.G.convert<QSqrt>([](const Rat& c) { return QSqrt(c); });
            auto s = r.lambda * F + r.mu * G;
            QSqrt a = s.coeff(Exps{2, 0, 0, 0}), b = s.coeff(Exps{1, 1, 0, 0}), c = s.coeff(Exps{0, 2, 0, 0});
            EXPECT_TRUE(is_zero(b * b - QSqrt(4) * a * c));
            // kernel direction (u, v) of the square
            QSqrt u = is_zero(a) ? QSqrt(1) : -b, v = is_zero(a) ? QSqrt(0) : QSqrt(2) * a;
            QSqrt cubic = s.coeff(Exps{3, 0, 0, 0}) * u * u * u + s.coeff(Exps{2, 1, 0, 0}) * u * u * v +
                          s.coeff(Exps{1, 2, 0, 0}) * u * v * v + s.coeff(Exps{0, 3, 0, 0}) * v * v * v;
            EXPECT_FALSE(is_zero(cubic));
            EXPECT_EQ(classify_root_section(h, r).kind, GermKind::A2Cusp);
        }
    }
}

TEST(CuspLocus, GenericTangentSectionIsNode) {
    std::mt19937_64 rng(24);
    auto S = surface("[11111]");
    auto h = hessian_form_at(S, sample_point(S, rng));
    int checked = 0;
    for (int k = 1; checked < 3; ++k) {
        DualRoot r{QSqrt(1), QSqrt(k)};
        bool is_root = false;
        for (auto& x : h.roots) is_root = is_root || same_root(x, r);
        if (is_root) continue;
        EXPECT_EQ(classify_root_section(h, r).kind, GermKind::A1Node);
        ++checked;
    }
}

TEST(CuspLocus, OffLinePointsHaveDistinctRoots) {
    std::mt19937_64 rng(25);
    for (auto sym : {"[11111]", "[113]", "[5]"}) {
        auto S = surface(sym);
        for (int k = 0; k < 10; ++k) {
            auto h = hessian_form_at(S, sample_point(S, rng));
            EXPECT_EQ(h.roots.size(), 2u) << sym;
        }
    }
}

TEST(CuspLocus, TacnodalHyperplanesLieOnConic) {
    for (auto sym : {"[11111]", "[1112]"}) {
        auto S = surface(sym);
        const LineOnSurface* l = nullptr;
        for (auto& x : S.lines)
            if (x.exact && x.incident.empty()) l = &x;
        ASSERT_NE(l, nullptr) << sym;
        std::vector<std::array<Rat, 3>> pts;
        for (int t = 1; pts.size() < 7 && t < 30; ++t) {
            QVec p = l->point(Rat(t, 3));
            if (!is_smooth_point(S.pencil, p)) continue;
            auto tac = tacnodal_hyperplane_on_line(S, *l, p);
            EXPECT_EQ(tac.germ.kind, GermKind::A3Tacnode) << sym << " " << tac.germ.str();
            // along the line the Hessian form degenerates to a square
            ASSERT_TRUE(tac.hessian.double_root()) << sym;
            EXPECT_TRUE(same_root(tac.hessian.roots[0], tac.root)) << sym;
            pts.push_back(dual_plane_coords(*l, tac.hyperplane));
        }
        ASSERT_EQ(pts.size(), 7u);
        auto conic = fit_conic({pts.begin(), pts.begin() + 5});
        ASSERT_TRUE(conic.has_value());
        EXPECT_EQ(eval_conic(*conic, pts[5]), Rat(0)) << sym;
        EXPECT_EQ(eval_conic(*conic, pts[6]), Rat(0)) << sym;
    }
}

TEST(CuspLocus, BasePointIndependence) {
    for (auto sym : {"[122]", "[(12)2]", "[5]"}) {
        auto S = surface(sym);
        for (auto& l : S.lines) {
            if (!l.exact) continue;
            auto r0 = line_report(S, l);
            for (int b = 1; b < 3; ++b) {
                auto r = line_report(S, l, {8, 32, b});
                EXPECT_NE(r.base_param, r0.base_param);
                EXPECT_EQ(r.m, r0.m) << sym;
                EXPECT_EQ(r.branch_mult, r0.branch_mult) << sym;
            }
        }
    }
}

TEST(CuspLocus, LinesAwayFromSingularitiesAreSimpleBranches) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto S = surface_through_line(seed);
        const auto& l = S.lines[0];
        ASSERT_TRUE(l.incident.empty());
        auto r = line_report(S, l);
        EXPECT_EQ(r.m, 0) << seed;
        EXPECT_EQ(r.branch_mult, 1) << seed;
    }
}

TEST(CuspLocus, SmoothSegreBranchScan) {
    auto S = surface("[11111]");
    auto br = branch_scan(S, 5, 3);
    EXPECT_EQ(br.branch_components, 16);
    EXPECT_EQ(br.off_line_double_roots, 0);
    EXPECT_TRUE(br.anomalies.empty());
    for (auto& r : br.lines) {
        ASSERT_TRUE(r.exact.has_value());
        EXPECT_EQ(r.exact->m, 0);
        EXPECT_EQ(r.exact->branch_mult, 1);
    }
}

TEST(CuspLocus, NumericEvidenceMatchesExactLines) {
    for (auto sym : {"[11111]", "[113]", "[14]", "[(11)3]"}) {
        auto S = surface(sym);
        for (auto& l : S.lines) {
            if (!l.exact) continue;
            auto r = line_report(S, l);
            auto ev = numeric_line_evidence(S, l);
            EXPECT_EQ(ev.m_estimate, r.m) << sym;
            EXPECT_EQ(ev.branch_estimate, r.branch_mult) << sym;
        }
    }
}

TEST(CuspLocus, NumericLinesGiveEvidence) {
    auto S = surface("[1(13)]");
    int numeric = 0;
    for (auto& l : S.lines) {
        if (l.exact) continue;
        ++numeric;
        auto ev = numeric_line_evidence(S, l);
        EXPECT_LT(ev.residual, 1e-9);
        EXPECT_GE(ev.m_estimate, 0);
        EXPECT_GE(ev.branch_estimate, 0);
    }
    EXPECT_EQ(numeric + S.exact_line_count(), 2);
}

TEST(CuspLocus, Summary) {
    for (auto [sym, kind] : std::vector<std::pair<std::string, CuspLocus>>{{"[11111]", CuspLocus::DoubleCoverOfS},
                                                                          {"[111(11)]", CuspLocus::BirationalToS},
                                                                          {"[1(11)(11)]", CuspLocus::Empty}}) {
        auto s = cusp_locus_summary(surface(sym), 3, 5);
        EXPECT_EQ(s.kind, kind) << sym;
        EXPECT_EQ(s.cases.size(), 3u);
    }
}
