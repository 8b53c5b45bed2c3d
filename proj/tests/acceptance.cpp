// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "segre/cli.hpp"

using namespace segre;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream note;
    void check(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) note << "first failure: " << what;
            pass = false;
        }
    }
};

QVec e(int i) {
    QVec v(5, Rat(0));
    v[i] = 1;
    return v;
}

QMat basis(std::initializer_list<int> idx) {
    QMat V(5, 5);
    int j = 0;
    for (int i : idx) V(i, j++) = 1;
    return V;
}

SurfaceInstance surface(const std::string& sym) {
    return build_surface(normal_form(sym, NormalFormStyle::Weighted));
}

RatFunc over_x(const Rat& c, int k) {
    std::vector<Rat> d(k + 1, Rat(0));
    d[k] = 1;
    return RatFunc(UPoly(c), UPoly(d));
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

void table1(Outcome& o) {
    auto t = run_table1(table1_symbols());
    int cells = 0;
    for (auto& r : t.rows) {
        for (auto& c : r.cells) {
            ++cells;
            o.check(c.pass, r.symbol + " " + c.name + ": expected " + c.expected + ", got " + c.computed);
        }
        o.check(r.anomalies.empty(), r.symbol + " has anomalies");
    }
    // numeric lines meet the residual bound
    for (auto& sym : table1_symbols()) {
        auto S = surface(sym);
        for (auto& l : S.lines) o.check(l.residual < 1e-10, sym + " line residual " + std::to_string(l.residual));
    }
    o.note << (o.pass ? "" : "; ") << t.rows.size() << " symbols, " << cells << " cells";
}

void appendix(Outcome& o) {
    auto j = verify_appendix();
    std::vector<std::pair<int, int>> want{{2, 0}, {2, 0}, {2, 0}, {3, 0}, {3, 0}, {4, 0}, {4, 0}};
    o.check(j["appendix"].size() == want.size(), "seven records");
    std::string got;
    for (std::size_t i = 0; i < j["appendix"].size() && i < want.size(); ++i) {
        auto& r = j["appendix"][i];
        o.check(r.contains("m") && r["m"] == want[i].first && r["branch_mult"] == want[i].second,
                r["symbol"].get<std::string>());
        if (r.contains("m")) got += "(" + r["m"].dump() + "," + r["branch_mult"].dump() + ")";
    }
    o.check(report_ok(j), "appendix report status");
    // closed forms on the line through four nodes, coefficient by coefficient
    for (auto [a, b, c] : {std::array<int, 3>{1, 2, 3}, {3, 5, 7}, {2, -1, 6}}) {
        auto pc = normal_form(SegreSymbol::parse("[(11)(11)1]"), {{"a", a}, {"b", b}, {"c", c}}, NormalFormStyle::Plain);
        auto r = line_report_in_basis(pc, basis({0, 2, 4, 3, 1}), 8);
        Rat cf = Rat(a - c) / Rat(b - a), cg = Rat(c - b) / Rat(b - a), ch = Rat(4 * (a - c) * (c - b)) / Rat((b - a) * (b - a));
        for (int k = 0; k <= 8; ++k) {
            o.check(is_zero(r.F.coeff(Exps{k, 0, 0, 0}) - (k == 2 ? over_x(cf, 1) : RatFunc())), "F coefficient");
            o.check(is_zero(r.G.coeff(Exps{k, 0, 0, 0}) - (k == 2 ? RatFunc(cg) : RatFunc())), "G coefficient");
        }
        for (int k = 0; k <= 6; ++k) {
            o.check(is_zero(r.form.a.coeff(Exps{k, 0, 0, 0})), "Hess F");
            o.check(is_zero(r.form.c.coeff(Exps{k, 0, 0, 0})), "Hess G");
            o.check(is_zero(r.form.b.coeff(Exps{k, 0, 0, 0}) - (k == 2 ? over_x(ch, 3) : RatFunc())), "K coefficient");
        }
    }
    o.note << (o.pass ? "" : "; ") << "(m, bm) = " << got << ", closed forms at 3 parameter sets";
}

void simple_branch(Outcome& o) {
    std::string got;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto S = surface_through_line(seed);
        const auto& l = S.lines.at(0);
        o.check(l.exact && l.incident.empty(), "fixture line avoids Sing(S)");
        o.check(l.a == e(0) && l.b == e(1), "fixture line is the coordinate line");
        auto r = line_report(S, l);
        o.check(r.m == 0 && r.branch_mult == 1, "seed " + std::to_string(seed));
        got += " (" + std::to_string(r.m) + "," + std::to_string(r.branch_mult) + ")";
    }
    o.note << (o.pass ? "" : "; ") << "6 fixtures:" << got;
}

void trichotomy(Outcome& o) {
    const std::map<PointCase, std::vector<std::string>> groups{
        {PointCase::CaseI, {"[(11)(11)1]", "[(12)(11)]"}},
        {PointCase::CaseII, {"[111(11)]", "[12(11)]", "[11(12)]", "[1(13)]", "[(11)3]", "[(12)2]", "[(14)]"}},
        {PointCase::CaseIII, {"[11111]", "[1112]", "[113]", "[122]", "[14]", "[23]", "[5]"}}};
    const std::map<PointCase, CuspLocus> summary{{PointCase::CaseI, CuspLocus::Empty},
                                                 {PointCase::CaseII, CuspLocus::BirationalToS},
                                                 {PointCase::CaseIII, CuspLocus::DoubleCoverOfS}};
    int points = 0, mismatches = 0;
    std::mt19937_64 rng(41);
    for (auto& [kind, syms] : groups)
        for (auto& sym : syms) {
            auto S = build_surface(normal_form(SegreSymbol::parse(sym).table_name(), NormalFormStyle::Weighted));
            for (int k = 0; k < 3; ++k) {
                auto rep = sample_point_case(S, rng);
                o.check(rep.kind == kind, sym + " gave " + to_string(rep.kind));
                ++points;
            }
            try {
                auto s = cusp_locus_summary(S, 3, 5);
                o.check(s.kind == summary.at(kind), sym + " summary " + to_string(s.kind));
            } catch (const CrossCheckMismatch& ex) {
                ++mismatches;
                o.check(false, sym + ": " + ex.what());
            }
        }
    o.note << (o.pass ? "" : "; ") << points << " points on 16 symbols, " << mismatches << " cross-check mismatches";
}

void off_line(Outcome& o) {
    int total = 0;
    std::mt19937_64 rng(42);
    for (auto sym : {"[11111]", "[1112]", "[113]", "[14]", "[5]"}) {
        auto S = surface(sym);
        for (int k = 0; k < 50; ++k) {
            QVec p = sample_point(S, rng);
            bool on_line = false;
            for (auto& l : S.lines) on_line = on_line || point_on_line(l, p);
            o.check(!on_line, "sampled point on a line");
            auto h = hessian_form_at(S, p);
            o.check(h.roots.size() == 2, std::string(sym) + " double root at " + point_str(p));
            o.check(!is_zero(h.form.discriminant()), "zero discriminant");
            ++total;
        }
    }
    o.note << (o.pass ? "" : "; ") << total << " points on 5 instances";
}

void tacnodal(Outcome& o) {
    auto S = surface_through_line(1);
    const auto& l = S.lines.at(0);
    std::vector<std::array<Rat, 3>> pts;
    for (int t = 1; pts.size() < 6 && t < 40; ++t) {
        QVec p = l.point(Rat(t, 2));
        if (!is_smooth_point(S.pencil, p)) continue;
        auto tac = tacnodal_hyperplane_on_line(S, l, p);
        o.check(tac.germ.kind == GermKind::A3Tacnode, "germ " + tac.germ.str());
        o.check(tac.hessian.double_root() && same_root(tac.hessian.roots[0], tac.root), "root is the double root of H");
        pts.push_back(dual_plane_coords(l, tac.hyperplane));
    }
    o.check(pts.size() == 6, "six points");
    if (pts.size() == 6) {
        auto conic = fit_conic({pts.begin(), pts.begin() + 5});
        o.check(conic.has_value(), "conic through five points");
        if (conic) o.check(is_zero(eval_conic(*conic, pts[5])), "sixth point on the conic");
    }
    o.note << (o.pass ? "" : "; ") << pts.size() << " tacnodal hyperplanes, conic fit on 5, 6th verified";
}

void properties(Outcome& o) {
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<int> c(-3, 3);
    // congruence invariance
    int cong = 0;
    for (int i = 0; i < 100; ++i) {
        const auto& t = table1_symbols()[i % 16];
        auto pc = normal_form(t);
        QMat A(5, 5);
        do {
            for (int r = 0; r < 5; ++r)
                for (int s = 0; s < 5; ++s) A(r, s) = Rat(c(rng));
        } while (is_zero(A.det()));
        auto moved = make_pencil(A.transpose() * pc.P * A, A.transpose() * pc.Q * A);
        o.check(segre_symbol(moved).table_name() == t, "congruence " + t);
        ++cong;
    }
    // chart independence: 3 charts x 5 points
    int charts = 0;
    auto S = surface("[11111]");
    auto T = surface("[12(11)]");
    for (int k = 0; k < 5; ++k) {
        const SurfaceInstance& X = k < 3 ? S : T;
        QVec p = sample_point(X, rng);
        PointCaseOptions opt;
        auto base = point_case(X, p, opt);
        for (int v = 1; v < 3; ++v) {
            opt.variant = v;
            auto rep = point_case(X, p, opt);
            o.check(rep.kind == base.kind, "case differs between charts");
            std::multiset<int> a, b;
            for (auto& g : rep.classes) a.insert(static_cast<int>(g.kind));
            for (auto& g : base.classes) b.insert(static_cast<int>(g.kind));
            o.check(a == b, "section classes differ between charts");
            for (auto& h : rep.hyperplanes) {
                bool found = false;
                for (auto& g : base.hyperplanes) found = found || proportional(h, g);
                o.check(found, "root hyperplane differs between charts");
            }
        }
        charts += 3;
    }
    // Hensel re-lift: order N and N + 2 agree through N, pointwise and along lines
    int relift = 0;
    for (int k = 0; k < 5; ++k) {
        auto ch = adapted_chart(S, sample_point(S, rng));
        auto s8 = hensel_solve_pair<Rat>(ch.q1, ch.q2, 8);
        auto s10 = hensel_solve_pair<Rat>(ch.q1, ch.q2, 10);
        o.check(s10.first.agrees_with(s8.first, 8) && s10.second.agrees_with(s8.second, 8), "point re-lift");
        ++relift;
    }
    for (int i = 0; i < 3; ++i) {
        auto r8 = line_report(S, S.lines[i], {8, 8, 0});
        auto r10 = line_report_in_basis(S.pencil, r8.V, 10);
        for (int k = 0; k <= 8; ++k) {
            o.check(is_zero(r8.F.coeff(Exps{k, 0, 0, 0}) - r10.F.coeff(Exps{k, 0, 0, 0})), "line re-lift F");
            o.check(is_zero(r8.G.coeff(Exps{k, 0, 0, 0}) - r10.G.coeff(Exps{k, 0, 0, 0})), "line re-lift G");
        }
        ++relift;
    }
    // y_order multiplicativity over Q(x)
    int yo = 0;
    std::uniform_int_distribution<int> val(0, 4);
    auto rnd_rf = [&] {
        UPoly n(std::vector<Rat>{Rat(c(rng)), Rat(c(rng)), Rat(c(rng))});
        if (n.zero()) n = UPoly(1);
        return RatFunc(n, UPoly(std::vector<Rat>{Rat(1 + std::abs(c(rng))), Rat(1)}));
    };
    for (int i = 0; i < 100; ++i) {
        auto jet = [&] {
            RJet j(1, 12);
            int v = val(rng);
            j.set(Exps{v, 0, 0, 0}, rnd_rf());
            for (int k = v + 1; k <= 12; ++k)
                if (c(rng) > 0) j.set(Exps{k, 0, 0, 0}, rnd_rf());
            return j;
        };
        RJet f = jet(), g = jet();
        auto of = y_order(f), og = y_order(g), ofg = y_order(f * g);
        o.check(!ofg.infinite && ofg.value == of.value + og.value, "y_order(f g)");
        ++yo;
    }
    o.note << (o.pass ? "" : "; ") << cong << " congruences, " << charts << " chart checks, " << relift
           << " re-lifts, " << yo << " y_order pairs";
}

void smooth_branch(Outcome& o) {
    auto S = surface("[11111]");
    auto br = branch_scan(S, 10, 44);
    o.check(br.branch_components == 16, "component count " + std::to_string(br.branch_components));
    o.check(br.lines.size() == 16, "16 lines");
    for (auto& r : br.lines) {
        o.check(r.exact.has_value(), "exact line report");
        if (r.exact) o.check(r.exact->m == 0 && r.exact->branch_mult == 1, "line with bm != 1");
    }
    o.check(br.off_line_double_roots == 0, "off-line double root");
    o.check(br.anomalies.empty(), "anomalies");
    o.note << (o.pass ? "" : "; ") << br.branch_components << " components, each a line with branch_mult 1";
}

} // namespace

int main() {
    std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"reference table regression", table1},
        {"fixed-chart line regression", appendix},
        {"simple branch on lines away from Sing(S)", simple_branch},
        {"point-case trichotomy", trichotomy},
        {"no off-line double roots", off_line},
        {"tacnodal conic", tacnodal},
        {"property suites", properties},
        {"smooth case branch components", smooth_branch},
    };
    int failed = 0, n = 0;
    for (auto& [name, fn] : criteria) {
        ++n;
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            fn(o);
        } catch (const std::exception& ex) {
            o.check(false, std::string("exception: ") + ex.what());
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << n << " " << name << ": " << o.note.str() << " ("
                  << static_cast<int>(dt + 0.5) << " s)" << std::endl;
    }
    return failed ? 1 : 0;
}
