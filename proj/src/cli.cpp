#include "segre/cli.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "segre/table1_fixture.hpp"

namespace segre {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
    throw ParseError(where + ": " + msg);
}

Rat json_rat(const Json& v, const std::string& where) {
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const ParseError& e) {
            bad(where, e.what());
        }
    }
    if (v.is_number_integer()) return Rat(v.get<long>());
    bad(where, "expected a rational string \"p/q\"");
}

QMat json_matrix(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 5) bad(where, "expected a 5x5 array");
    QMat M(5, 5);
    for (int i = 0; i < 5; ++i) {
        if (!v[i].is_array() || v[i].size() != 5) bad(where, "row " + std::to_string(i) + " must have 5 entries");
        for (int j = 0; j < 5; ++j)
            M(i, j) = json_rat(v[i][j], where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            if (M(i, j) != M(j, i))
                bad(where, "not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    return M;
}

std::string dec(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

std::string cplx_str(const Cplx& z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e%+.12ei", z.real(), z.imag());
    return buf;
}

std::string ds_name(CuspLocus k) {
    switch (k) {
    case CuspLocus::DoubleCoverOfS: return "irreducible";
    case CuspLocus::BirationalToS: return "reducible";
    case CuspLocus::Empty: return "empty";
    }
    return "?";
}

Json yorder_json(const YOrder& y) {
    if (y.infinite) return Json{{"vanishes_through", y.known_to}};
    return Json(y.value);
}

Json series_json(const RJet& J, int order) {
    Json a = Json::array();
    for (int k = 0; k <= order; ++k) a.push_back(J.coeff(Exps{k, 0, 0, 0}).str());
    return a;
}

Json hessian_json(const HessianAtPoint& h) {
    Json roots = Json::array();
    for (auto& r : h.roots) roots.push_back(r.str());
    return {{"form", {rat_json(h.form.a), rat_json(h.form.b), rat_json(h.form.c)}}, {"roots", roots}};
}

Json case_json(const PointCaseReport& r) {
    Json hs = Json::array();
    for (auto& h : r.hyperplanes) {
        Json v = Json::array();
        for (auto& c : h) v.push_back(c.str());
        hs.push_back(v);
    }
    return {{"point", point_json(r.hessian.point)},
            {"case", to_string(r.kind)},
            {"hessian", hessian_json(r.hessian)},
            {"classes", {r.classes[0].str(), r.classes[1].str()}},
            {"hyperplanes", hs},
            {"square_checks", r.square_checks}};
}

Json branch_json(const LineBranchRecord& r) {
    Json j;
    if (r.exact) {
        j["m"] = r.exact->m;
        j["branch_mult"] = r.exact->branch_mult;
        j["order"] = r.exact->order;
    }
    if (r.numeric) {
        j["m_estimate"] = r.numeric->m_estimate;
        j["branch_estimate"] = r.numeric->branch_estimate;
    }
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

QMat basis_matrix(const std::array<int, 5>& idx) {
    QMat V(5, 5);
    for (int j = 0; j < 5; ++j) V(idx[j], j) = 1;
    return V;
}

HessianAlongLine escalate(const QuadricPencil& pc, const QMat& V, int order) {
    for (int N = std::max(order, 3);; N *= 2) {
        try {
            return line_report_in_basis(pc, V, N);
        } catch (const TruncationInsufficient&) {
            if (N * 2 > 32) throw;
        }
    }
}

// F, G and H against the closed forms for the line through four nodes.
Json closed_form_check(const AppendixCase& c, const HessianAlongLine& r) {
    Rat a = c.params.at("a"), b = c.params.at("b"), g = c.params.at("c");
    auto over_x = [](const Rat& k, int e) {
        std::vector<Rat> d(e + 1, Rat(0));
        d[e] = 1;
        return RatFunc(UPoly(k), UPoly(d));
    };
    RatFunc f2 = over_x((a - g) / (b - a), 1), g2((g - b) / (b - a));
    RatFunc h2 = over_x(4 * (a - g) * (g - b) / ((b - a) * (b - a)), 3);
    auto coef = [](const RJet& J, int k) { return J.coeff(Exps{k, 0, 0, 0}); };
    bool okF = true, okG = true, okH = true;
    for (int k = 0; k <= r.order; ++k) {
        okF = okF && is_zero(coef(r.F, k) - (k == 2 ? f2 : RatFunc()));
        okG = okG && is_zero(coef(r.G, k) - (k == 2 ? g2 : RatFunc()));
    }
    for (int k = 0; k <= r.order - 2; ++k) {
        okH = okH && is_zero(coef(r.form.a, k)) && is_zero(coef(r.form.c, k));
        okH = okH && is_zero(coef(r.form.b, k) - (k == 2 ? h2 : RatFunc()));
    }
    auto st = [](bool b) { return b ? "PASS" : "FAIL"; };
    return {{"F", {{"expected", "y^2 * " + f2.str()}, {"status", st(okF)}}},
            {"G", {{"expected", "y^2 * " + g2.str()}, {"status", st(okG)}}},
            {"H", {{"expected", "lambda mu y^2 * " + h2.str()}, {"status", st(okH)}}}};
}

} // namespace

SurfaceConfig parse_surface_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
    }
    if (!j.is_object()) bad("config", "expected a JSON object");
    for (auto& [k, v] : j.items())
        if (k != "symbol" && k != "params" && k != "quadrics" && k != "style" && k != "options")
            bad("config", "unknown key \"" + k + "\"");
    SurfaceConfig cfg;
    cfg.echo = j;
    if (j.contains("symbol") == j.contains("quadrics")) bad("config", "give exactly one of \"symbol\" and \"quadrics\"");
    if (j.contains("symbol")) {
        if (!j["symbol"].is_string()) bad("symbol", "expected a string");
        cfg.symbol = j["symbol"].get<std::string>();
        try {
            SegreSymbol::parse(*cfg.symbol);
        } catch (const Error& e) {
            bad("symbol", e.what());
        }
        if (j.contains("params")) {
            if (!j["params"].is_object()) bad("params", "expected an object");
            for (auto& [k, v] : j["params"].items()) cfg.params[k] = json_rat(v, "params." + k);
        }
        cfg.style = cfg.params.empty() ? NormalFormStyle::Weighted : NormalFormStyle::Plain;
    } else {
        if (j.contains("params")) bad("params", "only allowed together with \"symbol\"");
        const Json& q = j["quadrics"];
        if (!q.is_array() || q.size() != 2) bad("quadrics", "expected two 5x5 matrices");
        cfg.quadrics = std::make_pair(json_matrix(q[0], "quadrics[0]"), json_matrix(q[1], "quadrics[1]"));
    }
    if (j.contains("style")) {
        std::string s = j["style"].is_string() ? j["style"].get<std::string>() : "";
        if (s == "plain") cfg.style = NormalFormStyle::Plain;
        else if (s == "weighted") cfg.style = NormalFormStyle::Weighted;
        else bad("style", "expected \"plain\" or \"weighted\"");
    }
    if (j.contains("options")) {
        const Json& o = j["options"];
        if (!o.is_object()) bad("options", "expected an object");
        for (auto& [k, v] : o.items()) {
            if (k == "order" && v.is_number_integer() && v.get<int>() >= 3) cfg.order = v.get<int>();
            else if (k == "seed" && v.is_number_unsigned()) cfg.seed = v.get<std::uint64_t>();
            else if (k == "tolerance" && v.is_number() && v.get<double>() > 0) cfg.tolerance = v.get<double>();
            else bad("options." + k, "unknown option or bad value");
        }
    }
    return cfg;
}

SurfaceConfig read_surface_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_surface_config(ss.str());
}

QuadricPencil config_pencil(const SurfaceConfig& cfg) {
    QuadricPencil pc;
    std::optional<SegreSymbol> wanted;
    try {
        if (cfg.symbol) {
            wanted = SegreSymbol::parse(*cfg.symbol);
            if (wanted->total() != 5) throw ValidationError("symbol " + *cfg.symbol + " does not describe a pencil in CP4");
            auto params = default_params(*wanted);
            for (auto& [k, v] : cfg.params) {
                if (!params.count(k)) throw ValidationError("unknown parameter \"" + k + "\"");
                params[k] = v;
            }
            pc = normal_form(*wanted, params, cfg.style);
        } else {
            pc = make_pencil(cfg.quadrics->first, cfg.quadrics->second);
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(e.what());
    }
    auto rep = validate_segre(pc);
    if (!rep.ok()) {
        std::string msg;
        for (auto& f : rep.failures) msg += (msg.empty() ? "" : "; ") + f;
        throw ValidationError(msg);
    }
    if (wanted && *rep.symbol != *wanted)
        throw ValidationError("parameters give symbol " + rep.symbol->str() + " instead of " + wanted->str());
    pc.symbol = rep.symbol;
    return pc;
}

SurfaceInstance build_from_config(const SurfaceConfig& cfg) {
    SurfaceOptions o;
    o.order = cfg.order;
    o.seed = cfg.seed;
    o.tolerance = cfg.tolerance;
    return build_surface(config_pencil(cfg), o);
}

SurfaceInstance load_surface_config(const std::string& path) { return build_from_config(read_surface_config(path)); }

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

Json rat_json(const Rat& r) { return r.get_str(); }

Json point_json(const QVec& p) {
    Json a = Json::array();
    for (auto& x : normalize_point(p)) a.push_back(rat_json(x));
    return a;
}

Json line_json(const LineOnSurface& l) {
    Json j{{"exact", l.exact}, {"incident", l.incident}};
    if (l.exact) {
        j["points"] = {point_json(l.a), point_json(l.b)};
    } else {
        Json a = Json::array(), b = Json::array();
        for (auto& z : l.na) a.push_back(cplx_str(z));
        for (auto& z : l.nb) b.push_back(cplx_str(z));
        j["numeric"] = {{"a", a}, {"b", b}, {"residual", dec(l.residual)}};
    }
    return j;
}

Json surface_report(const SurfaceInstance& S, const SurfaceConfig& cfg, int points) {
    Json r;
    r["schema_version"] = kSchemaVersion;
    r["input"] = cfg.echo;
    r["symbol"] = S.pencil.symbol ? S.pencil.symbol->table_name() : segre_symbol(S.pencil).table_name();
    Json sing = Json::array();
    std::vector<ADEClass> types;
    for (auto& s : S.singular) {
        sing.push_back({{"point", point_json(s.point)}, {"type", s.type.str()}});
        types.push_back(s.type);
    }
    r["singularities"] = sing;
    r["singularity_multiset"] = ade_multiset_str(types);
    r["line_counts"] = {{"n0", S.counts.n0}, {"n1", S.counts.n1}, {"n2", S.counts.n2}};
    Json anomalies = Json::array();
    for (auto& a : S.anomalies) anomalies.push_back(a);
    auto br = branch_scan(S, 10, cfg.seed);
    Json lines = Json::array();
    for (std::size_t i = 0; i < S.lines.size(); ++i) {
        Json l = line_json(S.lines[i]);
        for (auto& rec : br.lines)
            if (rec.line_index == static_cast<int>(i)) l["branch"] = branch_json(rec);
        lines.push_back(l);
    }
    r["lines"] = lines;
    r["branch"] = {{"components", br.branch_components},
                   {"off_line_points", br.off_line_points},
                   {"off_line_double_roots", br.off_line_double_roots}};
    for (auto& a : br.anomalies) anomalies.push_back(a);
    r["double_conic_pencils"] = double_conic_pencil_count(S.pencil);
    try {
        auto cs = cusp_locus_summary(S, points, cfg.seed);
        Json cases = Json::array();
        for (auto& c : cs.cases) cases.push_back(case_json(c));
        r["point_cases"] = cases;
        r["cusp_locus_summary"] = {{"kind", to_string(cs.kind)}, {"d_s", ds_name(cs.kind)}};
    } catch (const Error& e) {
        anomalies.push_back(std::string("point cases: ") + e.what());
        r["point_cases"] = Json::array();
    }
    r["anomalies"] = anomalies;
    return r;
}

Json line_report_json(const SurfaceInstance& S, const SurfaceConfig& cfg, int line_index) {
    if (line_index < 0 || line_index >= static_cast<int>(S.lines.size()))
        throw PreconditionFailed("line index " + std::to_string(line_index) + " out of range (" +
                                 std::to_string(S.lines.size()) + " lines)");
    const auto& l = S.lines[line_index];
    Json r;
    r["schema_version"] = kSchemaVersion;
    r["input"] = cfg.echo;
    r["line_index"] = line_index;
    r["line"] = line_json(l);
    Json anomalies = Json::array();
    if (l.exact) {
        LineReportOptions o;
        o.order = cfg.order;
        auto h = line_report(S, l, o);
        int M = h.order - 2;
        r["order"] = h.order;
        r["base_point"] = point_json(l.point(h.base_param));
        r["F"] = series_json(h.F, h.order);
        r["G"] = series_json(h.G, h.order);
        r["H"] = {{"lambda2", series_json(h.form.a, M)}, {"lambda_mu", series_json(h.form.b, M)},
                  {"mu2", series_json(h.form.c, M)}};
        r["y_orders"] = {{"hess_f", yorder_json(h.hess_f)}, {"k", yorder_json(h.k)},
                         {"hess_g", yorder_json(h.hess_g)}, {"discriminant", yorder_json(h.disc)}};
        r["m"] = h.m;
        r["branch_mult"] = h.branch_mult;
    } else {
        auto ev = numeric_line_evidence(S, l);
        r["numeric"] = {{"m_estimate", ev.m_estimate},
                        {"branch_estimate", ev.branch_estimate},
                        {"disc_on_line", dec(ev.disc_on_line)}};
    }
    r["anomalies"] = anomalies;
    return r;
}

Json point_case_json(const SurfaceInstance& S, const SurfaceConfig& cfg, const std::optional<QVec>& point) {
    Json r;
    r["schema_version"] = kSchemaVersion;
    r["input"] = cfg.echo;
    PointCaseOptions o;
    o.order = cfg.order;
    o.seed = cfg.seed;
    Json anomalies = Json::array();
    try {
        PointCaseReport rep;
        if (point) {
            rep = point_case(S, *point, o);
        } else {
            std::mt19937_64 rng(cfg.seed);
            rep = sample_point_case(S, rng, o);
        }
        r["result"] = case_json(rep);
    } catch (const CrossCheckMismatch& e) {
        anomalies.push_back(e.what());
    }
    r["anomalies"] = anomalies;
    return r;
}

const std::vector<Table1Expected>& table1_fixture() {
    static const std::vector<Table1Expected> rows = [] {
        std::vector<Table1Expected> out;
        Json j = Json::parse(kTable1Fixture);
        for (auto& row : j.at("rows")) {
            Table1Expected e;
            e.symbol = row.at("symbol");
            e.sing = row.at("sing");
            e.ds = row.at("ds");
            e.y = row.at("y");
            auto l = row.at("lines");
            e.lines = {l[0].get<int>(), l[1].get<int>(), l[2].get<int>()};
            if (!row.at("x").is_null()) e.x = row.at("x").get<int>();
            out.push_back(e);
        }
        return out;
    }();
    return rows;
}

const std::vector<AppendixCase>& appendix_fixture() {
    static const std::vector<AppendixCase> cases = [] {
        std::vector<AppendixCase> out;
        Json j = Json::parse(kTable1Fixture);
        for (auto& c : j.at("appendix")) {
            AppendixCase a;
            a.symbol = c.at("symbol");
            for (auto& [k, v] : c.at("params").items()) a.params[k] = parse_rational(v.get<std::string>());
            for (int i = 0; i < 5; ++i) a.basis[i] = c.at("basis")[i];
            a.m = c.at("m");
            a.branch_mult = c.at("branch_mult");
            out.push_back(a);
        }
        return out;
    }();
    return cases;
}

bool TableRow::ok() const {
    for (auto& c : cells)
        if (!c.pass) return false;
    return anomalies.empty();
}

bool TableReport::ok() const {
    for (auto& r : rows)
        if (!r.ok()) return false;
    return true;
}

TableRow run_table1_row(const Table1Expected& ex, const Table1Options& opt) {
    TableRow row;
    row.symbol = ex.symbol;
    auto cell = [&](const std::string& name, const std::string& want, const std::string& got) {
        row.cells.push_back({name, want, got, want == got});
    };
    try {
        SurfaceOptions so;
        so.seed = opt.seed;
        auto S = build_surface(normal_form(ex.symbol, NormalFormStyle::Weighted), so);
        row.anomalies = S.anomalies;
        std::vector<ADEClass> types;
        for (auto& s : S.singular) types.push_back(s.type);
        cell("sing", ex.sing, ade_multiset_str(types));
        cell("lines", ex.lines.str(), S.counts.str());
        std::set<int> xs;
        for (auto& l : S.lines)
            if (l.incident.size() == 2) {
                if (!l.exact) throw UnsupportedType("line through two singular points is not rational");
                xs.insert(line_report(S, l).m);
            }
        std::string x;
        for (int v : xs) x += (x.empty() ? "" : ",") + std::to_string(v);
        cell("x", ex.x ? std::to_string(*ex.x) : "-", x.empty() ? "-" : x);
        cell("ds", ex.ds, ds_name(cusp_locus_summary(S, opt.points, opt.seed).kind));
    } catch (const Error& e) {
        row.cells.push_back({"error", "", e.what(), false});
    }
    return row;
}

TableReport run_table1(const std::vector<std::string>& symbols, const Table1Options& opt) {
    std::vector<const Table1Expected*> todo;
    for (auto& s : symbols) {
        const Table1Expected* hit = nullptr;
        for (auto& e : table1_fixture())
            if (SegreSymbol::parse(e.symbol) == SegreSymbol::parse(s)) hit = &e;
        if (!hit) throw PreconditionFailed("symbol " + s + " is not in the reference table");
        todo.push_back(hit);
    }
    TableReport out;
    if (opt.parallel) {
        std::vector<std::future<TableRow>> fut;
        for (auto* e : todo) fut.push_back(std::async(std::launch::async, [e, &opt] { return run_table1_row(*e, opt); }));
        for (auto& f : fut) out.rows.push_back(f.get());
    } else {
        for (auto* e : todo) out.rows.push_back(run_table1_row(*e, opt));
    }
    return out;
}

Json to_json(const TableReport& t) {
    Json rows = Json::array();
    for (auto& r : t.rows) {
        Json cells = Json::object();
        for (auto& c : r.cells)
            cells[c.name] = {{"expected", c.expected}, {"computed", c.computed}, {"status", c.pass ? "PASS" : "FAIL"}};
        std::string y;
        for (auto& e : table1_fixture())
            if (e.symbol == r.symbol) y = e.y;
        rows.push_back({{"symbol", r.symbol}, {"cells", cells}, {"anomalies", r.anomalies}, {"y_informational", y}});
    }
    return {{"schema_version", kSchemaVersion}, {"table1", rows}, {"status", t.ok() ? "PASS" : "FAIL"}};
}

Json verify_appendix(int order) {
    Json records = Json::array();
    bool all = true;
    for (auto& c : appendix_fixture()) {
        Json rec;
        rec["symbol"] = c.symbol;
        Json params = Json::object();
        for (auto& [k, v] : c.params) params[k] = rat_json(v);
        rec["params"] = params;
        rec["expected"] = {{"m", c.m}, {"branch_mult", c.branch_mult}};
        bool ok = false;
        try {
            auto pc = normal_form(SegreSymbol::parse(c.symbol), c.params, NormalFormStyle::Plain);
            QMat V = basis_matrix(c.basis);
            QVec a(5), b(5);
            for (int i = 0; i < 5; ++i) {
                a[i] = V(i, 0);
                b[i] = V(i, 1);
            }
            rec["line"] = {point_json(a), point_json(b)};
            auto r = escalate(pc, V, order);
            rec["order"] = r.order;
            rec["m"] = r.m;
            rec["branch_mult"] = r.branch_mult;
            ok = r.m == c.m && r.branch_mult == c.branch_mult;
            if (c.params.count("c") && SegreSymbol::parse(c.symbol) == SegreSymbol::parse("[(11)(11)1]")) {
                rec["closed_forms"] = closed_form_check(c, r);
                for (auto& [k, v] : rec["closed_forms"].items()) ok = ok && v["status"] == "PASS";
            }
        } catch (const Error& e) {
            rec["error"] = e.what();
        }
        rec["status"] = ok ? "PASS" : "FAIL";
        all = all && ok;
        records.push_back(rec);
    }
    return {{"schema_version", kSchemaVersion}, {"appendix", records}, {"status", all ? "PASS" : "FAIL"}};
}

bool report_ok(const Json& j) {
    if (j.is_object()) {
        for (auto& [k, v] : j.items()) {
            if (k == "status" && v.is_string() && v.get<std::string>() == "FAIL") return false;
            if (k == "anomalies" && v.is_array() && !v.empty()) return false;
            if (k == "input") continue;
            if (!report_ok(v)) return false;
        }
    } else if (j.is_array()) {
        for (auto& v : j)
            if (!report_ok(v)) return false;
    }
    return true;
}

} // namespace segre
