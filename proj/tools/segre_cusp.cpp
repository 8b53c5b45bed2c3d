#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "segre/cli.hpp"

using namespace segre;

namespace {

QVec parse_point(const std::string& s) {
    QVec p;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) p.push_back(parse_rational(tok));
    if (p.size() != 5) throw ParseError("--point needs 5 comma-separated rationals");
    return p;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cuspidal locus data of Segre quartic surfaces"};
    app.require_subcommand(1);

    std::string config, json_path, point;
    std::optional<int> order;
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    int line = -1, points = 3;
    bool random = false;
    std::vector<std::string> symbols;

    auto common = [&](CLI::App* c, bool needs_config) {
        auto* o = c->add_option("--config", config, "surface config (JSON)");
        if (needs_config) o->required()->check(CLI::ExistingFile);
        c->add_option("--order", order, "truncation order")->check(CLI::Range(3, 64));
        c->add_option("--seed", seed, "random seed");
        c->add_option("--tolerance", tolerance, "numeric tolerance")->check(CLI::PositiveNumber);
        c->add_option("--json", json_path, "also write the report to this file");
    };
    auto* surf = app.add_subcommand("surface-report", "singularities, lines, branch data and point cases");
    common(surf, true);
    surf->add_option("--points", points, "sampled points for the point cases")->check(CLI::Range(1, 100));
    auto* lr = app.add_subcommand("line-report", "Hessian form along one line");
    common(lr, true);
    lr->add_option("--line", line, "line index in the surface report")->required();
    auto* pcmd = app.add_subcommand("point-case", "case of the cuspidal locus at a point");
    common(pcmd, true);
    auto* popt = pcmd->add_option("--point", point, "comma-separated homogeneous coordinates");
    auto* ropt = pcmd->add_flag("--random", random, "sample a generic point");
    popt->excludes(ropt);
    auto* va = app.add_subcommand("verify-appendix", "replay the fixed-chart line computations");
    common(va, false);
    auto* t1 = app.add_subcommand("table1", "reference table regression");
    common(t1, false);
    t1->add_option("--symbol", symbols, "restrict to these symbols");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (pcmd->parsed() && point.empty() && !random) {
        std::cerr << "point-case: give --point or --random\n";
        return 2;
    }

    Json report;
    try {
        SurfaceConfig cfg;
        if (!config.empty()) cfg = read_surface_config(config);
        if (order) cfg.order = *order;
        if (seed) cfg.seed = *seed;
        if (tolerance) cfg.tolerance = *tolerance;
        if (surf->parsed()) {
            report = surface_report(build_from_config(cfg), cfg, points);
        } else if (lr->parsed()) {
            report = line_report_json(build_from_config(cfg), cfg, line);
        } else if (pcmd->parsed()) {
            std::optional<QVec> p;
            if (!random) p = parse_point(point);
            report = point_case_json(build_from_config(cfg), cfg, p);
        } else if (va->parsed()) {
            report = verify_appendix(cfg.order);
        } else {
            Table1Options o;
            o.seed = cfg.seed;
            if (symbols.empty()) symbols = table1_symbols();
            report = to_json(run_table1(symbols, o));
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    std::string out = canonical_dump(report);
    std::cout << out;
    if (!json_path.empty()) {
        std::ofstream f(json_path);
        if (!f) {
            std::cerr << "cannot write " << json_path << "\n";
            return 3;
        }
        f << out;
    }
    return report_ok(report) ? 0 : 1;
}
