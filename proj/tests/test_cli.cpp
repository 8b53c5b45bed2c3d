#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "segre/cli.hpp"

using namespace segre;

namespace {

QMat sym5(std::initializer_list<std::tuple<int, int, int>> entries) {
    QMat M(5, 5);
    for (auto [i, j, v] : entries) {
        M(i, j) = v;
        M(j, i) = v;
    }
    return M;
}

std::string temp_file(const std::string& name, const std::string& text) {
    std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << text;
    return path;
}

int run_tool(const std::string& args) {
    std::string cmd = std::string(SEGRE_CUSP_BIN) + " " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

} // namespace

TEST(Cli, LiteralConfigGivesLiteralQuadrics) {
    auto cfg = parse_surface_config(R"({"symbol":"[221]","params":{"a":"1","b":"2","c":"3"}})");
    auto pc = config_pencil(cfg);
    // 2aX0X1 + X1^2 + 2bX2X3 + X3^2 + cX4^2 and 2X0X1 + 2X2X3 + X4^2
    QMat A = sym5({{0, 1, 1}, {1, 1, 1}, {2, 3, 2}, {3, 3, 1}, {4, 4, 3}});
    QMat B = sym5({{0, 1, 1}, {2, 3, 1}, {4, 4, 1}});
    EXPECT_TRUE((pc.P == A && pc.Q == B) || (pc.P == B && pc.Q == A));
    EXPECT_EQ(pc.symbol->table_name(), "[122]");
}

TEST(Cli, RawQuadricsRecomputeSymbol) {
    auto cfg = read_surface_config(std::string(SEGRE_SOURCE_DIR) + "/configs/32_quadrics.json");
    auto pc = config_pencil(cfg);
    EXPECT_EQ(*pc.symbol, SegreSymbol::parse("[32]"));
}

TEST(Cli, ParseErrors) {
    try {
        parse_surface_config("{\"symbol\": \"[221]\",\n  \"params\": {\"a\": 1,}}");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2, column 21"), std::string::npos) << e.what();
    }
    std::string row = R"(["0","0","0","0","0"])";
    std::string asym = R"({"quadrics": [[["0","1","0","0","0"],["0","0","0","0","0"],)" + row + "," + row + "," + row +
                       "],[" + row + "," + row + "," + row + "," + row + "," + row + "]]}";
    EXPECT_THROW(parse_surface_config(asym), ParseError);
    EXPECT_THROW(parse_surface_config(R"({"symbol":"[221]","extra":1})"), ParseError);
    EXPECT_THROW(parse_surface_config(R"({"symbol":"[221]","params":{"a":"0.5"}})"), ParseError);
    EXPECT_THROW(parse_surface_config(R"({"symbol":"[2x1]"})"), ParseError);
    EXPECT_THROW(parse_surface_config(R"([1, 2])"), ParseError);
    EXPECT_THROW(parse_surface_config(R"({})"), ParseError);
}

TEST(Cli, ValidationErrors) {
    EXPECT_THROW(config_pencil(parse_surface_config(R"({"symbol":"[22]"})")), ValidationError);
    EXPECT_THROW(config_pencil(parse_surface_config(R"({"symbol":"[221]","params":{"a":"1","b":"1"}})")),
                 ValidationError);
    EXPECT_THROW(config_pencil(parse_surface_config(R"({"symbol":"[221]","params":{"z":"1"}})")), ValidationError);
    std::string row = R"(["0","0","0","0","0"])";
    std::string zero = "[" + row + "," + row + "," + row + "," + row + "," + row + "]";
    EXPECT_THROW(config_pencil(parse_surface_config(R"({"quadrics": [)" + zero + "," + zero + "]}")),
                 ValidationError);
}

TEST(Cli, ReportIsCanonicalAndDeterministic) {
    auto cfg = parse_surface_config(R"({"symbol":"[12(11)]","options":{"seed":4}})");
    auto S = build_from_config(cfg);
    auto a = canonical_dump(surface_report(S, cfg, 2));
    auto b = canonical_dump(surface_report(build_from_config(cfg), cfg, 2));
    EXPECT_EQ(a, b);
    EXPECT_EQ(canonical_dump(Json::parse(a)), a);
    auto j = Json::parse(a);
    EXPECT_EQ(j["schema_version"], kSchemaVersion);
    EXPECT_EQ(j["symbol"], "[12(11)]");
    EXPECT_EQ(j["singularity_multiset"], "3A1");
    EXPECT_EQ(j["cusp_locus_summary"]["d_s"], "reducible");
    EXPECT_TRUE(report_ok(j));
    for (auto& p : j["singularities"]) {
        ASSERT_EQ(p["point"].size(), 5u);
        for (auto& c : p["point"]) EXPECT_TRUE(c.is_string());
    }
}

TEST(Cli, LineReportJson) {
    auto cfg = parse_surface_config(R"({"symbol":"[(12)2]"})");
    auto S = build_from_config(cfg);
    bool seen = false;
    for (std::size_t i = 0; i < S.lines.size(); ++i) {
        if (S.lines[i].incident.size() != 2) continue;
        auto j = line_report_json(S, cfg, static_cast<int>(i));
        EXPECT_EQ(j["m"], 4);
        EXPECT_EQ(j["branch_mult"], 0);
        EXPECT_EQ(canonical_dump(Json::parse(canonical_dump(j))), canonical_dump(j));
        seen = true;
    }
    EXPECT_TRUE(seen);
    EXPECT_THROW(line_report_json(S, cfg, 99), PreconditionFailed);
}

TEST(Cli, PointCaseRandom) {
    auto cfg = parse_surface_config(R"({"symbol":"[(11)(12)]"})");
    cfg.seed = 7;
    auto j = point_case_json(build_from_config(cfg), cfg, std::nullopt);
    EXPECT_EQ(j["result"]["case"], "CaseI");
    EXPECT_TRUE(report_ok(j));
}

TEST(Cli, FixtureShape) {
    const auto& rows = table1_fixture();
    ASSERT_EQ(rows.size(), 16u);
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].symbol, table1_symbols()[i]);
    EXPECT_EQ(appendix_fixture().size(), 7u);
}

TEST(Cli, Table1Cells) {
    for (auto [sym, x] : std::vector<std::pair<std::string, std::string>>{{"[122]", "2"}, {"[(12)2]", "4"}}) {
        auto t = run_table1({sym});
        ASSERT_EQ(t.rows.size(), 1u);
        for (auto& c : t.rows[0].cells) {
            EXPECT_TRUE(c.pass) << sym << " " << c.name << ": " << c.expected << " vs " << c.computed;
            if (c.name == "x") EXPECT_EQ(c.computed, x);
        }
    }
    EXPECT_THROW(run_table1({"[(111)11]"}), PreconditionFailed);
    EXPECT_EQ(run_table1({"[(11)111]"}).rows.at(0).symbol, "[111(11)]");
}

TEST(Cli, VerifyAppendix) {
    auto j = verify_appendix();
    ASSERT_EQ(j["appendix"].size(), 7u);
    std::vector<std::pair<int, int>> want{{2, 0}, {2, 0}, {2, 0}, {3, 0}, {3, 0}, {4, 0}, {4, 0}};
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_EQ(j["appendix"][i]["m"], want[i].first);
        EXPECT_EQ(j["appendix"][i]["branch_mult"], want[i].second);
    }
    EXPECT_EQ(j["appendix"][0]["closed_forms"]["H"]["status"], "PASS");
    EXPECT_TRUE(report_ok(j));
}

TEST(Cli, ReportOkFlagsFailures) {
    EXPECT_TRUE(report_ok(Json::parse(R"({"a":[{"status":"PASS"}],"anomalies":[]})")));
    EXPECT_FALSE(report_ok(Json::parse(R"({"a":[{"status":"FAIL"}]})")));
    EXPECT_FALSE(report_ok(Json::parse(R"({"x":{"anomalies":["UNRESOLVED"]}})")));
}

TEST(Cli, ExitStatus) {
    EXPECT_EQ(run_tool("verify-appendix"), 0);
    EXPECT_EQ(run_tool("table1 --symbol '[5]'"), 0);
    auto bad = temp_file("bad.json", "{\"symbol\": ");
    EXPECT_NE(run_tool("surface-report --config " + bad), 0);
    EXPECT_NE(run_tool("surface-report"), 0);
    auto good = temp_file("good.json", R"({"symbol":"[(11)(12)]"})");
    EXPECT_EQ(run_tool("point-case --random --seed 7 --config " + good), 0);
}
