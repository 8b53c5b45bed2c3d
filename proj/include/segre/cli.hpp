#ifndef SEGRE_CLI_HPP
#define SEGRE_CLI_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "segre/cusplocus.hpp"

namespace segre {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Either a symbol with parameters or two raw quadrics.
struct SurfaceConfig {
    std::optional<std::string> symbol;
    std::map<std::string, Rat> params;
    NormalFormStyle style = NormalFormStyle::Weighted;
    std::optional<std::pair<QMat, QMat>> quadrics;
    int order = kDefaultOrder;
    std::uint64_t seed = 1;
    double tolerance = 1e-12;
    Json echo;  // the input as read
};

/// Throws ParseError (with line and column for malformed JSON).
SurfaceConfig parse_surface_config(const std::string& text);
SurfaceConfig read_surface_config(const std::string& path);
/// Throws ValidationError listing the failed checks.
QuadricPencil config_pencil(const SurfaceConfig& cfg);
SurfaceInstance build_from_config(const SurfaceConfig& cfg);
SurfaceInstance load_surface_config(const std::string& path);

/// Sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const Json& j);
Json rat_json(const Rat& r);
Json point_json(const QVec& p);
Json line_json(const LineOnSurface& l);

Json surface_report(const SurfaceInstance& S, const SurfaceConfig& cfg, int points = 3);
Json line_report_json(const SurfaceInstance& S, const SurfaceConfig& cfg, int line_index);
Json point_case_json(const SurfaceInstance& S, const SurfaceConfig& cfg, const std::optional<QVec>& point);

struct Table1Expected {
    std::string symbol, sing, ds, y;
    LineCounts lines;
    std::optional<int> x;
};

struct AppendixCase {
    std::string symbol;
    std::map<std::string, Rat> params;
    std::array<int, 5> basis;  // coordinate index of each chart column
    int m = 0, branch_mult = 0;
};

const std::vector<Table1Expected>& table1_fixture();
const std::vector<AppendixCase>& appendix_fixture();

struct TableCell {
    std::string name, expected, computed;
    bool pass = false;
};

struct TableRow {
    std::string symbol;
    std::vector<TableCell> cells;
    std::vector<std::string> anomalies;
    bool ok() const;
};

struct TableReport {
    std::vector<TableRow> rows;
    bool ok() const;
};

struct Table1Options {
    std::uint64_t seed = 1;
    int points = 3;
    bool parallel = true;
};

TableRow run_table1_row(const Table1Expected& expected, const Table1Options& opt = {});
TableReport run_table1(const std::vector<std::string>& symbols, const Table1Options& opt = {});
Json to_json(const TableReport& t);

/// Replays the fixed-chart line computations; one record per case.
Json verify_appendix(int order = kDefaultOrder);

/// False if any "status" is "FAIL" or any "anomalies" array is non-empty.
bool report_ok(const Json& j);

} // namespace segre

#endif
