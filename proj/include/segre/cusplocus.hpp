#ifndef SEGRE_CUSPLOCUS_HPP
#define SEGRE_CUSPLOCUS_HPP

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "segre/surface.hpp"

namespace segre {

using RJet = Jet<RatFunc>;
using SJet = Jet<QSqrt>;

/// A projective root (lambda : mu), exact over Q or one quadratic extension.
struct DualRoot {
    QSqrt lambda, mu;
    bool rational() const { return lambda.rational() && mu.rational(); }
    std::string str() const { return "(" + lambda.str() + " : " + mu.str() + ")"; }
};

bool same_root(const DualRoot& a, const DualRoot& b);

/// Roots of a l^2 + b l m + c m^2; empty for the zero form, one entry for a double root.
std::vector<DualRoot> binary_roots(const BinaryQuadratic<Rat>& f);

struct HessianAtPoint {
    QVec point;
    AdaptedChart chart;
    QJet F, G;  // z = F(x, y), w = G(x, y)
    BinaryQuadratic<Rat> form;
    std::vector<DualRoot> roots;
    bool double_root() const { return roots.size() == 1; }
};

/// Hessian of lambda F + mu G at the chart origin. Without a chart, the
/// adapted chart of the given variant is used.
HessianAtPoint hessian_form_at(const SurfaceInstance& S, const QVec& p, const AdaptedChart* chart = nullptr,
                               int variant = 0, int order = kDefaultOrder);

/// Hyperplane (dual coordinates) of the section lambda z + mu w in the chart.
std::vector<QSqrt> root_hyperplane(const AdaptedChart& c, const DualRoot& r);

enum class GermKind { Smooth, A1Node, A2Cusp, A3Tacnode, PerfectSquare, NonReducedLineMultiple, Other };

struct SectionGermClass {
    GermKind kind = GermKind::Other;
    int k = 0;  // multiplicity for NonReducedLineMultiple
    std::string detail;
    std::string str() const;
    friend bool operator==(const SectionGermClass& a, const SectionGermClass& b) {
        return a.kind == b.kind && a.k == b.k;
    }
};

/// Classifies a two-variable germ h(x, y) with h(0) = 0. In an aligned chart
/// the line is y = 0.
template <class K>
SectionGermClass classify_germ(const Jet<K>& h, bool aligned);

/// Section of S by hyperplane H (dual coordinates) at p.
SectionGermClass classify_section_germ(const SurfaceInstance& S, const QVec& p, const QVec& H,
                                       const LineOnSurface* line = nullptr, int order = kDefaultOrder);
/// Section lambda F + mu G in the chart of `hp`.
SectionGermClass classify_root_section(const HessianAtPoint& hp, const DualRoot& r);

enum class PointCase { CaseI, CaseII, CaseIII };
std::string to_string(PointCase c);

struct PointCaseReport {
    PointCase kind = PointCase::CaseIII;
    HessianAtPoint hessian;
    std::array<SectionGermClass, 2> classes;
    std::vector<std::vector<QSqrt>> hyperplanes;
    int square_checks = 0;  // extra conic points confirmed for PerfectSquare roots
};

struct PointCaseOptions {
    int order = kDefaultOrder;
    int variant = 0;
    bool cross_check = true;
    std::uint64_t seed = 1;
};

/// Throws PreconditionFailed for a non-generic point (neither case pattern).
PointCaseReport point_case(const SurfaceInstance& S, const QVec& p, const PointCaseOptions& opt = {});

struct HessianAlongLine {
    LineOnSurface line;
    QMat V;           // chart basis; the line is V * (1, x, 0, 0, 0)
    Rat base_param;   // v0 = a + base_param * b when chosen automatically
    int order = 0;
    RJet F, G;        // jets in y over Q(x)
    BinaryQuadratic<RJet> form;
    YOrder hess_f, k, hess_g, disc;
    int m = 0;
    int disc_order = 0;
    int branch_mult = 0;
};

struct LineReportOptions {
    int order = 8;
    int max_order = 32;
    int base_choice = 0;  // index into the admissible base parameters
};

/// Line report with truncation escalation 8 -> 16 -> 32.
HessianAlongLine line_report(const SurfaceInstance& S, const LineOnSurface& l, const LineReportOptions& opt = {});
/// Fixed chart basis, single order; throws TruncationInsufficient.
HessianAlongLine line_report_in_basis(const QuadricPencil& pc, const QMat& V, int order);
/// (F, G) along the chart line by generic Hensel lifting over Q(x).
std::pair<RJet, RJet> line_graph_by_hensel(const QuadricPencil& pc, const QMat& V, int order);

/// Residual-level evidence for a numeric line, from a complex chart.
struct NumericLineEvidence {
    double residual = 0;
    double disc_on_line = 0;  // relative discriminant of H at the base point
    int m_estimate = -1;
    int branch_estimate = -1;
};
NumericLineEvidence numeric_line_evidence(const SurfaceInstance& S, const LineOnSurface& l);

struct TacnodalResult {
    QVec point;
    DualRoot root;
    QVec hyperplane;
    SectionGermClass germ;
    HessianAtPoint hessian;
};

TacnodalResult tacnodal_hyperplane_on_line(const SurfaceInstance& S, const LineOnSurface& l, const QVec& p,
                                           int order = kDefaultOrder);

/// Coordinates of a hyperplane containing l in a fixed basis of l*.
std::array<Rat, 3> dual_plane_coords(const LineOnSurface& l, const QVec& h);
/// Conic through five points of P^2 (coefficients of x^2, xy, xz, y^2, yz, z^2).
std::optional<std::array<Rat, 6>> fit_conic(const std::vector<std::array<Rat, 3>>& pts);
Rat eval_conic(const std::array<Rat, 6>& c, const std::array<Rat, 3>& p);

struct LineBranchRecord {
    int line_index = 0;
    std::optional<HessianAlongLine> exact;
    std::optional<NumericLineEvidence> numeric;
    std::string error;
};

struct BranchReport {
    std::vector<LineBranchRecord> lines;
    int off_line_points = 0;
    int off_line_double_roots = 0;
    int branch_components = 0;
    std::vector<std::string> anomalies;
};

BranchReport branch_scan(const SurfaceInstance& S, int off_line_points = 10, std::uint64_t seed = 1);

enum class CuspLocus { Empty, BirationalToS, DoubleCoverOfS };
std::string to_string(CuspLocus c);

struct CuspSummary {
    CuspLocus kind = CuspLocus::Empty;
    int double_conic_pencils = 0;
    std::vector<PointCaseReport> cases;
    std::vector<QVec> points;
};

CuspSummary cusp_locus_summary(const SurfaceInstance& S, int points = 3, std::uint64_t seed = 1);

/// Generic smooth point for a point case, resampled on non-generic hits.
PointCaseReport sample_point_case(const SurfaceInstance& S, std::mt19937_64& rng, const PointCaseOptions& opt = {});

} // namespace segre

#endif
