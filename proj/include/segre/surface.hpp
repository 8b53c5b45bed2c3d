#ifndef SEGRE_SURFACE_HPP
#define SEGRE_SURFACE_HPP

#include <array>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "segre/algebra.hpp"
#include "segre/pencil.hpp"

namespace segre {

using QJet = Jet<Rat>;
using CVec = std::vector<Cplx>;

/// Scales so the first nonzero coordinate is 1.
QVec normalize_point(QVec v);
bool same_point(const QVec& a, const QVec& b);
std::string point_str(const QVec& v);

enum class ADEFamily { A, D };

struct ADEClass {
    ADEFamily family = ADEFamily::A;
    int index = 1;
    std::string str() const { return (family == ADEFamily::A ? "A" : "D") + std::to_string(index); }
    friend bool operator==(const ADEClass& a, const ADEClass& b) {
        return a.family == b.family && a.index == b.index;
    }
    friend bool operator<(const ADEClass& a, const ADEClass& b) {
        return std::pair(a.family, a.index) < std::pair(b.family, b.index);
    }
};

/// "2A1+A3" style multiset text, sorted A before D, then by index.
std::string ade_multiset_str(std::vector<ADEClass> v);

struct SingularPoint {
    QVec point;
    ADEClass type;
};

struct LineOnSurface {
    bool exact = true;
    QVec a, b;               // exact spanning points
    CVec na, nb;             // numeric spanning vectors (also filled for exact lines)
    double residual = 0.0;   // max residual of the containment system
    std::vector<int> incident;  // indices of singular points on the line

    QVec point(const Rat& t) const;  // a + t b
};

struct LineCounts {
    int n0 = 0, n1 = 0, n2 = 0;
    friend bool operator==(const LineCounts& a, const LineCounts& b) {
        return a.n0 == b.n0 && a.n1 == b.n1 && a.n2 == b.n2;
    }
    std::string str() const {
        return std::to_string(n0) + "+" + std::to_string(n1) + "+" + std::to_string(n2);
    }
};

struct SurfaceOptions {
    int order = kDefaultOrder;
    std::uint64_t seed = 1;
    double tolerance = 1e-12;
    int starts_per_chart = 500;
    double dedup_radius = 1e-6;
    bool enumerate_lines = true;
};

struct SurfaceInstance {
    QuadricPencil pencil;
    std::vector<SingularPoint> singular;
    std::vector<LineOnSurface> lines;
    LineCounts counts;
    std::vector<std::string> anomalies;  // UNRESOLVED numeric hits, count mismatches
    SurfaceOptions options;

    int exact_line_count() const;
};

bool on_surface(const QuadricPencil& pc, const QVec& x);
bool is_smooth_point(const QuadricPencil& pc, const QVec& x);
bool line_on_surface(const QuadricPencil& pc, const QVec& a, const QVec& b);

/// Exact singular points; numeric sweep hits that match none are appended to
/// `unresolved` as text.
std::vector<QVec> singular_points(const QuadricPencil& pc, std::vector<std::string>* unresolved = nullptr,
                                  std::uint64_t seed = 1);

ADEClass classify_singularity(const QuadricPencil& pc, const QVec& s, int order = kDefaultOrder);

/// Lines through singular points, found exactly where rational. Irrational
/// ones are counted and returned as numeric lines.
struct SingularLines {
    std::vector<LineOnSurface> lines;
    int n1 = 0, n2 = 0;
};
SingularLines lines_through_singularities(const QuadricPencil& pc, const std::vector<QVec>& sing,
                                          std::uint64_t seed = 1);

struct NumericLineResult {
    LineCounts counts;
    std::vector<LineOnSurface> lines;
    std::vector<std::string> anomalies;
};

/// Newton search in all Grassmannian charts, merged with the exact lines
/// through singular points. Numeric lines defined over Q are made exact.
NumericLineResult enumerate_lines_numeric(const QuadricPencil& pc, const std::vector<QVec>& sing,
                                          const SurfaceOptions& opt);

SurfaceInstance build_surface(const QuadricPencil& pc, const SurfaceOptions& opt = {});

/// X = V * (1, x, y, z, w): columns v0 = p, (v1, v2) span T_pS mod p,
/// v1 along the line when one is given. q1, q2 are the quadrics in (x, y, z, w).
struct AdaptedChart {
    QVec base;
    QMat V, Vinv;
    bool aligned = false;
    QJet q1, q2;
};

AdaptedChart adapted_chart(const SurfaceInstance& S, const QVec& p, const LineOnSurface* line = nullptr,
                           int variant = 0);
AdaptedChart chart_from_basis(const QuadricPencil& pc, const QMat& V, bool aligned);

/// Local quadrics B(c, c) with c = sum u_i v_i, u_0 = 1, in the variables u_1..u_4.
QJet chart_quadric(const QMat& B, const QMat& V);

/// Random rational smooth point of S off every stored line.
QVec sample_point(const SurfaceInstance& S, std::mt19937_64& rng);
/// Random rational point of a rational line through the plane-pencil residual.
std::optional<QVec> point_via_line(const QuadricPencil& pc, const LineOnSurface& l, std::mt19937_64& rng);
bool point_on_line(const LineOnSurface& l, const QVec& p);

/// Random pencil containing the line {X2 = X3 = X4 = 0} away from Sing(S).
SurfaceInstance surface_through_line(std::uint64_t seed, const SurfaceOptions& opt = {});

/// Pullback of the tangent line at parameter t of the image conic of a
/// rank-3 member. `through` is a rational point of S used to parametrise.
QVec double_conic_hyperplane(const QuadricPencil& pc, const RankMember& member, const Rat& t, const QVec& through);

/// Points of the double conic cut by hyperplane h (which must be a
/// double-conic hyperplane of `member`), passing through p.
std::vector<QVec> double_conic_points(const QuadricPencil& pc, const RankMember& member, const QVec& p, int count,
                                      std::mt19937_64& rng);

} // namespace segre

#endif
