#ifndef SEGRE_PENCIL_HPP
#define SEGRE_PENCIL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segre/matrix.hpp"

namespace segre {

/// One eigenvalue of the pencil with its Jordan block sizes.
struct SegreUnit {
    std::vector<int> blocks;  // in written order
    Rat eigenvalue{0};        // eigenvalue of R^{-1} S for the reference pair
    Rat lambda{0}, mu{0};     // degenerate member lambda*P + mu*Q
    std::string id;

    std::vector<int> sorted_blocks() const;
    bool double_conic_unit() const;  // (11), (12), (13), (14)
    std::string str() const;
};

/**
 * \brief Segre symbol: multiset of units.
 *
 * Equality compares block multisets only; eigenvalues and the written order
 * of units and blocks are ignored.
 */
struct SegreSymbol {
    std::vector<SegreUnit> units;

    static SegreSymbol parse(const std::string& s);
    std::string str() const;        // as written
    std::string canonical() const;  // order independent key
    std::string table_name() const; // reference table spelling, or canonical
    int total() const;
    int double_conic_units() const;
    friend bool operator==(const SegreSymbol& a, const SegreSymbol& b) { return a.canonical() == b.canonical(); }
    friend bool operator!=(const SegreSymbol& a, const SegreSymbol& b) { return !(a == b); }
};

/// The 16 symbols of the reference table, in table order.
const std::vector<std::string>& table1_symbols();
bool is_table1_symbol(const SegreSymbol& s);

struct QuadricPencil {
    QMat P, Q;
    std::optional<SegreSymbol> symbol;
    Rat ref_a{0}, ref_b{1};  // invertible reference member ref_a*P + ref_b*Q

    QMat member(const Rat& lambda, const Rat& mu) const { return lambda * P + mu * Q; }
};

/// Checks shape and symmetry; computes the reference member.
QuadricPencil make_pencil(const QMat& P, const QMat& Q);

/// True iff det(lambda P + mu Q) vanishes identically.
bool pencil_degenerate(const QMat& P, const QMat& Q);

SegreSymbol segre_symbol(const QuadricPencil& pencil);

/// Returns the pencil with its symbol cached.
QuadricPencil with_symbol(QuadricPencil pencil);

enum class NormalFormStyle { Plain, Weighted };

std::map<std::string, Rat> default_params(const SegreSymbol& symbol);

/// Block-diagonal pencil realising the symbol. Params map unit ids
/// ("a", "b", ... in written unit order) to eigenvalues.
QuadricPencil normal_form(const SegreSymbol& symbol, const std::map<std::string, Rat>& params,
                          NormalFormStyle style = NormalFormStyle::Plain);
QuadricPencil normal_form(const std::string& symbol, NormalFormStyle style = NormalFormStyle::Plain);

struct RankMember {
    Rat lambda, mu;
    int rank = 5;
    bool flagged = false;  // rank 3
};

std::vector<RankMember> rank_drop_members(const QuadricPencil& pencil);

/// Units among (11), (12), (13), (14); cross-checked against rank-3 members.
int double_conic_pencil_count(const QuadricPencil& pencil);

struct ValidationReport {
    bool det_nonzero = false;
    bool symbol_computed = false;
    bool singular_set_finite = false;
    bool no_low_rank_member = false;
    bool table1_symbol = false;
    std::optional<SegreSymbol> symbol;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

ValidationReport validate_segre(const QuadricPencil& pencil);

/// x^T A y for a 5x5 matrix.
inline Rat qform(const QMat& A, const QVec& x, const QVec& y) { return bilinear(A, x, y); }
inline Rat qform(const QMat& A, const QVec& x) { return bilinear(A, x, x); }

} // namespace segre

#endif
