#include <gtest/gtest.h>

#include <random>

#include "segre/pencil.hpp"

using namespace segre;

namespace {

QMat random_invertible(std::mt19937_64& rng, int lo = -3, int hi = 3) {
    std::uniform_int_distribution<int> c(lo, hi);
    for (;;) {
        QMat A(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) A(i, j) = Rat(c(rng));
        if (!is_zero(A.det())) return A;
    }
}

QuadricPencil congruent(const QuadricPencil& pc, const QMat& A) {
    return make_pencil(A.transpose() * pc.P * A, A.transpose() * pc.Q * A);
}

QMat diag(std::initializer_list<long> v) {
    QMat m(5, 5);
    int i = 0;
    for (long x : v) { m(i, i) = Rat(x); ++i; }
    return m;
}

} // namespace

TEST(Segre, ParseForms) {
    auto s = SegreSymbol::parse("[1(11)2]");
    ASSERT_EQ(s.units.size(), 3u);
    EXPECT_EQ(s.units[1].blocks, (std::vector<int>{1, 1}));
    EXPECT_EQ(s.str(), "[1(11)2]");
    EXPECT_EQ(SegreSymbol::parse("[1, (1 1), 2]"), s);
    EXPECT_EQ(SegreSymbol::parse("[(11)21]"), s);
    EXPECT_EQ(s.table_name(), "[12(11)]");
    EXPECT_NE(SegreSymbol::parse("[(12)2]"), SegreSymbol::parse("[1(22)]"));
    EXPECT_THROW(SegreSymbol::parse("[1(1"), ParseError);
    EXPECT_THROW(SegreSymbol::parse("[1x]"), ParseError);
    EXPECT_THROW(SegreSymbol::parse("[]"), ParseError);
    EXPECT_THROW(SegreSymbol::parse("[1((1))]"), ParseError);
}

TEST(Segre, TableSpellingsAreDistinct) {
    std::set<std::string> seen;
    for (auto& t : table1_symbols()) {
        auto s = SegreSymbol::parse(t);
        EXPECT_EQ(s.total(), 5) << t;
        EXPECT_TRUE(seen.insert(s.canonical()).second) << t;
        EXPECT_EQ(s.table_name(), t);
    }
    EXPECT_EQ(seen.size(), 16u);
}

TEST(Segre, RoundTripAllSymbolsBothStyles) {
    for (auto style : {NormalFormStyle::Plain, NormalFormStyle::Weighted})
        for (auto& t : table1_symbols()) {
            auto pc = normal_form(t, style);
            auto s = segre_symbol(pc);
            EXPECT_EQ(s.table_name(), t);
            // eigenvalues are the parameters
            auto want = default_params(SegreSymbol::parse(t));
            std::set<Rat> got, exp;
            for (auto& u : s.units) got.insert(u.eigenvalue);
            for (auto& [k, v] : want) exp.insert(v);
            EXPECT_EQ(got, exp) << t;
        }
}

TEST(Segre, RoundTripRandomParameters) {
    std::mt19937_64 rng(3);
    for (auto& t : table1_symbols()) {
        auto sym = SegreSymbol::parse(t);
        std::map<std::string, Rat> p;
        std::set<Rat> used;
        for (std::size_t k = 0; k < sym.units.size(); ++k) {
            Rat r;
            do r = random_rational(rng, -9, 9, 4);
            while (used.count(r));
            used.insert(r);
            p[std::string(1, static_cast<char>('a' + k))] = r;
        }
        for (auto style : {NormalFormStyle::Plain, NormalFormStyle::Weighted})
            EXPECT_EQ(segre_symbol(normal_form(sym, p, style)), sym) << t;
    }
}

TEST(Segre, CongruenceInvariance) {
    std::mt19937_64 rng(17);
    const auto& syms = table1_symbols();
    for (int i = 0; i < 100; ++i) {
        auto& t = syms[i % syms.size()];
        auto pc = normal_form(t);
        auto moved = congruent(pc, random_invertible(rng));
        EXPECT_EQ(segre_symbol(moved).table_name(), t);
    }
}

TEST(Segre, MobiusInvariance) {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> c(-4, 4);
    for (auto& t : table1_symbols()) {
        auto pc = normal_form(t);
        for (int k = 0; k < 3; ++k) {
            Rat a, b, cc, d;
            do {
                a = c(rng); b = c(rng); cc = c(rng); d = c(rng);
            } while (is_zero(a * d - b * cc));
            auto m = make_pencil(a * pc.P + b * pc.Q, cc * pc.P + d * pc.Q);
            EXPECT_EQ(segre_symbol(m).table_name(), t);
        }
    }
}

TEST(Segre, NormalFormBlocks) {
    auto pc = normal_form(SegreSymbol::parse("[2111]"), {{"a", 3}, {"b", 1}, {"c", 2}, {"d", 4}});
    // size-2 block: Q anti-identity, P = 3 J + E_11
    EXPECT_EQ(pc.Q(0, 1), Rat(1));
    EXPECT_EQ(pc.Q(0, 0), Rat(0));
    EXPECT_EQ(pc.P(0, 1), Rat(3));
    EXPECT_EQ(pc.P(1, 1), Rat(1));
    EXPECT_EQ(pc.P(0, 0), Rat(0));
    // (11) is the hyperbolic form X_i X_j
    auto h = normal_form("[111(11)]");
    EXPECT_EQ(h.Q(3, 4), Rat(1, 2));
    EXPECT_EQ(h.Q(3, 3), Rat(0));
}

TEST(Segre, WeightedIsIntegral) {
    for (auto& t : table1_symbols()) {
        auto pc = normal_form(t, NormalFormStyle::Weighted);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                EXPECT_EQ(pc.P(i, j).get_den(), 1) << t;
                EXPECT_EQ(pc.Q(i, j).get_den(), 1) << t;
            }
    }
}

TEST(Segre, Errors) {
    EXPECT_THROW(normal_form(SegreSymbol::parse("[11111]"), {{"a", 1}, {"b", 1}, {"c", 2}, {"d", 3}, {"e", 4}}),
                 DuplicateEigenvalue);
    // eigenvalues +-sqrt(2) in the first block
    QMat P = diag({0, 0, 3, 4, 5});
    P(0, 0) = 1; P(0, 1) = P(1, 0) = 1; P(1, 1) = -1;
    EXPECT_THROW(segre_symbol(make_pencil(P, QMat::identity(5))), IrrationalEigenvalue);
    // common kernel vector e4
    EXPECT_THROW(segre_symbol(make_pencil(diag({1, 2, 3, 4, 0}), diag({1, 1, 1, 1, 0}))), DegeneratePencil);
    EXPECT_THROW(make_pencil(diag({1, 2, 3, 4, 0}), diag({1, 1, 1, 1, 0})), DegeneratePencil);
    QMat asym = QMat::identity(5);
    asym(0, 1) = 1;
    EXPECT_THROW(make_pencil(asym, QMat::identity(5)), PreconditionFailed);
}

TEST(Segre, DoubleConicPencilCount) {
    const std::map<std::string, int> expected = {
        {"[11111]", 0}, {"[1112]", 0}, {"[111(11)]", 1}, {"[12(11)]", 1}, {"[1(11)(11)]", 2}, {"[113]", 0},
        {"[122]", 0},   {"[11(12)]", 1}, {"[14]", 0},    {"[1(13)]", 1},  {"[(11)3]", 1},     {"[(12)2]", 1},
        {"[(11)(12)]", 2}, {"[(14)]", 1}, {"[23]", 0},   {"[5]", 0}};
    std::mt19937_64 rng(29);
    for (auto& [t, n] : expected) {
        auto pc = congruent(normal_form(t, NormalFormStyle::Weighted), random_invertible(rng));
        EXPECT_EQ(double_conic_pencil_count(pc), n) << t;
        int rank3 = 0;
        for (auto& m : rank_drop_members(pc)) {
            EXPECT_LT(m.rank, 5);
            rank3 += m.flagged;
        }
        EXPECT_EQ(rank3, n) << t;
    }
}

TEST(Segre, ValidateTableSymbols) {
    for (auto& t : table1_symbols()) {
        auto r = validate_segre(normal_form(t));
        EXPECT_TRUE(r.ok()) << t;
        EXPECT_TRUE(r.table1_symbol);
    }
}

TEST(Segre, ValidateRejectsBadPencils) {
    auto a = validate_segre(normal_form("[1(22)]"));
    EXPECT_FALSE(a.singular_set_finite);
    EXPECT_FALSE(a.ok());
    auto b = validate_segre(normal_form("[11(111)]"));
    EXPECT_FALSE(b.no_low_rank_member);
    EXPECT_FALSE(b.ok());
    EXPECT_THROW(double_conic_pencil_count(normal_form("[1(22)]")), CrossCheckMismatch);
}
