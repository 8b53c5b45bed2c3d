#include "segre/pencil.hpp"

#include <algorithm>
#include <cctype>

namespace segre {

std::vector<int> SegreUnit::sorted_blocks() const {
    auto b = blocks;
    std::sort(b.begin(), b.end());
    return b;
}

bool SegreUnit::double_conic_unit() const {
    auto b = sorted_blocks();
    return b.size() == 2 && b[0] == 1;
}

std::string SegreUnit::str() const {
    std::string s;
    for (int b : blocks) s += std::to_string(b);
    return blocks.size() > 1 ? "(" + s + ")" : s;
}

SegreSymbol SegreSymbol::parse(const std::string& text) {
    SegreSymbol sym;
    std::size_t i = 0, n = text.size();
    auto skip = [&] {
        while (i < n && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',')) ++i;
    };
    skip();
    bool bracket = i < n && text[i] == '[';
    if (bracket) ++i;
    bool open = false;
    SegreUnit cur;
    for (; i < n; ++i) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') continue;
        if (c == ']') {
            if (!bracket || open) throw ParseError("unbalanced bracket in Segre symbol '" + text + "'");
            bracket = false;
            ++i;
            break;
        }
        if (c == '(') {
            if (open) throw ParseError("nested parenthesis in Segre symbol '" + text + "'");
            open = true;
            cur = SegreUnit{};
        } else if (c == ')') {
            if (!open || cur.blocks.empty()) throw ParseError("bad unit in Segre symbol '" + text + "'");
            open = false;
            sym.units.push_back(cur);
        } else if (c >= '1' && c <= '9') {
            if (open) cur.blocks.push_back(c - '0');
            else sym.units.push_back(SegreUnit{{c - '0'}, Rat(0), Rat(0), Rat(0), ""});
        } else {
            throw ParseError(std::string("unexpected character '") + c + "' in Segre symbol '" + text + "'");
        }
    }
    skip();
    if (open || bracket || i < n) throw ParseError("malformed Segre symbol '" + text + "'");
    if (sym.units.empty()) throw ParseError("empty Segre symbol");
    for (std::size_t k = 0; k < sym.units.size(); ++k) sym.units[k].id = std::string(1, static_cast<char>('a' + k));
    return sym;
}

std::string SegreSymbol::str() const {
    std::string s = "[";
    for (auto& u : units) s += u.str();
    return s + "]";
}

std::string SegreSymbol::canonical() const {
    std::vector<std::string> parts;
    for (auto& u : units) {
        auto b = u.sorted_blocks();
        std::string p;
        for (int x : b) p += std::to_string(x);
        parts.push_back(b.size() > 1 ? "(" + p + ")" : p);
    }
    std::sort(parts.begin(), parts.end());
    std::string s = "[";
    for (auto& p : parts) s += p;
    return s + "]";
}

const std::vector<std::string>& table1_symbols() {
    static const std::vector<std::string> t = {
        "[11111]", "[1112]",  "[111(11)]", "[12(11)]", "[1(11)(11)]", "[113]",   "[122]",    "[11(12)]",
        "[14]",    "[1(13)]", "[(11)3]",   "[(12)2]",  "[(11)(12)]",  "[(14)]",  "[23]",     "[5]"};
    return t;
}

std::string SegreSymbol::table_name() const {
    std::string c = canonical();
    for (auto& t : table1_symbols())
        if (parse(t).canonical() == c) return t;
    return c;
}

bool is_table1_symbol(const SegreSymbol& s) {
    std::string c = s.canonical();
    for (auto& t : table1_symbols())
        if (SegreSymbol::parse(t).canonical() == c) return true;
    return false;
}

int SegreSymbol::total() const {
    int t = 0;
    for (auto& u : units)
        for (int b : u.blocks) t += b;
    return t;
}

int SegreSymbol::double_conic_units() const {
    int k = 0;
    for (auto& u : units) k += u.double_conic_unit() ? 1 : 0;
    return k;
}

bool pencil_degenerate(const QMat& P, const QMat& Q) {
    // det(P + tQ) has degree <= n in t
    for (int t = 0; t <= P.rows() + 1; ++t)
        if (!is_zero((P + Rat(t) * Q).det())) return false;
    return is_zero(Q.det());
}

QuadricPencil make_pencil(const QMat& P, const QMat& Q) {
    if (P.rows() != 5 || P.cols() != 5 || Q.rows() != 5 || Q.cols() != 5)
        throw PreconditionFailed("pencil matrices must be 5x5");
    if (!P.symmetric() || !Q.symmetric()) throw PreconditionFailed("pencil matrices must be symmetric");
    QuadricPencil pc{P, Q, std::nullopt, Rat(0), Rat(1)};
    if (!is_zero(Q.det())) return pc;
    for (int k = 1; k <= 12; ++k) {
        for (int sgn : {1, -1}) {
            Rat a(sgn * k);
            if (!is_zero((a * P + Q).det())) {
                pc.ref_a = a;
                return pc;
            }
        }
    }
    if (!is_zero(P.det())) {
        pc.ref_a = 1;
        pc.ref_b = 0;
        return pc;
    }
    throw DegeneratePencil("every member of the pencil is singular");
}

namespace {

// Reference R = aP + bQ, partner S independent of R.
std::pair<QMat, QMat> reference_pair(const QuadricPencil& pc, Rat& sa, Rat& sb) {
    QMat R = pc.ref_a * pc.P + pc.ref_b * pc.Q;
    if (!is_zero(pc.ref_b)) { sa = 1; sb = 0; }
    else { sa = 0; sb = 1; }
    QMat S = sa * pc.P + sb * pc.Q;
    return {R, S};
}

} // namespace

SegreSymbol segre_symbol(const QuadricPencil& pc) {
    if (pencil_degenerate(pc.P, pc.Q)) throw DegeneratePencil("det(lambda P + mu Q) vanishes identically");
    Rat sa, sb;
    auto [R, S] = reference_pair(pc, sa, sb);
    QMat M = R.inverse() * S;
    int n = M.rows();
    UPoly cp = charpoly(M);
    auto roots = cp.rational_roots();
    int found = 0;
    for (auto& [r, m] : roots) found += m;
    if (found < n) throw IrrationalEigenvalue("characteristic polynomial " + cp.str("t") + " has irrational roots");
    SegreSymbol sym;
    QMat I = QMat::identity(n);
    for (auto& [alpha, mult] : roots) {
        QMat N = M - alpha * I;
        std::vector<int> rk{n};
        QMat pw = I;
        while (rk.back() > n - mult) {
            pw = pw * N;
            rk.push_back(pw.rank());
        }
        // number of blocks of size >= k is rk[k-1] - rk[k]
        SegreUnit u;
        int K = static_cast<int>(rk.size()) - 1;
        for (int k = K; k >= 1; --k) {
            int ge = rk[k - 1] - rk[k];
            int ge1 = k < K ? rk[k] - rk[k + 1] : 0;
            for (int c = 0; c < ge - ge1; ++c) u.blocks.push_back(k);
        }
        std::sort(u.blocks.begin(), u.blocks.end());
        // member S - alpha R
        u.lambda = sa - alpha * pc.ref_a;
        u.mu = sb - alpha * pc.ref_b;
        sym.units.push_back(u);
    }
    for (auto& u : sym.units) {
        // member P - t Q, or Q itself when lambda = 0
        if (!is_zero(u.lambda)) {
            u.mu /= u.lambda;
            u.lambda = 1;
            u.eigenvalue = -u.mu;
        } else {
            u.mu = 1;
            u.eigenvalue = 0;
        }
    }
    for (std::size_t k = 0; k < sym.units.size(); ++k) sym.units[k].id = std::string(1, static_cast<char>('a' + k));
    return sym;
}

QuadricPencil with_symbol(QuadricPencil pc) {
    pc.symbol = segre_symbol(pc);
    return pc;
}

std::map<std::string, Rat> default_params(const SegreSymbol& symbol) {
    static const int defaults[] = {1, 2, 5, 7, 11};
    std::map<std::string, Rat> p;
    for (std::size_t k = 0; k < symbol.units.size(); ++k)
        p[std::string(1, static_cast<char>('a' + k))] = Rat(defaults[k]);
    return p;
}

QuadricPencil normal_form(const SegreSymbol& symbol, const std::map<std::string, Rat>& params,
                          NormalFormStyle style) {
    if (symbol.total() != 5) throw PreconditionFailed("Segre symbol " + symbol.str() + " does not sum to 5");
    std::vector<Rat> alpha;
    for (std::size_t k = 0; k < symbol.units.size(); ++k) {
        auto id = std::string(1, static_cast<char>('a' + k));
        auto it = params.find(id);
        if (it == params.end()) throw PreconditionFailed("missing parameter '" + id + "'");
        for (auto& a : alpha)
            if (a == it->second) throw DuplicateEigenvalue("eigenvalue " + to_string(a) + " used twice");
        alpha.push_back(it->second);
    }
    QMat P(5, 5), Q(5, 5);
    int off = 0;
    for (std::size_t k = 0; k < symbol.units.size(); ++k) {
        const auto& u = symbol.units[k];
        Rat c(1);
        if (style == NormalFormStyle::Weighted) {
            for (std::size_t j = 0; j < symbol.units.size(); ++j) {
                if (j == k) continue;
                int m = 0;
                for (int b : symbol.units[j].blocks) m += b;
                for (int e = 0; e < m; ++e) c /= alpha[k] - alpha[j];
            }
        }
        if (u.blocks.size() == 2 && u.blocks[0] == 1 && u.blocks[1] == 1) {
            // hyperbolic form X_i X_j
            Rat h = c / 2;
            Q(off, off + 1) = Q(off + 1, off) = h;
            P(off, off + 1) = P(off + 1, off) = alpha[k] * h;
            off += 2;
            continue;
        }
        for (int b : u.blocks) {
            for (int i = 0; i < b; ++i) {
                Q(off + i, off + b - 1 - i) = c;
                P(off + i, off + b - 1 - i) = alpha[k] * c;
                if (b - i <= b - 1) P(off + i, off + b - i) = c;
            }
            off += b;
        }
    }
    if (style == NormalFormStyle::Weighted) {
        Int l = 1;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                l = lcm(l, Int(P(i, j).get_den()));
                l = lcm(l, Int(Q(i, j).get_den()));
            }
        P = Rat(l) * P;
        Q = Rat(l) * Q;
    }
    QuadricPencil pc = make_pencil(P, Q);
    SegreSymbol s = symbol;
    for (std::size_t k = 0; k < s.units.size(); ++k) {
        s.units[k].id = std::string(1, static_cast<char>('a' + k));
        s.units[k].eigenvalue = alpha[k];
        s.units[k].lambda = 1;
        s.units[k].mu = -alpha[k];
    }
    pc.symbol = s;
    return pc;
}

QuadricPencil normal_form(const std::string& symbol, NormalFormStyle style) {
    auto s = SegreSymbol::parse(symbol);
    return normal_form(s, default_params(s), style);
}

std::vector<RankMember> rank_drop_members(const QuadricPencil& pc) {
    SegreSymbol s = pc.symbol ? *pc.symbol : segre_symbol(pc);
    std::vector<RankMember> out;
    for (auto& u : s.units) {
        RankMember m{u.lambda, u.mu, pc.member(u.lambda, u.mu).rank(), false};
        m.flagged = m.rank == 3;
        out.push_back(m);
    }
    return out;
}

int double_conic_pencil_count(const QuadricPencil& pc) {
    SegreSymbol s = pc.symbol ? *pc.symbol : segre_symbol(pc);
    int units = s.double_conic_units();
    int rank3 = 0;
    for (auto& m : rank_drop_members(pc)) rank3 += m.flagged ? 1 : 0;
    if (units != rank3)
        throw CrossCheckMismatch("double conic units " + std::to_string(units) + " vs rank 3 members " +
                                 std::to_string(rank3));
    return units;
}

ValidationReport validate_segre(const QuadricPencil& pc) {
    ValidationReport r;
    r.det_nonzero = !pencil_degenerate(pc.P, pc.Q);
    if (!r.det_nonzero) {
        r.failures.push_back("pencil is degenerate");
        return r;
    }
    try {
        r.symbol = segre_symbol(pc);
        r.symbol_computed = true;
    } catch (const Error& e) {
        r.failures.push_back(std::string("symbol: ") + e.what());
        return r;
    }
    r.table1_symbol = is_table1_symbol(*r.symbol);
    r.no_low_rank_member = true;
    r.singular_set_finite = true;
    for (auto& u : r.symbol->units) {
        QMat A = pc.member(u.lambda, u.mu);
        int rk = A.rank();
        if (rk <= 2) r.no_low_rank_member = false;
        auto K = A.kernel();
        // singular points on this member: P(ker) cut by another member
        QMat B = is_zero(u.mu) ? pc.Q : pc.P;
        if (K.size() >= 3) r.singular_set_finite = false;
        if (K.size() == 2) {
            Rat a = qform(B, K[0]), b = qform(B, K[0], K[1]), c = qform(B, K[1]);
            if (is_zero(a) && is_zero(b) && is_zero(c)) r.singular_set_finite = false;
        }
    }
    if (!r.no_low_rank_member) r.failures.push_back("member of rank <= 2");
    if (!r.singular_set_finite) r.failures.push_back("singular locus is not finite");
    return r;
}

} // namespace segre
