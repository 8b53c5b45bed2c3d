#ifndef SEGRE_MATRIX_HPP
#define SEGRE_MATRIX_HPP

#include <string>
#include <utility>
#include <vector>

#include "segre/jet.hpp"

namespace segre {

/// Dense matrix over an exact field.
template <class K>
class Mat {
public:
    Mat() = default;
    Mat(int r, int c) : r_(r), c_(c), a_(static_cast<std::size_t>(r) * c, K(0)) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = K(1);
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    K& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * c_ + j]; }
    const K& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * c_ + j]; }

    friend Mat operator*(const Mat& x, const Mat& y) {
        Mat r(x.r_, y.c_);
        for (int i = 0; i < x.r_; ++i)
            for (int k = 0; k < x.c_; ++k) {
                if (is_zero(x(i, k))) continue;
                for (int j = 0; j < y.c_; ++j) r(i, j) += x(i, k) * y(k, j);
            }
        return r;
    }
    friend Mat operator+(const Mat& x, const Mat& y) {
        Mat r = x;
        for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] += y.a_[i];
        return r;
    }
    friend Mat operator-(const Mat& x, const Mat& y) {
        Mat r = x;
        for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] -= y.a_[i];
        return r;
    }
    friend Mat operator*(const K& s, const Mat& x) {
        Mat r = x;
        for (auto& v : r.a_) v *= s;
        return r;
    }
    friend bool operator==(const Mat& x, const Mat& y) {
        return x.r_ == y.r_ && x.c_ == y.c_ && x.a_ == y.a_;
    }

    Mat transpose() const {
        Mat r(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    bool symmetric() const {
        if (r_ != c_) return false;
        for (int i = 0; i < r_; ++i)
            for (int j = i + 1; j < c_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

    std::vector<K> apply(const std::vector<K>& v) const {
        std::vector<K> r(r_, K(0));
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    /// Reduced row echelon form; returns pivot columns.
    std::vector<int> rref() {
        std::vector<int> piv;
        int row = 0;
        for (int col = 0; col < c_ && row < r_; ++col) {
            int p = -1;
            for (int i = row; i < r_; ++i)
                if (!is_zero((*this)(i, col))) { p = i; break; }
            if (p < 0) continue;
            if (p != row)
                for (int j = 0; j < c_; ++j) std::swap((*this)(p, j), (*this)(row, j));
            K inv = K(1) / (*this)(row, col);
            for (int j = col; j < c_; ++j) (*this)(row, j) *= inv;
            for (int i = 0; i < r_; ++i) {
                if (i == row || is_zero((*this)(i, col))) continue;
                K f = (*this)(i, col);
                for (int j = col; j < c_; ++j) (*this)(i, j) -= f * (*this)(row, j);
            }
            piv.push_back(col);
            ++row;
        }
        return piv;
    }

    int rank() const {
        Mat m = *this;
        return static_cast<int>(m.rref().size());
    }

    K det() const {
        Mat m = *this;
        K d(1);
        int n = r_;
        for (int col = 0; col < n; ++col) {
            int p = -1;
            for (int i = col; i < n; ++i)
                if (!is_zero(m(i, col))) { p = i; break; }
            if (p < 0) return K(0);
            if (p != col) {
                for (int j = 0; j < n; ++j) std::swap(m(p, j), m(col, j));
                d = -d;
            }
            d *= m(col, col);
            K inv = K(1) / m(col, col);
            for (int i = col + 1; i < n; ++i) {
                if (is_zero(m(i, col))) continue;
                K f = m(i, col) * inv;
                for (int j = col; j < n; ++j) m(i, j) -= f * m(col, j);
            }
        }
        return d;
    }

    /// Inverse; throws NotInvertible.
    Mat inverse() const {
        int n = r_;
        Mat aug(n, 2 * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) aug(i, j) = (*this)(i, j);
            aug(i, n + i) = K(1);
        }
        auto piv = aug.rref();
        if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) throw NotInvertible("singular matrix");
        Mat r(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) = aug(i, n + j);
        return r;
    }

    /// Basis of the right kernel, as columns vectors.
    std::vector<std::vector<K>> kernel() const {
        Mat m = *this;
        auto piv = m.rref();
        std::vector<bool> isp(c_, false);
        for (int p : piv) isp[p] = true;
        std::vector<std::vector<K>> out;
        for (int f = 0; f < c_; ++f) {
            if (isp[f]) continue;
            std::vector<K> v(c_, K(0));
            v[f] = K(1);
            for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -m(static_cast<int>(i), f);
            out.push_back(v);
        }
        return out;
    }

    /// Solves this * x = b for square invertible systems.
    std::vector<K> solve(const std::vector<K>& b) const { return inverse().apply(b); }

private:
    int r_ = 0, c_ = 0;
    std::vector<K> a_;
};

using QMat = Mat<Rat>;
using QVec = std::vector<Rat>;

template <class K>
K bilinear(const Mat<K>& A, const std::vector<K>& u, const std::vector<K>& v) {
    K s(0);
    for (int i = 0; i < A.rows(); ++i) {
        if (is_zero(u[i])) continue;
        for (int j = 0; j < A.cols(); ++j) s += u[i] * A(i, j) * v[j];
    }
    return s;
}

/// Characteristic polynomial det(t*I - M) via interpolation.
inline UPoly charpoly(const QMat& M) {
    int n = M.rows();
    std::vector<Rat> xs, ys;
    for (int k = 0; k <= n; ++k) {
        QMat A = Rat(k) * QMat::identity(n) - M;
        xs.push_back(Rat(k));
        ys.push_back(A.det());
    }
    UPoly r;
    for (int i = 0; i <= n; ++i) {
        UPoly L(1);
        Rat den(1);
        for (int j = 0; j <= n; ++j) {
            if (j == i) continue;
            L = L * UPoly(std::vector<Rat>{-xs[j], Rat(1)});
            den *= xs[i] - xs[j];
        }
        r = r + L.scaled(ys[i] / den);
    }
    return r;
}

/// Completes the given independent vectors to a basis of K^n using unit vectors.
template <class K>
std::vector<std::vector<K>> complete_basis(std::vector<std::vector<K>> vs, int n) {
    for (int i = 0; i < n && static_cast<int>(vs.size()) < n; ++i) {
        std::vector<K> e(n, K(0));
        e[i] = K(1);
        vs.push_back(e);
        Mat<K> m(static_cast<int>(vs.size()), n);
        for (std::size_t r = 0; r < vs.size(); ++r)
            for (int c = 0; c < n; ++c) m(static_cast<int>(r), c) = vs[r][c];
        if (m.rank() < static_cast<int>(vs.size())) vs.pop_back();
    }
    return vs;
}

} // namespace segre

#endif
