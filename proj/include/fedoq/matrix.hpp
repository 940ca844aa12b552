#pragma once

#include <vector>

#include "fedoq/base_element.hpp"

namespace fedoq {

// Dense matrix over the coefficient ring. Sizes here are tiny (the number of
// base variables / fiber rank), so no effort is spent on sparsity.
class PolyMatrix {
public:
    PolyMatrix() = default;

    PolyMatrix(int rows, int cols, RingMode mode)
        : rows_(rows), cols_(cols), mode_(mode),
          data_(static_cast<std::size_t>(rows) * cols, BaseElement(mode)) {}

    static PolyMatrix identity(int n, RingMode mode) {
        PolyMatrix m(n, n, mode);
        for (int i = 0; i < n; ++i) m.at(i, i) = BaseElement::one(mode);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const RingMode& mode() const { return mode_; }

    BaseElement& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const BaseElement& at(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix shape mismatch");
        PolyMatrix r(a.rows_, b.cols_, a.mode_);
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < b.cols_; ++j) {
                BaseElement s(a.mode_);
                for (int k = 0; k < a.cols_; ++k) s += a.at(i, k) * b.at(k, j);
                r.at(i, j) = s;
            }
        return r;
    }

    friend PolyMatrix operator-(PolyMatrix a, const PolyMatrix& b) {
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j) a.at(i, j) -= b.at(i, j);
        return a;
    }

    friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    bool is_skew() const {
        if (rows_ != cols_) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j <= i; ++j)
                if (!(at(i, j) + at(j, i)).is_zero()) return false;
        return true;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    RingMode mode_{};
    std::vector<BaseElement> data_;
};

namespace detail {

inline BaseElement poly_det(const PolyMatrix& m, std::vector<int> cols, int row) {
    const RingMode& mode = m.mode();
    if (cols.empty()) return BaseElement::one(mode);
    BaseElement det(mode);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const BaseElement& pivot = m.at(row, cols[k]);
        if (pivot.is_zero()) continue;
        std::vector<int> sub;
        sub.reserve(cols.size() - 1);
        for (std::size_t t = 0; t < cols.size(); ++t)
            if (t != k) sub.push_back(cols[t]);
        BaseElement minor = poly_det(m, std::move(sub), row + 1);
        BaseElement contrib = pivot * minor;
        if (k % 2 == 0)
            det += contrib;
        else
            det -= contrib;
    }
    return det;
}

// Gauss-Jordan over the rationals for the constant-term block in jet mode.
inline std::vector<std::vector<Rational>> rational_invert(std::vector<std::vector<Rational>> a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < n; ++i) inv[i][i] = 1;
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (a[r][col] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw ValidationError("matrix_invert: singular constant term");
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        Rational p = a[col][col];
        for (int j = 0; j < n; ++j) {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col];
            for (int j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

} // namespace detail

// Exact two-sided inverse. Polynomial mode requires the determinant to be a
// nonzero constant (the only units); jet mode requires an invertible constant
// term and sums the geometric series, which terminates modulo the jet ideal.
inline PolyMatrix matrix_invert(const PolyMatrix& p) {
    if (p.rows() != p.cols()) throw std::invalid_argument("matrix_invert: not square");
    const int n = p.rows();
    const RingMode& mode = p.mode();
    PolyMatrix inv(n, n, mode);

    if (!mode.jet) {
        std::vector<int> cols(n);
        for (int i = 0; i < n; ++i) cols[i] = i;
        BaseElement det = detail::poly_det(p, cols, 0);
        if (det.is_zero() || !det.is_constant())
            throw ValidationError("matrix_invert: no polynomial inverse exists (determinant is not a nonzero constant)");
        Rational inv_det = 1 / det.constant_term();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                // Cofactor C(j,i) builds the adjugate transpose in place.
                PolyMatrix minor(n - 1, n - 1, mode);
                for (int r = 0, rr = 0; r < n; ++r) {
                    if (r == j) continue;
                    for (int c = 0, cc = 0; c < n; ++c) {
                        if (c == i) continue;
                        minor.at(rr, cc) = p.at(r, c);
                        ++cc;
                    }
                    ++rr;
                }
                std::vector<int> mcols(n - 1);
                for (int k = 0; k < n - 1; ++k) mcols[k] = k;
                BaseElement cof = detail::poly_det(minor, mcols, 0);
                if ((i + j) % 2 == 1) cof = -cof;
                inv.at(i, j) = cof.scaled(inv_det);
            }
    } else {
        std::vector<std::vector<Rational>> c0(n, std::vector<Rational>(n, Rational(0)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c0[i][j] = p.at(i, j).constant_term();
        auto c0inv = detail::rational_invert(std::move(c0));
        PolyMatrix p0inv(n, n, mode);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                p0inv.at(i, j) = BaseElement::constant(mode, c0inv[i][j]);

        PolyMatrix u = p0inv * p - PolyMatrix::identity(n, mode); // entries vanish at 0
        PolyMatrix series = PolyMatrix::identity(n, mode);
        PolyMatrix upow = PolyMatrix::identity(n, mode);
        for (int k = 1; k <= mode.max_degree; ++k) {
            upow = upow * u;
            bool all_zero = true;
            for (int i = 0; i < n && all_zero; ++i)
                for (int j = 0; j < n && all_zero; ++j)
                    if (!upow.at(i, j).is_zero()) all_zero = false;
            if (all_zero) break;
            if (k % 2 == 1)
                series = series - upow;
            else {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) series.at(i, j) += upow.at(i, j);
            }
        }
        inv = series * p0inv;
    }

    PolyMatrix id = PolyMatrix::identity(n, mode);
    if (!(p * inv == id) || !(inv * p == id))
        throw InternalError("matrix_invert: inverse verification failed");
    return inv;
}

} // namespace fedoq
