#pragma once

/**
 * @file linalg.hpp
 * @brief Dense exact linear algebra over a FieldSpec.
 *
 * Everything here is exact Gaussian elimination at desk scale; matrices are
 * row-major vectors of element codes with the field carried alongside.  The
 * RREF struct keeps pivot bookkeeping so membership tests and canonical
 * coset representatives come cheap after one elimination.
 */

#include <optional>
#include <stdexcept>
#include <vector>

#include "gf.hpp"

namespace aqec {

struct Mat {
    const FieldSpec* f = nullptr;
    std::size_t rows = 0, cols = 0;
    std::vector<fq> a;

    Mat() = default;
    Mat(const FieldSpec& field, std::size_t r, std::size_t c)
        : f(&field), rows(r), cols(c), a(r * c, 0) {}

    fq& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    fq at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    std::vector<fq> row(std::size_t r) const {
        return {a.begin() + r * cols, a.begin() + (r + 1) * cols};
    }
    void set_row(std::size_t r, const std::vector<fq>& v) {
        if (v.size() != cols) throw std::invalid_argument("Mat::set_row: bad length");
        std::copy(v.begin(), v.end(), a.begin() + r * cols);
    }

    static Mat identity(const FieldSpec& field, std::size_t n) {
        Mat m(field, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
    static Mat from_rows(const FieldSpec& field, const std::vector<std::vector<fq>>& rows) {
        if (rows.empty()) return Mat(field, 0, 0);
        Mat m(field, rows.size(), rows[0].size());
        for (std::size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
        return m;
    }

    bool operator==(const Mat& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }
};

inline fq vec_dot(const FieldSpec& f, const std::vector<fq>& u, const std::vector<fq>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("vec_dot: length mismatch");
    fq s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) s = f.add(s, f.mul(u[i], v[i]));
    return s;
}

inline std::vector<fq> vec_add(const FieldSpec& f, const std::vector<fq>& u,
                               const std::vector<fq>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("vec_add: length mismatch");
    std::vector<fq> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = f.add(u[i], v[i]);
    return w;
}

inline std::vector<fq> vec_sub(const FieldSpec& f, const std::vector<fq>& u,
                               const std::vector<fq>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("vec_sub: length mismatch");
    std::vector<fq> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = f.sub(u[i], v[i]);
    return w;
}

inline std::vector<fq> vec_scale(const FieldSpec& f, fq c, const std::vector<fq>& u) {
    std::vector<fq> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = f.mul(c, u[i]);
    return w;
}

inline std::vector<fq> vec_neg(const FieldSpec& f, const std::vector<fq>& u) {
    std::vector<fq> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = f.neg(u[i]);
    return w;
}

inline bool vec_is_zero(const std::vector<fq>& u) {
    for (fq x : u) if (x != 0) return false;
    return true;
}

inline Mat mat_mul(const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw std::invalid_argument("mat_mul: shape mismatch");
    const FieldSpec& f = *A.f;
    Mat C(f, A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t k = 0; k < A.cols; ++k) {
            const fq v = A.at(i, k);
            if (v == 0) continue;
            for (std::size_t j = 0; j < B.cols; ++j)
                C.at(i, j) = f.add(C.at(i, j), f.mul(v, B.at(k, j)));
        }
    return C;
}

inline Mat mat_transpose(const Mat& A) {
    Mat T(*A.f, A.cols, A.rows);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
    return T;
}

/// A y for a column vector y.
inline std::vector<fq> mat_apply(const Mat& A, const std::vector<fq>& y) {
    if (y.size() != A.cols) throw std::invalid_argument("mat_apply: shape mismatch");
    const FieldSpec& f = *A.f;
    std::vector<fq> out(A.rows, 0);
    for (std::size_t i = 0; i < A.rows; ++i) {
        fq s = 0;
        for (std::size_t j = 0; j < A.cols; ++j) s = f.add(s, f.mul(A.at(i, j), y[j]));
        out[i] = s;
    }
    return out;
}

/// x^T A for a row vector x (message encoding against a generator matrix).
inline std::vector<fq> row_times_mat(const std::vector<fq>& x, const Mat& A) {
    if (x.size() != A.rows) throw std::invalid_argument("row_times_mat: shape mismatch");
    const FieldSpec& f = *A.f;
    std::vector<fq> out(A.cols, 0);
    for (std::size_t i = 0; i < A.rows; ++i) {
        const fq v = x[i];
        if (v == 0) continue;
        for (std::size_t j = 0; j < A.cols; ++j)
            out[j] = f.add(out[j], f.mul(v, A.at(i, j)));
    }
    return out;
}

/// Reduced row echelon form with pivot bookkeeping.
struct RREF {
    Mat m;                          // RREF matrix (possibly with zero rows trimmed)
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
    std::size_t rank = 0;
};

inline RREF make_rref(Mat A) {
    const FieldSpec& f = *A.f;
    RREF out;
    std::size_t rank = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t col = 0; col < A.cols && rank < A.rows; ++col) {
        std::size_t piv = rank;
        while (piv < A.rows && A.at(piv, col) == 0) ++piv;
        if (piv == A.rows) continue;
        if (piv != rank)
            for (std::size_t c = 0; c < A.cols; ++c)
                std::swap(A.at(piv, c), A.at(rank, c));
        const fq inv = f.inv(A.at(rank, col));
        for (std::size_t c = 0; c < A.cols; ++c)
            A.at(rank, c) = f.mul(A.at(rank, c), inv);
        for (std::size_t r = 0; r < A.rows; ++r) {
            if (r == rank) continue;
            const fq v = A.at(r, col);
            if (v == 0) continue;
            for (std::size_t c = 0; c < A.cols; ++c)
                A.at(r, c) = f.sub(A.at(r, c), f.mul(v, A.at(rank, c)));
        }
        pivots.push_back(col);
        ++rank;
    }
    // trim zero rows
    Mat trimmed(f, rank, A.cols);
    for (std::size_t r = 0; r < rank; ++r)
        for (std::size_t c = 0; c < A.cols; ++c) trimmed.at(r, c) = A.at(r, c);
    out.m = std::move(trimmed);
    out.pivots = std::move(pivots);
    out.rank = rank;
    return out;
}

inline std::size_t mat_rank(const Mat& A) { return make_rref(A).rank; }

/// Canonical representative of v modulo the row space: pivot positions are
/// eliminated, so two vectors reduce equal iff they lie in the same coset.
inline std::vector<fq> rref_reduce(const RREF& R, std::vector<fq> v) {
    const FieldSpec& f = *R.m.f;
    if (v.size() != R.m.cols) throw std::invalid_argument("rref_reduce: length mismatch");
    for (std::size_t r = 0; r < R.rank; ++r) {
        const fq c = v[R.pivots[r]];
        if (c == 0) continue;
        for (std::size_t j = 0; j < R.m.cols; ++j)
            v[j] = f.sub(v[j], f.mul(c, R.m.at(r, j)));
    }
    return v;
}

inline bool rref_contains(const RREF& R, const std::vector<fq>& v) {
    return vec_is_zero(rref_reduce(R, v));
}

/// Coordinates of v in the RREF row basis (v must lie in the row space).
inline std::vector<fq> rref_coords(const RREF& R, const std::vector<fq>& v) {
    std::vector<fq> c(R.rank);
    for (std::size_t r = 0; r < R.rank; ++r) c[r] = v[R.pivots[r]];
    // verify membership while we are at it
    const FieldSpec& f = *R.m.f;
    std::vector<fq> rebuilt(R.m.cols, 0);
    for (std::size_t r = 0; r < R.rank; ++r)
        for (std::size_t j = 0; j < R.m.cols; ++j)
            rebuilt[j] = f.add(rebuilt[j], f.mul(c[r], R.m.at(r, j)));
    if (rebuilt != v)
        throw std::domain_error("rref_coords: vector outside the row space");
    return c;
}

/// Basis of the right kernel {y : A y = 0}, one basis vector per row.
inline Mat mat_nullspace(const Mat& A) {
    const FieldSpec& f = *A.f;
    RREF R = make_rref(A);
    std::vector<bool> is_pivot(A.cols, false);
    for (auto c : R.pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < A.cols; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    Mat N(f, free_cols.size(), A.cols);
    for (std::size_t i = 0; i < free_cols.size(); ++i) {
        const std::size_t fc = free_cols[i];
        N.at(i, fc) = 1;
        for (std::size_t r = 0; r < R.rank; ++r)
            N.at(i, R.pivots[r]) = f.neg(R.m.at(r, fc));
    }
    return N;
}

/// One solution of A y = b (column convention), or nullopt if inconsistent.
inline std::optional<std::vector<fq>> mat_solve(const Mat& A, const std::vector<fq>& b) {
    if (b.size() != A.rows) throw std::invalid_argument("mat_solve: shape mismatch");
    const FieldSpec& f = *A.f;
    Mat W(f, A.rows, A.cols + 1);
    for (std::size_t r = 0; r < A.rows; ++r) {
        for (std::size_t c = 0; c < A.cols; ++c) W.at(r, c) = A.at(r, c);
        W.at(r, A.cols) = b[r];
    }
    // eliminate, allowing pivots only in the coefficient block
    std::size_t rank = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t col = 0; col < A.cols && rank < W.rows; ++col) {
        std::size_t piv = rank;
        while (piv < W.rows && W.at(piv, col) == 0) ++piv;
        if (piv == W.rows) continue;
        if (piv != rank)
            for (std::size_t c = 0; c <= A.cols; ++c)
                std::swap(W.at(piv, c), W.at(rank, c));
        const fq inv = f.inv(W.at(rank, col));
        for (std::size_t c = 0; c <= A.cols; ++c)
            W.at(rank, c) = f.mul(W.at(rank, c), inv);
        for (std::size_t r = 0; r < W.rows; ++r) {
            if (r == rank) continue;
            const fq v = W.at(r, col);
            if (v == 0) continue;
            for (std::size_t c = 0; c <= A.cols; ++c)
                W.at(r, c) = f.sub(W.at(r, c), f.mul(v, W.at(rank, c)));
        }
        pivots.push_back(col);
        ++rank;
    }
    for (std::size_t r = rank; r < W.rows; ++r)
        if (W.at(r, A.cols) != 0) return std::nullopt;
    std::vector<fq> y(A.cols, 0);
    for (std::size_t r = 0; r < rank; ++r) y[pivots[r]] = W.at(r, A.cols);
    return y;
}

inline Mat mat_inverse(const Mat& A) {
    if (A.rows != A.cols) throw std::invalid_argument("mat_inverse: not square");
    const FieldSpec& f = *A.f;
    Mat W(f, A.rows, 2 * A.cols);
    for (std::size_t r = 0; r < A.rows; ++r) {
        for (std::size_t c = 0; c < A.cols; ++c) W.at(r, c) = A.at(r, c);
        W.at(r, A.cols + r) = 1;
    }
    RREF R = make_rref(std::move(W));
    if (R.rank != A.rows || R.pivots.back() >= A.cols)
        throw std::domain_error("mat_inverse: singular matrix");
    Mat out(f, A.rows, A.cols);
    for (std::size_t r = 0; r < A.rows; ++r)
        for (std::size_t c = 0; c < A.cols; ++c) out.at(r, c) = R.m.at(r, A.cols + c);
    return out;
}

/// Are all rows of A inside the row space of B?
inline bool rowspace_contained(const Mat& A, const Mat& B) {
    RREF R = make_rref(B);
    for (std::size_t r = 0; r < A.rows; ++r)
        if (!rref_contains(R, A.row(r))) return false;
    return true;
}

inline bool rowspace_equal(const Mat& A, const Mat& B) {
    RREF ra = make_rref(A), rb = make_rref(B);
    return ra.rank == rb.rank && ra.m == rb.m && ra.pivots == rb.pivots;
}

/// Rows of A stacked on rows of B.
inline Mat mat_vstack(const Mat& A, const Mat& B) {
    if (A.rows == 0) return B;
    if (B.rows == 0) return A;
    if (A.cols != B.cols) throw std::invalid_argument("mat_vstack: width mismatch");
    Mat C(*A.f, A.rows + B.rows, A.cols);
    std::copy(A.a.begin(), A.a.end(), C.a.begin());
    std::copy(B.a.begin(), B.a.end(), C.a.begin() + A.a.size());
    return C;
}

/// Iterate the row space of a basis matrix: calls fn(word) for every linear
/// combination, the zero word included, using an odometer over scaled rows
/// so each step costs one row addition rebuild.
template <typename Fn>
void for_each_in_rowspace(const Mat& basis, Fn&& fn) {
    const FieldSpec& f = *basis.f;
    const std::size_t k = basis.rows, n = basis.cols, q = f.q;
    if (k == 0) {
        std::vector<fq> zero(n, 0);
        fn(static_cast<const std::vector<fq>&>(zero));
        return;
    }
    // Precompute every scalar multiple of every row.
    std::vector<std::vector<fq>> scaled(k * q);
    for (std::size_t r = 0; r < k; ++r)
        for (fq c = 0; c < q; ++c) scaled[r * q + c] = vec_scale(f, c, basis.row(r));

    // prefix[i] = sum of scaled rows 0..i-1 under the current odometer
    std::vector<std::vector<fq>> prefix(k + 1, std::vector<fq>(n, 0));
    std::vector<fq> digit(k, 0);
    while (true) {
        fn(static_cast<const std::vector<fq>&>(prefix[k]));
        // odometer increment, rebuilding prefixes from the changed digit up
        std::size_t i = k;
        while (i > 0 && digit[i - 1] + 1 == q) { digit[i - 1] = 0; --i; }
        if (i == 0) break;
        ++digit[i - 1];
        for (std::size_t r = i - 1; r < k; ++r)
            prefix[r + 1] = vec_add(f, prefix[r], scaled[r * q + digit[r]]);
    }
}

}  // namespace aqec
