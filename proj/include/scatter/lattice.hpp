#pragma once

#include "scatter/numeric.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace scatter {

// Dense integer matrix, row-major.
struct IMat {
    int rows = 0;
    int cols = 0;
    std::vector<Int> a;

    IMat() = default;
    IMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, Int(0)) {}

    Int& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Int& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static IMat identity(int n) {
        IMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static IMat from_rows(const std::vector<IVec>& rows_in, int cols_hint = -1) {
        int c = cols_hint;
        if (c < 0) c = rows_in.empty() ? 0 : static_cast<int>(rows_in[0].size());
        IMat m(static_cast<int>(rows_in.size()), c);
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = rows_in[i][j];
        return m;
    }
    IVec row(int i) const {
        IVec r(cols);
        for (int j = 0; j < cols; ++j) r[j] = (*this)(i, j);
        return r;
    }
    IVec col(int j) const {
        IVec c(rows);
        for (int i = 0; i < rows; ++i) c[i] = (*this)(i, j);
        return c;
    }
    IVec apply(const IVec& x) const {
        if (static_cast<int>(x.size()) != cols) throw DimensionError("IMat::apply size");
        IVec y(rows, Int(0));
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }
    QVec apply_q(const QVec& x) const {
        if (static_cast<int>(x.size()) != cols) throw DimensionError("IMat::apply size");
        QVec y(rows, Rat(0));
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) y[i] += Rat((*this)(i, j)) * x[j];
        return y;
    }
    IMat transpose() const {
        IMat t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    IMat mul(const IMat& o) const {
        if (cols != o.rows) throw DimensionError("IMat::mul shape");
        IMat r(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                if ((*this)(i, k) == 0) continue;
                for (int j = 0; j < o.cols; ++j) r(i, j) += (*this)(i, k) * o(k, j);
            }
        return r;
    }
    bool operator==(const IMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

int rank_of(IMat m);

// Saturated integer kernel basis of the row-functional system: all x with
// rows_i · x = 0. Returned vectors are primitive and independent.
std::vector<IVec> kernel_basis(const std::vector<IVec>& rows, int ambient);

// Canonical (row-style HNF) basis matrix of the sublattice spanned by the
// given vectors; rows are the basis. Unique per sublattice.
std::vector<IVec> hnf_basis(const std::vector<IVec>& gens, int ambient);

// Smith normal form: U * A * V = D with U, V unimodular, D diagonal with
// d_1 | d_2 | ... Returns (U, D, V).
struct SmithResult {
    IMat U, D, V;
};
SmithResult smith_normal_form(IMat A);

// Extends a basis of a saturated sublattice (rows) to a basis of Z^ambient.
// Returns an ambient x ambient unimodular matrix whose first k rows span the
// sublattice.
IMat extend_to_basis(const std::vector<IVec>& sublattice_rows, int ambient);

// Solves B^T y = x for integer y where the columns of B^T are the given
// basis vectors (rows of `basis`); nullopt when x is not in the span or the
// solution is non-integral.
std::optional<IVec> in_span_coordinates(const std::vector<IVec>& basis, const IVec& x);

// Integral linear map between lattices, matrix shape target_rank x source_rank.
struct LatticeMap {
    IMat m;

    LatticeMap() = default;
    explicit LatticeMap(IMat mat) : m(std::move(mat)) {}
    static LatticeMap identity(int n) { return LatticeMap(IMat::identity(n)); }

    int source_rank() const { return m.cols; }
    int target_rank() const { return m.rows; }
    IVec apply(const IVec& x) const { return m.apply(x); }
    QVec apply(const QVec& x) const { return m.apply_q(x); }
    LatticeMap compose(const LatticeMap& inner) const { return LatticeMap(m.mul(inner.m)); }
};

// Basis of the saturated kernel sublattice ker(f).
std::vector<IVec> kernel_sublattice(const LatticeMap& f);

// Integral skew-symmetric bilinear form {.,.} on a rank-n lattice.
struct SkewForm {
    IMat m;

    SkewForm() = default;
    explicit SkewForm(IMat mat);
    int rank() const { return m.rows; }
    Int eval(const IVec& a, const IVec& b) const;
};

}  // namespace scatter
