#include "scatter/lattice.hpp"

#include <algorithm>

namespace scatter {

int rank_of(IMat m) {
    // fraction-free Gaussian elimination
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int piv = -1;
        for (int i = r; i < m.rows; ++i)
            if (m(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < m.cols; ++j) std::swap(m(piv, j), m(r, j));
        for (int i = r + 1; i < m.rows; ++i) {
            if (m(i, c) == 0) continue;
            Int g = boost::multiprecision::gcd(m(i, c), m(r, c));
            Int fi = m(r, c) / g, fr = m(i, c) / g;
            for (int j = 0; j < m.cols; ++j) m(i, j) = m(i, j) * fi - m(r, j) * fr;
        }
        ++r;
    }
    return r;
}

namespace {

// Column-style Hermite reduction of A, tracking the unimodular column
// transform U such that A' = A * U.
void hermite_columns(IMat& A, IMat& U) {
    int n = A.cols;
    int row = 0, col = 0;
    while (row < A.rows && col < n) {
        int piv = -1;
        for (int j = col; j < n; ++j)
            if (A(row, j) != 0) {
                piv = j;
                break;
            }
        if (piv < 0) {
            ++row;
            continue;
        }
        auto swap_cols = [&](IMat& M, int a, int b) {
            for (int i = 0; i < M.rows; ++i) std::swap(M(i, a), M(i, b));
        };
        if (piv != col) {
            swap_cols(A, piv, col);
            swap_cols(U, piv, col);
        }
        // eliminate to the right with gcd steps
        for (int j = col + 1; j < n; ++j) {
            while (A(row, j) != 0) {
                Int q = A(row, col) / A(row, j);  // truncated division
                for (int i = 0; i < A.rows; ++i) A(i, col) -= q * A(i, j);
                for (int i = 0; i < U.rows; ++i) U(i, col) -= q * U(i, j);
                swap_cols(A, col, j);
                swap_cols(U, col, j);
            }
        }
        if (A(row, col) < 0) {
            for (int i = 0; i < A.rows; ++i) A(i, col) = -A(i, col);
            for (int i = 0; i < U.rows; ++i) U(i, col) = -U(i, col);
        }
        ++row;
        ++col;
    }
}

}  // namespace

std::vector<IVec> kernel_basis(const std::vector<IVec>& rows, int ambient) {
    IMat A = IMat::from_rows(rows, ambient);
    if (A.rows == 0) {
        std::vector<IVec> basis;
        for (int i = 0; i < ambient; ++i) {
            IVec e(ambient, Int(0));
            e[i] = 1;
            basis.push_back(e);
        }
        return basis;
    }
    IMat U = IMat::identity(ambient);
    hermite_columns(A, U);
    std::vector<IVec> basis;
    for (int j = 0; j < ambient; ++j) {
        bool zero = true;
        for (int i = 0; i < A.rows; ++i)
            if (A(i, j) != 0) {
                zero = false;
                break;
            }
        if (zero) {
            IVec v = U.col(j);
            if (!is_zero(v)) basis.push_back(primitive(v));
        }
    }
    return basis;
}

std::vector<IVec> hnf_basis(const std::vector<IVec>& gens, int ambient) {
    // Row-style HNF via column reduction of the transpose.
    IMat A = IMat::from_rows(gens, ambient).transpose();  // ambient x m
    IMat U = IMat::identity(A.cols);
    hermite_columns(A, U);
    std::vector<IVec> rows;
    for (int j = 0; j < A.cols; ++j) {
        IVec v = A.col(j);
        if (!is_zero(v)) rows.push_back(v);
    }
    // reduce above-pivot entries for uniqueness
    for (size_t i = 0; i < rows.size(); ++i) {
        int p = 0;
        while (p < ambient && rows[i][p] == 0) ++p;
        for (size_t i2 = 0; i2 < i; ++i2) {
            Int q;
            if (rows[i2][p] >= 0) {
                q = rows[i2][p] / rows[i][p];
            } else {
                Int num = -rows[i2][p] + rows[i][p] - 1;
                q = num / rows[i][p];
                q = -q;
            }
            if (q != 0)
                for (int j = 0; j < ambient; ++j) rows[i2][j] -= q * rows[i][j];
        }
    }
    return rows;
}

SmithResult smith_normal_form(IMat A) {
    IMat U = IMat::identity(A.rows);
    IMat V = IMat::identity(A.cols);
    int t = 0;
    auto swap_rows = [&](IMat& M, int a, int b) {
        for (int j = 0; j < M.cols; ++j) std::swap(M(a, j), M(b, j));
    };
    auto swap_cols = [&](IMat& M, int a, int b) {
        for (int i = 0; i < M.rows; ++i) std::swap(M(i, a), M(i, b));
    };
    while (t < A.rows && t < A.cols) {
        // find a nonzero pivot
        int pi = -1, pj = -1;
        for (int i = t; i < A.rows && pi < 0; ++i)
            for (int j = t; j < A.cols; ++j)
                if (A(i, j) != 0) {
                    pi = i;
                    pj = j;
                    break;
                }
        if (pi < 0) break;
        if (pi != t) {
            swap_rows(A, pi, t);
            swap_rows(U, pi, t);
        }
        if (pj != t) {
            swap_cols(A, pj, t);
            swap_cols(V, pj, t);
        }
        // shrink the pivot to the gcd of its row and column, then clear both
        // with exact eliminations that leave row t and column t intact
        for (;;) {
            bool reduced = false;
            for (int i = t + 1; i < A.rows; ++i) {
                while (A(i, t) % A(t, t) != 0) {
                    Int q = A(i, t) / A(t, t);
                    for (int j = 0; j < A.cols; ++j) A(i, j) -= q * A(t, j);
                    for (int j = 0; j < U.cols; ++j) U(i, j) -= q * U(t, j);
                    swap_rows(A, t, i);
                    swap_rows(U, t, i);
                    reduced = true;
                }
            }
            for (int i = t + 1; i < A.rows; ++i) {
                Int q = A(i, t) / A(t, t);
                if (q == 0) continue;
                for (int j = 0; j < A.cols; ++j) A(i, j) -= q * A(t, j);
                for (int j = 0; j < U.cols; ++j) U(i, j) -= q * U(t, j);
            }
            for (int j = t + 1; j < A.cols; ++j) {
                while (A(t, j) % A(t, t) != 0) {
                    Int q = A(t, j) / A(t, t);
                    for (int i = 0; i < A.rows; ++i) A(i, j) -= q * A(i, t);
                    for (int i = 0; i < V.rows; ++i) V(i, j) -= q * V(i, t);
                    swap_cols(A, t, j);
                    swap_cols(V, t, j);
                    reduced = true;
                }
            }
            for (int j = t + 1; j < A.cols; ++j) {
                Int q = A(t, j) / A(t, t);
                if (q == 0) continue;
                for (int i = 0; i < A.rows; ++i) A(i, j) -= q * A(i, t);
                for (int i = 0; i < V.rows; ++i) V(i, j) -= q * V(i, t);
            }
            bool clean = true;
            for (int i = t + 1; i < A.rows; ++i)
                if (A(i, t) != 0) clean = false;
            for (int j = t + 1; j < A.cols; ++j)
                if (A(t, j) != 0) clean = false;
            (void)reduced;  // every non-clean pass strictly shrinks |A(t,t)|
            if (clean) break;
        }
        // divisibility fix-up: pivot must divide the remaining block
        bool restart = false;
        for (int i = t + 1; i < A.rows && !restart; ++i)
            for (int j = t + 1; j < A.cols; ++j)
                if (A(i, j) % A(t, t) != 0) {
                    for (int jj = 0; jj < A.cols; ++jj) A(t, jj) += A(i, jj);
                    for (int jj = 0; jj < U.cols; ++jj) U(t, jj) += U(i, jj);
                    restart = true;
                    break;
                }
        if (restart) continue;
        if (A(t, t) < 0) {
            for (int j = 0; j < A.cols; ++j) A(t, j) = -A(t, j);
            for (int j = 0; j < U.cols; ++j) U(t, j) = -U(t, j);
        }
        ++t;
    }
    return {U, A, V};
}

IMat extend_to_basis(const std::vector<IVec>& sublattice_rows, int ambient) {
    // B = U^{-1} [I;0] V for SNF of B^T ... simpler: SNF of the matrix whose
    // columns are the sublattice vectors: A = U^{-1} D V^{-1}; for a
    // saturated sublattice D has unit pivots and the first k columns of
    // U^{-1} span it. Rows of the result are U^{-1} transposed columns.
    int k = static_cast<int>(sublattice_rows.size());
    if (k == 0) return IMat::identity(ambient);
    IMat A(ambient, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < ambient; ++i) A(i, j) = sublattice_rows[j][i];
    SmithResult s = smith_normal_form(A);
    for (int i = 0; i < k; ++i)
        if (i >= s.D.rows || i >= s.D.cols || (s.D(i, i) != 1 && s.D(i, i) != -1))
            throw DomainError("extend_to_basis: sublattice not saturated or not independent");
    // U A V = D => A V = U^{-1} D, so columns of U^{-1} give the adapted basis.
    // Invert the unimodular U by solving U X = I with integer row reduction.
    IMat Uinv = IMat::identity(s.U.rows);
    IMat W = s.U;
    // forward eliminate to identity (W is unimodular)
    for (int c = 0; c < W.cols; ++c) {
        int piv = -1;
        for (int i = c; i < W.rows; ++i)
            if (W(i, c) != 0) {
                piv = i;
                break;
            }
        for (int j = 0; j < W.cols; ++j) std::swap(W(piv, j), W(c, j));
        for (int j = 0; j < Uinv.cols; ++j) std::swap(Uinv(piv, j), Uinv(c, j));
        for (int i = c + 1; i < W.rows; ++i) {
            while (W(i, c) != 0) {
                Int q = W(c, c) / W(i, c);
                for (int j = 0; j < W.cols; ++j) W(c, j) -= q * W(i, j);
                for (int j = 0; j < Uinv.cols; ++j) Uinv(c, j) -= q * Uinv(i, j);
                for (int j = 0; j < W.cols; ++j) std::swap(W(c, j), W(i, j));
                for (int j = 0; j < Uinv.cols; ++j) std::swap(Uinv(c, j), Uinv(i, j));
            }
        }
        if (W(c, c) < 0) {
            for (int j = 0; j < W.cols; ++j) W(c, j) = -W(c, j);
            for (int j = 0; j < Uinv.cols; ++j) Uinv(c, j) = -Uinv(c, j);
        }
    }
    for (int c = W.cols - 1; c >= 0; --c) {
        for (int i = 0; i < c; ++i) {
            Int q = W(i, c) / W(c, c);
            if (q != 0) {
                for (int j = 0; j < W.cols; ++j) W(i, j) -= q * W(c, j);
                for (int j = 0; j < Uinv.cols; ++j) Uinv(i, j) -= q * Uinv(c, j);
            }
        }
    }
    // adapted basis vectors = columns of U^{-1}
    IMat out(ambient, ambient);
    for (int i = 0; i < ambient; ++i)
        for (int j = 0; j < ambient; ++j) out(i, j) = Uinv(j, i);
    return out;  // row i = i-th basis vector; first k rows span the sublattice
}

std::optional<IVec> in_span_coordinates(const std::vector<IVec>& basis, const IVec& x) {
    // Solve sum_i y_i basis_i = x exactly with rational elimination, then
    // check integrality.
    int n = static_cast<int>(x.size());
    int k = static_cast<int>(basis.size());
    std::vector<std::vector<Rat>> M(n, std::vector<Rat>(k + 1, Rat(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) M[i][j] = Rat(basis[j][i]);
        M[i][k] = Rat(x[i]);
    }
    int r = 0;
    std::vector<int> pivot_col;
    for (int c = 0; c < k && r < n; ++c) {
        int piv = -1;
        for (int i = r; i < n; ++i)
            if (M[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(M[piv], M[r]);
        Rat d = M[r][c];
        for (int j = 0; j <= k; ++j) M[r][j] /= d;
        for (int i = 0; i < n; ++i) {
            if (i == r || M[i][c] == 0) continue;
            Rat f = M[i][c];
            for (int j = 0; j <= k; ++j) M[i][j] -= f * M[r][j];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (int i = r; i < n; ++i)
        if (M[i][k] != 0) return std::nullopt;  // inconsistent
    IVec y(k, Int(0));
    for (int i = 0; i < r; ++i) {
        Rat val = M[i][k];
        if (denominator(val) != 1) return std::nullopt;
        y[pivot_col[i]] = numerator(val);
    }
    return y;
}

std::vector<IVec> kernel_sublattice(const LatticeMap& f) {
    std::vector<IVec> rows;
    for (int i = 0; i < f.m.rows; ++i) rows.push_back(f.m.row(i));
    return kernel_basis(rows, f.m.cols);
}

SkewForm::SkewForm(IMat mat) : m(std::move(mat)) {
    if (m.rows != m.cols) throw DimensionError("SkewForm: square matrix required");
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            if (m(i, j) != -m(j, i)) throw DomainError("SkewForm: matrix not skew-symmetric");
}

Int SkewForm::eval(const IVec& a, const IVec& b) const {
    if (static_cast<int>(a.size()) != m.rows || static_cast<int>(b.size()) != m.rows)
        throw DimensionError("SkewForm::eval rank mismatch");
    Int s = 0;
    for (int i = 0; i < m.rows; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < m.cols; ++j) s += a[i] * m(i, j) * b[j];
    }
    return s;
}

}  // namespace scatter
