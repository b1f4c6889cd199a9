#include "compreg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace compreg::dense {

DenseMatrix from_sparse(const SparseMatrix& m) {
    DenseMatrix d(m.nrows, m.ncols);
    std::size_t p = 0;
    for (std::size_t i = 0; i < m.nrows; ++i)
        for (std::size_t k = 0; k < m.row_nnz[i]; ++k, ++p) d(i, m.col_indices[p]) = m.values[p];
    return d;
}

DenseMatrix identity(std::size_t n) {
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = 1.0;
    return d;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.ncols, a.nrows);
    for (std::size_t j = 0; j < a.ncols; ++j)
        for (std::size_t i = 0; i < a.nrows; ++i) t(j, i) = a(i, j);
    return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.ncols != b.nrows) throw NumericError("matmul: inner dimensions do not match");
    DenseMatrix c(a.nrows, b.ncols);
    for (std::size_t j = 0; j < b.ncols; ++j) {
        for (std::size_t k = 0; k < a.ncols; ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            const double* acol = a.col(k);
            double* ccol = c.col(j);
            for (std::size_t i = 0; i < a.nrows; ++i) ccol[i] += acol[i] * bkj;
        }
    }
    return c;
}

DenseVector matvec(const DenseMatrix& a, const DenseVector& x) {
    require_length(a.ncols, x.size(), "dense matvec");
    DenseVector y(a.nrows, 0.0);
    for (std::size_t j = 0; j < a.ncols; ++j) {
        const double xj = x[j];
        const double* col = a.col(j);
        for (std::size_t i = 0; i < a.nrows; ++i) y[i] += col[i] * xj;
    }
    return y;
}

DenseVector matvec_transpose(const DenseMatrix& a, const DenseVector& y) {
    require_length(a.nrows, y.size(), "dense matvec_transpose");
    DenseVector x(a.ncols, 0.0);
    for (std::size_t j = 0; j < a.ncols; ++j) {
        const double* col = a.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < a.nrows; ++i) s += col[i] * y[i];
        x[j] = s;
    }
    return x;
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.entries) m = std::max(m, std::abs(v));
    return m;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.nrows != b.nrows || a.ncols != b.ncols)
        throw NumericError("subtract: shapes do not match");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.entries.size(); ++i) c.entries[i] -= b.entries[i];
    return c;
}

DenseMatrix solve(DenseMatrix a, DenseMatrix rhs) {
    if (a.nrows != a.ncols) throw NumericError("solve: matrix must be square");
    if (rhs.nrows != a.nrows) throw NumericError("solve: rhs rows do not match");
    const std::size_t n = a.nrows;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(perm[k], k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double cand = std::abs(a(perm[i], k));
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (best == 0.0 || !std::isfinite(best))
            throw NumericError("solve: singular matrix (zero pivot at column " +
                               std::to_string(k) + ")");
        std::swap(perm[k], perm[piv]);
        const double pivot = a(perm[k], k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(perm[i], k) / pivot;
            if (f == 0.0) continue;
            a(perm[i], k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) a(perm[i], j) -= f * a(perm[k], j);
            for (std::size_t j = 0; j < rhs.ncols; ++j) rhs(perm[i], j) -= f * rhs(perm[k], j);
        }
    }
    DenseMatrix x(n, rhs.ncols);
    for (std::size_t j = 0; j < rhs.ncols; ++j) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = rhs(perm[ii], j);
            for (std::size_t jj = ii + 1; jj < n; ++jj) s -= a(perm[ii], jj) * x(jj, j);
            x(ii, j) = s / a(perm[ii], ii);
        }
    }
    return x;
}

DenseMatrix inverse(const DenseMatrix& a) { return solve(a, identity(a.nrows)); }

Svd jacobi_svd(const DenseMatrix& a) {
    if (a.nrows == 0 || a.ncols == 0) throw NumericError("jacobi_svd: empty matrix");
    if (a.nrows < a.ncols) {
        // work on the transpose so columns are the short dimension
        Svd s = jacobi_svd(transpose(a));
        std::swap(s.u, s.v);
        return s;
    }
    const std::size_t m = a.nrows, n = a.ncols;
    DenseMatrix g = a;             // columns converge to sigma_j * u_j
    DenseMatrix v = identity(n);   // accumulates right rotations

    constexpr double kTol = 1e-15;
    constexpr int kMaxSweeps = 60;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                const double* gp = g.col(p);
                const double* gq = g.col(q);
                for (std::size_t i = 0; i < m; ++i) {
                    app += gp[i] * gp[i];
                    aqq += gq[i] * gq[i];
                    apq += gp[i] * gq[i];
                }
                if (std::abs(apq) <= kTol * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                double* gpm = g.col(p);
                double* gqm = g.col(q);
                for (std::size_t i = 0; i < m; ++i) {
                    const double tp = gpm[i];
                    gpm[i] = c * tp - s * gqm[i];
                    gqm[i] = s * tp + c * gqm[i];
                }
                double* vp = v.col(p);
                double* vq = v.col(q);
                for (std::size_t i = 0; i < n; ++i) {
                    const double tp = vp[i];
                    vp[i] = c * tp - s * vq[i];
                    vq[i] = s * tp + c * vq[i];
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double* col = g.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += col[i] * col[i];
        sigma[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    Svd out;
    out.u = DenseMatrix(m, n);
    out.v = DenseMatrix(n, n);
    out.sigma.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = sigma[src];
        const double* gc = g.col(src);
        double* uc = out.u.col(j);
        if (sigma[src] > 0.0)
            for (std::size_t i = 0; i < m; ++i) uc[i] = gc[i] / sigma[src];
        // zero singular value: leave u column zero
        std::copy(v.col(src), v.col(src) + n, out.v.col(j));
    }
    return out;
}

}  // namespace compreg::dense
