#pragma once

#include "compreg/sparse.hpp"
#include "compreg/types.hpp"

namespace compreg::dense {

DenseMatrix from_sparse(const SparseMatrix& m);
DenseMatrix identity(std::size_t n);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseVector matvec(const DenseMatrix& a, const DenseVector& x);
DenseVector matvec_transpose(const DenseMatrix& a, const DenseVector& y);

double max_abs(const DenseMatrix& a);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

/// Solves a X = rhs by Gauss elimination with partial pivoting.
/// Throws NumericError on a numerically singular pivot.
DenseMatrix solve(DenseMatrix a, DenseMatrix rhs);
DenseMatrix inverse(const DenseMatrix& a);

/// Thin SVD via one-sided Jacobi: a = U diag(sigma) V^T with sigma
/// nonincreasing. U is nrows x min(m,n), V is ncols x min(m,n). Intended
/// as the trusted reference path for matrices up to a few hundred rows.
struct Svd {
    DenseMatrix u;
    std::vector<double> sigma;
    DenseMatrix v;
};
Svd jacobi_svd(const DenseMatrix& a);

}  // namespace compreg::dense
