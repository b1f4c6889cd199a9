#pragma once

#include <cstdint>
#include <string>

#include "compreg/operators.hpp"
#include "compreg/types.hpp"

namespace compreg {

/// Rank-k factorization U diag(sigma) V^T. Columns of u and v are
/// orthonormal up to the pipeline's accuracy; sigma is nonincreasing
/// and strictly positive.
struct LowRankSVD {
    DenseMatrix u;               // m x k
    std::vector<double> sigma;   // length k, descending, > 0
    DenseMatrix v;               // n x k
    std::uint64_t seed = 0;      // sampling seed the factors came from

    std::size_t rank() const { return sigma.size(); }
    std::size_t rows() const { return u.nrows; }
    std::size_t cols() const { return v.nrows; }
};

/// Worst-case deviation of a matrix's columns from orthonormality,
/// max |(M^T M - I)_ij|.
double orthonormality_defect(const DenseMatrix& m);

/// Orthonormal basis for a sampled range, with the seed that produced it.
struct RangeBasis {
    DenseMatrix q;
    std::uint64_t seed = 0;
};

/// Y whose columns are op applied to seeded Gaussian vectors. Column j uses
/// a sub-seed derived from (seed, j), so output is reproducible and columns
/// may be computed in parallel.
DenseMatrix sample_range(const LinearOperator& op, std::size_t k, std::uint64_t seed);

/// Two full sweeps of modified Gram-Schmidt. A column whose norm collapses
/// below 1e-12 of its pre-sweep norm raises a rank-deficiency error
/// advising a smaller k.
RangeBasis orthogonalize_twice(const DenseMatrix& y);

/// The k x k matrix Q^T A A^T Q assembled column by column through the
/// operator, then symmetrized.
DenseMatrix build_bbt(const LinearOperator& op, const RangeBasis& q);

struct EigResult {
    std::vector<double> values;   // descending
    DenseMatrix vectors;          // orthonormal columns
};

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
/// Converged when the off-diagonal Frobenius norm falls below 1e-12 of
/// the matrix Frobenius norm.
EigResult symmetric_eig(const DenseMatrix& s);

struct LowRankOptions {
    std::size_t oversample = 0;    // extra samples beyond k (0 = faithful pipeline)
    double sigma_cutoff = 1e-8;    // discard sigma_i < cutoff * sigma_1
};

/// Full randomized pipeline: range sampling, twice-repeated Gram-Schmidt,
/// eigendecomposition of the small Gram matrix, and right-vector recovery
/// through the operator transpose. The effective rank may be smaller than
/// k when trailing singular values fall below the cutoff.
LowRankSVD randomized_lowrank_svd(const LinearOperator& op, std::size_t k, std::uint64_t seed,
                                  const LowRankOptions& opts = {});

/// Factored products evaluated right to left; the rank-k matrix is never
/// formed densely.
DenseVector lr_apply(const LowRankSVD& f, const DenseVector& x);
DenseVector lr_apply_transpose(const LowRankSVD& f, const DenseVector& y);
DenseVector lr_apply_normal(const LowRankSVD& f, const DenseVector& x);

class LowRankOperator final : public LinearOperator {
public:
    explicit LowRankOperator(const LowRankSVD& f) : f_(&f) {}
    std::size_t rows() const override { return f_->rows(); }
    std::size_t cols() const override { return f_->cols(); }
    DenseVector apply(const DenseVector& x) const override { return lr_apply(*f_, x); }
    DenseVector apply_transpose(const DenseVector& y) const override {
        return lr_apply_transpose(*f_, y);
    }
    DenseVector apply_normal(const DenseVector& x) const override {
        return lr_apply_normal(*f_, x);
    }

private:
    const LowRankSVD* f_;
};

// ---- .lrk binary format --------------------------------------------------
// magic "LRK1" | u64 m | u64 n | u64 k | u64 seed | k x f64 sigma
// | m*k f64 U (column-major) | n*k f64 V (column-major).

void write_lowrank(const LowRankSVD& f, const std::string& path);
LowRankSVD read_lowrank(const std::string& path);

}  // namespace compreg
