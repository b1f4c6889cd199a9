#pragma once

#include <functional>
#include <optional>
#include <string>

#include "compreg/lowrank.hpp"
#include "compreg/operators.hpp"
#include "compreg/sparse.hpp"

namespace compreg {

/// Damping and smoothing weights plus iteration control for the solvers.
struct RegConfig {
    double lambda1 = 1.0;   // l2 damping weight
    double lambda2 = 0.0;   // smoothing weight on ||L x||^2
    std::size_t max_iters = 500;
    double cg_tol = 1e-8;   // relative residual stopping tolerance
    std::vector<std::size_t> outlier_checkpoints = {5, 25};
    double hat_lambda_scale = 1.0;  // multiplier on lambda1 for the exact-rhs scheme
};

/// 5-point Laplacian on a rows x cols grid with zero-flux boundaries.
/// Interior stencil is -4 with +1 neighbors; row sums are zero and the
/// matrix is symmetric.
struct LaplacianOperator {
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
    SparseMatrix matrix;

    static LaplacianOperator create(std::size_t grid_rows, std::size_t grid_cols);
    std::size_t size() const { return grid_rows * grid_cols; }
    /// L^T L x (L is symmetric, so two applications).
    DenseVector normal_apply(const DenseVector& x) const;
};

/// Per-iteration log of a solve plus the converged solution.
struct SolveReport {
    DenseVector solution;
    std::vector<double> norms;          // ||x^n||_2 per iteration
    std::vector<double> chi2;           // per iteration; empty when no residual source
    std::vector<double> cg_residuals;   // relative residual per iteration; empty for ista
    // objective per iteration: the CG quadratic form for the normal solves,
    // ||Ax-b||^2 + 2 tau ||x||_1 for ista; monotone nonincreasing on a
    // healthy run (the raw residual norm is not)
    std::vector<double> objectives;
    std::vector<std::size_t> support_sizes;  // ista only: nonzeros per iteration
    std::vector<bool> outlier_mask;
    std::size_t effective_rows = 0;     // P = rows - outliers
    std::vector<std::size_t> checkpoints_fired;
    std::string scheme;
    std::size_t iterations = 0;
    bool converged = false;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

using ApplyFn = std::function<DenseVector(const DenseVector&)>;

/// Conjugate gradients on (normal_op + lambda1 I + lambda2 L^T L) x = rhs.
/// When residual_fn is provided, chi-squared over non-outlier rows is logged
/// each iteration and the outlier mask refreshes at the configured
/// checkpoints. Detects indefiniteness (nonpositive curvature) and
/// non-finite values.
SolveReport cg_normal_solve(const ApplyFn& normal_op, const DenseVector& rhs,
                            const RegConfig& cfg, const LaplacianOperator* lap = nullptr,
                            const ApplyFn* residual_fn = nullptr);

/// Regularized solve with the true (or drop-in approximate) operator:
/// (A^T A + lambda1 I + lambda2 L^T L) x = A^T b.
SolveReport solve_true(const LinearOperator& a, const DenseVector& b, const RegConfig& cfg,
                       const LaplacianOperator* lap = nullptr);

/// Low-rank substituted system: every instance of A replaced by the factors,
/// rhs precomputed as V Sigma U^T b.
SolveReport solve_lowrank(const LowRankSVD& f, const DenseVector& b, const RegConfig& cfg,
                          const LaplacianOperator* lap = nullptr);

/// Like solve_lowrank but the right hand side is the exact A^T b, which
/// requires one pass with the full operator. lambda1 is scaled by
/// cfg.hat_lambda_scale for this scheme only.
SolveReport solve_lowrank_exact_rhs(const LowRankSVD& f, const LinearOperator& a,
                                    const DenseVector& b, const RegConfig& cfg,
                                    const LaplacianOperator* lap = nullptr);

/// Tikhonov solution of the stacked projected system: rows Sigma_j V_j^T,
/// right hand side U_j^T b_j per block. Blocks partition the rows of b in
/// order; per-block ranks may differ.
SolveReport solve_projected(const std::vector<const LowRankSVD*>& blocks, const DenseVector& b,
                            const RegConfig& cfg, const LaplacianOperator* lap = nullptr);

/// The k x k reduced system (Sigma^2 + lambda1 I + lambda2 V^T L^T L V) y
/// = Sigma U^T b, solved directly; the solution expands once through V.
/// Identical to solve_lowrank when lambda2 = 0.
SolveReport solve_reduced(const LowRankSVD& f, const LaplacianOperator* lap,
                          const DenseVector& b, const RegConfig& cfg);

/// Iterative soft thresholding x <- S_tau(x + step (A^T b - A^T A x)).
/// The caller is expected to scale A so ||A||_2 <= 1; a divergence detector
/// (norm doubling across 10 iterations) backstops bad scaling.
SolveReport ista_solve(const LinearOperator& a, const DenseVector& b, double tau, double step,
                       std::size_t iters);

/// Mean squared residual over non-outlier entries of a univariant system.
/// Throws if every row is masked.
double chi_squared(const DenseVector& residual, const std::vector<bool>& outlier_mask);

/// Marks entries more than three standard errors out (|r_k| > 3).
std::vector<bool> update_outliers(const DenseVector& residual);

/// CSV serialization: iteration,norm,chi2,cg_residual (blank when absent).
void write_report_csv(const SolveReport& report, const std::string& path);

}  // namespace compreg
