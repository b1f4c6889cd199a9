#pragma once

#include <span>

#include "compreg/dense.hpp"
#include "compreg/lowrank.hpp"
#include "compreg/operators.hpp"

namespace compreg {

/// Diagonal of the inverse-identity correction: sigma_s^2 / (lambda^2 +
/// lambda sigma_s^2) for each supplied singular value.
std::vector<double> filter_diagonal(std::span<const double> sigma, double lambda);

/// Max-abs deviation between (D + P T R)^{-1} and the Woodbury expansion
/// D^{-1} - D^{-1} P (T^{-1} + R D^{-1} P)^{-1} R D^{-1}, with D = d_scale I,
/// both sides computed densely. Throws on singular T.
double woodbury_check(double d_scale, const DenseMatrix& p, const DenseMatrix& t,
                      const DenseMatrix& r);

/// Max-abs deviation of (A_k^T A_k + lambda I)^{-1} from
/// lambda^{-1} I - V S V^T on the given factors.
double inverse_identity_check(const LowRankSVD& f, double lambda);

/// Max-abs deviation of (A^T A + lambda I)^{-1} from
/// (A_k^T A_k + lambda I)^{-1} - Vhat Shat Vhat^T, using a dense reference
/// SVD of a for the split at rank k.
double inverse_identity_full_check(const DenseMatrix& a, std::size_t k, double lambda);

/// Evaluation of the solution error bounds against measured errors.
struct BoundsReport {
    double err_lowrank = 0.0;      // ||xbar - x1||
    double bound_lowrank = 0.0;    // sigma_{k+1} / (lambda + sigma_{k+1}^2) ||b||
    double err_exact_rhs = 0.0;    // ||xbar - x1hat||
    double bound_exact_rhs = 0.0;  // sigma_{k+1}^3 / (lambda^2 + lambda sigma_{k+1}^2) ||b||
    double rel_err_exact_rhs = 0.0;
    double rel_bound = 0.0;        // sigma_{k+1}^2 / lambda
    // The bound on the low-rank-rhs error requires sigma_{k+1} <= sqrt(lambda)
    // (the filter sigma/(lambda+sigma^2) must be decreasing over the tail);
    // the other two bounds hold unconditionally.
    bool lowrank_bound_applicable = true;
    bool violated = false;         // any applicable bound exceeded beyond slack
};

/// sigma_oracle must come from a trusted dense SVD of the same matrix and
/// must have at least k+1 entries. A small absolute floor absorbs solver
/// truncation when a bound is exactly zero.
BoundsReport evaluate_bounds(std::span<const double> sigma_oracle, std::size_t k, double lambda,
                             double b_norm, const DenseVector& xbar, const DenseVector& x_lowrank,
                             const DenseVector& x_exact_rhs);

/// Percent errors (100 ||approx - exact|| / ||exact||) for the three
/// operations over seeded Gaussian trial vectors. Trials whose exact result
/// is the zero vector are skipped and flagged.
struct ErrorReport {
    std::vector<double> ax, aty, atax;  // per retained trial
    std::vector<std::size_t> skipped_trials;
    double mean_ax = 0.0, max_ax = 0.0;
    double mean_aty = 0.0, max_aty = 0.0;
    double mean_atax = 0.0, max_atax = 0.0;
};

ErrorReport matvec_error_report(const LinearOperator& exact, const LinearOperator& approx,
                                std::size_t trials, std::uint64_t seed);

void write_error_report_csv(const ErrorReport& rep, const std::string& path);

}  // namespace compreg
