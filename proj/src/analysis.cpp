#include "compreg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "compreg/io.hpp"
#include "compreg/rng.hpp"

namespace compreg {

std::vector<double> filter_diagonal(std::span<const double> sigma, double lambda) {
    if (!(lambda > 0.0)) throw NumericError("filter_diagonal: lambda must be positive");
    std::vector<double> d(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double s2 = sigma[i] * sigma[i];
        d[i] = s2 / (lambda * lambda + lambda * s2);
    }
    return d;
}

double woodbury_check(double d_scale, const DenseMatrix& p, const DenseMatrix& t,
                      const DenseMatrix& r) {
    if (d_scale == 0.0) throw NumericError("woodbury_check: D must be invertible");
    const std::size_t n = p.nrows;
    const std::size_t k = p.ncols;
    if (t.nrows != k || t.ncols != k || r.nrows != k || r.ncols != n)
        throw NumericError("woodbury_check: shape mismatch");

    // left side: (D + P T R)^{-1} densely
    DenseMatrix lhs = dense::matmul(dense::matmul(p, t), r);
    for (std::size_t i = 0; i < n; ++i) lhs(i, i) += d_scale;
    const DenseMatrix lhs_inv = dense::inverse(lhs);

    // right side: D^{-1} - D^{-1} P (T^{-1} + R D^{-1} P)^{-1} R D^{-1}
    const double dinv = 1.0 / d_scale;
    DenseMatrix mid = dense::inverse(t);  // throws on singular T
    const DenseMatrix rp = dense::matmul(r, p);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) mid(i, j) += dinv * rp(i, j);
    DenseMatrix rhs = dense::matmul(dense::matmul(p, dense::inverse(mid)), r);
    for (double& v : rhs.entries) v *= -dinv * dinv;
    for (std::size_t i = 0; i < n; ++i) rhs(i, i) += dinv;

    return dense::max_abs(dense::subtract(lhs_inv, rhs));
}

namespace {

// V_k diag(d) V_k^T restricted to the given factor columns [first, last)
DenseMatrix scaled_outer(const DenseMatrix& v, std::span<const double> d, std::size_t first,
                         std::size_t last) {
    const std::size_t n = v.nrows;
    DenseMatrix out(n, n);
    for (std::size_t c = first; c < last; ++c) {
        const double w = d[c - first];
        const double* col = v.col(c);
        for (std::size_t j = 0; j < n; ++j) {
            const double wj = w * col[j];
            if (wj == 0.0) continue;
            double* ocol = out.col(j);
            for (std::size_t i = 0; i < n; ++i) ocol[i] += col[i] * wj;
        }
    }
    return out;
}

}  // namespace

double inverse_identity_check(const LowRankSVD& f, double lambda) {
    if (!(lambda > 0.0)) throw NumericError("inverse_identity_check: lambda must be positive");
    const std::size_t n = f.cols();
    const std::size_t k = f.rank();

    // densify A_k^T A_k + lambda I and invert
    std::vector<double> s2(k);
    for (std::size_t i = 0; i < k; ++i) s2[i] = f.sigma[i] * f.sigma[i];
    DenseMatrix normal = scaled_outer(f.v, s2, 0, k);
    for (std::size_t i = 0; i < n; ++i) normal(i, i) += lambda;
    const DenseMatrix lhs = dense::inverse(normal);

    const std::vector<double> filt = filter_diagonal(f.sigma, lambda);
    DenseMatrix rhs = scaled_outer(f.v, filt, 0, k);
    for (double& v : rhs.entries) v = -v;
    for (std::size_t i = 0; i < n; ++i) rhs(i, i) += 1.0 / lambda;

    return dense::max_abs(dense::subtract(lhs, rhs));
}

double inverse_identity_full_check(const DenseMatrix& a, std::size_t k, double lambda) {
    if (!(lambda > 0.0)) throw NumericError("inverse_identity_full_check: lambda must be positive");
    const dense::Svd svd = dense::jacobi_svd(a);
    if (k >= svd.sigma.size())
        throw NumericError("inverse_identity_full_check: k must be below min(m, n)");
    const std::size_t n = a.ncols;

    // (A^T A + lambda I)^{-1} densely
    DenseMatrix ata = dense::matmul(dense::transpose(a), a);
    for (std::size_t i = 0; i < n; ++i) ata(i, i) += lambda;
    const DenseMatrix lhs = dense::inverse(ata);

    // (A_k^T A_k + lambda I)^{-1} densely
    std::vector<double> s2(k);
    for (std::size_t i = 0; i < k; ++i) s2[i] = svd.sigma[i] * svd.sigma[i];
    DenseMatrix normal_k = scaled_outer(svd.v, s2, 0, k);
    for (std::size_t i = 0; i < n; ++i) normal_k(i, i) += lambda;
    DenseMatrix rhs = dense::inverse(normal_k);

    // subtract Vhat Shat Vhat^T over the discarded spectrum (zero tail drops out)
    std::vector<double> tail(svd.sigma.begin() + k, svd.sigma.end());
    const std::vector<double> shat = filter_diagonal(tail, lambda);
    const DenseMatrix correction = scaled_outer(svd.v, shat, k, svd.sigma.size());
    rhs = dense::subtract(rhs, correction);

    return dense::max_abs(dense::subtract(lhs, rhs));
}

BoundsReport evaluate_bounds(std::span<const double> sigma_oracle, std::size_t k, double lambda,
                             double b_norm, const DenseVector& xbar, const DenseVector& x_lowrank,
                             const DenseVector& x_exact_rhs) {
    if (sigma_oracle.size() < k + 1)
        throw NumericError("evaluate_bounds: need at least k+1 oracle singular values");
    if (!(lambda > 0.0)) throw NumericError("evaluate_bounds: lambda must be positive");
    require_length(xbar.size(), x_lowrank.size(), "evaluate_bounds x_lowrank");
    require_length(xbar.size(), x_exact_rhs.size(), "evaluate_bounds x_exact_rhs");

    const double s = sigma_oracle[k];
    const double s2 = s * s;
    BoundsReport rep;
    rep.bound_lowrank = s / (lambda + s2) * b_norm;
    rep.bound_exact_rhs = (s * s2) / (lambda * lambda + lambda * s2) * b_norm;
    rep.rel_bound = s2 / lambda;

    DenseVector d = xbar;
    axpy(-1.0, x_lowrank, d);
    rep.err_lowrank = norm2(d);
    d = xbar;
    axpy(-1.0, x_exact_rhs, d);
    rep.err_exact_rhs = norm2(d);
    const double xbar_norm = norm2(xbar);
    rep.rel_err_exact_rhs = xbar_norm > 0.0 ? rep.err_exact_rhs / xbar_norm : 0.0;

    // absolute floor absorbs CG truncation when the bound is exactly zero
    const double floor_ = 1e-9 * std::max(1.0, b_norm);
    const double slack = 1.0 + 1e-6;
    rep.lowrank_bound_applicable = s2 <= lambda;
    rep.violated = (rep.lowrank_bound_applicable &&
                    rep.err_lowrank > rep.bound_lowrank * slack + floor_) ||
                   rep.err_exact_rhs > rep.bound_exact_rhs * slack + floor_ ||
                   rep.rel_err_exact_rhs > rep.rel_bound * slack + 1e-9;
    return rep;
}

ErrorReport matvec_error_report(const LinearOperator& exact, const LinearOperator& approx,
                                std::size_t trials, std::uint64_t seed) {
    if (exact.rows() != approx.rows() || exact.cols() != approx.cols())
        throw NumericError("matvec_error_report: operator shapes differ");
    const std::size_t m = exact.rows(), n = exact.cols();

    ErrorReport rep;
    auto percent = [](const DenseVector& approx_v, const DenseVector& exact_v) {
        DenseVector d = approx_v;
        axpy(-1.0, exact_v, d);
        return 100.0 * norm2(d) / norm2(exact_v);
    };
    for (std::size_t t = 0; t < trials; ++t) {
        GaussianSampler gx(derive_seed(seed, 2 * t));
        GaussianSampler gy(derive_seed(seed, 2 * t + 1));
        const DenseVector x = gx.vector(n);
        const DenseVector y = gy.vector(m);
        const DenseVector ax = exact.apply(x);
        const DenseVector aty = exact.apply_transpose(y);
        const DenseVector atax = exact.apply_normal(x);
        if (norm2(ax) == 0.0 || norm2(aty) == 0.0 || norm2(atax) == 0.0) {
            rep.skipped_trials.push_back(t);
            continue;
        }
        rep.ax.push_back(percent(approx.apply(x), ax));
        rep.aty.push_back(percent(approx.apply_transpose(y), aty));
        rep.atax.push_back(percent(approx.apply_normal(x), atax));
    }
    auto summarize = [](const std::vector<double>& v, double& mean, double& mx) {
        if (v.empty()) return;
        double s = 0.0;
        for (double e : v) {
            s += e;
            mx = std::max(mx, e);
        }
        mean = s / static_cast<double>(v.size());
    };
    summarize(rep.ax, rep.mean_ax, rep.max_ax);
    summarize(rep.aty, rep.mean_aty, rep.max_aty);
    summarize(rep.atax, rep.mean_atax, rep.max_atax);
    return rep;
}

void write_error_report_csv(const ErrorReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out << "trial,ax_percent,aty_percent,atax_percent\n";
    for (std::size_t t = 0; t < rep.ax.size(); ++t)
        out << t << "," << format_double(rep.ax[t]) << "," << format_double(rep.aty[t]) << ","
            << format_double(rep.atax[t]) << "\n";
    if (!out) throw FormatError("write failure on '" + path + "'");
}

}  // namespace compreg
