#include "compreg/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "compreg/dense.hpp"
#include "compreg/io.hpp"
#include "compreg/wavelet.hpp"

namespace compreg {

LaplacianOperator LaplacianOperator::create(std::size_t grid_rows, std::size_t grid_cols) {
    if (grid_rows == 0 || grid_cols == 0)
        throw NumericError("laplacian grid dimensions must be positive");
    const std::size_t n = grid_rows * grid_cols;
    SparseBuilder b(n, n);
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::size_t i = 0; i < grid_rows; ++i) {
        for (std::size_t j = 0; j < grid_cols; ++j) {
            entries.clear();
            const std::size_t cell = i * grid_cols + j;
            double degree = 0.0;
            auto neighbor = [&](std::size_t c) {
                entries.emplace_back(static_cast<std::uint32_t>(c), 1.0);
                degree += 1.0;
            };
            if (i > 0) neighbor(cell - grid_cols);
            if (j > 0) neighbor(cell - 1);
            entries.emplace_back(static_cast<std::uint32_t>(cell), 0.0);  // placeholder
            if (j + 1 < grid_cols) neighbor(cell + 1);
            if (i + 1 < grid_rows) neighbor(cell + grid_cols);
            for (auto& e : entries)
                if (e.first == cell) e.second = -degree;
            b.add_row(entries);
        }
    }
    LaplacianOperator lap;
    lap.grid_rows = grid_rows;
    lap.grid_cols = grid_cols;
    lap.matrix = b.finish();
    return lap;
}

DenseVector LaplacianOperator::normal_apply(const DenseVector& x) const {
    return spmv(matrix, spmv(matrix, x));
}

double chi_squared(const DenseVector& residual, const std::vector<bool>& outlier_mask) {
    require_length(residual.size(), outlier_mask.size(), "chi_squared mask");
    std::size_t p = 0;
    double s = 0.0;
    for (std::size_t i = 0; i < residual.size(); ++i) {
        if (!std::isfinite(residual[i])) throw NumericError("chi_squared: non-finite residual");
        if (outlier_mask[i]) continue;
        s += residual[i] * residual[i];
        ++p;
    }
    if (p == 0) throw NumericError("chi_squared: every row is marked as an outlier");
    return s / static_cast<double>(p);
}

std::vector<bool> update_outliers(const DenseVector& residual) {
    std::vector<bool> mask(residual.size(), false);
    for (std::size_t i = 0; i < residual.size(); ++i) mask[i] = std::abs(residual[i]) > 3.0;
    return mask;
}

SolveReport cg_normal_solve(const ApplyFn& normal_op, const DenseVector& rhs,
                            const RegConfig& cfg, const LaplacianOperator* lap,
                            const ApplyFn* residual_fn) {
    if (!all_finite(rhs)) throw NumericError("cg_normal_solve: non-finite right hand side");
    if (cfg.lambda2 != 0.0) {
        if (lap == nullptr)
            throw NumericError("lambda2 > 0 requires a Laplacian operator");
        require_length(rhs.size(), lap->size(), "laplacian size");
    }

    auto full_op = [&](const DenseVector& x) {
        DenseVector y = normal_op(x);
        require_length(rhs.size(), y.size(), "normal operator output");
        if (cfg.lambda1 != 0.0) axpy(cfg.lambda1, x, y);
        if (cfg.lambda2 != 0.0) axpy(cfg.lambda2, lap->normal_apply(x), y);
        return y;
    };

    SolveReport report;
    report.lambda1 = cfg.lambda1;
    report.lambda2 = cfg.lambda2;
    report.solution.assign(rhs.size(), 0.0);

    const double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) {
        report.converged = true;  // zero rhs: zero solution in zero iterations
        return report;
    }

    DenseVector x(rhs.size(), 0.0);
    DenseVector r = rhs;
    DenseVector p = r;
    double rs = dot(r, r);

    for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
        const DenseVector kp = full_op(p);
        const double curvature = dot(p, kp);
        if (!(curvature > 0.0))
            throw NumericError("cg_normal_solve: nonpositive curvature at iteration " +
                               std::to_string(iter) + "; operator is not positive definite");
        const double alpha = rs / curvature;
        axpy(alpha, p, x);
        axpy(-alpha, kp, r);
        const double rel = norm2(r) / rhs_norm;
        if (!std::isfinite(rel) || !all_finite(x))
            throw NumericError("cg_normal_solve: non-finite values at iteration " +
                               std::to_string(iter));

        report.norms.push_back(norm2(x));
        report.cg_residuals.push_back(rel);
        // quadratic objective 0.5 x^T K x - rhs^T x, via K x = rhs - r
        report.objectives.push_back(-0.5 * (dot(x, rhs) + dot(x, r)));
        if (residual_fn != nullptr) {
            const DenseVector res = (*residual_fn)(x);
            if (report.outlier_mask.empty()) report.outlier_mask.assign(res.size(), false);
            for (std::size_t cp : cfg.outlier_checkpoints) {
                if (cp == iter) {
                    report.outlier_mask = update_outliers(res);
                    report.checkpoints_fired.push_back(iter);
                }
            }
            report.chi2.push_back(chi_squared(res, report.outlier_mask));
        }
        report.iterations = iter;
        if (rel <= cfg.cg_tol) {
            report.converged = true;
            break;
        }
        const double rs_new = dot(r, r);
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    }

    report.solution = std::move(x);
    if (!report.outlier_mask.empty()) {
        std::size_t outliers = 0;
        for (bool b : report.outlier_mask) outliers += b ? 1 : 0;
        report.effective_rows = report.outlier_mask.size() - outliers;
    }
    return report;
}

SolveReport solve_true(const LinearOperator& a, const DenseVector& b, const RegConfig& cfg,
                       const LaplacianOperator* lap) {
    require_length(a.rows(), b.size(), "solve_true rhs");
    if (!all_finite(b)) throw NumericError("solve_true: non-finite right hand side");
    ApplyFn normal = [&a](const DenseVector& x) { return a.apply_normal(x); };
    ApplyFn residual = [&a, &b](const DenseVector& x) {
        DenseVector r = a.apply(x);
        axpy(-1.0, b, r);
        return r;
    };
    SolveReport rep = cg_normal_solve(normal, a.apply_transpose(b), cfg, lap, &residual);
    rep.scheme = "true";
    return rep;
}

SolveReport solve_lowrank(const LowRankSVD& f, const DenseVector& b, const RegConfig& cfg,
                          const LaplacianOperator* lap) {
    require_length(f.rows(), b.size(), "solve_lowrank rhs");
    ApplyFn normal = [&f](const DenseVector& x) { return lr_apply_normal(f, x); };
    ApplyFn residual = [&f, &b](const DenseVector& x) {
        DenseVector r = lr_apply(f, x);
        axpy(-1.0, b, r);
        return r;
    };
    SolveReport rep = cg_normal_solve(normal, lr_apply_transpose(f, b), cfg, lap, &residual);
    rep.scheme = "x1";
    return rep;
}

SolveReport solve_lowrank_exact_rhs(const LowRankSVD& f, const LinearOperator& a,
                                    const DenseVector& b, const RegConfig& cfg,
                                    const LaplacianOperator* lap) {
    require_length(f.rows(), b.size(), "solve_lowrank_exact_rhs rhs");
    require_length(a.rows(), b.size(), "solve_lowrank_exact_rhs operator");
    RegConfig scaled = cfg;
    scaled.lambda1 = cfg.lambda1 * cfg.hat_lambda_scale;
    ApplyFn normal = [&f](const DenseVector& x) { return lr_apply_normal(f, x); };
    ApplyFn residual = [&f, &b](const DenseVector& x) {
        DenseVector r = lr_apply(f, x);
        axpy(-1.0, b, r);
        return r;
    };
    SolveReport rep = cg_normal_solve(normal, a.apply_transpose(b), scaled, lap, &residual);
    rep.scheme = "x1hat";
    return rep;
}

SolveReport solve_projected(const std::vector<const LowRankSVD*>& blocks, const DenseVector& b,
                            const RegConfig& cfg, const LaplacianOperator* lap) {
    if (blocks.empty()) throw NumericError("solve_projected: no blocks");
    const std::size_t n = blocks[0]->cols();
    std::size_t total_rows = 0;
    for (const LowRankSVD* f : blocks) {
        if (f->cols() != n) throw NumericError("solve_projected: block column counts differ");
        total_rows += f->rows();
    }
    require_length(total_rows, b.size(), "solve_projected rhs");

    // normal matrix of the stacked projected system: sum_j V_j Sigma_j^2 V_j^T
    ApplyFn normal = [&blocks, n](const DenseVector& x) {
        DenseVector y(n, 0.0);
        for (const LowRankSVD* f : blocks) axpy(1.0, lr_apply_normal(*f, x), y);
        return y;
    };
    // rhs: sum_j V_j Sigma_j U_j^T b_j
    DenseVector rhs(n, 0.0);
    std::size_t offset = 0;
    for (const LowRankSVD* f : blocks) {
        DenseVector bj(b.begin() + offset, b.begin() + offset + f->rows());
        axpy(1.0, lr_apply_transpose(*f, bj), rhs);
        offset += f->rows();
    }
    // chi2 over the projected data rows: Sigma_j V_j^T x - U_j^T b_j stacked
    ApplyFn residual = [&blocks, &b, n](const DenseVector& x) {
        DenseVector r;
        std::size_t off = 0;
        for (const LowRankSVD* f : blocks) {
            const std::size_t k = f->rank();
            for (std::size_t i = 0; i < k; ++i) {
                const double* vc = f->v.col(i);
                double proj = 0.0;
                for (std::size_t c = 0; c < n; ++c) proj += vc[c] * x[c];
                const double* uc = f->u.col(i);
                double ub = 0.0;
                for (std::size_t rr = 0; rr < f->rows(); ++rr) ub += uc[rr] * b[off + rr];
                r.push_back(f->sigma[i] * proj - ub);
            }
            off += f->rows();
        }
        return r;
    };
    SolveReport rep = cg_normal_solve(normal, rhs, cfg, lap, &residual);
    rep.scheme = "x2";
    return rep;
}

SolveReport solve_reduced(const LowRankSVD& f, const LaplacianOperator* lap,
                          const DenseVector& b, const RegConfig& cfg) {
    require_length(f.rows(), b.size(), "solve_reduced rhs");
    const std::size_t k = f.rank();
    const std::size_t n = f.cols();
    if (cfg.lambda2 != 0.0) {
        if (lap == nullptr) throw NumericError("lambda2 > 0 requires a Laplacian operator");
        require_length(n, lap->size(), "laplacian size");
    }

    DenseMatrix g(k, k);
    for (std::size_t i = 0; i < k; ++i) g(i, i) = f.sigma[i] * f.sigma[i] + cfg.lambda1;
    if (cfg.lambda2 != 0.0) {
        // columns of V^T L^T L V via k operator products
        for (std::size_t j = 0; j < k; ++j) {
            DenseVector vj(f.v.col(j), f.v.col(j) + n);
            const DenseVector w = lap->normal_apply(vj);
            for (std::size_t i = 0; i < k; ++i) {
                const double* vc = f.v.col(i);
                double s = 0.0;
                for (std::size_t c = 0; c < n; ++c) s += vc[c] * w[c];
                g(i, j) += cfg.lambda2 * s;
            }
        }
    }

    // rhs y-side: Sigma U^T b
    DenseMatrix rhs(k, 1);
    for (std::size_t i = 0; i < k; ++i) {
        const double* uc = f.u.col(i);
        double s = 0.0;
        for (std::size_t r = 0; r < f.rows(); ++r) s += uc[r] * b[r];
        rhs(i, 0) = f.sigma[i] * s;
    }
    const DenseMatrix y = dense::solve(g, rhs);  // guarded: throws if singular

    SolveReport rep;
    rep.scheme = "x3";
    rep.lambda1 = cfg.lambda1;
    rep.lambda2 = cfg.lambda2;
    rep.solution.assign(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double* vc = f.v.col(i);
        for (std::size_t c = 0; c < n; ++c) rep.solution[c] += vc[c] * y(i, 0);
    }
    rep.iterations = 1;
    rep.converged = true;
    rep.norms.push_back(norm2(rep.solution));
    DenseVector res = lr_apply(f, rep.solution);
    axpy(-1.0, b, res);
    rep.outlier_mask.assign(res.size(), false);
    rep.chi2.push_back(chi_squared(res, rep.outlier_mask));
    rep.effective_rows = res.size();
    return rep;
}

SolveReport ista_solve(const LinearOperator& a, const DenseVector& b, double tau, double step,
                       std::size_t iters) {
    require_length(a.rows(), b.size(), "ista rhs");
    if (!(tau >= 0.0)) throw NumericError("ista: tau must be >= 0");
    if (!(step > 0.0)) throw NumericError("ista: step must be positive");
    if (!all_finite(b)) throw NumericError("ista: non-finite right hand side");

    SolveReport rep;
    rep.scheme = "ista";
    const DenseVector atb = a.apply_transpose(b);
    DenseVector x(a.cols(), 0.0);

    for (std::size_t iter = 1; iter <= iters; ++iter) {
        DenseVector grad = atb;
        axpy(-1.0, a.apply_normal(x), grad);
        axpy(step, grad, x);
        x = soft_threshold(step * tau, x);

        const double nx = norm2(x);
        if (!std::isfinite(nx))
            throw NumericError("ista: non-finite iterate at iteration " + std::to_string(iter));
        rep.norms.push_back(nx);
        std::size_t support = 0;
        double l1 = 0.0;
        for (double v : x) {
            support += (v != 0.0) ? 1 : 0;
            l1 += std::abs(v);
        }
        rep.support_sizes.push_back(support);
        DenseVector res = a.apply(x);
        axpy(-1.0, b, res);
        const double rn = norm2(res);
        rep.objectives.push_back(rn * rn + 2.0 * tau * l1);
        if (rep.outlier_mask.empty()) rep.outlier_mask.assign(res.size(), false);
        rep.chi2.push_back(chi_squared(res, rep.outlier_mask));
        rep.iterations = iter;

        // a convergent run never grows both the iterate norm and the
        // objective; warmup growth of the support is fine
        if (iter > 10 && rep.norms[iter - 11] > 0.0 && nx > 2.0 * rep.norms[iter - 11] &&
            rep.objectives[iter - 1] > rep.objectives[iter - 11] * (1.0 + 1e-9))
            throw NumericError("ista: diverging iterates (norm doubled across 10 iterations); "
                               "rescale A so that ||A||_2 <= 1");
    }
    rep.solution = std::move(x);
    rep.converged = true;
    rep.effective_rows = b.size();
    return rep;
}

void write_report_csv(const SolveReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out << "iteration,norm,chi2,cg_residual\n";
    for (std::size_t i = 0; i < report.iterations; ++i) {
        out << (i + 1) << "," << format_double(report.norms[i]) << ",";
        if (i < report.chi2.size()) out << format_double(report.chi2[i]);
        out << ",";
        if (i < report.cg_residuals.size()) out << format_double(report.cg_residuals[i]);
        out << "\n";
    }
    if (!out) throw FormatError("write failure on '" + path + "'");
}

}  // namespace compreg
