// compreg: regularized least-squares with wavelet-compressed and low-rank
// operators. Subcommands: gen, compress, svd, solve, validate, bench.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "compreg/analysis.hpp"
#include "compreg/compressed.hpp"
#include "compreg/dense.hpp"
#include "compreg/io.hpp"
#include "compreg/lowrank.hpp"
#include "compreg/parallel.hpp"
#include "compreg/problems.hpp"
#include "compreg/regularize.hpp"
#include "compreg/rng.hpp"
#include "compreg/sparse.hpp"

namespace {

using namespace compreg;

constexpr const char* kVersion = "0.1.0";

constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitNumeric = 3;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::uint64_t elapsed_ms() const {
        return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                              std::chrono::steady_clock::now() - start)
                                              .count());
    }
};

WaveletSpec parse_spec(const std::string& family, std::size_t levels) {
    WaveletSpec w;
    w.levels = levels;
    if (family == "haar")
        w.family = WaveletFamily::HaarOrthogonal;
    else if (family == "cdf97")
        w.family = WaveletFamily::CDF97;
    else
        throw CLI::ValidationError("--family must be haar or cdf97");
    return w;
}

// operator files: sniff the magic to decide between raw and compressed
struct LoadedOperator {
    std::unique_ptr<SparseMatrix> sparse;
    std::unique_ptr<CompressedMatrix> compressed;
    std::unique_ptr<LinearOperator> op;
};

LoadedOperator load_operator(const std::string& path) {
    LoadedOperator out;
    char magic[5] = {0};
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw FormatError("cannot open '" + path + "' for reading");
        probe.read(magic, 4);
    }
    if (std::string(magic) == "SPC1") {
        out.compressed = std::make_unique<CompressedMatrix>(read_compressed(path));
        out.op = std::make_unique<CompressedOperator>(*out.compressed);
    } else {
        out.sparse = std::make_unique<SparseMatrix>(read_sparse(path));
        out.op = std::make_unique<SparseOperator>(*out.sparse);
    }
    return out;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
    SyntheticKernelConfig kernel;
    CheckerboardConfig checker;
    std::size_t band_rows = 0;  // 0 = whole grid
    double noise = 0.0;
    std::string out_prefix = "problem";
};

int cmd_gen(GenArgs g) {
    Timer timer;
    g.checker.grid_rows = g.kernel.grid_rows;
    g.checker.grid_cols = g.kernel.grid_cols;
    g.checker.band_rows = (g.band_rows == 0 || g.band_rows > g.kernel.grid_rows)
                              ? g.kernel.grid_rows
                              : g.band_rows;
    const SparseMatrix a = gen_kernel_matrix(g.kernel);
    const DenseVector model = gen_checkerboard(g.checker);
    DenseVector rhs = spmv(a, model);
    if (g.noise > 0.0) rhs = add_noise(rhs, g.noise, derive_seed(g.kernel.seed, 0xB0));

    write_sparse(a, g.out_prefix + ".spr");
    write_vector(model, g.out_prefix + "_model.vec");
    write_vector(rhs, g.out_prefix + "_rhs.vec");

    Manifest m;
    m.set("command", std::string("gen"));
    m.set("rows", std::uint64_t(g.kernel.n_rows));
    m.set("grid_rows", std::uint64_t(g.kernel.grid_rows));
    m.set("grid_cols", std::uint64_t(g.kernel.grid_cols));
    m.set("bumps", std::uint64_t(g.kernel.bump_count));
    m.set("width_min", g.kernel.width_min);
    m.set("width_max", g.kernel.width_max);
    m.set("amp_min", g.kernel.amp_min);
    m.set("amp_max", g.kernel.amp_max);
    m.set("floor", g.kernel.sparsity_floor);
    m.set("cell_size", std::uint64_t(g.checker.cell_size));
    m.set("band_rows", std::uint64_t(g.checker.band_rows));
    m.set("noise", g.noise);
    m.set("seed", std::uint64_t(g.kernel.seed));
    m.set("out_matrix", g.out_prefix + ".spr");
    m.set("out_model", g.out_prefix + "_model.vec");
    m.set("out_rhs", g.out_prefix + "_rhs.vec");
    m.set("version", std::string(kVersion));
    m.set("duration_ms", timer.elapsed_ms());
    m.write(g.out_prefix + ".manifest");
    std::printf("gen: %zux%zu matrix, nnz=%zu -> %s.spr\n", a.nrows, a.ncols, a.nnz(),
                g.out_prefix.c_str());
    return 0;
}

// ---- compress ----------------------------------------------------------------

struct CompressArgs {
    std::string input, output;
    std::string family = "cdf97";
    std::size_t levels = 4;
    double keep_fraction = 0.3;
    double absolute = -1.0;  // <0 means keep-fraction mode
    std::size_t block_rows = 4096;
};

int cmd_compress(const CompressArgs& c) {
    Timer timer;
    const WaveletSpec spec = parse_spec(c.family, c.levels);
    const ThresholdPolicy policy = c.absolute >= 0.0
                                       ? ThresholdPolicy::absolute(c.absolute)
                                       : ThresholdPolicy::keep_fraction(c.keep_fraction);

    // one streaming pass: the source is only ever resident one block at a
    // time; compressed rows and per-block report stats accumulate
    std::vector<CompressedMatrix> parts;
    std::size_t src_nnz = 0, src_bytes_payload = 0, src_rows = 0;
    double err_sum = 0.0, err_max = 0.0;
    for_each_row_block(c.input, c.block_rows, [&](const SparseMatrix& block, std::size_t) {
        parts.push_back(compress_rows(block, spec, policy));
        const CompressionReport blk = compression_report(block, parts.back());
        for (double e : blk.row_errors) {
            err_sum += e;
            err_max = std::max(err_max, e);
        }
        src_nnz += block.nnz();
        src_bytes_payload += 8 * block.nrows + 12 * block.nnz();
        src_rows += block.nrows;
    });
    CompressedMatrix whole;
    whole.spec = spec;
    whole.policy = policy;
    whole.original_ncols = parts.front().original_ncols;
    std::vector<const SparseMatrix*> ms;
    for (const auto& p : parts) ms.push_back(&p.m);
    whole.m = vstack(ms);
    write_compressed(whole, c.output);

    CompressionReport rep;
    rep.nnz_ratio = whole.m.nnz() == 0
                        ? 0.0
                        : static_cast<double>(src_nnz) / static_cast<double>(whole.m.nnz());
    rep.byte_ratio = static_cast<double>(4 + 3 * 8 + src_bytes_payload) /
                     static_cast<double>(compressed_serialized_bytes(whole));
    rep.mean_row_error = src_rows == 0 ? 0.0 : err_sum / static_cast<double>(src_rows);
    rep.max_row_error = err_max;
    std::printf("compress: nnz ratio %.3f, byte ratio %.3f, row error mean %.4g max %.4g\n",
                rep.nnz_ratio, rep.byte_ratio, rep.mean_row_error, rep.max_row_error);

    Manifest m;
    m.set("command", std::string("compress"));
    m.set("input", c.input);
    m.set("output", c.output);
    m.set("family", c.family);
    m.set("levels", std::uint64_t(c.levels));
    if (c.absolute >= 0.0)
        m.set("absolute", c.absolute);
    else
        m.set("keep_fraction", c.keep_fraction);
    m.set("block_rows", std::uint64_t(c.block_rows));
    m.set("nnz_ratio", rep.nnz_ratio);
    m.set("byte_ratio", rep.byte_ratio);
    m.set("mean_row_error", rep.mean_row_error);
    m.set("max_row_error", rep.max_row_error);
    m.set("version", std::string(kVersion));
    m.set("duration_ms", timer.elapsed_ms());
    m.write(c.output + ".manifest");
    return 0;
}

// ---- svd ---------------------------------------------------------------------

struct SvdArgs {
    std::vector<std::string> inputs;
    std::string output;
    std::size_t k = 10;
    std::uint64_t seed = 1;
    std::size_t oversample = 0;
    double cutoff = 1e-8;
};

int cmd_svd(const SvdArgs& s) {
    Timer timer;
    std::vector<LoadedOperator> loaded;
    for (const auto& path : s.inputs) loaded.push_back(load_operator(path));

    LowRankOptions opts;
    opts.oversample = s.oversample;
    opts.sigma_cutoff = s.cutoff;

    LowRankSVD f = [&] {
        if (loaded.size() == 1) return randomized_lowrank_svd(*loaded[0].op, s.k, s.seed, opts);
        // multiple inputs: stack them as vertical blocks of one operator
        std::vector<BlockedOperator::Block> blocks;
        for (auto& l : loaded) {
            if (l.compressed)
                blocks.emplace_back(std::move(*l.compressed));
            else
                blocks.emplace_back(std::move(*l.sparse));
        }
        const BlockedOperator op(std::move(blocks));
        return randomized_lowrank_svd(op, s.k, s.seed, opts);
    }();
    write_lowrank(f, s.output);
    std::printf("svd: rank %zu factors (requested k=%zu), sigma_1=%.6g sigma_k=%.6g -> %s\n",
                f.rank(), s.k, f.sigma.front(), f.sigma.back(), s.output.c_str());

    Manifest m;
    m.set("command", std::string("svd"));
    for (std::size_t i = 0; i < s.inputs.size(); ++i)
        m.set("input" + std::to_string(i), s.inputs[i]);
    m.set("output", s.output);
    m.set("k", std::uint64_t(s.k));
    m.set("seed", s.seed);
    m.set("oversample", std::uint64_t(s.oversample));
    m.set("cutoff", s.cutoff);
    m.set("rank", std::uint64_t(f.rank()));
    m.set("version", std::string(kVersion));
    m.set("duration_ms", timer.elapsed_ms());
    m.write(s.output + ".manifest");
    return 0;
}

// ---- solve -------------------------------------------------------------------

struct SolveArgs {
    std::string scheme = "true";
    std::string matrix;
    std::vector<std::string> factors;
    std::string rhs;
    std::string output = "solution.vec";
    RegConfig cfg;
    std::size_t grid_rows = 0, grid_cols = 0;
    double tau = 0.0;
    double step = 1.0;
    std::size_t ista_iters = 100;
};

int cmd_solve(const SolveArgs& s) {
    Timer timer;
    const DenseVector b = read_vector(s.rhs);

    std::unique_ptr<LaplacianOperator> lap;
    if (s.cfg.lambda2 != 0.0) {
        if (s.grid_rows == 0 || s.grid_cols == 0)
            throw CLI::ValidationError("--lambda2 > 0 requires --grid-rows and --grid-cols");
        lap = std::make_unique<LaplacianOperator>(
            LaplacianOperator::create(s.grid_rows, s.grid_cols));
    }

    LoadedOperator holder;
    std::vector<LowRankSVD> factor_storage;
    SolveReport rep;

    if (s.scheme == "true" || s.scheme == "ista") {
        if (s.matrix.empty()) throw CLI::ValidationError("--matrix required for this scheme");
        holder = load_operator(s.matrix);
        rep = s.scheme == "true"
                  ? solve_true(*holder.op, b, s.cfg, lap.get())
                  : ista_solve(*holder.op, b, s.tau, s.step, s.ista_iters);
    } else if (s.scheme == "x1" || s.scheme == "x3") {
        if (s.factors.size() != 1)
            throw CLI::ValidationError("--factors (exactly one) required for this scheme");
        factor_storage.push_back(read_lowrank(s.factors[0]));
        rep = s.scheme == "x1" ? solve_lowrank(factor_storage[0], b, s.cfg, lap.get())
                               : solve_reduced(factor_storage[0], lap.get(), b, s.cfg);
    } else if (s.scheme == "x1hat") {
        if (s.factors.size() != 1 || s.matrix.empty())
            throw CLI::ValidationError("x1hat needs --factors and --matrix");
        factor_storage.push_back(read_lowrank(s.factors[0]));
        holder = load_operator(s.matrix);
        rep = solve_lowrank_exact_rhs(factor_storage[0], *holder.op, b, s.cfg, lap.get());
    } else if (s.scheme == "x2") {
        if (s.factors.empty())
            throw CLI::ValidationError("x2 needs one or more --factors (row blocks in order)");
        for (const auto& path : s.factors) factor_storage.push_back(read_lowrank(path));
        std::vector<const LowRankSVD*> ptrs;
        for (const auto& f : factor_storage) ptrs.push_back(&f);
        rep = solve_projected(ptrs, b, s.cfg, lap.get());
    } else {
        throw CLI::ValidationError("unknown scheme '" + s.scheme + "'");
    }

    write_vector(rep.solution, s.output);
    write_report_csv(rep, s.output + ".csv");
    std::printf("solve(%s): %zu iterations, |x|=%.8g%s\n", s.scheme.c_str(), rep.iterations,
                norm2(rep.solution), rep.converged ? "" : " (not converged)");

    Manifest m;
    m.set("command", std::string("solve"));
    m.set("scheme", s.scheme);
    if (!s.matrix.empty()) m.set("matrix", s.matrix);
    for (std::size_t i = 0; i < s.factors.size(); ++i)
        m.set("factors" + std::to_string(i), s.factors[i]);
    m.set("rhs", s.rhs);
    m.set("output", s.output);
    m.set("lambda1", s.cfg.lambda1);
    m.set("lambda2", s.cfg.lambda2);
    m.set("hat_lambda_scale", s.cfg.hat_lambda_scale);
    m.set("max_iters", std::uint64_t(s.cfg.max_iters));
    m.set("cg_tol", s.cfg.cg_tol);
    if (s.scheme == "ista") {
        m.set("tau", s.tau);
        m.set("step", s.step);
        m.set("ista_iters", std::uint64_t(s.ista_iters));
    }
    for (std::size_t i = 0; i < factor_storage.size(); ++i) {
        m.set("factor" + std::to_string(i) + "_rank", std::uint64_t(factor_storage[i].rank()));
        m.set("factor" + std::to_string(i) + "_seed", factor_storage[i].seed);
    }
    m.set("iterations", std::uint64_t(rep.iterations));
    m.set("converged", std::string(rep.converged ? "true" : "false"));
    m.set("version", std::string(kVersion));
    m.set("duration_ms", timer.elapsed_ms());
    m.write(s.output + ".manifest");
    return 0;
}

// ---- validate ------------------------------------------------------------------

struct ValidateArgs {
    std::string matrix;
    std::size_t k = 10;
    double lambda = 1.0;
    std::uint64_t seed = 1;
};

int cmd_validate(const ValidateArgs& v) {
    Timer timer;
    const SparseMatrix a = read_sparse(v.matrix);
    SparseOperator op(a);
    if (v.k + 1 > std::min(a.nrows, a.ncols))
        throw CLI::ValidationError("--k must be below min(rows, cols)");

    int failures = 0;
    auto report = [&](const char* name, bool ok, double value) {
        std::printf("%-34s %s  (%.3g)\n", name, ok ? "ok" : "VIOLATION", value);
        if (!ok) ++failures;
    };

    // dense reference SVD of the instance
    const dense::Svd svd = dense::jacobi_svd(dense::from_sparse(a));
    LowRankSVD f;
    f.sigma.assign(svd.sigma.begin(), svd.sigma.begin() + v.k);
    f.u = DenseMatrix(a.nrows, v.k);
    f.v = DenseMatrix(a.ncols, v.k);
    for (std::size_t j = 0; j < v.k; ++j) {
        std::copy(svd.u.col(j), svd.u.col(j) + a.nrows, f.u.col(j));
        std::copy(svd.v.col(j), svd.v.col(j) + a.ncols, f.v.col(j));
    }

    // Woodbury identity on a seeded random instance
    {
        GaussianSampler g(derive_seed(v.seed, 1));
        DenseMatrix p(20, 4), t(4, 4), r(4, 20);
        for (auto& e : p.entries) e = g.next();
        for (auto& e : t.entries) e = g.next();
        for (auto& e : r.entries) e = g.next();
        const double dev = woodbury_check(1.5, p, t, r);
        report("woodbury identity", dev <= 1e-10, dev);
    }
    // inverse identities
    {
        const double dev = inverse_identity_check(f, v.lambda);
        report("rank-k inverse identity", dev <= 1e-10, dev);
        const double dev2 = inverse_identity_full_check(dense::from_sparse(a), v.k, v.lambda);
        report("full-split inverse identity", dev2 <= 1e-10, dev2);
    }

    // scheme solves
    RegConfig cfg;
    cfg.lambda1 = v.lambda;
    cfg.cg_tol = 1e-13;
    cfg.max_iters = 2000;
    GaussianSampler gb(derive_seed(v.seed, 2));
    const DenseVector b = gb.vector(a.nrows);
    const DenseVector xbar = solve_true(op, b, cfg).solution;
    const DenseVector x1 = solve_lowrank(f, b, cfg).solution;
    const DenseVector x1h = solve_lowrank_exact_rhs(f, op, b, cfg).solution;
    const DenseVector x2 = solve_projected({&f}, b, cfg).solution;
    const DenseVector x3 = solve_reduced(f, nullptr, b, cfg).solution;

    auto rel = [](const DenseVector& u, const DenseVector& w) {
        DenseVector d = u;
        axpy(-1.0, w, d);
        return norm2(d) / std::max(norm2(w), 1e-300);
    };
    report("scheme equivalence x2 = x1", rel(x2, x1) <= 1e-7, rel(x2, x1));
    report("scheme equivalence x3 = x1", rel(x3, x1) <= 1e-7, rel(x3, x1));

    // projection identity x1 = V_k V_k^T xbar
    {
        DenseVector proj(a.ncols, 0.0);
        for (std::size_t t = 0; t < v.k; ++t) {
            const double* vc = f.v.col(t);
            double w = 0.0;
            for (std::size_t j = 0; j < a.ncols; ++j) w += vc[j] * xbar[j];
            for (std::size_t j = 0; j < a.ncols; ++j) proj[j] += w * vc[j];
        }
        DenseVector d = x1;
        axpy(-1.0, proj, d);
        const double val = norm2(d) / norm2(xbar);
        report("projection identity", val <= 1e-7, val);
    }
    // difference identity x1hat - x1 = (A^T - A_k^T) b / lambda
    {
        DenseVector diff = x1h;
        axpy(-1.0, x1, diff);
        DenseVector tail = spmv_transpose(a, b);
        axpy(-1.0, lr_apply_transpose(f, b), tail);
        scale(tail, 1.0 / v.lambda);
        axpy(-1.0, tail, diff);
        const double val = norm2(diff) / norm2(x1h);
        report("difference identity", val <= 1e-7, val);
    }
    // error bounds and norm ordering
    {
        const BoundsReport bounds =
            evaluate_bounds(svd.sigma, v.k, v.lambda, norm2(b), xbar, x1, x1h);
        report("error bounds", !bounds.violated, bounds.err_exact_rhs);
        if (!bounds.lowrank_bound_applicable)
            std::printf("  note: sigma_{k+1} > sqrt(lambda); the x1 bound is vacuous here\n");
        report("norm ordering", norm2(x1) <= norm2(x1h) * (1.0 + 1e-12), norm2(x1h));
    }
    // filter diagonal cross-check; the difference cancels two O(1/lambda)
    // terms, so the tolerance is measured against the operand scale
    {
        const std::vector<double> filt = filter_diagonal(svd.sigma, v.lambda);
        double worst = 0.0;
        for (std::size_t i = 0; i < filt.size(); ++i) {
            const double lhs = 1.0 / v.lambda - filt[i];
            const double rhs = 1.0 / (svd.sigma[i] * svd.sigma[i] + v.lambda);
            worst = std::max(worst, std::abs(lhs - rhs) * v.lambda);
        }
        report("filter diagonal cross-check", worst <= 1e-14, worst);
    }

    std::printf("validate: %d violation(s)\n", failures);

    Manifest m;
    m.set("command", std::string("validate"));
    m.set("matrix", v.matrix);
    m.set("k", std::uint64_t(v.k));
    m.set("lambda", v.lambda);
    m.set("seed", v.seed);
    m.set("violations", std::uint64_t(failures));
    m.set("version", std::string(kVersion));
    m.set("duration_ms", timer.elapsed_ms());
    m.write(v.matrix + ".validate.manifest");
    return failures == 0 ? 0 : kExitNumeric;
}

// ---- bench ---------------------------------------------------------------------

struct BenchArgs {
    std::string matrix;
    std::string approx;  // .spc or .lrk
    std::size_t trials = 50;
    std::uint64_t seed = 1;
    std::string csv;
    bool checker_sweep = false;
    std::size_t grid_rows = 0, grid_cols = 0;
    double lambda = 1.0;
};

int cmd_bench(const BenchArgs& bargs) {
    Timer timer;
    Manifest m;
    m.set("command", std::string("bench"));
    m.set("matrix", bargs.matrix);
    m.set("trials", std::uint64_t(bargs.trials));
    m.set("seed", bargs.seed);
    const SparseMatrix a = read_sparse(bargs.matrix);
    SparseOperator exact(a);

    if (!bargs.approx.empty()) {
        LoadedOperator approx_holder;
        std::unique_ptr<LowRankSVD> lrk;
        std::unique_ptr<LinearOperator> approx_op;
        char magic[5] = {0};
        {
            std::ifstream probe(bargs.approx, std::ios::binary);
            if (!probe) throw FormatError("cannot open '" + bargs.approx + "' for reading");
            probe.read(magic, 4);
        }
        if (std::string(magic) == "LRK1") {
            lrk = std::make_unique<LowRankSVD>(read_lowrank(bargs.approx));
            approx_op = std::make_unique<LowRankOperator>(*lrk);
        } else {
            approx_holder = load_operator(bargs.approx);
            approx_op = std::move(approx_holder.op);
        }

        Timer op_timer;
        const ErrorReport rep = matvec_error_report(exact, *approx_op, bargs.trials, bargs.seed);
        std::printf("bench: %zu trials (%zu skipped), %llu ms\n", rep.ax.size(),
                    rep.skipped_trials.size(),
                    static_cast<unsigned long long>(op_timer.elapsed_ms()));

        // timing table: mean wall-clock per operation over the same trials
        {
            GaussianSampler gx(derive_seed(bargs.seed, 9001));
            const DenseVector x = gx.vector(a.ncols);
            const DenseVector y = gx.vector(a.nrows);
            auto time_op = [&](auto&& fn) {
                Timer t;
                for (std::size_t i = 0; i < bargs.trials; ++i) fn();
                return static_cast<double>(t.elapsed_ms()) / double(bargs.trials);
            };
            std::printf("  timing (mean ms/op over %zu trials):\n", bargs.trials);
            std::printf("    %-7s %10s %10s\n", "op", "exact", "approx");
            std::printf("    %-7s %10.3f %10.3f\n", "Ax",
                        time_op([&] { exact.apply(x); }),
                        time_op([&] { approx_op->apply(x); }));
            std::printf("    %-7s %10.3f %10.3f\n", "A^Ty",
                        time_op([&] { exact.apply_transpose(y); }),
                        time_op([&] { approx_op->apply_transpose(y); }));
            std::printf("    %-7s %10.3f %10.3f\n", "A^TAx",
                        time_op([&] { exact.apply_normal(x); }),
                        time_op([&] { approx_op->apply_normal(x); }));
        }
        m.set("approx", bargs.approx);
        m.set("mean_ax_percent", rep.mean_ax);
        m.set("mean_aty_percent", rep.mean_aty);
        m.set("mean_atax_percent", rep.mean_atax);
        std::printf("  Ax     percent error: mean %.4g max %.4g\n", rep.mean_ax, rep.max_ax);
        std::printf("  A^Ty   percent error: mean %.4g max %.4g\n", rep.mean_aty, rep.max_aty);
        std::printf("  A^TAx  percent error: mean %.4g max %.4g\n", rep.mean_atax, rep.max_atax);
        if (!bargs.csv.empty()) write_error_report_csv(rep, bargs.csv);
    }

    if (bargs.checker_sweep) {
        if (bargs.grid_rows * bargs.grid_cols != a.ncols)
            throw CLI::ValidationError("--grid-rows * --grid-cols must equal matrix columns");
        std::printf("checkerboard sweep (lambda=%g):\n", bargs.lambda);
        for (std::size_t cell : {2u, 4u, 8u, 16u}) {
            CheckerboardConfig cfg;
            cfg.grid_rows = bargs.grid_rows;
            cfg.grid_cols = bargs.grid_cols;
            cfg.cell_size = cell;
            cfg.band_rows = bargs.grid_rows;
            RegConfig reg;
            reg.lambda1 = bargs.lambda;
            reg.cg_tol = 1e-10;
            reg.max_iters = 1000;
            const CheckerboardResult res = checkerboard_experiment(exact, cfg, reg);
            std::printf("  cell %2zu: correlation %.4f\n", cell, res.correlation);
            m.set("checker_corr_cell" + std::to_string(cell), res.correlation);
        }
    }
    m.set("version", std::string(kVersion));
    m.set("duration_ms", timer.elapsed_ms());
    m.write(bargs.matrix + ".bench.manifest");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regularized least-squares with compressed operators"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    unsigned threads = 0;
    app.add_option("--threads", threads, "cap on internal parallelism (0 = all cores)");

    GenArgs gen;
    auto* cgen = app.add_subcommand("gen", "generate a synthetic problem instance");
    cgen->add_option("--rows", gen.kernel.n_rows, "matrix rows");
    cgen->add_option("--grid-rows", gen.kernel.grid_rows, "model grid rows");
    cgen->add_option("--grid-cols", gen.kernel.grid_cols, "model grid cols");
    cgen->add_option("--bumps", gen.kernel.bump_count, "bumps per row");
    cgen->add_option("--width-min", gen.kernel.width_min, "bump width lower bound");
    cgen->add_option("--width-max", gen.kernel.width_max, "bump width upper bound");
    cgen->add_option("--amp-min", gen.kernel.amp_min, "bump amplitude lower bound");
    cgen->add_option("--amp-max", gen.kernel.amp_max, "bump amplitude upper bound");
    cgen->add_option("--floor", gen.kernel.sparsity_floor, "entries below this are dropped");
    cgen->add_option("--cell-size", gen.checker.cell_size, "checkerboard cell size");
    cgen->add_option("--band-rows", gen.band_rows, "active band grid rows (0 = whole grid)");
    cgen->add_option("--noise", gen.noise, "relative noise level on the rhs");
    cgen->add_option("--seed", gen.kernel.seed, "generator seed");
    cgen->add_option("--out", gen.out_prefix, "output path prefix");

    CompressArgs comp;
    auto* ccomp = app.add_subcommand("compress", "row-wise wavelet compression of a matrix");
    ccomp->add_option("--in", comp.input, "input .spr")->required();
    ccomp->add_option("--out", comp.output, "output .spc")->required();
    ccomp->add_option("--family", comp.family, "wavelet family: haar or cdf97");
    ccomp->add_option("--levels", comp.levels, "decomposition levels");
    ccomp->add_option("--keep-fraction", comp.keep_fraction,
                      "fraction of nonzero coefficients to keep");
    ccomp->add_option("--absolute", comp.absolute, "absolute threshold (overrides fraction)");
    ccomp->add_option("--block-rows", comp.block_rows, "streaming block size in rows");

    SvdArgs svd;
    auto* csvd = app.add_subcommand("svd", "randomized low-rank factorization");
    csvd->add_option("--in", svd.inputs, "operator file(s), .spr or .spc; several stack as blocks")
        ->required();
    csvd->add_option("--out", svd.output, "output .lrk")->required();
    csvd->add_option("--k", svd.k, "target rank");
    csvd->add_option("--seed", svd.seed, "sampling seed");
    csvd->add_option("--oversample", svd.oversample, "extra samples beyond k");
    csvd->add_option("--cutoff", svd.cutoff, "relative sigma cutoff");

    SolveArgs sol;
    auto* csol = app.add_subcommand("solve", "regularized solve");
    csol->add_option("--scheme", sol.scheme, "true | x1 | x1hat | x2 | x3 | ista");
    csol->add_option("--matrix", sol.matrix, "operator file (.spr or .spc)");
    csol->add_option("--factors", sol.factors, "low-rank factor file(s) (.lrk)");
    csol->add_option("--rhs", sol.rhs, "right hand side (.vec)")->required();
    csol->add_option("--out", sol.output, "solution output (.vec)");
    csol->add_option("--lambda1", sol.cfg.lambda1, "l2 damping weight");
    csol->add_option("--lambda2", sol.cfg.lambda2, "Laplacian smoothing weight");
    csol->add_option("--hat-lambda-scale", sol.cfg.hat_lambda_scale,
                     "lambda1 multiplier for the x1hat scheme");
    csol->add_option("--iters", sol.cfg.max_iters, "iteration cap");
    csol->add_option("--tol", sol.cfg.cg_tol, "relative residual tolerance");
    csol->add_option("--checkpoints", sol.cfg.outlier_checkpoints,
                     "outlier checkpoint iterations");
    csol->add_option("--grid-rows", sol.grid_rows, "model grid rows (for lambda2)");
    csol->add_option("--grid-cols", sol.grid_cols, "model grid cols (for lambda2)");
    csol->add_option("--tau", sol.tau, "ista soft threshold");
    csol->add_option("--step", sol.step, "ista step size");
    csol->add_option("--ista-iters", sol.ista_iters, "ista iteration count");

    ValidateArgs val;
    auto* cval = app.add_subcommand("validate", "run the identity and bound suite");
    cval->add_option("--matrix", val.matrix, "instance matrix (.spr)")->required();
    cval->add_option("--k", val.k, "truncation rank");
    cval->add_option("--lambda", val.lambda, "damping weight");
    cval->add_option("--seed", val.seed, "seed for the random probes");

    BenchArgs ben;
    auto* cben = app.add_subcommand("bench", "matvec error report and timing");
    cben->add_option("--matrix", ben.matrix, "exact matrix (.spr)")->required();
    cben->add_option("--approx", ben.approx, "approximate operator (.spc or .lrk)");
    cben->add_option("--trials", ben.trials, "number of random trial vectors");
    cben->add_option("--seed", ben.seed, "trial seed");
    cben->add_option("--csv", ben.csv, "per-trial CSV output path");
    cben->add_flag("--checker-sweep", ben.checker_sweep,
                   "sweep checkerboard cell sizes and report correlations");
    cben->add_option("--grid-rows", ben.grid_rows, "grid rows for the sweep");
    cben->add_option("--grid-cols", ben.grid_cols, "grid cols for the sweep");
    cben->add_option("--lambda", ben.lambda, "damping for the sweep");

    try {
        app.parse(argc, argv);
        set_max_threads(threads);
        if (cgen->parsed()) return cmd_gen(gen);
        if (ccomp->parsed()) return cmd_compress(comp);
        if (csvd->parsed()) return cmd_svd(svd);
        if (csol->parsed()) return cmd_solve(sol);
        if (cval->parsed()) return cmd_validate(val);
        if (cben->parsed()) return cmd_bench(ben);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return kExitFormat;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}
