#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "compreg/compressed.hpp"
#include "compreg/dense.hpp"
#include "compreg/lowrank.hpp"
#include "compreg/problems.hpp"
#include "helpers.hpp"

using namespace compreg;
using testhelp::make_random_sparse;
using testhelp::rel_diff;

namespace {

WaveletSpec haar3{WaveletFamily::HaarOrthogonal, 3, BoundaryRule::Symmetric};
WaveletSpec cdf3{WaveletFamily::CDF97, 3, BoundaryRule::Symmetric};

SparseMatrix smooth_kernel(std::size_t rows, std::size_t grid_rows, std::size_t grid_cols,
                           std::uint64_t seed) {
    SyntheticKernelConfig cfg;
    cfg.n_rows = rows;
    cfg.grid_rows = grid_rows;
    cfg.grid_cols = grid_cols;
    cfg.bump_count = 5;
    cfg.width_min = 5.0;
    cfg.width_max = 11.0;
    cfg.seed = seed;
    return gen_kernel_matrix(cfg);
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("lossless compression reproduces A W^T densely") {
    const SparseMatrix a = make_random_sparse(12, 32, 0.4, 21);
    const CompressedMatrix c = compress_rows(a, haar3, ThresholdPolicy::keep_fraction(1.0));

    // dense transform matrix built column by column from basis vectors
    DenseMatrix wt(32, 32);
    for (std::size_t j = 0; j < 32; ++j) {
        DenseVector e(32, 0.0);
        e[j] = 1.0;
        const DenseVector col = forward(haar3, e);
        for (std::size_t i = 0; i < 32; ++i) wt(j, i) = col[i];  // row j of W^T = (W e_j)^T
    }
    const DenseMatrix expect = dense::matmul(dense::from_sparse(a), wt);
    const DenseMatrix got = dense::from_sparse(c.m);
    CHECK(dense::max_abs(dense::subtract(got, expect)) < 1e-12);
}

TEST_CASE("zero source row compresses to a zero row") {
    SparseBuilder b(3, 32);
    b.add_row({{0, 1.0}, {5, 2.0}});
    b.add_row({});
    b.add_row({{31, -1.0}});
    const CompressedMatrix c =
        compress_rows(b.finish(), cdf3, ThresholdPolicy::keep_fraction(0.5));
    CHECK(c.m.row_nnz[1] == 0);
}

TEST_CASE("keep fraction caps the retained transform coefficients") {
    const SparseMatrix a = smooth_kernel(200, 16, 32, 3);
    const ThresholdPolicy policy = ThresholdPolicy::keep_fraction(0.3);
    const CompressedMatrix c = compress_rows(a, cdf3, policy);
    // count nonzeros of the transformed (unthresholded) rows
    std::size_t transformed_nnz = 0;
    for (std::size_t i = 0; i < a.nrows; ++i) {
        const DenseVector t = forward(cdf3, dense_row(a, i));
        for (double v : t) transformed_nnz += (v != 0.0) ? 1 : 0;
    }
    CHECK(c.m.nnz() <= static_cast<std::size_t>(0.3 * transformed_nnz) + a.nrows);
}

TEST_CASE("apply matches the exact product when nothing is discarded") {
    for (const WaveletSpec& spec : {haar3, cdf3}) {
        const SparseMatrix a = make_random_sparse(20, 64, 0.3, 31);
        const CompressedMatrix c = compress_rows(a, spec, ThresholdPolicy::keep_fraction(1.0));
        for (std::uint64_t s = 0; s < 3; ++s) {
            const DenseVector x = testhelp::make_random_vector(64, 400 + s);
            const DenseVector y = testhelp::make_random_vector(20, 500 + s);
            CHECK(rel_diff(c.apply(x), spmv(a, x)) < 1e-10);
            CHECK(rel_diff(c.apply_transpose(y), spmv_transpose(a, y)) < 1e-10);
            CHECK(rel_diff(c.apply_normal(x), spmv_transpose(a, spmv(a, x))) < 1e-10);
        }
    }
}

TEST_CASE("apply of the zero vector is zero") {
    const SparseMatrix a = make_random_sparse(10, 32, 0.4, 5);
    const CompressedMatrix c = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.4));
    CHECK(norm2(c.apply(DenseVector(32, 0.0))) == 0.0);
    CHECK(norm2(c.apply_transpose(DenseVector(10, 0.0))) == 0.0);
    CHECK_THROWS_AS(c.apply(DenseVector(33, 0.0)), NumericError);
    CHECK_THROWS_AS(c.apply_transpose(DenseVector(11, 0.0)), NumericError);
}

TEST_CASE("smooth kernel at 30 percent retention stays within the error budget") {
    const SparseMatrix a = smooth_kernel(200, 16, 32, 7);
    const CompressedMatrix c = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.3));
    double worst_ax = 0.0, worst_normal = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const DenseVector x = testhelp::make_random_vector(a.ncols, 600 + s);
        worst_ax = std::max(worst_ax, rel_diff(c.apply(x), spmv(a, x)));
        worst_normal =
            std::max(worst_normal, rel_diff(c.apply_normal(x), spmv_transpose(a, spmv(a, x))));
    }
    CHECK(worst_ax <= 0.15);
    CHECK(worst_normal <= 0.25);
}

TEST_CASE("padded column counts run through the full apply cycle") {
    // 37 columns pad to 40 in the transform domain (levels 3)
    const SparseMatrix a = make_random_sparse(18, 37, 0.4, 67);
    for (const WaveletSpec& spec : {haar3, cdf3}) {
        const CompressedMatrix c = compress_rows(a, spec, ThresholdPolicy::keep_fraction(1.0));
        CHECK(c.padded_ncols() == 40);
        CHECK(c.original_ncols == 37);
        const DenseVector x = testhelp::make_random_vector(37, 68);
        const DenseVector y = testhelp::make_random_vector(18, 69);
        CHECK(rel_diff(c.apply(x), spmv(a, x)) < 1e-10);
        CHECK(rel_diff(c.apply_transpose(y), spmv_transpose(a, y)) < 1e-10);
        // adjointness survives the zero-pad / truncate pair
        const double lhs = dot(c.apply(x), y);
        const double rhs = dot(x, c.apply_transpose(y));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("absolute threshold policy drops everything at or below the cutoff") {
    const SparseMatrix a = make_random_sparse(12, 32, 0.5, 71);
    const CompressedMatrix c = compress_rows(a, cdf3, ThresholdPolicy::absolute(0.25));
    for (double v : c.m.values) CHECK(std::abs(v) > 0.25);
}

TEST_CASE("apply and apply_transpose are mutually adjoint") {
    const SparseMatrix a = make_random_sparse(25, 48, 0.25, 77);
    const CompressedMatrix c = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.4));
    for (std::uint64_t s = 0; s < 5; ++s) {
        const DenseVector x = testhelp::make_random_vector(48, 700 + s);
        const DenseVector y = testhelp::make_random_vector(25, 800 + s);
        const double lhs = dot(c.apply(x), y);
        const double rhs = dot(x, c.apply_transpose(y));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("apply_normal is self-adjoint and equals the composition") {
    const SparseMatrix a = make_random_sparse(25, 48, 0.25, 78);
    const CompressedMatrix c = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.5));
    const DenseVector x = testhelp::make_random_vector(48, 900);
    const DenseVector z = testhelp::make_random_vector(48, 901);
    // definitionally the same code path
    CHECK(rel_diff(c.apply_normal(x), c.apply_transpose(c.apply(x))) < 1e-15);
    const double lhs = dot(c.apply_normal(x), z);
    const double rhs = dot(x, c.apply_normal(z));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("reconstruction error decreases as more coefficients are kept") {
    const SparseMatrix a = smooth_kernel(40, 16, 32, 9);
    const CompressedMatrix loose = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.15));
    const CompressedMatrix tight = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.45));
    const CompressionReport rl = compression_report(a, loose);
    const CompressionReport rt = compression_report(a, tight);
    for (std::size_t i = 0; i < a.nrows; ++i)
        CHECK(rl.row_errors[i] >= rt.row_errors[i] - 1e-12);
}

TEST_CASE("compression report") {
    SUBCASE("lossless: byte ratio near one, negligible error") {
        const SparseMatrix a = smooth_kernel(60, 16, 32, 11);  // 512 = 2^9, no padding
        const CompressedMatrix c = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(1.0));
        const CompressionReport rep = compression_report(a, c);
        CHECK(rep.byte_ratio == doctest::Approx(1.0).epsilon(0.1));
        CHECK(rep.max_row_error <= 1e-10);
    }
    SUBCASE("smooth kernel at 30 percent: at least 3x smaller") {
        const SparseMatrix a = smooth_kernel(120, 16, 32, 13);
        const CompressedMatrix c = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.3));
        const CompressionReport rep = compression_report(a, c);
        CHECK(rep.byte_ratio >= 3.0);
        CHECK(rep.mean_row_error <= 0.10);
    }
    SUBCASE("white noise is flagged as incompressible") {
        SparseBuilder b(40, 512);
        for (std::size_t i = 0; i < 40; ++i)
            b.add_dense_row(testhelp::make_random_vector(512, 2000 + i));
        const SparseMatrix a = b.finish();
        const CompressedMatrix c = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.3));
        const CompressionReport rep = compression_report(a, c);
        // the top 30% of Gaussian coefficients hold ~78% of the energy, so
        // the per-row error sits near sqrt(0.22); far above the smooth case
        CHECK(rep.mean_row_error > 0.4);
    }
}

TEST_CASE(".spc round trip preserves the operator") {
    const SparseMatrix a = make_random_sparse(15, 40, 0.3, 17);
    const CompressedMatrix c = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.6));
    const std::string path = temp_path("op.spc");
    write_compressed(c, path);
    const CompressedMatrix r = read_compressed(path);
    CHECK(r.spec.family == c.spec.family);
    CHECK(r.spec.levels == c.spec.levels);
    CHECK(r.policy.mode == c.policy.mode);
    CHECK(r.policy.value == c.policy.value);
    CHECK(r.original_ncols == c.original_ncols);
    CHECK(r.m.values == c.m.values);
    const DenseVector x = testhelp::make_random_vector(40, 3000);
    CHECK(rel_diff(r.apply(x), c.apply(x)) == 0.0);

    std::filesystem::resize_file(path, 10);
    CHECK_THROWS_AS(read_compressed(path), FormatError);
}

TEST_CASE("blocked operator") {
    const SparseMatrix a = make_random_sparse(30, 40, 0.3, 19);
    const DenseVector x = testhelp::make_random_vector(40, 4000);
    const DenseVector y = testhelp::make_random_vector(30, 4001);

    SUBCASE("all raw blocks equal the stacked matrix") {
        std::vector<BlockedOperator::Block> blocks;
        blocks.emplace_back(slice_rows(a, 0, 10));
        blocks.emplace_back(slice_rows(a, 10, 22));
        blocks.emplace_back(slice_rows(a, 22, 30));
        BlockedOperator op(std::move(blocks));
        CHECK(rel_diff(op.apply(x), spmv(a, x)) < 1e-14);
        CHECK(rel_diff(op.apply_transpose(y), spmv_transpose(a, y)) < 1e-14);
    }
    SUBCASE("single-block operator equals the block") {
        std::vector<BlockedOperator::Block> blocks;
        blocks.emplace_back(a);
        BlockedOperator op(std::move(blocks));
        CHECK(rel_diff(op.apply(x), spmv(a, x)) == 0.0);
    }
    SUBCASE("mixed low-rank and raw blocks match manual composition") {
        const SparseMatrix top = slice_rows(a, 0, 12);
        const SparseMatrix bottom = slice_rows(a, 12, 30);
        SparseOperator top_op(top);
        auto f = std::make_shared<LowRankSVD>(randomized_lowrank_svd(top_op, 12, 5));
        std::vector<BlockedOperator::Block> blocks;
        blocks.emplace_back(std::shared_ptr<const LowRankSVD>(f));
        blocks.emplace_back(bottom);
        BlockedOperator op(std::move(blocks));

        DenseVector expect = lr_apply(*f, x);
        const DenseVector lower = spmv(bottom, x);
        expect.insert(expect.end(), lower.begin(), lower.end());
        CHECK(rel_diff(op.apply(x), expect) < 1e-12);

        DenseVector yt(y.begin(), y.begin() + 12);
        DenseVector yb(y.begin() + 12, y.end());
        DenseVector expect_t = lr_apply_transpose(*f, yt);
        axpy(1.0, spmv_transpose(bottom, yb), expect_t);
        CHECK(rel_diff(op.apply_transpose(y), expect_t) < 1e-12);
    }
    SUBCASE("blocked and unblocked wavelet paths agree") {
        const CompressedMatrix whole = compress_rows(a, cdf3, ThresholdPolicy::keep_fraction(0.5));
        const CompressedMatrix c1 =
            compress_rows(slice_rows(a, 0, 14), cdf3, ThresholdPolicy::keep_fraction(0.5));
        const CompressedMatrix c2 =
            compress_rows(slice_rows(a, 14, 30), cdf3, ThresholdPolicy::keep_fraction(0.5));
        std::vector<BlockedOperator::Block> blocks;
        blocks.emplace_back(c1);
        blocks.emplace_back(c2);
        BlockedOperator op(std::move(blocks));
        CHECK(rel_diff(op.apply(x), whole.apply(x)) < 1e-12);
        CHECK(rel_diff(op.apply_transpose(y), whole.apply_transpose(y)) < 1e-12);
    }
    SUBCASE("column mismatch rejected") {
        const SparseMatrix other = make_random_sparse(5, 41, 0.3, 23);
        std::vector<BlockedOperator::Block> blocks;
        blocks.emplace_back(a);
        blocks.emplace_back(other);
        CHECK_THROWS_AS(BlockedOperator(std::move(blocks)), NumericError);
    }
}
