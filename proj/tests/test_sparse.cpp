#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "compreg/io.hpp"
#include "compreg/sparse.hpp"
#include "helpers.hpp"

using namespace compreg;
using testhelp::brute_multiply;
using testhelp::brute_multiply_transpose;
using testhelp::make_random_sparse;
using testhelp::rel_diff;

namespace {

SparseMatrix identity3() {
    SparseBuilder b(3, 3);
    for (std::uint32_t i = 0; i < 3; ++i) b.add_row({{i, 1.0}});
    return b.finish();
}

// [[1, 0, 2], [0, 3, 0]]
SparseMatrix example2x3() {
    SparseBuilder b(2, 3);
    b.add_row({{0, 1.0}, {2, 2.0}});
    b.add_row({{1, 3.0}});
    return b.finish();
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("spmv identity and hand-expanded cases") {
    const SparseMatrix id = identity3();
    CHECK(spmv(id, {1.0, 2.0, 3.0}) == DenseVector{1.0, 2.0, 3.0});

    const SparseMatrix m = example2x3();
    // row0: 1*1 + 2*1 = 3, row1: 3*1 = 3
    CHECK(spmv(m, {1.0, 1.0, 1.0}) == DenseVector{3.0, 3.0});
    CHECK_THROWS_AS(spmv(m, {1.0, 1.0}), NumericError);
}

TEST_CASE("spmv_transpose identity and hand-expanded cases") {
    const SparseMatrix id = identity3();
    CHECK(spmv_transpose(id, {4.0, 5.0, 6.0}) == DenseVector{4.0, 5.0, 6.0});

    const SparseMatrix m = example2x3();
    CHECK(spmv_transpose(m, {1.0, 1.0}) == DenseVector{1.0, 3.0, 2.0});
    CHECK_THROWS_AS(spmv_transpose(m, {1.0, 1.0, 1.0}), NumericError);
}

TEST_CASE("spmv matches dense brute force on random 50x80") {
    const SparseMatrix m = make_random_sparse(50, 80, 0.15, 42);
    const DenseVector x = testhelp::make_random_vector(80, 7);
    const DenseVector y = testhelp::make_random_vector(50, 8);
    CHECK(rel_diff(spmv(m, x), brute_multiply(m, x)) < 1e-14);
    CHECK(rel_diff(spmv_transpose(m, y), brute_multiply_transpose(m, y)) < 1e-14);
}

TEST_CASE("adjoint identity <Ax, y> == <x, A^T y>") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SparseMatrix m = make_random_sparse(40, 60, 0.2, 100 + seed);
        const DenseVector x = testhelp::make_random_vector(60, 200 + seed);
        const DenseVector y = testhelp::make_random_vector(40, 300 + seed);
        const double lhs = dot(spmv(m, x), y);
        const double rhs = dot(x, spmv_transpose(m, y));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("vstack") {
    SUBCASE("single block is the block itself") {
        const SparseMatrix m = example2x3();
        const SparseMatrix s = vstack(std::vector<const SparseMatrix*>{&m});
        CHECK(s.nrows == m.nrows);
        CHECK(s.col_indices == m.col_indices);
        CHECK(s.values == m.values);
    }
    SUBCASE("two 1x2 blocks stack in order") {
        SparseBuilder b1(1, 2), b2(1, 2);
        b1.add_row({{0, 1.0}});
        b2.add_row({{1, 2.0}});
        const SparseMatrix a = b1.finish(), b = b2.finish();
        const SparseMatrix s = vstack(std::vector<const SparseMatrix*>{&a, &b});
        CHECK(s.nrows == 2);
        CHECK(spmv(s, {1.0, 1.0}) == DenseVector{1.0, 2.0});
    }
    SUBCASE("blockwise matvec equals stacked matvec") {
        std::vector<SparseMatrix> blocks;
        for (std::uint64_t i = 0; i < 4; ++i)
            blocks.push_back(make_random_sparse(10 + i, 30, 0.3, 500 + i));
        const SparseMatrix s = vstack(blocks);
        const DenseVector x = testhelp::make_random_vector(30, 9);
        DenseVector expect;
        for (const auto& blk : blocks) {
            const DenseVector part = spmv(blk, x);
            expect.insert(expect.end(), part.begin(), part.end());
        }
        CHECK(rel_diff(spmv(s, x), expect) < 1e-15);
    }
    SUBCASE("mismatched ncols rejected") {
        const SparseMatrix a = make_random_sparse(3, 4, 0.5, 1);
        const SparseMatrix b = make_random_sparse(3, 5, 0.5, 2);
        CHECK_THROWS_AS(vstack(std::vector<const SparseMatrix*>{&a, &b}), NumericError);
    }
}

TEST_CASE("builder rejects invalid input") {
    CHECK_THROWS_AS(SparseBuilder(0, 3), NumericError);
    CHECK_THROWS_AS(SparseBuilder(3, 0), NumericError);
    SparseBuilder b(1, 3);
    // duplicate column index within a row
    CHECK_THROWS_AS(b.add_row({{1, 1.0}, {1, 2.0}}), NumericError);
}

TEST_CASE(".spr round trip is bit exact") {
    const std::string path = temp_path("roundtrip.spr");
    SUBCASE("hand example") {
        const SparseMatrix m = example2x3();
        write_sparse(m, path);
        const SparseMatrix r = read_sparse(path);
        CHECK(r.nrows == m.nrows);
        CHECK(r.ncols == m.ncols);
        CHECK(r.row_nnz == m.row_nnz);
        CHECK(r.col_indices == m.col_indices);
        CHECK(r.values == m.values);
    }
    SUBCASE("empty-row matrix round-trips") {
        SparseBuilder b(3, 2);
        b.add_row({{0, 1.5}});
        b.add_row({});
        b.add_row({{1, -2.5}});
        const SparseMatrix m = b.finish();
        write_sparse(m, path);
        const SparseMatrix r = read_sparse(path);
        CHECK(r.row_nnz == m.row_nnz);
        CHECK(r.values == m.values);
    }
    SUBCASE("random matrix round-trips byte-for-byte") {
        const SparseMatrix m = make_random_sparse(17, 23, 0.4, 3);
        write_sparse(m, path);
        const std::string path2 = temp_path("roundtrip2.spr");
        write_sparse(read_sparse(path), path2);
        std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
        std::vector<char> b1((std::istreambuf_iterator<char>(f1)), {});
        std::vector<char> b2((std::istreambuf_iterator<char>(f2)), {});
        CHECK(b1 == b2);
    }
}

TEST_CASE(".spr format errors carry byte offsets") {
    const std::string path = temp_path("bad.spr");

    SUBCASE("header nnz inconsistent with row counts") {
        const SparseMatrix m = example2x3();
        write_sparse(m, path);
        // patch the nnz field (offset 20) from 3 to 4
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(20);
        const std::uint64_t wrong = 4;
        f.write(reinterpret_cast<const char*>(&wrong), 8);
        f.close();
        CHECK_THROWS_AS(read_sparse(path), FormatError);
    }
    SUBCASE("column index >= ncols") {
        const SparseMatrix m = example2x3();
        write_sparse(m, path);
        // first column index lives right after header + row counts
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4 + 3 * 8 + 2 * 8);
        const std::uint32_t wrong = 9;
        f.write(reinterpret_cast<const char*>(&wrong), 4);
        f.close();
        try {
            read_sparse(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.byte_offset() == 4 + 3 * 8 + 2 * 8);
        }
    }
    SUBCASE("truncated file") {
        const SparseMatrix m = make_random_sparse(5, 5, 0.5, 4);
        write_sparse(m, path);
        std::filesystem::resize_file(path, std::filesystem::file_size(path) - 6);
        CHECK_THROWS_AS(read_sparse(path), FormatError);
    }
    SUBCASE("bad magic") {
        std::ofstream f(path, std::ios::binary);
        f << "NOPE";
        f.close();
        CHECK_THROWS_AS(read_sparse(path), FormatError);
    }
}

TEST_CASE("vector file round trip") {
    const std::string path = temp_path("v.vec");
    const DenseVector v = testhelp::make_random_vector(33, 71);
    compreg::write_vector(v, path);
    CHECK(compreg::read_vector(path) == v);
    std::filesystem::resize_file(path, 20);
    CHECK_THROWS_AS(compreg::read_vector(path), FormatError);
}

TEST_CASE("blocked streaming reader visits every row once") {
    const SparseMatrix m = make_random_sparse(23, 31, 0.3, 11);
    const std::string path = temp_path("stream.spr");
    write_sparse(m, path);
    for (std::size_t block_rows : {1u, 4u, 23u, 100u}) {
        std::size_t seen = 0;
        for_each_row_block(path, block_rows, [&](const SparseMatrix& blk, std::size_t first) {
            CHECK(first == seen);
            const SparseMatrix expect = slice_rows(m, first, first + blk.nrows);
            CHECK(blk.col_indices == expect.col_indices);
            CHECK(blk.values == expect.values);
            seen += blk.nrows;
        });
        CHECK(seen == m.nrows);
    }
}
