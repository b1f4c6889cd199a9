#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "compreg/types.hpp"

namespace compreg {

/// Compressed sparse row matrix with 32-bit column indices and 64-bit values.
/// Immutable after construction; safe to share read-only across threads.
struct SparseMatrix {
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::vector<std::uint64_t> row_nnz;       // nonzeros per row
    std::vector<std::uint32_t> col_indices;   // row-major, strictly increasing within a row
    std::vector<double> values;

    std::size_t nnz() const { return values.size(); }

    /// Offset of row i's first entry (prefix sums are not stored).
    /// Use row_offsets() when iterating many rows.
    std::vector<std::size_t> row_offsets() const;

    /// Validates all structural invariants; throws NumericError on violation.
    void validate() const;

    /// Serialized size in the .spr format, in bytes.
    std::size_t serialized_bytes() const {
        return 4 + 3 * 8 + 8 * nrows + 4 * nnz() + 8 * nnz();
    }
};

/// Builds a SparseMatrix row by row. Enforces strictly increasing column
/// indices within each row.
class SparseBuilder {
public:
    SparseBuilder(std::size_t nrows, std::size_t ncols);
    /// Appends the next row; entries must be sorted by column.
    void add_row(const std::vector<std::pair<std::uint32_t, double>>& entries);
    void add_dense_row(const DenseVector& row);
    SparseMatrix finish();

private:
    SparseMatrix m_;
    std::size_t rows_added_ = 0;
};

/// y = A x (exact).
DenseVector spmv(const SparseMatrix& m, const DenseVector& x);

/// y = A^T x (exact), computed without materializing the transpose;
/// accumulation order is fixed so output is bitwise deterministic.
DenseVector spmv_transpose(const SparseMatrix& m, const DenseVector& y);

/// Rows of all blocks concatenated in order. All blocks must share ncols.
SparseMatrix vstack(const std::vector<const SparseMatrix*>& blocks);
SparseMatrix vstack(const std::vector<SparseMatrix>& blocks);

/// Extracts row i as a dense vector of length ncols.
DenseVector dense_row(const SparseMatrix& m, std::size_t i);

/// Rows [row_begin, row_end) as a standalone matrix.
SparseMatrix slice_rows(const SparseMatrix& m, std::size_t row_begin, std::size_t row_end);

// ---- .spr binary format ------------------------------------------------------
// magic "SPR1" | u64 nrows | u64 ncols | u64 nnz | nrows x u64 row counts
// | nnz x u32 column indices | nnz x f64 values, all little-endian.

void write_sparse(const SparseMatrix& m, const std::string& path);
SparseMatrix read_sparse(const std::string& path);

/// Streams the matrix at `path` in blocks of at most `block_rows` rows,
/// invoking fn(block, first_row). Peak residency is one block.
void for_each_row_block(const std::string& path, std::size_t block_rows,
                        const std::function<void(const SparseMatrix&, std::size_t)>& fn);

}  // namespace compreg
