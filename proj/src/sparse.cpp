#include "compreg/sparse.hpp"

#include <algorithm>

#include "compreg/io.hpp"
#include "compreg/parallel.hpp"

namespace compreg {

std::vector<std::size_t> SparseMatrix::row_offsets() const {
    std::vector<std::size_t> off(nrows + 1, 0);
    for (std::size_t i = 0; i < nrows; ++i) off[i + 1] = off[i] + row_nnz[i];
    return off;
}

void SparseMatrix::validate() const {
    if (nrows == 0 || ncols == 0) throw NumericError("sparse matrix must have nrows, ncols > 0");
    if (row_nnz.size() != nrows) throw NumericError("row_nnz length does not match nrows");
    std::size_t total = 0;
    for (auto c : row_nnz) total += c;
    if (col_indices.size() != total || values.size() != total)
        throw NumericError("nonzero array lengths do not match sum(row_nnz)");
    std::size_t p = 0;
    for (std::size_t i = 0; i < nrows; ++i) {
        std::uint32_t prev = 0;
        for (std::size_t k = 0; k < row_nnz[i]; ++k, ++p) {
            const std::uint32_t c = col_indices[p];
            if (c >= ncols)
                throw NumericError("column index " + std::to_string(c) + " out of range in row " +
                                   std::to_string(i));
            if (k > 0 && c <= prev)
                throw NumericError("column indices not strictly increasing in row " +
                                   std::to_string(i));
            prev = c;
        }
    }
}

SparseBuilder::SparseBuilder(std::size_t nrows, std::size_t ncols) {
    if (nrows == 0 || ncols == 0) throw NumericError("sparse matrix must have nrows, ncols > 0");
    m_.nrows = nrows;
    m_.ncols = ncols;
    m_.row_nnz.reserve(nrows);
}

void SparseBuilder::add_row(const std::vector<std::pair<std::uint32_t, double>>& entries) {
    if (rows_added_ == m_.nrows) throw NumericError("too many rows added to builder");
    std::uint32_t prev = 0;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto [c, v] = entries[k];
        if (c >= m_.ncols)
            throw NumericError("column index " + std::to_string(c) + " out of range");
        if (k > 0 && c <= prev)
            throw NumericError("row entries must have strictly increasing column indices");
        prev = c;
        m_.col_indices.push_back(c);
        m_.values.push_back(v);
    }
    m_.row_nnz.push_back(entries.size());
    ++rows_added_;
}

void SparseBuilder::add_dense_row(const DenseVector& row) {
    require_length(m_.ncols, row.size(), "add_dense_row");
    std::uint64_t count = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] != 0.0) {
            m_.col_indices.push_back(static_cast<std::uint32_t>(j));
            m_.values.push_back(row[j]);
            ++count;
        }
    }
    m_.row_nnz.push_back(count);
    ++rows_added_;
}

SparseMatrix SparseBuilder::finish() {
    if (rows_added_ != m_.nrows)
        throw NumericError("builder finished with " + std::to_string(rows_added_) + " of " +
                           std::to_string(m_.nrows) + " rows");
    return std::move(m_);
}

DenseVector spmv(const SparseMatrix& m, const DenseVector& x) {
    require_length(m.ncols, x.size(), "spmv");
    DenseVector y(m.nrows, 0.0);
    const auto off = m.row_offsets();
    parallel_for(m.nrows, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double s = 0.0;
            for (std::size_t p = off[i]; p < off[i + 1]; ++p)
                s += m.values[p] * x[m.col_indices[p]];
            y[i] = s;
        }
    });
    return y;
}

DenseVector spmv_transpose(const SparseMatrix& m, const DenseVector& y) {
    require_length(m.nrows, y.size(), "spmv_transpose");
    DenseVector x(m.ncols, 0.0);
    // serial row-major accumulation: fixed order, bitwise deterministic
    std::size_t p = 0;
    for (std::size_t i = 0; i < m.nrows; ++i) {
        const double yi = y[i];
        for (std::size_t k = 0; k < m.row_nnz[i]; ++k, ++p)
            x[m.col_indices[p]] += m.values[p] * yi;
    }
    return x;
}

SparseMatrix vstack(const std::vector<const SparseMatrix*>& blocks) {
    if (blocks.empty()) throw NumericError("vstack requires at least one block");
    const std::size_t ncols = blocks[0]->ncols;
    SparseMatrix out;
    out.ncols = ncols;
    for (const SparseMatrix* b : blocks) {
        if (b->ncols != ncols)
            throw NumericError("vstack: block has " + std::to_string(b->ncols) +
                               " columns, expected " + std::to_string(ncols));
        out.nrows += b->nrows;
        out.row_nnz.insert(out.row_nnz.end(), b->row_nnz.begin(), b->row_nnz.end());
        out.col_indices.insert(out.col_indices.end(), b->col_indices.begin(), b->col_indices.end());
        out.values.insert(out.values.end(), b->values.begin(), b->values.end());
    }
    return out;
}

SparseMatrix vstack(const std::vector<SparseMatrix>& blocks) {
    std::vector<const SparseMatrix*> ptrs;
    ptrs.reserve(blocks.size());
    for (const auto& b : blocks) ptrs.push_back(&b);
    return vstack(ptrs);
}

DenseVector dense_row(const SparseMatrix& m, std::size_t i) {
    DenseVector r(m.ncols, 0.0);
    std::size_t p = 0;
    for (std::size_t q = 0; q < i; ++q) p += m.row_nnz[q];
    for (std::size_t k = 0; k < m.row_nnz[i]; ++k, ++p) r[m.col_indices[p]] = m.values[p];
    return r;
}

SparseMatrix slice_rows(const SparseMatrix& m, std::size_t row_begin, std::size_t row_end) {
    if (row_begin >= row_end || row_end > m.nrows) throw NumericError("slice_rows: bad row range");
    SparseMatrix out;
    out.nrows = row_end - row_begin;
    out.ncols = m.ncols;
    const auto off = m.row_offsets();
    out.row_nnz.assign(m.row_nnz.begin() + row_begin, m.row_nnz.begin() + row_end);
    out.col_indices.assign(m.col_indices.begin() + off[row_begin],
                           m.col_indices.begin() + off[row_end]);
    out.values.assign(m.values.begin() + off[row_begin], m.values.begin() + off[row_end]);
    return out;
}

// ---- .spr io ----------------------------------------------------------------

void write_sparse(const SparseMatrix& m, const std::string& path) {
    m.validate();
    BinaryWriter w(path);
    w.write_magic("SPR1");
    w.write_u64(m.nrows);
    w.write_u64(m.ncols);
    w.write_u64(m.nnz());
    for (auto c : m.row_nnz) w.write_u64(c);
    for (auto c : m.col_indices) w.write_u32(c);
    w.write_f64_array(m.values.data(), m.values.size());
    w.close();
}

namespace {

struct SprHeader {
    std::uint64_t nrows = 0, ncols = 0, nnz = 0;
    std::vector<std::uint64_t> row_nnz;
};

SprHeader read_spr_header(BinaryReader& r) {
    r.read_magic("SPR1");
    SprHeader h;
    h.nrows = r.read_u64();
    h.ncols = r.read_u64();
    h.nnz = r.read_u64();
    if (h.nrows == 0 || h.ncols == 0) r.fail("matrix dimensions must be positive", 4);
    h.row_nnz.resize(h.nrows);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < h.nrows; ++i) {
        h.row_nnz[i] = r.read_u64();
        total += h.row_nnz[i];
    }
    if (total != h.nnz)
        r.fail("header nnz " + std::to_string(h.nnz) + " does not match sum of row counts " +
                   std::to_string(total),
               r.offset());
    return h;
}

void read_row_payload(BinaryReader& r, const SprHeader& h, SparseMatrix& m) {
    m.col_indices.resize(h.nnz);
    for (std::size_t p = 0; p < h.nnz; ++p) m.col_indices[p] = r.read_u32();
    m.values.resize(h.nnz);
    r.read_f64_array(m.values.data(), h.nnz);
    // structural checks with offsets into the index section
    const std::size_t index_base = 4 + 3 * 8 + 8 * h.nrows;
    std::size_t p = 0;
    for (std::size_t i = 0; i < h.nrows; ++i) {
        std::uint32_t prev = 0;
        for (std::size_t k = 0; k < h.row_nnz[i]; ++k, ++p) {
            const std::uint32_t c = m.col_indices[p];
            if (c >= h.ncols)
                r.fail("column index " + std::to_string(c) + " >= ncols in row " +
                           std::to_string(i),
                       index_base + 4 * p);
            if (k > 0 && c <= prev)
                r.fail("column indices not strictly increasing in row " + std::to_string(i),
                       index_base + 4 * p);
            prev = c;
        }
    }
}

}  // namespace

SparseMatrix read_sparse(const std::string& path) {
    BinaryReader r(path);
    const SprHeader h = read_spr_header(r);
    SparseMatrix m;
    m.nrows = h.nrows;
    m.ncols = h.ncols;
    m.row_nnz = h.row_nnz;
    read_row_payload(r, h, m);
    return m;
}

void for_each_row_block(const std::string& path, std::size_t block_rows,
                        const std::function<void(const SparseMatrix&, std::size_t)>& fn) {
    if (block_rows == 0) throw NumericError("block_rows must be positive");
    // Two readers walk the index and value sections independently so each
    // block is materialized without loading the whole payload.
    BinaryReader idx_reader(path);
    const SprHeader h = read_spr_header(idx_reader);

    std::ifstream val_stream(path, std::ios::binary);
    const std::size_t value_base = 4 + 3 * 8 + 8 * h.nrows + 4 * h.nnz;
    val_stream.seekg(static_cast<std::streamoff>(value_base));

    std::size_t row = 0;
    std::size_t values_read = 0;
    while (row < h.nrows) {
        const std::size_t end = std::min(h.nrows, row + block_rows);
        SparseMatrix block;
        block.nrows = end - row;
        block.ncols = h.ncols;
        block.row_nnz.assign(h.row_nnz.begin() + row, h.row_nnz.begin() + end);
        std::uint64_t block_nnz = 0;
        for (auto c : block.row_nnz) block_nnz += c;
        block.col_indices.resize(block_nnz);
        for (std::size_t p = 0; p < block_nnz; ++p) block.col_indices[p] = idx_reader.read_u32();
        block.values.resize(block_nnz);
        val_stream.read(reinterpret_cast<char*>(block.values.data()),
                        static_cast<std::streamsize>(8 * block_nnz));
        if (static_cast<std::size_t>(val_stream.gcount()) != 8 * block_nnz)
            throw FormatError(path + ": truncated file while reading values",
                              value_base + 8 * values_read);
        values_read += block_nnz;
        block.validate();
        fn(block, row);
        row = end;
    }
}

}  // namespace compreg
