#include "compreg/compressed.hpp"

#include <algorithm>
#include <cmath>

#include "compreg/io.hpp"
#include "compreg/lowrank.hpp"
#include "compreg/parallel.hpp"

namespace compreg {

CompressedMatrix compress_rows(const SparseMatrix& a, const WaveletSpec& spec,
                               const ThresholdPolicy& policy) {
    policy.validate();
    const std::size_t padded = spec.padded_length(a.ncols);

    // per-row results first, then stitched; rows are independent
    std::vector<std::vector<std::uint32_t>> cols(a.nrows);
    std::vector<std::vector<double>> vals(a.nrows);
    const auto off = a.row_offsets();
    parallel_for(a.nrows, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            DenseVector row(a.ncols, 0.0);
            for (std::size_t p = off[i]; p < off[i + 1]; ++p)
                row[a.col_indices[p]] = a.values[p];
            const DenseVector t = hard_threshold(policy, forward(spec, row));
            for (std::size_t j = 0; j < t.size(); ++j) {
                if (t[j] != 0.0) {
                    cols[i].push_back(static_cast<std::uint32_t>(j));
                    vals[i].push_back(t[j]);
                }
            }
        }
    });

    CompressedMatrix out;
    out.spec = spec;
    out.policy = policy;
    out.original_ncols = a.ncols;
    out.m.nrows = a.nrows;
    out.m.ncols = padded;
    out.m.row_nnz.resize(a.nrows);
    for (std::size_t i = 0; i < a.nrows; ++i) {
        out.m.row_nnz[i] = cols[i].size();
        out.m.col_indices.insert(out.m.col_indices.end(), cols[i].begin(), cols[i].end());
        out.m.values.insert(out.m.values.end(), vals[i].begin(), vals[i].end());
    }
    return out;
}

DenseVector CompressedMatrix::apply(const DenseVector& x) const {
    require_length(original_ncols, x.size(), "compressed apply");
    DenseVector padded(padded_ncols(), 0.0);  // zero extension keeps the pair adjoint
    std::copy(x.begin(), x.end(), padded.begin());
    return spmv(m, inverse_transpose(spec, padded));
}

DenseVector CompressedMatrix::apply_transpose(const DenseVector& y) const {
    require_length(nrows(), y.size(), "compressed apply_transpose");
    return inverse(spec, spmv_transpose(m, y), original_ncols);
}

DenseVector CompressedMatrix::apply_normal(const DenseVector& x) const {
    return apply_transpose(apply(x));
}

CompressionReport compression_report(const SparseMatrix& a, const CompressedMatrix& c) {
    if (a.nrows != c.nrows())
        throw NumericError("compression_report: row counts differ");
    CompressionReport rep;
    rep.nnz_ratio = c.m.nnz() == 0 ? 0.0
                                   : static_cast<double>(a.nnz()) / static_cast<double>(c.m.nnz());
    rep.byte_ratio = static_cast<double>(a.serialized_bytes()) /
                     static_cast<double>(compressed_serialized_bytes(c));
    rep.row_errors.assign(a.nrows, 0.0);
    const auto aoff = a.row_offsets();
    const auto moff = c.m.row_offsets();
    parallel_for(a.nrows, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            DenseVector row(a.ncols, 0.0);
            for (std::size_t p = aoff[i]; p < aoff[i + 1]; ++p)
                row[a.col_indices[p]] = a.values[p];
            const double rn = norm2(row);
            if (rn == 0.0) continue;
            DenseVector coeffs(c.padded_ncols(), 0.0);
            for (std::size_t p = moff[i]; p < moff[i + 1]; ++p)
                coeffs[c.m.col_indices[p]] = c.m.values[p];
            DenseVector rec = inverse(c.spec, coeffs, a.ncols);
            axpy(-1.0, row, rec);
            rep.row_errors[i] = norm2(rec) / rn;
        }
    });
    double sum = 0.0;
    for (double e : rep.row_errors) {
        sum += e;
        rep.max_row_error = std::max(rep.max_row_error, e);
    }
    rep.mean_row_error = a.nrows == 0 ? 0.0 : sum / static_cast<double>(a.nrows);
    return rep;
}

std::size_t compressed_serialized_bytes(const CompressedMatrix& c) {
    return 4 + 4 + 8 + 4 + 4 + 8 + 8 + c.m.serialized_bytes();
}

void write_compressed(const CompressedMatrix& c, const std::string& path) {
    BinaryWriter w(path);
    w.write_magic("SPC1");
    w.write_u32(static_cast<std::uint32_t>(c.spec.family));
    w.write_u64(c.spec.levels);
    w.write_u32(static_cast<std::uint32_t>(c.spec.boundary));
    w.write_u32(static_cast<std::uint32_t>(c.policy.mode));
    w.write_f64(c.policy.value);
    w.write_u64(c.original_ncols);
    // embedded .spr payload
    w.write_magic("SPR1");
    w.write_u64(c.m.nrows);
    w.write_u64(c.m.ncols);
    w.write_u64(c.m.nnz());
    for (auto n : c.m.row_nnz) w.write_u64(n);
    for (auto ci : c.m.col_indices) w.write_u32(ci);
    w.write_f64_array(c.m.values.data(), c.m.values.size());
    w.close();
}

CompressedMatrix read_compressed(const std::string& path) {
    BinaryReader r(path);
    r.read_magic("SPC1");
    CompressedMatrix c;
    const std::uint32_t family = r.read_u32();
    if (family > 1) r.fail("unknown wavelet family id " + std::to_string(family), r.offset() - 4);
    c.spec.family = static_cast<WaveletFamily>(family);
    c.spec.levels = r.read_u64();
    const std::uint32_t boundary = r.read_u32();
    if (boundary != 0) r.fail("unknown boundary rule id", r.offset() - 4);
    c.spec.boundary = static_cast<BoundaryRule>(boundary);
    const std::uint32_t mode = r.read_u32();
    if (mode > 1) r.fail("unknown threshold mode id", r.offset() - 4);
    c.policy.mode = static_cast<ThresholdPolicy::Mode>(mode);
    c.policy.value = r.read_f64();
    c.original_ncols = r.read_u64();

    r.read_magic("SPR1");
    c.m.nrows = r.read_u64();
    c.m.ncols = r.read_u64();
    const std::uint64_t nnz = r.read_u64();
    if (c.m.nrows == 0 || c.m.ncols == 0) r.fail("matrix dimensions must be positive", r.offset());
    c.m.row_nnz.resize(c.m.nrows);
    std::uint64_t total = 0;
    for (auto& n : c.m.row_nnz) {
        n = r.read_u64();
        total += n;
    }
    if (total != nnz) r.fail("header nnz does not match sum of row counts", r.offset());
    c.m.col_indices.resize(nnz);
    for (auto& ci : c.m.col_indices) ci = r.read_u32();
    c.m.values.resize(nnz);
    r.read_f64_array(c.m.values.data(), nnz);
    c.m.validate();
    if (c.spec.padded_length(c.original_ncols) != c.m.ncols)
        r.fail("padded width does not match levels and original column count", r.offset());
    return c;
}

// ---- BlockedOperator ---------------------------------------------------------

namespace {

std::size_t block_rows(const BlockedOperator::Block& b) {
    if (const auto* s = std::get_if<SparseMatrix>(&b)) return s->nrows;
    if (const auto* c = std::get_if<CompressedMatrix>(&b)) return c->nrows();
    return std::get<std::shared_ptr<const LowRankSVD>>(b)->rows();
}

std::size_t block_cols(const BlockedOperator::Block& b) {
    if (const auto* s = std::get_if<SparseMatrix>(&b)) return s->ncols;
    if (const auto* c = std::get_if<CompressedMatrix>(&b)) return c->original_ncols;
    return std::get<std::shared_ptr<const LowRankSVD>>(b)->cols();
}

DenseVector block_apply(const BlockedOperator::Block& b, const DenseVector& x) {
    if (const auto* s = std::get_if<SparseMatrix>(&b)) return spmv(*s, x);
    if (const auto* c = std::get_if<CompressedMatrix>(&b)) return c->apply(x);
    return lr_apply(*std::get<std::shared_ptr<const LowRankSVD>>(b), x);
}

DenseVector block_apply_transpose(const BlockedOperator::Block& b, const DenseVector& y) {
    if (const auto* s = std::get_if<SparseMatrix>(&b)) return spmv_transpose(*s, y);
    if (const auto* c = std::get_if<CompressedMatrix>(&b)) return c->apply_transpose(y);
    return lr_apply_transpose(*std::get<std::shared_ptr<const LowRankSVD>>(b), y);
}

}  // namespace

BlockedOperator::BlockedOperator(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw NumericError("blocked operator requires at least one block");
    ncols_ = block_cols(blocks_[0]);
    row_offsets_.push_back(0);
    for (const Block& b : blocks_) {
        if (block_cols(b) != ncols_)
            throw NumericError("blocked operator: block has " + std::to_string(block_cols(b)) +
                               " columns, expected " + std::to_string(ncols_));
        total_rows_ += block_rows(b);
        row_offsets_.push_back(total_rows_);
    }
}

DenseVector BlockedOperator::apply(const DenseVector& x) const {
    require_length(ncols_, x.size(), "blocked apply");
    DenseVector y(total_rows_);
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const DenseVector part = block_apply(blocks_[j], x);
        std::copy(part.begin(), part.end(), y.begin() + row_offsets_[j]);
    }
    return y;
}

DenseVector BlockedOperator::apply_transpose(const DenseVector& y) const {
    require_length(total_rows_, y.size(), "blocked apply_transpose");
    DenseVector x(ncols_, 0.0);
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        DenseVector yj(y.begin() + row_offsets_[j], y.begin() + row_offsets_[j + 1]);
        axpy(1.0, block_apply_transpose(blocks_[j], yj), x);
    }
    return x;
}

}  // namespace compreg
