#pragma once

#include <memory>
#include <string>
#include <variant>

#include "compreg/operators.hpp"
#include "compreg/sparse.hpp"
#include "compreg/wavelet.hpp"

namespace compreg {

/// Row-wise wavelet-compressed stand-in for a sparse matrix: each row of
/// `m` is the thresholded transform of the corresponding source row, so
/// A x can be approximated without the source matrix being resident.
struct CompressedMatrix {
    SparseMatrix m;         // thresholded transformed rows; ncols is the padded width
    WaveletSpec spec;
    ThresholdPolicy policy;
    std::size_t original_ncols = 0;

    std::size_t nrows() const { return m.nrows; }
    std::size_t padded_ncols() const { return m.ncols; }

    /// Approximate A x: the compressed rows applied to the inverse-transpose
    /// transform of the (zero-padded) input.
    DenseVector apply(const DenseVector& x) const;

    /// Approximate A^T y: the inverse transform of M^T y, truncated to the
    /// original column count. Exactly adjoint to apply().
    DenseVector apply_transpose(const DenseVector& y) const;

    /// Approximate A^T A x as the composition of the two operations.
    DenseVector apply_normal(const DenseVector& x) const;
};

/// Transforms and thresholds each row independently (rows are processed
/// one at a time and may be handled in parallel).
CompressedMatrix compress_rows(const SparseMatrix& a, const WaveletSpec& spec,
                               const ThresholdPolicy& policy);

class CompressedOperator final : public LinearOperator {
public:
    explicit CompressedOperator(const CompressedMatrix& c) : c_(&c) {}
    std::size_t rows() const override { return c_->nrows(); }
    std::size_t cols() const override { return c_->original_ncols; }
    DenseVector apply(const DenseVector& x) const override { return c_->apply(x); }
    DenseVector apply_transpose(const DenseVector& y) const override {
        return c_->apply_transpose(y);
    }

private:
    const CompressedMatrix* c_;
};

/// Size and fidelity summary for a compression run.
struct CompressionReport {
    double nnz_ratio = 0.0;    // nnz(A) / nnz(M)
    double byte_ratio = 0.0;   // serialized bytes(A) / bytes(M)
    std::vector<double> row_errors;  // per-row relative reconstruction error
    double mean_row_error = 0.0;
    double max_row_error = 0.0;
};

CompressionReport compression_report(const SparseMatrix& a, const CompressedMatrix& c);

/// Serialized size of a CompressedMatrix in the .spc format, in bytes.
std::size_t compressed_serialized_bytes(const CompressedMatrix& c);

// ---- .spc binary format ------------------------------------------------------
// magic "SPC1" | u32 family | u64 levels | u32 boundary | u32 policy mode
// | f64 policy value | u64 original ncols | embedded .spr payload of m.

void write_compressed(const CompressedMatrix& c, const std::string& path);
CompressedMatrix read_compressed(const std::string& path);

// ---- heterogeneous blocked operator ------------------------------------------

struct LowRankSVD;  // defined in lowrank.hpp
DenseVector lr_apply(const LowRankSVD& f, const DenseVector& x);
DenseVector lr_apply_transpose(const LowRankSVD& f, const DenseVector& y);

/// Row-blocked operator whose blocks may independently be raw, wavelet
/// compressed, or low rank. Applies stack per-block products; the transpose
/// sums per-block contributions in block order.
class BlockedOperator final : public LinearOperator {
public:
    using Block = std::variant<SparseMatrix, CompressedMatrix, std::shared_ptr<const LowRankSVD>>;

    explicit BlockedOperator(std::vector<Block> blocks);

    std::size_t rows() const override { return total_rows_; }
    std::size_t cols() const override { return ncols_; }
    DenseVector apply(const DenseVector& x) const override;
    DenseVector apply_transpose(const DenseVector& y) const override;

    std::size_t block_count() const { return blocks_.size(); }
    const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }

private:
    std::vector<Block> blocks_;
    std::vector<std::size_t> row_offsets_;  // size block_count()+1
    std::size_t total_rows_ = 0;
    std::size_t ncols_ = 0;
};

}  // namespace compreg
