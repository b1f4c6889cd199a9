#pragma once

#include "compreg/sparse.hpp"
#include "compreg/types.hpp"

namespace compreg {

/// Anything that can multiply by itself and its transpose. The solvers and
/// the randomized SVD pipeline only see this surface, so raw, compressed,
/// low rank and blocked operators are interchangeable.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual std::size_t rows() const = 0;
    virtual std::size_t cols() const = 0;
    virtual DenseVector apply(const DenseVector& x) const = 0;
    virtual DenseVector apply_transpose(const DenseVector& y) const = 0;
    virtual DenseVector apply_normal(const DenseVector& x) const {
        return apply_transpose(apply(x));
    }
};

/// Exact operator backed by a CSR matrix (not owned).
class SparseOperator final : public LinearOperator {
public:
    explicit SparseOperator(const SparseMatrix& m) : m_(&m) {}
    std::size_t rows() const override { return m_->nrows; }
    std::size_t cols() const override { return m_->ncols; }
    DenseVector apply(const DenseVector& x) const override { return spmv(*m_, x); }
    DenseVector apply_transpose(const DenseVector& y) const override {
        return spmv_transpose(*m_, y);
    }
    const SparseMatrix& matrix() const { return *m_; }

private:
    const SparseMatrix* m_;
};

}  // namespace compreg
