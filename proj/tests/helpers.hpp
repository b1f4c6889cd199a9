#pragma once

// Shared fixtures for the test suites: simple random instances and small
// brute-force reference computations kept independent of the library's
// optimized paths.

#include <cstdint>
#include <vector>

#include "compreg/dense.hpp"
#include "compreg/rng.hpp"
#include "compreg/sparse.hpp"
#include "compreg/types.hpp"

namespace testhelp {

using compreg::DenseMatrix;
using compreg::DenseVector;
using compreg::SparseMatrix;

inline SparseMatrix make_random_sparse(std::size_t rows, std::size_t cols, double density,
                                       std::uint64_t seed) {
    compreg::SparseBuilder b(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        compreg::SplitMix64 pick(compreg::derive_seed(seed, i));
        compreg::GaussianSampler g(compreg::derive_seed(seed, 1000000 + i));
        std::vector<std::pair<std::uint32_t, double>> entries;
        for (std::size_t j = 0; j < cols; ++j)
            if (pick.next_unit() < density) entries.emplace_back(static_cast<std::uint32_t>(j), g.next());
        b.add_row(entries);
    }
    return b.finish();
}

inline DenseMatrix make_random_dense(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    DenseMatrix m(rows, cols);
    compreg::GaussianSampler g(seed);
    for (double& v : m.entries) v = g.next();
    return m;
}

inline DenseVector make_random_vector(std::size_t n, std::uint64_t seed) {
    return compreg::GaussianSampler(seed).vector(n);
}

// plain row-by-row dense product, the brute-force oracle for spmv
inline DenseVector brute_multiply(const SparseMatrix& m, const DenseVector& x) {
    DenseVector y(m.nrows, 0.0);
    for (std::size_t i = 0; i < m.nrows; ++i) {
        const DenseVector row = compreg::dense_row(m, i);
        for (std::size_t j = 0; j < m.ncols; ++j) y[i] += row[j] * x[j];
    }
    return y;
}

inline DenseVector brute_multiply_transpose(const SparseMatrix& m, const DenseVector& y) {
    DenseVector x(m.ncols, 0.0);
    for (std::size_t i = 0; i < m.nrows; ++i) {
        const DenseVector row = compreg::dense_row(m, i);
        for (std::size_t j = 0; j < m.ncols; ++j) x[j] += row[j] * y[i];
    }
    return x;
}

inline double rel_diff(const DenseVector& a, const DenseVector& b) {
    DenseVector d = a;
    compreg::axpy(-1.0, b, d);
    const double nb = compreg::norm2(b);
    return nb == 0.0 ? compreg::norm2(d) : compreg::norm2(d) / nb;
}

// Gaussian matrix with columns orthonormalized by plain Gram-Schmidt; used
// to manufacture factors with a prescribed spectrum.
inline DenseMatrix random_orthonormal(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    DenseMatrix m = make_random_dense(rows, cols, seed);
    for (std::size_t j = 0; j < cols; ++j) {
        double* cj = m.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                const double* ci = m.col(i);
                double proj = 0.0;
                for (std::size_t r = 0; r < rows; ++r) proj += cj[r] * ci[r];
                for (std::size_t r = 0; r < rows; ++r) cj[r] -= proj * ci[r];
            }
        }
        double nrm = 0.0;
        for (std::size_t r = 0; r < rows; ++r) nrm += cj[r] * cj[r];
        nrm = std::sqrt(nrm);
        for (std::size_t r = 0; r < rows; ++r) cj[r] /= nrm;
    }
    return m;
}

// dense matrix with exactly the given singular values (random singular vectors)
inline DenseMatrix matrix_with_spectrum(std::size_t rows, std::size_t cols,
                                        const std::vector<double>& sigma, std::uint64_t seed) {
    const DenseMatrix u = random_orthonormal(rows, sigma.size(), seed);
    const DenseMatrix v = random_orthonormal(cols, sigma.size(), seed + 77);
    DenseMatrix a(rows, cols);
    for (std::size_t t = 0; t < sigma.size(); ++t) {
        const double* uc = u.col(t);
        const double* vc = v.col(t);
        for (std::size_t j = 0; j < cols; ++j) {
            const double w = sigma[t] * vc[j];
            double* acol = a.col(j);
            for (std::size_t i = 0; i < rows; ++i) acol[i] += uc[i] * w;
        }
    }
    return a;
}

inline SparseMatrix sparse_from_dense(const DenseMatrix& d) {
    compreg::SparseBuilder b(d.nrows, d.ncols);
    for (std::size_t i = 0; i < d.nrows; ++i) {
        DenseVector row(d.ncols);
        for (std::size_t j = 0; j < d.ncols; ++j) row[j] = d(i, j);
        b.add_dense_row(row);
    }
    return b.finish();
}

}  // namespace testhelp
