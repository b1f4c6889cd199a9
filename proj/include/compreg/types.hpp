#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace compreg {

/// Dense vector of 64-bit reals. Solvers require all entries finite.
using DenseVector = std::vector<double>;

/// Raised on malformed or truncated binary files; carries the byte offset
/// at which the problem was detected.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}
    explicit FormatError(const std::string& what) : std::runtime_error(what), offset_(0) {}
    std::size_t byte_offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Raised on numeric failures: dimension mismatches, rank deficiency,
/// indefiniteness, divergence, non-finite data.
class NumericError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_length(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual) {
        throw NumericError(std::string(what) + ": expected length " + std::to_string(expected) +
                           ", got " + std::to_string(actual));
    }
}

/// Small dense matrix, column-major. Used for the dense factors of the
/// low rank pipeline and for dense reference computations.
struct DenseMatrix {
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::vector<double> entries;  // column-major, nrows * ncols

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : nrows(r), ncols(c), entries(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return entries[j * nrows + i]; }
    double operator()(std::size_t i, std::size_t j) const { return entries[j * nrows + i]; }

    double* col(std::size_t j) { return entries.data() + j * nrows; }
    const double* col(std::size_t j) const { return entries.data() + j * nrows; }
};

// ---- small vector helpers -------------------------------------------------

inline double dot(const DenseVector& a, const DenseVector& b) {
    require_length(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const DenseVector& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

inline void axpy(double alpha, const DenseVector& x, DenseVector& y) {
    require_length(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(DenseVector& x, double alpha) {
    for (double& v : x) v *= alpha;
}

inline bool all_finite(const DenseVector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace compreg
