#pragma once

#include <cstddef>

#include "compreg/types.hpp"

namespace compreg {

enum class WaveletFamily : std::uint32_t { HaarOrthogonal = 0, CDF97 = 1 };
enum class BoundaryRule : std::uint32_t { Symmetric = 0 };

/// One-dimensional multi-level transform description. Immutable, shareable.
struct WaveletSpec {
    WaveletFamily family = WaveletFamily::CDF97;
    std::size_t levels = 4;
    BoundaryRule boundary = BoundaryRule::Symmetric;

    /// Smallest multiple of 2^levels that holds a length-n signal.
    std::size_t padded_length(std::size_t n) const;
};

/// Coefficient vector W x. Signals whose length is not divisible by
/// 2^levels are symmetrically extended first; the result has the padded
/// length. Inverting and truncating to the original length recovers x.
DenseVector forward(const WaveletSpec& w, const DenseVector& x);

/// Exact inverse of forward. Input length must be divisible by 2^levels.
/// If original_length is given the reconstruction is truncated to it.
DenseVector inverse(const WaveletSpec& w, const DenseVector& c);
DenseVector inverse(const WaveletSpec& w, const DenseVector& c, std::size_t original_length);

/// Applies W^{-T}. For the orthogonal Haar family this is exactly the
/// forward transform; for CDF 9/7 it runs the forward sequence with
/// transposed inverse lifting steps.
DenseVector inverse_transpose(const WaveletSpec& w, const DenseVector& x);

/// Hard-threshold policy: either keep the largest-magnitude fraction of the
/// nonzero entries, or zero everything at or below an absolute cutoff.
struct ThresholdPolicy {
    enum class Mode : std::uint32_t { KeepFraction = 0, Absolute = 1 };
    Mode mode = Mode::KeepFraction;
    double value = 1.0;  // fraction in (0,1] or cutoff alpha >= 0

    static ThresholdPolicy keep_fraction(double f) { return {Mode::KeepFraction, f}; }
    static ThresholdPolicy absolute(double alpha) { return {Mode::Absolute, alpha}; }
    void validate() const;
};

/// KeepFraction keeps the ceil(fraction * nnz) largest-magnitude nonzeros
/// (ties resolved toward lower indices); Absolute zeroes |c_i| <= alpha.
DenseVector hard_threshold(const ThresholdPolicy& p, const DenseVector& c);

/// Componentwise soft shrinkage sgn(c_i) * max(0, |c_i| - tau).
DenseVector soft_threshold(double tau, const DenseVector& c);

}  // namespace compreg
