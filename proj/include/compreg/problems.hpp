#pragma once

#include <cstdint>

#include "compreg/operators.hpp"
#include "compreg/regularize.hpp"
#include "compreg/sparse.hpp"

namespace compreg {

/// Generator for desk-scale stand-ins for smooth integral-equation kernels:
/// each row is a sum of Gaussian bumps over a 2-D grid, flattened row-major.
struct SyntheticKernelConfig {
    std::size_t n_rows = 200;
    std::size_t grid_rows = 16;
    std::size_t grid_cols = 32;
    std::size_t bump_count = 4;
    double width_min = 4.0;
    double width_max = 10.0;
    double amp_min = 0.5;
    double amp_max = 2.0;
    double sparsity_floor = 1e-14;  // entries below this are dropped
    std::uint64_t seed = 1;

    std::size_t grid_size() const { return grid_rows * grid_cols; }
};

/// Deterministic per seed; rows are nonnegative and bounded by
/// bump_count * amp_max.
SparseMatrix gen_kernel_matrix(const SyntheticKernelConfig& cfg);

/// Checkerboard model over a grid; only the leading `band_rows` grid rows
/// carry signal (the active band), the rest are zero.
struct CheckerboardConfig {
    std::size_t grid_rows = 16;
    std::size_t grid_cols = 32;
    std::size_t cell_size = 4;
    double amplitude = 1.0;
    std::size_t band_rows = 16;  // active band: grid rows [0, band_rows)

    std::size_t grid_size() const { return grid_rows * grid_cols; }
};

DenseVector gen_checkerboard(const CheckerboardConfig& cfg);

struct CheckerboardResult {
    DenseVector truth;
    DenseVector recovered;
    double correlation = 0.0;  // normalized, restricted to the active band
};

/// Forms b = A x_chk, solves the regularized system, and correlates the
/// recovery with the truth over the active band.
CheckerboardResult checkerboard_experiment(const LinearOperator& a, const CheckerboardConfig& cfg,
                                           const RegConfig& reg);

/// b + level * ||b|| / sqrt(m) * gaussian, seeded.
DenseVector add_noise(const DenseVector& b, double level, std::uint64_t seed);

}  // namespace compreg
