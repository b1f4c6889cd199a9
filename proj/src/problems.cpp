#include "compreg/problems.hpp"

#include <algorithm>
#include <cmath>

#include "compreg/parallel.hpp"
#include "compreg/rng.hpp"

namespace compreg {

SparseMatrix gen_kernel_matrix(const SyntheticKernelConfig& cfg) {
    if (cfg.n_rows == 0 || cfg.grid_size() == 0)
        throw NumericError("kernel generator: empty dimensions");
    if (!(cfg.width_min > 0.0) || cfg.width_max < cfg.width_min)
        throw NumericError("kernel generator: bump widths must be positive and ordered");
    if (cfg.amp_max < cfg.amp_min || !(cfg.amp_min >= 0.0))
        throw NumericError("kernel generator: amplitude range invalid");

    const std::size_t n = cfg.grid_size();
    std::vector<std::vector<std::uint32_t>> cols(cfg.n_rows);
    std::vector<std::vector<double>> vals(cfg.n_rows);

    parallel_for(cfg.n_rows, [&](std::size_t begin, std::size_t end) {
        DenseVector row(n);
        for (std::size_t r = begin; r < end; ++r) {
            SplitMix64 rng(derive_seed(cfg.seed, r));
            std::fill(row.begin(), row.end(), 0.0);
            for (std::size_t bump = 0; bump < cfg.bump_count; ++bump) {
                const double ci = rng.next_unit() * static_cast<double>(cfg.grid_rows);
                const double cj = rng.next_unit() * static_cast<double>(cfg.grid_cols);
                const double w =
                    cfg.width_min + rng.next_unit() * (cfg.width_max - cfg.width_min);
                const double amp = cfg.amp_min + rng.next_unit() * (cfg.amp_max - cfg.amp_min);
                const double inv2w2 = 1.0 / (2.0 * w * w);
                for (std::size_t gi = 0; gi < cfg.grid_rows; ++gi) {
                    const double di = static_cast<double>(gi) - ci;
                    for (std::size_t gj = 0; gj < cfg.grid_cols; ++gj) {
                        const double dj = static_cast<double>(gj) - cj;
                        row[gi * cfg.grid_cols + gj] +=
                            amp * std::exp(-(di * di + dj * dj) * inv2w2);
                    }
                }
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (row[j] > cfg.sparsity_floor) {
                    cols[r].push_back(static_cast<std::uint32_t>(j));
                    vals[r].push_back(row[j]);
                }
            }
        }
    });

    SparseMatrix m;
    m.nrows = cfg.n_rows;
    m.ncols = n;
    m.row_nnz.resize(cfg.n_rows);
    for (std::size_t r = 0; r < cfg.n_rows; ++r) {
        m.row_nnz[r] = cols[r].size();
        m.col_indices.insert(m.col_indices.end(), cols[r].begin(), cols[r].end());
        m.values.insert(m.values.end(), vals[r].begin(), vals[r].end());
    }
    return m;
}

DenseVector gen_checkerboard(const CheckerboardConfig& cfg) {
    if (cfg.cell_size == 0) throw NumericError("checkerboard: cell_size must be positive");
    if (cfg.band_rows > cfg.grid_rows)
        throw NumericError("checkerboard: band exceeds grid rows");
    DenseVector x(cfg.grid_size(), 0.0);
    for (std::size_t i = 0; i < cfg.band_rows; ++i) {
        for (std::size_t j = 0; j < cfg.grid_cols; ++j) {
            const bool flip = ((i / cfg.cell_size) + (j / cfg.cell_size)) % 2 == 0;
            x[i * cfg.grid_cols + j] = flip ? cfg.amplitude : -cfg.amplitude;
        }
    }
    return x;
}

CheckerboardResult checkerboard_experiment(const LinearOperator& a, const CheckerboardConfig& cfg,
                                           const RegConfig& reg) {
    require_length(a.cols(), cfg.grid_size(), "checkerboard grid");
    CheckerboardResult out;
    out.truth = gen_checkerboard(cfg);
    const DenseVector b = a.apply(out.truth);
    out.recovered = solve_true(a, b, reg).solution;

    const std::size_t band = cfg.band_rows * cfg.grid_cols;
    double st = 0.0, sr = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < band; ++i) {
        st += out.truth[i] * out.truth[i];
        sr += out.recovered[i] * out.recovered[i];
        cross += out.truth[i] * out.recovered[i];
    }
    out.correlation = (st > 0.0 && sr > 0.0) ? cross / std::sqrt(st * sr) : 0.0;
    return out;
}

DenseVector add_noise(const DenseVector& b, double level, std::uint64_t seed) {
    if (!(level >= 0.0)) throw NumericError("add_noise: level must be >= 0");
    if (level == 0.0) return b;
    GaussianSampler g(seed);
    const double scale = level * norm2(b) / std::sqrt(static_cast<double>(b.size()));
    DenseVector out = b;
    for (double& v : out) v += scale * g.next();
    return out;
}

}  // namespace compreg
