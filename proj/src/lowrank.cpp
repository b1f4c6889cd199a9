#include "compreg/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "compreg/dense.hpp"
#include "compreg/io.hpp"
#include "compreg/rng.hpp"

namespace compreg {

double orthonormality_defect(const DenseMatrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.ncols; ++i) {
        for (std::size_t j = i; j < m.ncols; ++j) {
            double s = 0.0;
            const double* ci = m.col(i);
            const double* cj = m.col(j);
            for (std::size_t r = 0; r < m.nrows; ++r) s += ci[r] * cj[r];
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

DenseMatrix sample_range(const LinearOperator& op, std::size_t k, std::uint64_t seed) {
    const std::size_t m = op.rows(), n = op.cols();
    if (k < 1 || k > std::min(m, n))
        throw NumericError("sample count k=" + std::to_string(k) + " out of range for " +
                           std::to_string(m) + "x" + std::to_string(n) + " operator");
    DenseMatrix y(m, k);
    for (std::size_t j = 0; j < k; ++j) {
        GaussianSampler g(derive_seed(seed, j));
        const DenseVector col = op.apply(g.vector(n));
        std::copy(col.begin(), col.end(), y.col(j));
    }
    return y;
}

RangeBasis orthogonalize_twice(const DenseMatrix& y) {
    const std::size_t m = y.nrows, k = y.ncols;
    if (k == 0) throw NumericError("orthogonalize_twice: no columns");
    RangeBasis basis;
    basis.q = y;
    DenseMatrix& q = basis.q;

    std::vector<double> initial_norm(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double* c = q.col(j);
        initial_norm[j] = std::sqrt(std::inner_product(c, c + m, c, 0.0));
    }

    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < k; ++j) {
            double* cj = q.col(j);
            for (std::size_t i = 0; i < j; ++i) {
                const double* ci = q.col(i);
                const double proj = std::inner_product(cj, cj + m, ci, 0.0);
                for (std::size_t r = 0; r < m; ++r) cj[r] -= proj * ci[r];
            }
            const double nrm = std::sqrt(std::inner_product(cj, cj + m, cj, 0.0));
            const double floor_ = (pass == 0 ? 1e-12 * initial_norm[j] : 1e-12);
            if (nrm <= floor_)
                throw NumericError("rank deficiency: sample column " + std::to_string(j) +
                                   " vanished during orthogonalization; use a smaller k");
            for (std::size_t r = 0; r < m; ++r) cj[r] /= nrm;
        }
    }
    return basis;
}

DenseMatrix build_bbt(const LinearOperator& op, const RangeBasis& q) {
    const std::size_t m = op.rows(), k = q.q.ncols;
    require_length(m, q.q.nrows, "build_bbt basis rows");
    DenseMatrix s(k, k);
    for (std::size_t j = 0; j < k; ++j) {
        DenseVector qj(q.q.col(j), q.q.col(j) + m);
        const DenseVector col = op.apply(op.apply_transpose(qj));  // A A^T Q e_j
        for (std::size_t i = 0; i < k; ++i) {
            const double* qi = q.q.col(i);
            s(i, j) = std::inner_product(qi, qi + m, col.begin(), 0.0);
        }
    }
    // approximate operators break exact symmetry; the eigensolver needs it
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double avg = 0.5 * (s(i, j) + s(j, i));
            s(i, j) = avg;
            s(j, i) = avg;
        }
    return s;
}

EigResult symmetric_eig(const DenseMatrix& s) {
    const std::size_t n = s.nrows;
    if (n != s.ncols) throw NumericError("symmetric_eig: matrix must be square");
    double frob = 0.0, asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            frob += s(i, j) * s(i, j);
            asym = std::max(asym, std::abs(s(i, j) - s(j, i)));
        }
    frob = std::sqrt(frob);
    if (asym > 1e-8 * std::max(1.0, frob))
        throw NumericError("symmetric_eig: input is not symmetric");

    DenseMatrix a = s;
    DenseMatrix v = dense::identity(n);
    constexpr int kMaxSweeps = 60;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-12 * frob) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - sn * aiq;
                    a(i, q) = sn * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - sn * aqi;
                    a(q, i) = sn * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - sn * viq;
                    v(i, q) = sn * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    EigResult out;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        std::copy(v.col(order[j]), v.col(order[j]) + n, out.vectors.col(j));
    }
    return out;
}

LowRankSVD randomized_lowrank_svd(const LinearOperator& op, std::size_t k, std::uint64_t seed,
                                  const LowRankOptions& opts) {
    const std::size_t m = op.rows(), n = op.cols();
    if (k < 1 || k > std::min(m, n))
        throw NumericError("rank k=" + std::to_string(k) + " out of range for " +
                           std::to_string(m) + "x" + std::to_string(n) + " operator");
    const std::size_t samples = std::min(k + opts.oversample, std::min(m, n));

    const DenseMatrix y = sample_range(op, samples, seed);
    RangeBasis basis = orthogonalize_twice(y);
    basis.seed = seed;
    const DenseMatrix bbt = build_bbt(op, basis);
    const EigResult eig = symmetric_eig(bbt);

    // sigma_i = sqrt(eigenvalue); discard everything below the relative cutoff
    const double top = eig.values.empty() ? 0.0 : std::max(eig.values[0], 0.0);
    const double sigma1 = std::sqrt(top);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < std::min(k, eig.values.size()); ++i) {
        if (eig.values[i] <= 0.0) break;
        const double sig = std::sqrt(eig.values[i]);
        if (sig < opts.sigma_cutoff * sigma1) break;
        ++kept;
    }
    if (kept == 0)
        throw NumericError("all sampled singular values fall below the cutoff; operator "
                           "is numerically zero on the sampled range");

    LowRankSVD f;
    f.seed = seed;
    f.sigma.resize(kept);
    f.u = DenseMatrix(m, kept);
    f.v = DenseMatrix(n, kept);
    for (std::size_t i = 0; i < kept; ++i) {
        f.sigma[i] = std::sqrt(eig.values[i]);
        // u_i = Q * eigvec_i
        DenseVector ui(m, 0.0);
        for (std::size_t j = 0; j < basis.q.ncols; ++j) {
            const double w = eig.vectors(j, i);
            const double* qc = basis.q.col(j);
            for (std::size_t r = 0; r < m; ++r) ui[r] += w * qc[r];
        }
        std::copy(ui.begin(), ui.end(), f.u.col(i));
        // v_i = A^T u_i / sigma_i
        const DenseVector vi = op.apply_transpose(ui);
        double* vc = f.v.col(i);
        for (std::size_t r = 0; r < n; ++r) vc[r] = vi[r] / f.sigma[i];
    }
    return f;
}

DenseVector lr_apply(const LowRankSVD& f, const DenseVector& x) {
    require_length(f.cols(), x.size(), "lr_apply");
    const std::size_t k = f.rank();
    DenseVector t(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double* vc = f.v.col(i);
        t[i] = f.sigma[i] * std::inner_product(vc, vc + f.cols(), x.begin(), 0.0);
    }
    DenseVector y(f.rows(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double* uc = f.u.col(i);
        for (std::size_t r = 0; r < f.rows(); ++r) y[r] += uc[r] * t[i];
    }
    return y;
}

DenseVector lr_apply_transpose(const LowRankSVD& f, const DenseVector& y) {
    require_length(f.rows(), y.size(), "lr_apply_transpose");
    const std::size_t k = f.rank();
    DenseVector t(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double* uc = f.u.col(i);
        t[i] = f.sigma[i] * std::inner_product(uc, uc + f.rows(), y.begin(), 0.0);
    }
    DenseVector x(f.cols(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double* vc = f.v.col(i);
        for (std::size_t r = 0; r < f.cols(); ++r) x[r] += vc[r] * t[i];
    }
    return x;
}

DenseVector lr_apply_normal(const LowRankSVD& f, const DenseVector& x) {
    require_length(f.cols(), x.size(), "lr_apply_normal");
    const std::size_t k = f.rank();
    DenseVector t(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double* vc = f.v.col(i);
        t[i] = f.sigma[i] * f.sigma[i] *
               std::inner_product(vc, vc + f.cols(), x.begin(), 0.0);
    }
    DenseVector z(f.cols(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double* vc = f.v.col(i);
        for (std::size_t r = 0; r < f.cols(); ++r) z[r] += vc[r] * t[i];
    }
    return z;
}

void write_lowrank(const LowRankSVD& f, const std::string& path) {
    BinaryWriter w(path);
    w.write_magic("LRK1");
    w.write_u64(f.rows());
    w.write_u64(f.cols());
    w.write_u64(f.rank());
    w.write_u64(f.seed);
    w.write_f64_array(f.sigma.data(), f.sigma.size());
    w.write_f64_array(f.u.entries.data(), f.u.entries.size());
    w.write_f64_array(f.v.entries.data(), f.v.entries.size());
    w.close();
}

LowRankSVD read_lowrank(const std::string& path) {
    BinaryReader r(path);
    r.read_magic("LRK1");
    const std::uint64_t m = r.read_u64();
    const std::uint64_t n = r.read_u64();
    const std::uint64_t k = r.read_u64();
    if (m == 0 || n == 0 || k == 0 || k > std::min(m, n))
        r.fail("invalid factor dimensions", 4);
    LowRankSVD f;
    f.seed = r.read_u64();
    f.sigma.resize(k);
    r.read_f64_array(f.sigma.data(), k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(f.sigma[i] > 0.0)) r.fail("sigma entries must be positive", r.offset());
        if (i > 0 && f.sigma[i] > f.sigma[i - 1])
            r.fail("sigma entries must be nonincreasing", r.offset());
    }
    f.u = DenseMatrix(m, k);
    r.read_f64_array(f.u.entries.data(), f.u.entries.size());
    f.v = DenseMatrix(n, k);
    r.read_f64_array(f.v.entries.data(), f.v.entries.size());
    return f;
}

}  // namespace compreg
