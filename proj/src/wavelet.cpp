#include "compreg/wavelet.hpp"

#include <algorithm>
#include <numeric>

namespace compreg {

namespace {

// CDF 9/7 lifting constants (Daubechies-Sweldens factorization).
constexpr double kAlpha = -1.586134342059924;
constexpr double kBeta = -0.052980118572961;
constexpr double kGamma = 0.882911075530934;
constexpr double kDelta = 0.443506852043971;
constexpr double kZeta = 1.149604398860242;

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Whole-point symmetric index reflection into [0, n).
std::size_t reflect(long i, std::size_t n) {
    if (n == 1) return 0;
    const long period = 2 * (static_cast<long>(n) - 1);
    long m = i % period;
    if (m < 0) m += period;
    return static_cast<std::size_t>(m < static_cast<long>(n) ? m : period - m);
}

// a[i] += c * (a[i-1] + a[i+1]) for all i of the given parity, with
// symmetric reflection at both ends. len is even.
void lift(double* a, std::size_t len, double c, bool odd_targets) {
    const std::size_t start = odd_targets ? 1 : 0;
    for (std::size_t i = start; i < len; i += 2) {
        const double left = a[reflect(static_cast<long>(i) - 1, len)];
        const double right = a[reflect(static_cast<long>(i) + 1, len)];
        a[i] += c * (left + right);
    }
}

// Transpose of lift(): scatters c * a[i] to the two neighbor slots each
// target row of lift() reads from (reflection folds weight onto the edge).
void lift_transpose(double* a, std::size_t len, double c, bool odd_sources) {
    const std::size_t start = odd_sources ? 1 : 0;
    for (std::size_t i = start; i < len; i += 2) {
        const double t = c * a[i];
        a[reflect(static_cast<long>(i) - 1, len)] += t;
        a[reflect(static_cast<long>(i) + 1, len)] += t;
    }
}

void deinterleave(double* a, std::size_t len, std::vector<double>& scratch) {
    scratch.resize(len);
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
        scratch[i] = a[2 * i];
        scratch[half + i] = a[2 * i + 1];
    }
    std::copy(scratch.begin(), scratch.end(), a);
}

void interleave(double* a, std::size_t len, std::vector<double>& scratch) {
    scratch.resize(len);
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
        scratch[2 * i] = a[i];
        scratch[2 * i + 1] = a[half + i];
    }
    std::copy(scratch.begin(), scratch.end(), a);
}

void haar_forward_level(double* a, std::size_t len, std::vector<double>& scratch) {
    scratch.resize(len);
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const double s = a[2 * i];
        const double d = a[2 * i + 1];
        scratch[i] = (s + d) * kInvSqrt2;
        scratch[half + i] = (s - d) * kInvSqrt2;
    }
    std::copy(scratch.begin(), scratch.end(), a);
}

void haar_inverse_level(double* a, std::size_t len, std::vector<double>& scratch) {
    scratch.resize(len);
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const double ap = a[i];
        const double de = a[half + i];
        scratch[2 * i] = (ap + de) * kInvSqrt2;
        scratch[2 * i + 1] = (ap - de) * kInvSqrt2;
    }
    std::copy(scratch.begin(), scratch.end(), a);
}

void cdf97_forward_level(double* a, std::size_t len, std::vector<double>& scratch) {
    lift(a, len, kAlpha, true);
    lift(a, len, kBeta, false);
    lift(a, len, kGamma, true);
    lift(a, len, kDelta, false);
    for (std::size_t i = 0; i < len; i += 2) a[i] *= kZeta;
    for (std::size_t i = 1; i < len; i += 2) a[i] /= kZeta;
    deinterleave(a, len, scratch);
}

void cdf97_inverse_level(double* a, std::size_t len, std::vector<double>& scratch) {
    interleave(a, len, scratch);
    for (std::size_t i = 0; i < len; i += 2) a[i] /= kZeta;
    for (std::size_t i = 1; i < len; i += 2) a[i] *= kZeta;
    lift(a, len, -kDelta, false);
    lift(a, len, -kGamma, true);
    lift(a, len, -kBeta, false);
    lift(a, len, -kAlpha, true);
}

// W^{-T} on one level: transposed inverse lifting steps in forward order,
// then the inverse scaling, then the usual band split.
void cdf97_inverse_transpose_level(double* a, std::size_t len, std::vector<double>& scratch) {
    lift_transpose(a, len, -kAlpha, true);
    lift_transpose(a, len, -kBeta, false);
    lift_transpose(a, len, -kGamma, true);
    lift_transpose(a, len, -kDelta, false);
    for (std::size_t i = 0; i < len; i += 2) a[i] /= kZeta;
    for (std::size_t i = 1; i < len; i += 2) a[i] *= kZeta;
    deinterleave(a, len, scratch);
}

std::size_t check_levels(const WaveletSpec& w, std::size_t n) {
    if (n == 0) throw NumericError("wavelet transform of an empty signal");
    if (w.levels == 0) throw NumericError("wavelet levels must be >= 1");
    if (w.levels >= 63) throw NumericError("wavelet levels out of range");
    const std::size_t block = std::size_t{1} << w.levels;
    const std::size_t chunks = std::max<std::size_t>(1, (n + block - 1) / block);
    // padded length is chunks * 2^levels, so every level handles >= 2 samples
    return chunks * block;
}

DenseVector pad_symmetric(const DenseVector& x, std::size_t p) {
    DenseVector out(p);
    std::copy(x.begin(), x.end(), out.begin());
    for (std::size_t i = x.size(); i < p; ++i)
        out[i] = x[reflect(static_cast<long>(i), x.size())];
    return out;
}

template <typename LevelFn>
void run_levels_fine_to_coarse(double* a, std::size_t p, std::size_t levels, LevelFn level) {
    std::vector<double> scratch;
    std::size_t len = p;
    for (std::size_t l = 0; l < levels; ++l) {
        level(a, len, scratch);
        len /= 2;
    }
}

}  // namespace

std::size_t WaveletSpec::padded_length(std::size_t n) const { return check_levels(*this, n); }

DenseVector forward(const WaveletSpec& w, const DenseVector& x) {
    const std::size_t p = check_levels(w, x.size());
    DenseVector a = (p == x.size()) ? x : pad_symmetric(x, p);
    if (w.family == WaveletFamily::HaarOrthogonal)
        run_levels_fine_to_coarse(a.data(), p, w.levels, haar_forward_level);
    else
        run_levels_fine_to_coarse(a.data(), p, w.levels, cdf97_forward_level);
    return a;
}

DenseVector inverse(const WaveletSpec& w, const DenseVector& c) {
    return inverse(w, c, c.size());
}

DenseVector inverse(const WaveletSpec& w, const DenseVector& c, std::size_t original_length) {
    const std::size_t p = c.size();
    if (p == 0) throw NumericError("wavelet inverse of an empty coefficient vector");
    if (check_levels(w, p) != p)
        throw NumericError("coefficient length " + std::to_string(p) +
                           " is not divisible by 2^levels");
    if (original_length > p) throw NumericError("original_length exceeds coefficient length");
    DenseVector a = c;
    std::vector<double> scratch;
    std::size_t len = p >> (w.levels - 1);
    for (std::size_t l = 0; l < w.levels; ++l, len *= 2) {
        if (w.family == WaveletFamily::HaarOrthogonal)
            haar_inverse_level(a.data(), len, scratch);
        else
            cdf97_inverse_level(a.data(), len, scratch);
    }
    a.resize(original_length);
    return a;
}

DenseVector inverse_transpose(const WaveletSpec& w, const DenseVector& x) {
    if (w.family == WaveletFamily::HaarOrthogonal) return forward(w, x);  // W^{-T} = W
    const std::size_t p = check_levels(w, x.size());
    DenseVector a = (p == x.size()) ? x : pad_symmetric(x, p);
    run_levels_fine_to_coarse(a.data(), p, w.levels, cdf97_inverse_transpose_level);
    return a;
}

void ThresholdPolicy::validate() const {
    if (mode == Mode::KeepFraction) {
        if (!(value > 0.0 && value <= 1.0))
            throw NumericError("keep fraction must lie in (0, 1]");
    } else {
        if (!(value >= 0.0) || !std::isfinite(value))
            throw NumericError("absolute threshold must be finite and >= 0");
    }
}

DenseVector hard_threshold(const ThresholdPolicy& p, const DenseVector& c) {
    p.validate();
    DenseVector out = c;
    if (p.mode == ThresholdPolicy::Mode::Absolute) {
        for (double& v : out)
            if (std::abs(v) <= p.value) v = 0.0;
        return out;
    }
    std::vector<std::size_t> nz;
    nz.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) nz.push_back(i);
    if (nz.empty()) return out;
    const std::size_t keep =
        std::min(nz.size(), static_cast<std::size_t>(std::ceil(p.value * nz.size())));
    std::stable_sort(nz.begin(), nz.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(c[a]) > std::abs(c[b]);  // stable: ties keep lower index first
    });
    for (std::size_t r = keep; r < nz.size(); ++r) out[nz[r]] = 0.0;
    return out;
}

DenseVector soft_threshold(double tau, const DenseVector& c) {
    if (!(tau >= 0.0)) throw NumericError("soft threshold tau must be >= 0");
    DenseVector out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double m = std::abs(c[i]) - tau;
        out[i] = m > 0.0 ? (c[i] > 0.0 ? m : -m) : 0.0;
    }
    return out;
}

}  // namespace compreg
