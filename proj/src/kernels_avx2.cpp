#include "ktap/kernels.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2 backend. Reductions use one 4-lane accumulator with a fixed
// horizontal-sum order, so results are deterministic but may differ from the
// scalar backend by reassociation rounding. Elementwise ops perform the same
// per-element expression as the scalar backend (no FMA) and are bit-identical
// to it.

namespace ktap::kern {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);                  // (l0+l2, l1+l3)
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

inline __m256d vabs(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                               _mm256_loadu_pd(b + i)));
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

double dot3_avx2(const double* a, const double* b, const double* c, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(ab, _mm256_loadu_pd(c + i)));
    }
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i] * b[i] * c[i];
    return r;
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i];
    return r;
}

double abs_max_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, vabs(_mm256_loadu_pd(a + i)));
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d mx = _mm_max_pd(lo, hi);
    double m = std::fmax(_mm_cvtsd_f64(mx), _mm_cvtsd_f64(_mm_unpackhi_pd(mx, mx)));
    for (; i < n; ++i) {
        const double v = std::fabs(a[i]);
        if (v > m) m = v;
    }
    return m;
}

double weighted_abs_diff_avx2(const double* f, const double* g, const double* w,
                              std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = vabs(_mm256_sub_pd(_mm256_loadu_pd(f + i),
                                             _mm256_loadu_pd(g + i)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, _mm256_loadu_pd(w + i)));
    }
    double r = hsum(acc);
    for (; i < n; ++i) r += std::fabs(f[i] - g[i]) * w[i];
    return r;
}

void add_scaled_avx2(double* dst, const double* x, const double* k, double c,
                     std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i,
                         _mm256_add_pd(_mm256_loadu_pd(x + i),
                                       _mm256_mul_pd(vc, _mm256_loadu_pd(k + i))));
    for (; i < n; ++i) dst[i] = x[i] + c * k[i];
}

void rk4_combine_avx2(double* dst, const double* x, const double* k1, const double* k2,
                      const double* k3, const double* k4, double dt, std::size_t n) {
    const double c = dt / 6.0;
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mid = _mm256_mul_pd(two, _mm256_add_pd(_mm256_loadu_pd(k2 + i),
                                                             _mm256_loadu_pd(k3 + i)));
        const __m256d s = _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(k1 + i), mid),
                                        _mm256_loadu_pd(k4 + i));
        _mm256_storeu_pd(dst + i,
                         _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(vc, s)));
    }
    for (; i < n; ++i)
        dst[i] = x[i] + c * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

} // namespace

const Ops& avx2_ops() {
    static const Ops table{dot_avx2,    dot3_avx2,       sum_avx2,
                           abs_max_avx2, weighted_abs_diff_avx2,
                           add_scaled_avx2, rk4_combine_avx2};
    return table;
}

} // namespace ktap::kern
