#include "ops.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <algorithm>
#include <cmath>
#include <immintrin.h>

namespace dicke::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline __m256d vabs(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i)
        y[i] += a * x[i];
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double tail = 0.0;
    for (; i < n; ++i)
        tail += x[i] * y[i];
    return hsum(acc) + tail;
}

void ladder_stencil_avx2(std::size_t n, const double* w, const double* p,
                         double* out) {
    if (n == 0)
        return;
    std::size_t i = 0;
    // out[i] = w[i+1]*p[i+1] - w[i]*p[i]; the shifted loads overlap by one.
    for (; i + 5 <= n; i += 4) {
        const __m256d lose = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(p + i));
        const __m256d gain = _mm256_fmsub_pd(_mm256_loadu_pd(w + i + 1),
                                             _mm256_loadu_pd(p + i + 1), lose);
        _mm256_storeu_pd(out + i, gain);
    }
    for (; i + 1 < n; ++i)
        out[i] = w[i + 1] * p[i + 1] - w[i] * p[i];
    out[n - 1] = -w[n - 1] * p[n - 1];
}

double error_norm_avx2(std::size_t n, const double* e, const double* y0,
                       const double* y1, double atol, double rtol) {
    if (n == 0)
        return 0.0;
    const __m256d va = _mm256_set1_pd(atol);
    const __m256d vr = _mm256_set1_pd(rtol);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d sc = _mm256_fmadd_pd(
            vr, _mm256_max_pd(vabs(_mm256_loadu_pd(y0 + i)), vabs(_mm256_loadu_pd(y1 + i))),
            va);
        const __m256d q = _mm256_div_pd(_mm256_loadu_pd(e + i), sc);
        acc = _mm256_fmadd_pd(q, q, acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = e[i] / sc;
        tail += q * q;
    }
    return std::sqrt((hsum(acc) + tail) / static_cast<double>(n));
}

} // namespace

const Ops avx2_ops = {axpy_avx2, dot_avx2, ladder_stencil_avx2, error_norm_avx2};

} // namespace dicke::kernels

#endif // x86-64
