// AVX2+FMA backend. This translation unit is the only one built with
// -mavx2 -mfma; it compiles to a stub elsewhere and the dispatcher checks
// CPU support at runtime before handing it out.

#include "dmtk/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace dmtk::kernels {

namespace {

void hadamard_v(double* out, const double* a, const double* b, std::int64_t n) {
    std::int64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void hadamard_inplace_v(double* y, const double* a, std::int64_t n) {
    std::int64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(a + i)));
    }
    for (; i < n; ++i) y[i] *= a[i];
}

void add_inplace_v(double* y, const double* a, std::int64_t n) {
    std::int64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(a + i)));
    }
    for (; i < n; ++i) y[i] += a[i];
}

void axpy_v(double* y, double alpha, const double* x, std::int64_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::int64_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4,
                         _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot_v(const double* a, const double* b, std::int64_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::int64_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double acc = _mm_cvtsd_f64(_mm_hadd_pd(lo, lo));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void scale_v(double* y, double alpha, const double* x, std::int64_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::int64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) y[i] = alpha * x[i];
}

bool cpu_supported() {
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

}  // namespace

const Backend* avx2_backend() {
    static const Backend backend = {
        "avx2", hadamard_v, hadamard_inplace_v, add_inplace_v, axpy_v, dot_v, scale_v,
    };
    static const bool ok = cpu_supported();
    return ok ? &backend : nullptr;
}

}  // namespace dmtk::kernels

#else  // built without AVX2/FMA support

namespace dmtk::kernels {

const Backend* avx2_backend() { return nullptr; }

}  // namespace dmtk::kernels

#endif
