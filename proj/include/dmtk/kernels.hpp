#pragma once

#include <cstdint>

namespace dmtk::kernels {

/// Elementwise double-precision primitives every higher-level routine is
/// built on. Two backends ship: a scalar reference and an AVX2+FMA variant;
/// the fastest supported one is picked once at startup (overridable with
/// DMTK_SIMD=scalar|avx2|auto, or force_backend() in tests).
///
/// hadamard / hadamard_inplace / add_inplace / scale are pure elementwise
/// maps and produce bit-identical results on every backend. axpy and dot may
/// use FMA and lane-parallel accumulators, so they are equivalent to the
/// reference only up to rounding (and exactly on integer-valued data).
struct Backend {
    const char* name;
    // out[i] = a[i] * b[i]
    void (*hadamard)(double* out, const double* a, const double* b, std::int64_t n);
    // y[i] *= a[i]
    void (*hadamard_inplace)(double* y, const double* a, std::int64_t n);
    // y[i] += a[i]
    void (*add_inplace)(double* y, const double* a, std::int64_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double* y, double alpha, const double* x, std::int64_t n);
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::int64_t n);
    // y[i] = alpha * x[i]
    void (*scale)(double* y, double alpha, const double* x, std::int64_t n);
};

const Backend& scalar_backend();
const Backend* avx2_backend();  // null when not compiled in or unsupported at runtime

/// Active backend (auto-detected on first use).
const Backend& active();

/// Test hook: pin the active backend. Throws std::invalid_argument for an
/// unknown name and std::runtime_error when the backend is unavailable.
void force_backend(const char* name);
void reset_backend();

}  // namespace dmtk::kernels
