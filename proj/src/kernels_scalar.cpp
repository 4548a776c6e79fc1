#include "dmtk/kernels.hpp"

namespace dmtk::kernels {

namespace {

void hadamard_s(double* out, const double* a, const double* b, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void hadamard_inplace_s(double* y, const double* a, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) y[i] *= a[i];
}

void add_inplace_s(double* y, const double* a, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) y[i] += a[i];
}

void axpy_s(double* y, double alpha, const double* x, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot_s(const double* a, const double* b, std::int64_t n) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void scale_s(double* y, double alpha, const double* x, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) y[i] = alpha * x[i];
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend backend = {
        "scalar", hadamard_s, hadamard_inplace_s, add_inplace_s, axpy_s, dot_s, scale_s,
    };
    return backend;
}

}  // namespace dmtk::kernels
