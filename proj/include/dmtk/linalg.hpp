#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dmtk/matrix.hpp"

namespace dmtk {

/// Symmetric C x C matrix, row-major, mirrored to the last bit.
struct GramMatrix {
    std::int64_t size = 0;
    std::vector<double> values;  // size*size, row-major

    GramMatrix() = default;
    explicit GramMatrix(std::int64_t n) : size(n), values(static_cast<std::size_t>(n * n), 0.0) {}

    double& at(std::int64_t r, std::int64_t c) { return values[static_cast<std::size_t>(r * size + c)]; }
    double at(std::int64_t r, std::int64_t c) const { return values[static_cast<std::size_t>(r * size + c)]; }
    double trace() const {
        double t = 0.0;
        for (std::int64_t i = 0; i < size; ++i) t += at(i, i);
        return t;
    }
};

/// C (+)= A * B. Layout- and transpose-annotated on all three operands; the
/// inner loops pick an access pattern per layout case so the unit-stride
/// kernel primitives always run on contiguous data. Rows of C are split
/// across threads, so for a fixed input the result is identical for every
/// thread count (each output element is produced by exactly one thread with
/// a fixed contraction order).
void gemm_acc(const MatView& A, const MatView& B, const MutMatView& C, bool accumulate,
              int threads = 1);

/// y (+)= A * x with explicit element strides on x and y. Sequential;
/// callers parallelize across independent gemv calls.
void gemv(const MatView& A, const double* x, std::int64_t incx, double* y, std::int64_t incy,
          bool accumulate);

/// U^T U of a row-major factor matrix. Upper triangle accumulated row by
/// row, lower triangle mirrored, so the result is symmetric to the last bit.
GramMatrix gram(const FactorMatrix& u);

/// Hadamard product of the Grams of every factor except `skip` (pass a
/// negative skip to include all). The CP-ALS normal-equation matrix.
GramMatrix gram_hadamard(std::span<const FactorMatrix> factors, std::int64_t skip);

/// Least-squares solve of U * H = M for symmetric positive semidefinite H.
/// Cholesky first; on a non-positive pivot (within 1e-12 * trace) falls
/// through to a Jacobi eigendecomposition pseudoinverse that clips
/// eigenvalues below 1e-12 * lambda_max. Never refuses a singular H.
FactorMatrix solve_psd(const GramMatrix& h, const FactorMatrix& m);

/// Sum of equally shaped accumulators, combined as a pairwise tree in fixed
/// index order: deterministic for a fixed accumulator count. Consumes the
/// input; pairs at each tree level run concurrently on up to `threads`
/// workers.
FactorMatrix parallel_reduce(std::vector<FactorMatrix>&& accumulators, int threads = 1);

}  // namespace dmtk
