#pragma once

#include <cstdint>
#include <vector>

#include "dmtk/matrix.hpp"
#include "dmtk/mttkrp.hpp"
#include "dmtk/tensor.hpp"
#include "dmtk/timing.hpp"

namespace dmtk {

/// Rank-C Kruskal model: N factor matrices (I_n x C) plus per-component
/// weights. The reconstruction is sum_c lambda_c * outer(U_0(:,c), ...,
/// U_{N-1}(:,c)).
struct KruskalModel {
    std::vector<FactorMatrix> factors;
    std::vector<double> lambda;

    std::int64_t ndim() const { return static_cast<std::int64_t>(factors.size()); }
    std::int64_t rank() const { return factors.empty() ? 0 : factors.front().cols(); }

    /// Factors filled with uniform(0,1) draws from a fixed seed, lambda all
    /// ones. Deterministic across platforms.
    static KruskalModel random(const Shape& shape, std::int64_t rank, std::uint64_t seed);

    /// Scale factor n's columns to unit 2-norm, storing the norms in lambda.
    /// Zero columns keep lambda 0 and stay untouched.
    void normalize_mode(std::int64_t n);
};

struct AlsConfig {
    std::int64_t rank = 1;
    int max_iters = 50;
    double tol = 1e-6;  // stop when |fit - previous fit| < tol; 0 never stops early
    std::uint64_t seed = 0;
    int threads = 1;
    MttkrpAlgo algo = MttkrpAlgo::automatic;
    TwoStepOrder order = TwoStepOrder::automatic;
};

struct FitResult {
    double fit = 0;            // 1 - |X - Y|_F / |X|_F; meaningless when !defined
    double rel_residual = 0;   // |X - Y|_F / |X|_F
    double abs_residual = 0;   // |X - Y|_F
    bool defined = true;       // false when |X|_F == 0
};

struct AlsIterRecord {
    int iter = 0;
    FitResult fit;
    std::vector<TimeBreakdown> mode_time;  // MTTKRP breakdown per mode
    double total_seconds = 0;              // whole iteration incl. solves
};

struct AlsTrace {
    std::vector<AlsIterRecord> iters;
    bool zero_tensor = false;
    double tensor_norm = 0;
};

struct AlsResult {
    KruskalModel model;
    AlsTrace trace;
};

/// Frobenius norm of the tensor.
double tensor_norm(const DenseTensor& x);

/// One Gauss-Seidel sweep over modes 0..N-1: MTTKRP, Gram-Hadamard,
/// regularized solve, column normalization. The fit comes free from the
/// last mode's MTTKRP (|X|^2 - 2<X,Y> + |Y|^2); the reconstruction is never
/// materialized.
AlsIterRecord als_iterate(const DenseTensor& x, KruskalModel& model, const AlsConfig& config,
                          double norm_x, int iter_index);

/// Fit of an arbitrary model against a tensor, computed the same
/// reconstruction-free way (one MTTKRP on the last mode).
FitResult fit(const DenseTensor& x, const KruskalModel& model, int threads = 1);

/// Random init + iterate until |delta fit| < tol or max_iters. A zero-norm
/// tensor short-circuits to a zero model with trace.zero_tensor set.
AlsResult cp_als(const DenseTensor& x, const AlsConfig& config);

}  // namespace dmtk
