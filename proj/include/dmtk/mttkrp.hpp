#pragma once

#include <cstdint>
#include <span>

#include "dmtk/matrix.hpp"
#include "dmtk/tensor.hpp"
#include "dmtk/timing.hpp"

namespace dmtk {

/// M = X_(n) * (U_{N-1} (.) ... (.) U_{n+1} (.) U_{n-1} (.) ... (.) U_0),
/// the matricized tensor times Khatri-Rao product: M(i,c) is the sum over
/// all entries with mode-n index i of the entry times the product of the
/// other factors' (row, c) values.
enum class MttkrpAlgo {
    baseline,  // explicit reorder + full KRP + one matrix multiply
    one_step,  // reorder-free fused KRP blocks + multiply (+ reduction)
    two_step,  // reorder-free partial multiply + C matrix-vector products
    automatic, // one_step for boundary modes, two_step for interior modes
};

enum class TwoStepOrder {
    automatic,  // left-first iff left(n) > right(n)
    left,
    right,
};

struct MttkrpRequest {
    const DenseTensor* tensor = nullptr;
    std::span<const FactorMatrix> factors;  // all N, factors[k].rows() == I_k
    std::int64_t mode = 0;
    MttkrpAlgo algo = MttkrpAlgo::automatic;
    TwoStepOrder order = TwoStepOrder::automatic;
    int threads = 1;
};

struct MttkrpResult {
    FactorMatrix m;  // I_n x C, row-major
    TimeBreakdown time;
};

/// Dispatch on request.algo. Validates shapes; throws std::invalid_argument
/// for a two_step request on a boundary mode.
MttkrpResult mttkrp(const MttkrpRequest& request);

MttkrpResult mttkrp_baseline(const MttkrpRequest& request);
MttkrpResult mttkrp_one_step(const MttkrpRequest& request);
MttkrpResult mttkrp_two_step(const MttkrpRequest& request);

/// Cheaper-second-step rule for two_step: left-first iff left(n) > right(n)
/// (the second step then runs over the smaller of the two partial KRPs).
TwoStepOrder choose_order(const Shape& shape, std::int64_t mode);

}  // namespace dmtk
