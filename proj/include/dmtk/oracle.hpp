#pragma once

#include <cstdint>

#include "dmtk/cp_als.hpp"
#include "dmtk/matrix.hpp"
#include "dmtk/tensor.hpp"

namespace dmtk::oracle {

/// Brute-force references. These share no code with the optimized paths —
/// plain nested loops, no SIMD kernels, no views — so agreement is evidence,
/// not tautology. The tensor-sized ones refuse more than `limit` entries
/// (they exist for verification, not production).

/// Khatri-Rao product built column by column as an iterated Kronecker
/// product, associated left to right.
FactorMatrix krp_kron(const FactorList& inputs);

/// MTTKRP by direct summation over every tensor entry.
FactorMatrix mttkrp_loops(const DenseTensor& x, std::span<const FactorMatrix> factors,
                          std::int64_t mode, std::int64_t limit = 1'000'000);

/// Dense reconstruction of a Kruskal model.
DenseTensor reconstruct(const KruskalModel& model, std::int64_t limit = 1'000'000);

}  // namespace dmtk::oracle
