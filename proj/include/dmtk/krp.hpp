#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dmtk/matrix.hpp"
#include "dmtk/shape.hpp"

namespace dmtk {

/// Instrumentation for the KRP generators: every C-length elementwise row
/// product is counted, including the ones spent (re)building cached partial
/// products.
struct KrpStats {
    std::uint64_t hadamard_products = 0;
};

/// Row-at-a-time generator for the Khatri-Rao product
/// K = inputs[0] (.) inputs[1] (.) ... (.) inputs[Z-1],
/// where row j of K is the Hadamard product of one row per input, the rows
/// selected by the mixed-radix digits of j with the LAST input varying
/// fastest, associated left to right.
///
/// For Z >= 3 the state caches Z-2 running partial products:
///   P(0)   = inputs[0](d_0,:) * inputs[1](d_1,:)
///   P(z)   = P(z-1) * inputs[z+1](d_{z+1},:)        0 < z <= Z-3
/// so a row costs one Hadamard product (P(Z-3) times the last input's row)
/// while the final digit just counts up; deeper partials are rebuilt only on
/// carry. seek() lands on an arbitrary row and rebuilds the cache, which is
/// what lets disjoint row blocks run on different threads with results
/// bit-identical to the sequential pass.
class KrpState {
public:
    KrpState(FactorList inputs, std::int64_t start_row = 0);

    std::int64_t z() const { return static_cast<std::int64_t>(inputs_.size()); }
    std::int64_t cols() const { return cols_; }
    std::int64_t rows() const { return index_.total(); }
    std::int64_t row_index() const { return index_.flat(); }
    const MultiIndex& index() const { return index_; }
    std::span<const double> partial(std::int64_t p) const {
        return {partials_.data() + p * cols_, static_cast<std::size_t>(cols_)};
    }
    std::uint64_t hadamard_count() const { return hadamards_; }

    void seek(std::int64_t row);

    /// Write the current row. One Hadamard product when Z >= 2, a copy when
    /// Z == 1.
    void write_row(std::span<double> out);

    /// Step to the next row (wraps at the end) and refresh exactly the
    /// partial products invalidated by the carry.
    void advance();

private:
    void rebuild_from(std::int64_t first_partial);
    std::span<const double> input_row(std::int64_t input) const;

    FactorList inputs_;
    std::int64_t cols_ = 0;
    MultiIndex index_;
    std::vector<double> partials_;  // (Z-2) x cols for Z >= 3
    std::uint64_t hadamards_ = 0;
};

/// One row through the reuse state. Contract requires Z >= 3 (smaller
/// products have no partials to reuse; use krp_small).
void krp_row(KrpState& state, std::span<double> out);

/// Full Khatri-Rao product, rows split across `threads` contiguous blocks
/// (first rows%threads blocks one row larger). Bit-identical for every
/// thread count. Z >= 1; Z <= 2 delegates to krp_small.
FactorMatrix krp(const FactorList& inputs, int threads, KrpStats* stats = nullptr);

/// Same contract as krp but every row is built from scratch with Z-1
/// Hadamard products: the reuse-free reference.
FactorMatrix krp_naive(const FactorList& inputs, int threads, KrpStats* stats = nullptr);

/// Direct product for Z in {1, 2}: a copy, or one Hadamard product per row
/// pair K(r_b + r_a * J_b, :) = A(r_a,:) * B(r_b,:).
FactorMatrix krp_small(const FactorList& inputs, KrpStats* stats = nullptr);

}  // namespace dmtk
