#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dmtk {

/// Extents of an N-way dense tensor plus the prefix/suffix products that
/// every layout computation is built from.
///
/// With dims (I_0, ..., I_{N-1}):
///   left(n)   = prod of I_k for k < n      (stride of mode n)
///   right(n)  = prod of I_k for k > n
///   unfold(n) = total() / I_n              (columns of the mode-n matricization)
///
/// Entry (i_0, ..., i_{N-1}) lives at offset sum_n i_n * left(n): mode 0
/// varies fastest. N = 1 and N = 2 are permitted; every extent must be >= 1.
class Shape {
public:
    explicit Shape(std::vector<std::int64_t> dims);

    std::int64_t ndim() const { return static_cast<std::int64_t>(dims_.size()); }
    std::int64_t dim(std::int64_t n) const { return dims_.at(static_cast<std::size_t>(n)); }
    std::span<const std::int64_t> dims() const { return dims_; }

    /// Total entry count I = prod I_n.
    std::int64_t total() const { return left_.back(); }
    std::int64_t left(std::int64_t n) const { return left_.at(static_cast<std::size_t>(n)); }
    std::int64_t right(std::int64_t n) const { return total() / left(n + 1); }
    std::int64_t unfold(std::int64_t n) const { return total() / dim(n); }

    bool operator==(const Shape& other) const { return dims_ == other.dims_; }

private:
    std::vector<std::int64_t> dims_;
    std::vector<std::int64_t> left_;  // left_[n] = prod dims_[0..n), size N+1
};

/// Offset of a multi-index under the natural (mode-0-fastest) linearization.
/// Throws std::out_of_range on any index outside [0, I_n).
std::int64_t linearize(const Shape& shape, std::span<const std::int64_t> index);

/// Inverse of linearize. Throws std::out_of_range for offset outside [0, I).
std::vector<std::int64_t> delinearize(const Shape& shape, std::int64_t offset);
void delinearize_into(const Shape& shape, std::int64_t offset, std::span<std::int64_t> out);

/// Odometer over mixed radices (J_0, ..., J_{Z-1}), last digit fastest.
/// flat() is the row index sum_z d_z * prod_{w>z} J_w; increment() steps to
/// the next row and reports how many trailing digits it touched, which is
/// what the Khatri-Rao partial-product cache keys its refreshes on.
class MultiIndex {
public:
    explicit MultiIndex(std::vector<std::int64_t> radices);

    /// Advance one position. Returns the carry length: 1 when only the last
    /// digit moved, Z when the odometer wrapped back to all zeros.
    int increment();

    /// Position the digits at an arbitrary flat row in O(Z).
    void init_from_row(std::int64_t flat);

    std::int64_t flat() const;
    std::int64_t size() const { return static_cast<std::int64_t>(radices_.size()); }
    std::int64_t total() const { return total_; }
    std::span<const std::int64_t> digits() const { return digits_; }
    std::span<const std::int64_t> radices() const { return radices_; }
    std::int64_t digit(std::int64_t z) const { return digits_[static_cast<std::size_t>(z)]; }

private:
    std::vector<std::int64_t> radices_;
    std::vector<std::int64_t> digits_;
    std::int64_t total_ = 1;
};

}  // namespace dmtk
