#pragma once

#include <cstdint>

#include "dmtk/layout.hpp"
#include "dmtk/shape.hpp"
#include "dmtk/tensor.hpp"

namespace dmtk {

/// Zero-copy description of a matricization of the naturally linearized
/// buffer: a sequence of equally shaped row- or column-major blocks at a
/// fixed stride. No element is moved; offset() maps (block, row, col)
/// straight to a buffer offset.
struct MatricizationView {
    std::int64_t block_count = 1;
    std::int64_t block_rows = 0;
    std::int64_t block_cols = 0;
    Layout block_layout = Layout::col_major;
    std::int64_t block_stride = 0;  // buffer offset between consecutive blocks

    std::int64_t offset(std::int64_t block, std::int64_t row, std::int64_t col) const {
        const std::int64_t base = block * block_stride;
        return block_layout == Layout::row_major ? base + row * block_cols + col
                                                 : base + row + col * block_rows;
    }

    std::int64_t total() const { return block_count * block_rows * block_cols; }
};

/// Mode-n matricization X_(n): I_n rows, unfold(n) columns, columns ordered
/// by the natural linearization of the remaining modes.
///
///   n = 0:          one column-major block I_0 x right(0)
///   n = N-1:        one row-major block I_{N-1} x left(N-1)
///   0 < n < N-1:    right(n) row-major blocks of I_n x left(n),
///                   block stride I_n * left(n)
MatricizationView matricize_view(const Shape& shape, std::int64_t mode);
MatricizationView matricize_view(const DenseTensor& tensor, std::int64_t mode);

/// Multi-mode matricization X_(0:n) with row modes 0..n: one column-major
/// block of left(n)*I_n rows by right(n) columns.
MatricizationView matricize_range_view(const Shape& shape, std::int64_t mode);
MatricizationView matricize_range_view(const DenseTensor& tensor, std::int64_t mode);

}  // namespace dmtk
