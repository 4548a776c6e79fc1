#include "dmtk/matricize.hpp"

#include <stdexcept>
#include <string>

namespace dmtk {

namespace {

void check_mode(const Shape& shape, std::int64_t mode) {
    if (mode < 0 || mode >= shape.ndim()) {
        throw std::out_of_range("matricize: mode " + std::to_string(mode) + " outside [0, " +
                                std::to_string(shape.ndim()) + ")");
    }
}

}  // namespace

MatricizationView matricize_view(const Shape& shape, std::int64_t mode) {
    check_mode(shape, mode);
    MatricizationView v;
    if (mode == 0) {
        v.block_count = 1;
        v.block_rows = shape.dim(0);
        v.block_cols = shape.right(0);
        v.block_layout = Layout::col_major;
    } else if (mode == shape.ndim() - 1) {
        v.block_count = 1;
        v.block_rows = shape.dim(mode);
        v.block_cols = shape.left(mode);
        v.block_layout = Layout::row_major;
    } else {
        v.block_count = shape.right(mode);
        v.block_rows = shape.dim(mode);
        v.block_cols = shape.left(mode);
        v.block_layout = Layout::row_major;
    }
    v.block_stride = v.block_rows * v.block_cols;
    return v;
}

MatricizationView matricize_range_view(const Shape& shape, std::int64_t mode) {
    check_mode(shape, mode);
    MatricizationView v;
    v.block_count = 1;
    v.block_rows = shape.left(mode) * shape.dim(mode);
    v.block_cols = shape.right(mode);
    v.block_layout = Layout::col_major;
    v.block_stride = v.block_rows * v.block_cols;
    return v;
}

MatricizationView matricize_view(const DenseTensor& tensor, std::int64_t mode) {
    return matricize_view(tensor.shape(), mode);
}

MatricizationView matricize_range_view(const DenseTensor& tensor, std::int64_t mode) {
    return matricize_range_view(tensor.shape(), mode);
}

}  // namespace dmtk
