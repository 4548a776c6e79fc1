#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dmtk/shape.hpp"

namespace dmtk {

/// Dense tensor in the natural mode-0-fastest linearization. Immutable after
/// construction: every algorithm in this library reads the buffer through
/// const views and never copies or permutes it (the baseline's explicit
/// reorder writes to scratch it allocates itself).
///
/// Owning tensors share their buffer on copy. borrow() wraps caller-owned
/// storage without copying; the caller keeps the buffer alive and unchanged
/// for the lifetime of the tensor and all views derived from it.
class DenseTensor {
public:
    DenseTensor(Shape shape, std::vector<double> values);

    static DenseTensor borrow(Shape shape, const double* data, std::int64_t count);

    const Shape& shape() const { return shape_; }
    std::int64_t total() const { return shape_.total(); }
    std::span<const double> values() const { return {data_, static_cast<std::size_t>(shape_.total())}; }
    const double* data() const { return data_; }

    double at(std::span<const std::int64_t> index) const { return data_[linearize(shape_, index)]; }

private:
    DenseTensor(Shape shape, const double* data) : shape_(std::move(shape)), data_(data) {}

    Shape shape_;
    std::shared_ptr<const std::vector<double>> owned_;  // null for borrowed buffers
    const double* data_ = nullptr;
};

}  // namespace dmtk
