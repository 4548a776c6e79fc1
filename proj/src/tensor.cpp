#include "dmtk/tensor.hpp"

#include <stdexcept>
#include <string>

namespace dmtk {

DenseTensor::DenseTensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)) {
    if (static_cast<std::int64_t>(values.size()) != shape_.total()) {
        throw std::invalid_argument("DenseTensor: got " + std::to_string(values.size()) +
                                    " values, shape holds " + std::to_string(shape_.total()));
    }
    owned_ = std::make_shared<const std::vector<double>>(std::move(values));
    data_ = owned_->data();
}

DenseTensor DenseTensor::borrow(Shape shape, const double* data, std::int64_t count) {
    if (count != shape.total()) {
        throw std::invalid_argument("DenseTensor::borrow: buffer holds " + std::to_string(count) +
                                    " values, shape needs " + std::to_string(shape.total()));
    }
    return DenseTensor(std::move(shape), data);
}

}  // namespace dmtk
