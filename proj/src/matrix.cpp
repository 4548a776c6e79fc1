#include "dmtk/matrix.hpp"

#include <stdexcept>
#include <string>

namespace dmtk {

FactorMatrix::FactorMatrix(std::int64_t rows, std::int64_t cols)
    : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows * cols), 0.0) {
    if (rows < 0 || cols < 0) {
        throw std::invalid_argument("FactorMatrix: negative dimension");
    }
}

FactorMatrix::FactorMatrix(std::int64_t rows, std::int64_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows < 0 || cols < 0) {
        throw std::invalid_argument("FactorMatrix: negative dimension");
    }
    if (static_cast<std::int64_t>(values_.size()) != rows * cols) {
        throw std::invalid_argument("FactorMatrix: got " + std::to_string(values_.size()) +
                                    " values for " + std::to_string(rows) + "x" + std::to_string(cols));
    }
}

}  // namespace dmtk
