#include "dmtk/shape.hpp"

#include <stdexcept>
#include <string>

namespace dmtk {

Shape::Shape(std::vector<std::int64_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
        throw std::invalid_argument("Shape: need at least one mode");
    }
    left_.resize(dims_.size() + 1);
    left_[0] = 1;
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        if (dims_[n] < 1) {
            throw std::invalid_argument("Shape: extent of mode " + std::to_string(n) +
                                        " must be >= 1, got " + std::to_string(dims_[n]));
        }
        std::int64_t next = 0;
        if (__builtin_mul_overflow(left_[n], dims_[n], &next)) {
            throw std::overflow_error("Shape: entry count overflows 64-bit");
        }
        left_[n + 1] = next;
    }
}

std::int64_t linearize(const Shape& shape, std::span<const std::int64_t> index) {
    if (static_cast<std::int64_t>(index.size()) != shape.ndim()) {
        throw std::invalid_argument("linearize: index has " + std::to_string(index.size()) +
                                    " digits, shape has " + std::to_string(shape.ndim()) + " modes");
    }
    std::int64_t off = 0;
    for (std::int64_t n = 0; n < shape.ndim(); ++n) {
        const std::int64_t i = index[static_cast<std::size_t>(n)];
        if (i < 0 || i >= shape.dim(n)) {
            throw std::out_of_range("linearize: index " + std::to_string(i) + " out of range for mode " +
                                    std::to_string(n) + " (extent " + std::to_string(shape.dim(n)) + ")");
        }
        off += i * shape.left(n);
    }
    return off;
}

void delinearize_into(const Shape& shape, std::int64_t offset, std::span<std::int64_t> out) {
    if (offset < 0 || offset >= shape.total()) {
        throw std::out_of_range("delinearize: offset " + std::to_string(offset) +
                                " outside [0, " + std::to_string(shape.total()) + ")");
    }
    if (static_cast<std::int64_t>(out.size()) != shape.ndim()) {
        throw std::invalid_argument("delinearize: output span size mismatch");
    }
    for (std::int64_t n = 0; n < shape.ndim(); ++n) {
        out[static_cast<std::size_t>(n)] = offset % shape.dim(n);
        offset /= shape.dim(n);
    }
}

std::vector<std::int64_t> delinearize(const Shape& shape, std::int64_t offset) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(shape.ndim()));
    delinearize_into(shape, offset, out);
    return out;
}

MultiIndex::MultiIndex(std::vector<std::int64_t> radices) : radices_(std::move(radices)) {
    if (radices_.empty()) {
        throw std::invalid_argument("MultiIndex: need at least one radix");
    }
    for (std::int64_t r : radices_) {
        if (r < 1) {
            throw std::invalid_argument("MultiIndex: radices must be >= 1");
        }
        total_ *= r;
    }
    digits_.assign(radices_.size(), 0);
}

int MultiIndex::increment() {
    int changed = 0;
    for (std::size_t z = digits_.size(); z-- > 0;) {
        ++changed;
        if (++digits_[z] < radices_[z]) {
            return changed;
        }
        digits_[z] = 0;  // carry into the next slower digit
    }
    return changed;  // wrapped: every digit touched
}

void MultiIndex::init_from_row(std::int64_t flat) {
    if (flat < 0 || flat >= total_) {
        throw std::out_of_range("MultiIndex::init_from_row: row " + std::to_string(flat) +
                                " outside [0, " + std::to_string(total_) + ")");
    }
    for (std::size_t z = digits_.size(); z-- > 0;) {
        digits_[z] = flat % radices_[z];
        flat /= radices_[z];
    }
}

std::int64_t MultiIndex::flat() const {
    std::int64_t f = 0;
    for (std::size_t z = 0; z < digits_.size(); ++z) {
        f = f * radices_[z] + digits_[z];
    }
    return f;
}

}  // namespace dmtk
