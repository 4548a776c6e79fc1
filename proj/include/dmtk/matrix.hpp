#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dmtk/layout.hpp"

namespace dmtk {

/// Read-only matrix view: pointer, logical dims, storage layout, leading
/// stride, optional transpose flag. normalized() folds the transpose into
/// the layout (the transpose of a column-major matrix is the row-major
/// matrix over the same buffer with the dims swapped), so kernels only ever
/// see the four plain layout cases.
struct MatView {
    const double* data = nullptr;
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    Layout layout = Layout::row_major;
    std::int64_t ld = 0;  // row stride (row-major) or column stride (col-major)
    bool trans = false;

    static MatView row_major(const double* data, std::int64_t rows, std::int64_t cols, std::int64_t ld = -1) {
        return {data, rows, cols, Layout::row_major, ld < 0 ? cols : ld, false};
    }
    static MatView col_major(const double* data, std::int64_t rows, std::int64_t cols, std::int64_t ld = -1) {
        return {data, rows, cols, Layout::col_major, ld < 0 ? rows : ld, false};
    }

    MatView transposed() const {
        MatView v = *this;
        v.trans = !v.trans;
        return v;
    }

    MatView normalized() const {
        if (!trans) return *this;
        return {data, cols, rows, flipped(layout), ld, false};
    }

    std::int64_t offset(std::int64_t r, std::int64_t c) const {
        if (trans) std::swap(r, c);
        return layout == Layout::row_major ? r * ld + c : r + c * ld;
    }
    double at(std::int64_t r, std::int64_t c) const { return data[offset(r, c)]; }
};

/// Writable counterpart of MatView.
struct MutMatView {
    double* data = nullptr;
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    Layout layout = Layout::row_major;
    std::int64_t ld = 0;

    static MutMatView row_major(double* data, std::int64_t rows, std::int64_t cols, std::int64_t ld = -1) {
        return {data, rows, cols, Layout::row_major, ld < 0 ? cols : ld};
    }
    static MutMatView col_major(double* data, std::int64_t rows, std::int64_t cols, std::int64_t ld = -1) {
        return {data, rows, cols, Layout::col_major, ld < 0 ? rows : ld};
    }

    std::int64_t offset(std::int64_t r, std::int64_t c) const {
        return layout == Layout::row_major ? r * ld + c : r + c * ld;
    }
    double& at(std::int64_t r, std::int64_t c) const { return data[offset(r, c)]; }

    MatView as_const() const { return {data, rows, cols, layout, ld, false}; }
};

/// Dense row-major matrix with owned storage; the representation of factor
/// matrices, Khatri-Rao products and MTTKRP results throughout.
class FactorMatrix {
public:
    FactorMatrix() = default;
    FactorMatrix(std::int64_t rows, std::int64_t cols);  // zero-filled
    FactorMatrix(std::int64_t rows, std::int64_t cols, std::vector<double> values);

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }

    double& operator()(std::int64_t r, std::int64_t c) { return values_[static_cast<std::size_t>(r * cols_ + c)]; }
    double operator()(std::int64_t r, std::int64_t c) const { return values_[static_cast<std::size_t>(r * cols_ + c)]; }

    std::span<double> row(std::int64_t r) {
        return {values_.data() + r * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<const double> row(std::int64_t r) const {
        return {values_.data() + r * cols_, static_cast<std::size_t>(cols_)};
    }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    MatView view() const { return MatView::row_major(values_.data(), rows_, cols_); }
    MutMatView mut_view() { return MutMatView::row_major(values_.data(), rows_, cols_); }

    void fill(double v) { values_.assign(values_.size(), v); }

    bool operator==(const FactorMatrix& other) const = default;

private:
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    std::vector<double> values_;
};

using FactorList = std::vector<const FactorMatrix*>;

}  // namespace dmtk
