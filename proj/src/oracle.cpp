#include "dmtk/oracle.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dmtk::oracle {

FactorMatrix krp_kron(const FactorList& inputs) {
    if (inputs.empty()) throw std::invalid_argument("krp_kron: empty input list");
    const std::int64_t cols = inputs.front()->cols();
    std::int64_t rows = 1;
    for (const FactorMatrix* u : inputs) {
        if (!u || u->cols() != cols) throw std::invalid_argument("krp_kron: bad input list");
        rows *= u->rows();
    }
    FactorMatrix out(rows, cols);
    std::vector<double> cur, next;
    for (std::int64_t c = 0; c < cols; ++c) {
        cur.assign(static_cast<std::size_t>(inputs[0]->rows()), 0.0);
        for (std::int64_t r = 0; r < inputs[0]->rows(); ++r) cur[static_cast<std::size_t>(r)] = (*inputs[0])(r, c);
        for (std::size_t z = 1; z < inputs.size(); ++z) {
            const FactorMatrix& u = *inputs[z];
            next.assign(cur.size() * static_cast<std::size_t>(u.rows()), 0.0);
            for (std::size_t i = 0; i < cur.size(); ++i) {
                for (std::int64_t t = 0; t < u.rows(); ++t) {
                    next[i * static_cast<std::size_t>(u.rows()) + static_cast<std::size_t>(t)] =
                        cur[i] * u(t, c);
                }
            }
            cur.swap(next);
        }
        for (std::int64_t r = 0; r < rows; ++r) out(r, c) = cur[static_cast<std::size_t>(r)];
    }
    return out;
}

FactorMatrix mttkrp_loops(const DenseTensor& x, std::span<const FactorMatrix> factors,
                          std::int64_t mode, std::int64_t limit) {
    const Shape& shape = x.shape();
    if (shape.total() > limit) {
        throw std::invalid_argument("mttkrp_loops: tensor has " + std::to_string(shape.total()) +
                                    " entries, oracle limit is " + std::to_string(limit));
    }
    if (static_cast<std::int64_t>(factors.size()) != shape.ndim()) {
        throw std::invalid_argument("mttkrp_loops: factor count mismatch");
    }
    if (mode < 0 || mode >= shape.ndim()) throw std::out_of_range("mttkrp_loops: bad mode");
    const std::int64_t rank = factors.front().cols();

    FactorMatrix m(shape.dim(mode), rank);
    std::vector<std::int64_t> index(static_cast<std::size_t>(shape.ndim()), 0);
    const double* buf = x.data();
    for (std::int64_t off = 0; off < shape.total(); ++off) {
        const double v = buf[off];
        for (std::int64_t c = 0; c < rank; ++c) {
            double p = v;
            for (std::int64_t k = 0; k < shape.ndim(); ++k) {
                if (k == mode) continue;
                p *= factors[static_cast<std::size_t>(k)](index[static_cast<std::size_t>(k)], c);
            }
            m(index[static_cast<std::size_t>(mode)], c) += p;
        }
        for (std::int64_t k = 0; k < shape.ndim(); ++k) {  // mode 0 varies fastest
            if (++index[static_cast<std::size_t>(k)] < shape.dim(k)) break;
            index[static_cast<std::size_t>(k)] = 0;
        }
    }
    return m;
}

DenseTensor reconstruct(const KruskalModel& model, std::int64_t limit) {
    if (model.factors.empty()) throw std::invalid_argument("reconstruct: empty model");
    std::vector<std::int64_t> dims;
    for (const auto& u : model.factors) dims.push_back(u.rows());
    const Shape shape(dims);
    if (shape.total() > limit) {
        throw std::invalid_argument("reconstruct: tensor has " + std::to_string(shape.total()) +
                                    " entries, oracle limit is " + std::to_string(limit));
    }
    const std::int64_t rank = model.rank();

    std::vector<double> values(static_cast<std::size_t>(shape.total()), 0.0);
    std::vector<std::int64_t> index(static_cast<std::size_t>(shape.ndim()), 0);
    for (std::int64_t off = 0; off < shape.total(); ++off) {
        double v = 0.0;
        for (std::int64_t c = 0; c < rank; ++c) {
            double p = model.lambda[static_cast<std::size_t>(c)];
            for (std::int64_t k = 0; k < shape.ndim(); ++k) {
                p *= model.factors[static_cast<std::size_t>(k)](index[static_cast<std::size_t>(k)], c);
            }
            v += p;
        }
        values[static_cast<std::size_t>(off)] = v;
        for (std::int64_t k = 0; k < shape.ndim(); ++k) {
            if (++index[static_cast<std::size_t>(k)] < shape.dim(k)) break;
            index[static_cast<std::size_t>(k)] = 0;
        }
    }
    return DenseTensor(shape, std::move(values));
}

}  // namespace dmtk::oracle
