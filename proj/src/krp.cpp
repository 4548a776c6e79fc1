#include "dmtk/krp.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <stdexcept>
#include <string>

#include "dmtk/kernels.hpp"
#include "dmtk/parallel.hpp"

namespace dmtk {

namespace {

std::vector<std::int64_t> radices_of(const FactorList& inputs) {
    if (inputs.empty()) {
        throw std::invalid_argument("krp: empty input list");
    }
    std::vector<std::int64_t> radices;
    radices.reserve(inputs.size());
    const std::int64_t cols = inputs.front()->cols();
    for (std::size_t z = 0; z < inputs.size(); ++z) {
        if (inputs[z] == nullptr) throw std::invalid_argument("krp: null input");
        if (inputs[z]->cols() != cols) {
            throw std::invalid_argument("krp: input " + std::to_string(z) + " has " +
                                        std::to_string(inputs[z]->cols()) + " columns, expected " +
                                        std::to_string(cols));
        }
        if (inputs[z]->rows() < 1) {
            throw std::invalid_argument("krp: input " + std::to_string(z) + " has no rows");
        }
        radices.push_back(inputs[z]->rows());
    }
    return radices;
}

}  // namespace

KrpState::KrpState(FactorList inputs, std::int64_t start_row)
    : inputs_(std::move(inputs)), index_(radices_of(inputs_)) {
    cols_ = inputs_.front()->cols();
    if (z() >= 3) {
        partials_.resize(static_cast<std::size_t>((z() - 2) * cols_));
    }
    seek(start_row);
}

std::span<const double> KrpState::input_row(std::int64_t input) const {
    return inputs_[static_cast<std::size_t>(input)]->row(index_.digit(input));
}

void KrpState::rebuild_from(std::int64_t first_partial) {
    const auto& k = kernels::active();
    for (std::int64_t p = first_partial; p <= z() - 3; ++p) {
        double* dst = partials_.data() + p * cols_;
        const double* head = p == 0 ? input_row(0).data() : dst - cols_;
        k.hadamard(dst, head, input_row(p + 1).data(), cols_);
        ++hadamards_;
    }
}

void KrpState::seek(std::int64_t row) {
    index_.init_from_row(row);
    if (z() >= 3) rebuild_from(0);
}

void KrpState::write_row(std::span<double> out) {
    if (static_cast<std::int64_t>(out.size()) != cols_) {
        throw std::invalid_argument("KrpState::write_row: output span has wrong length");
    }
    const auto& k = kernels::active();
    if (z() == 1) {
        std::memcpy(out.data(), input_row(0).data(), static_cast<std::size_t>(cols_) * sizeof(double));
        return;
    }
    const double* head = z() == 2 ? input_row(0).data() : partials_.data() + (z() - 3) * cols_;
    k.hadamard(out.data(), head, input_row(z() - 1).data(), cols_);
    ++hadamards_;
}

void KrpState::advance() {
    const int carry = index_.increment();
    if (z() < 3 || carry <= 1) return;
    // Partial P(p) depends on digits 0..p+1; a carry of length `carry`
    // touched digits >= Z-carry.
    rebuild_from(std::max<std::int64_t>(0, z() - carry - 1));
}

void krp_row(KrpState& state, std::span<double> out) {
    if (state.z() < 3) {
        throw std::invalid_argument("krp_row: needs Z >= 3 inputs; use krp_small for Z in {1,2}");
    }
    state.write_row(out);
}

namespace {

FactorMatrix krp_generate(const FactorList& inputs, int threads, KrpStats* stats, bool reuse) {
    const std::vector<std::int64_t> radices = radices_of(inputs);
    const std::int64_t z = static_cast<std::int64_t>(inputs.size());
    std::int64_t rows = 1;
    for (std::int64_t r : radices) rows *= r;
    const std::int64_t cols = inputs.front()->cols();

    FactorMatrix out(rows, cols);
    const int T = std::max(1, static_cast<int>(std::min<std::int64_t>(threads, rows)));
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(T), 0);

    run_on_threads(T, [&](int t) {
        const BlockRange r = balanced_block(rows, T, t);
        if (r.empty()) return;
        const auto& k = kernels::active();
        if (reuse) {
            KrpState state(inputs, r.begin);
            for (std::int64_t j = r.begin; j < r.end; ++j) {
                state.write_row(out.row(j));
                if (j + 1 < r.end) state.advance();
            }
            counts[static_cast<std::size_t>(t)] = state.hadamard_count();
        } else {
            MultiIndex mi(radices);
            mi.init_from_row(r.begin);
            std::uint64_t local = 0;
            for (std::int64_t j = r.begin; j < r.end; ++j) {
                double* row = out.data() + j * cols;
                std::memcpy(row, inputs[0]->row(mi.digit(0)).data(),
                            static_cast<std::size_t>(cols) * sizeof(double));
                for (std::int64_t input = 1; input < z; ++input) {
                    k.hadamard_inplace(row, inputs[static_cast<std::size_t>(input)]->row(mi.digit(input)).data(), cols);
                    ++local;
                }
                if (j + 1 < r.end) mi.increment();
            }
            counts[static_cast<std::size_t>(t)] = local;
        }
    });

    if (stats) {
        for (std::uint64_t c : counts) stats->hadamard_products += c;
    }
    return out;
}

}  // namespace

FactorMatrix krp(const FactorList& inputs, int threads, KrpStats* stats) {
    if (inputs.size() <= 2) return krp_small(inputs, stats);
    return krp_generate(inputs, threads, stats, /*reuse=*/true);
}

FactorMatrix krp_naive(const FactorList& inputs, int threads, KrpStats* stats) {
    if (inputs.size() <= 2) return krp_small(inputs, stats);
    return krp_generate(inputs, threads, stats, /*reuse=*/false);
}

FactorMatrix krp_small(const FactorList& inputs, KrpStats* stats) {
    radices_of(inputs);  // validation
    if (inputs.size() > 2) {
        throw std::invalid_argument("krp_small: got " + std::to_string(inputs.size()) +
                                    " inputs, handles only Z in {1,2}");
    }
    const auto& k = kernels::active();
    if (inputs.size() == 1) {
        const FactorMatrix& a = *inputs[0];
        FactorMatrix out(a.rows(), a.cols(), std::vector<double>(a.values().begin(), a.values().end()));
        return out;
    }
    const FactorMatrix& a = *inputs[0];
    const FactorMatrix& b = *inputs[1];
    FactorMatrix out(a.rows() * b.rows(), a.cols());
    std::uint64_t count = 0;
    for (std::int64_t ra = 0; ra < a.rows(); ++ra) {
        for (std::int64_t rb = 0; rb < b.rows(); ++rb) {
            k.hadamard(out.row(rb + ra * b.rows()).data(), a.row(ra).data(), b.row(rb).data(), a.cols());
            ++count;
        }
    }
    if (stats) stats->hadamard_products += count;
    return out;
}

}  // namespace dmtk
