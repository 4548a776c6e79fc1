#include "dmtk/mttkrp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmtk/kernels.hpp"
#include "dmtk/krp.hpp"
#include "dmtk/linalg.hpp"
#include "dmtk/matricize.hpp"
#include "dmtk/parallel.hpp"

namespace dmtk {

namespace {

void validate(const MttkrpRequest& req) {
    if (!req.tensor) throw std::invalid_argument("mttkrp: null tensor");
    const Shape& shape = req.tensor->shape();
    if (req.mode < 0 || req.mode >= shape.ndim()) {
        throw std::out_of_range("mttkrp: mode " + std::to_string(req.mode) + " outside [0, " +
                                std::to_string(shape.ndim()) + ")");
    }
    if (static_cast<std::int64_t>(req.factors.size()) != shape.ndim()) {
        throw std::invalid_argument("mttkrp: got " + std::to_string(req.factors.size()) +
                                    " factors for an order-" + std::to_string(shape.ndim()) + " tensor");
    }
    const std::int64_t rank = req.factors.front().cols();
    if (rank < 1) throw std::invalid_argument("mttkrp: rank must be >= 1");
    for (std::int64_t k = 0; k < shape.ndim(); ++k) {
        const auto& u = req.factors[static_cast<std::size_t>(k)];
        if (u.rows() != shape.dim(k)) {
            throw std::invalid_argument("mttkrp: factor " + std::to_string(k) + " has " +
                                        std::to_string(u.rows()) + " rows, mode extent is " +
                                        std::to_string(shape.dim(k)));
        }
        if (u.cols() != rank) {
            throw std::invalid_argument("mttkrp: factor " + std::to_string(k) + " has rank " +
                                        std::to_string(u.cols()) + ", expected " + std::to_string(rank));
        }
    }
    if (req.threads < 1) throw std::invalid_argument("mttkrp: threads must be >= 1");
}

bool is_boundary(const Shape& shape, std::int64_t mode) {
    return mode == 0 || mode == shape.ndim() - 1;
}

// KRP operand lists; within each list the factor of the lower mode comes
// later so its row index varies fastest, matching the column order of the
// matricizations.
FactorList krp_inputs_all(std::span<const FactorMatrix> factors, std::int64_t skip) {
    FactorList list;
    for (std::int64_t k = static_cast<std::int64_t>(factors.size()); k-- > 0;) {
        if (k != skip) list.push_back(&factors[static_cast<std::size_t>(k)]);
    }
    return list;
}

FactorList krp_inputs_left(std::span<const FactorMatrix> factors, std::int64_t mode) {
    FactorList list;
    for (std::int64_t k = mode; k-- > 0;) list.push_back(&factors[static_cast<std::size_t>(k)]);
    return list;
}

FactorList krp_inputs_right(std::span<const FactorMatrix> factors, std::int64_t mode) {
    FactorList list;
    for (std::int64_t k = static_cast<std::int64_t>(factors.size()); k-- > mode + 1;) {
        list.push_back(&factors[static_cast<std::size_t>(k)]);
    }
    return list;
}

FactorMatrix ones_row(std::int64_t cols) {
    return FactorMatrix(1, cols, std::vector<double>(static_cast<std::size_t>(cols), 1.0));
}

void finish_total(TimeBreakdown& t, double wall) {
    t.total = wall;
    const double known = t.matmul + t.krp_full + t.krp_partial + t.matvec + t.reduce + t.reorder;
    t.other = std::max(0.0, wall - known);
}

// Mean of per-thread breakdowns, folded into `time`.
void fold_thread_times(TimeBreakdown& time, const std::vector<TimeBreakdown>& per_thread) {
    TimeBreakdown mean;
    for (const auto& t : per_thread) mean.accumulate(t);
    mean.scale(1.0 / static_cast<double>(per_thread.size()));
    time.matmul += mean.matmul;
    time.krp_full += mean.krp_full;
    time.krp_partial += mean.krp_partial;
    time.matvec += mean.matvec;
    time.reduce += mean.reduce;
    time.reorder += mean.reorder;
}

MatView boundary_column_block(const DenseTensor& tensor, std::int64_t mode, std::int64_t c0,
                              std::int64_t width) {
    const Shape& shape = tensor.shape();
    const std::int64_t rows = shape.dim(mode);
    if (mode == 0) {
        return MatView::col_major(tensor.data() + c0 * rows, rows, width, rows);
    }
    return MatView::row_major(tensor.data() + c0, rows, width, shape.left(mode));
}

void maybe_inject_fault(FactorMatrix& m) {
    // Test hook (see README): lets the CLI's --check path prove it catches a
    // miscomputing kernel.
    if (const char* env = std::getenv("DMTK_INJECT_FAULT"); env && *env && *env != '0') {
        if (m.rows() > 0 && m.cols() > 0) {
            m(0, 0) += 1e-3 * (1.0 + std::abs(m(0, 0)));
        }
    }
}

MttkrpResult one_step_boundary(const MttkrpRequest& req) {
    const DenseTensor& x = *req.tensor;
    const Shape& shape = x.shape();
    const std::int64_t mode = req.mode;
    const std::int64_t rows = shape.dim(mode);
    const std::int64_t rank = req.factors.front().cols();
    const std::int64_t krp_rows = shape.unfold(mode);
    const FactorList inputs = krp_inputs_all(req.factors, mode);

    Stopwatch wall;
    MttkrpResult result;
    const int T = std::max(1, static_cast<int>(std::min<std::int64_t>(req.threads, krp_rows)));

    std::vector<FactorMatrix> acc(static_cast<std::size_t>(T));
    for (auto& a : acc) a = FactorMatrix(rows, rank);
    std::vector<TimeBreakdown> thread_time(static_cast<std::size_t>(T));

    run_on_threads(T, [&](int t) {
        const BlockRange r = ceil_chunk(krp_rows, T, t);
        if (r.empty()) return;
        Stopwatch sw;
        FactorMatrix block(r.size(), rank);
        if (inputs.empty()) {
            block.fill(1.0);  // order-1 tensor: the empty KRP is a row of ones
        } else {
            KrpState state(inputs, r.begin);
            for (std::int64_t j = r.begin; j < r.end; ++j) {
                state.write_row(block.row(j - r.begin));
                if (j + 1 < r.end) state.advance();
            }
        }
        thread_time[static_cast<std::size_t>(t)].krp_full = sw.lap();
        const MatView a = boundary_column_block(x, mode, r.begin, r.size());
        gemm_acc(a, block.view(), acc[static_cast<std::size_t>(t)].mut_view(), /*accumulate=*/true, 1);
        thread_time[static_cast<std::size_t>(t)].matmul = sw.lap();
    });
    fold_thread_times(result.time, thread_time);

    Stopwatch reduce_sw;
    result.m = parallel_reduce(std::move(acc), T);
    result.time.reduce = reduce_sw.seconds();
    finish_total(result.time, wall.seconds());
    return result;
}

MttkrpResult one_step_interior(const MttkrpRequest& req) {
    const DenseTensor& x = *req.tensor;
    const Shape& shape = x.shape();
    const std::int64_t mode = req.mode;
    const std::int64_t rows = shape.dim(mode);
    const std::int64_t rank = req.factors.front().cols();
    const std::int64_t l = shape.left(mode);
    const std::int64_t r_blocks = shape.right(mode);
    const std::int64_t block_stride = rows * l;

    Stopwatch wall;
    MttkrpResult result;

    Stopwatch left_sw;
    const FactorMatrix k_left = krp(krp_inputs_left(req.factors, mode), req.threads);
    result.time.krp_partial = left_sw.seconds();

    const FactorList right = krp_inputs_right(req.factors, mode);
    const auto& kern = kernels::active();

    if (req.threads >= r_blocks) {
        // Too few blocks to split: sequential block loop, parallel kernel.
        TimeBreakdown t;
        FactorMatrix kbar(l, rank);
        std::vector<double> kr(static_cast<std::size_t>(rank));
        KrpState state(right, 0);
        result.m = FactorMatrix(rows, rank);
        Stopwatch sw;
        for (std::int64_t j = 0; j < r_blocks; ++j) {
            state.write_row(kr);
            if (j + 1 < r_blocks) state.advance();
            for (std::int64_t row = 0; row < l; ++row) {
                kern.hadamard(kbar.row(row).data(), k_left.row(row).data(), kr.data(), rank);
            }
            t.krp_partial += sw.lap();
            const MatView a = MatView::row_major(x.data() + j * block_stride, rows, l, l);
            gemm_acc(a, kbar.view(), result.m.mut_view(), /*accumulate=*/true, req.threads);
            t.matmul += sw.lap();
        }
        result.time.krp_partial += t.krp_partial;
        result.time.matmul = t.matmul;
        finish_total(result.time, wall.seconds());
        return result;
    }

    const int T = req.threads;
    std::vector<FactorMatrix> acc(static_cast<std::size_t>(T));
    for (auto& a : acc) a = FactorMatrix(rows, rank);
    std::vector<TimeBreakdown> thread_time(static_cast<std::size_t>(T));

    run_on_threads(T, [&](int t) {
        const BlockRange r = ceil_chunk(r_blocks, T, t);
        if (r.empty()) return;
        TimeBreakdown& tt = thread_time[static_cast<std::size_t>(t)];
        FactorMatrix kbar(l, rank);
        std::vector<double> kr(static_cast<std::size_t>(rank));
        KrpState state(right, r.begin);
        Stopwatch sw;
        for (std::int64_t j = r.begin; j < r.end; ++j) {
            state.write_row(kr);
            if (j + 1 < r.end) state.advance();
            for (std::int64_t row = 0; row < l; ++row) {
                kern.hadamard(kbar.row(row).data(), k_left.row(row).data(), kr.data(), rank);
            }
            tt.krp_partial += sw.lap();
            const MatView a = MatView::row_major(x.data() + j * block_stride, rows, l, l);
            gemm_acc(a, kbar.view(), acc[static_cast<std::size_t>(t)].mut_view(), /*accumulate=*/true, 1);
            tt.matmul += sw.lap();
        }
    });
    fold_thread_times(result.time, thread_time);

    Stopwatch reduce_sw;
    result.m = parallel_reduce(std::move(acc), T);
    result.time.reduce = reduce_sw.seconds();
    finish_total(result.time, wall.seconds());
    return result;
}

}  // namespace

TwoStepOrder choose_order(const Shape& shape, std::int64_t mode) {
    return shape.left(mode) > shape.right(mode) ? TwoStepOrder::left : TwoStepOrder::right;
}

MttkrpResult mttkrp_baseline(const MttkrpRequest& req) {
    validate(req);
    const DenseTensor& x = *req.tensor;
    const Shape& shape = x.shape();
    const std::int64_t mode = req.mode;
    const std::int64_t rows = shape.dim(mode);
    const std::int64_t cols = shape.unfold(mode);
    const std::int64_t rank = req.factors.front().cols();

    Stopwatch wall;
    MttkrpResult result;

    // Explicit column-major matricization. The boundary modes already have a
    // BLAS-consumable natural layout (column-major for mode 0, row-major for
    // the last), so only interior modes pay the gather.
    std::vector<double> scratch;
    MatView a;
    Stopwatch sw;
    if (is_boundary(shape, mode)) {
        a = boundary_column_block(x, mode, 0, cols);
        result.time.reorder = 0.0;
    } else {
        scratch.resize(static_cast<std::size_t>(shape.total()));
        const std::int64_t l = shape.left(mode);
        const std::int64_t block = l * rows;
        const double* src = x.data();
        double* dst = scratch.data();
        const int T = std::max(1, static_cast<int>(std::min<std::int64_t>(req.threads, cols)));
        run_on_threads(T, [&](int t) {
            const BlockRange r = balanced_block(cols, T, t);
            for (std::int64_t q = r.begin; q < r.end; ++q) {
                // One delinearize per destination column: q = (left, right).
                const std::int64_t left_ix = q % l;
                const std::int64_t right_ix = q / l;
                const double* col_src = src + left_ix + right_ix * block;
                double* col_dst = dst + q * rows;
                for (std::int64_t i = 0; i < rows; ++i) col_dst[i] = col_src[i * l];
            }
        });
        a = MatView::col_major(scratch.data(), rows, cols);
        result.time.reorder = sw.lap();
    }

    sw.lap();
    const FactorList inputs = krp_inputs_all(req.factors, mode);
    const FactorMatrix k = inputs.empty() ? ones_row(rank) : krp(inputs, req.threads);
    result.time.krp_full = sw.lap();

    result.m = FactorMatrix(rows, rank);
    gemm_acc(a, k.view(), result.m.mut_view(), /*accumulate=*/false, req.threads);
    result.time.matmul = sw.lap();

    finish_total(result.time, wall.seconds());
    return result;
}

MttkrpResult mttkrp_one_step(const MttkrpRequest& req) {
    validate(req);
    if (is_boundary(req.tensor->shape(), req.mode)) return one_step_boundary(req);
    return one_step_interior(req);
}

MttkrpResult mttkrp_two_step(const MttkrpRequest& req) {
    validate(req);
    const DenseTensor& x = *req.tensor;
    const Shape& shape = x.shape();
    const std::int64_t mode = req.mode;
    if (is_boundary(shape, mode)) {
        throw std::invalid_argument(
            "mttkrp_two_step: mode " + std::to_string(mode) +
            " is a boundary mode with a degenerate partial KRP; use one_step instead");
    }
    const std::int64_t rows = shape.dim(mode);
    const std::int64_t rank = req.factors.front().cols();
    const std::int64_t l = shape.left(mode);
    const std::int64_t r = shape.right(mode);

    Stopwatch wall;
    MttkrpResult result;

    Stopwatch sw;
    const FactorMatrix k_left = krp(krp_inputs_left(req.factors, mode), req.threads);
    const FactorMatrix k_right = krp(krp_inputs_right(req.factors, mode), req.threads);
    result.time.krp_partial = sw.lap();

    const TwoStepOrder order =
        req.order == TwoStepOrder::automatic ? choose_order(shape, mode) : req.order;
    result.m = FactorMatrix(rows, rank);
    const int ttv_threads = std::max(1, static_cast<int>(std::min<std::int64_t>(req.threads, rank)));

    if (order == TwoStepOrder::right) {
        // R = X_(0:n) * K_R, kept column-major so the partial result is the
        // naturally linearized tensor (I_0..I_n, C): its mode-n blocks are
        // row-major I_n x L_n.
        std::vector<double> partial(static_cast<std::size_t>(l * rows * rank));
        const MatView a = MatView::col_major(x.data(), l * rows, r);
        gemm_acc(a, k_right.view(), MutMatView::col_major(partial.data(), l * rows, rank), false,
                 req.threads);
        result.time.matmul = sw.lap();

        run_on_threads(ttv_threads, [&](int t) {
            const BlockRange jr = balanced_block(rank, ttv_threads, t);
            for (std::int64_t j = jr.begin; j < jr.end; ++j) {
                const MatView block = MatView::row_major(partial.data() + j * l * rows, rows, l, l);
                gemv(block, k_left.data() + j, rank, result.m.data() + j, rank, false);
            }
        });
        result.time.matvec = sw.lap();
    } else {
        // L = X_(0:n-1)^T * K_L, kept column-major: the naturally linearized
        // tensor (I_n..I_{N-1}, C) whose leading-mode blocks are column-major
        // I_n x R_n.
        std::vector<double> partial(static_cast<std::size_t>(rows * r * rank));
        const MatView a = MatView::col_major(x.data(), l, rows * r).transposed();
        gemm_acc(a, k_left.view(), MutMatView::col_major(partial.data(), rows * r, rank), false,
                 req.threads);
        result.time.matmul = sw.lap();

        run_on_threads(ttv_threads, [&](int t) {
            const BlockRange jr = balanced_block(rank, ttv_threads, t);
            for (std::int64_t j = jr.begin; j < jr.end; ++j) {
                const MatView block = MatView::col_major(partial.data() + j * rows * r, rows, r, rows);
                gemv(block, k_right.data() + j, rank, result.m.data() + j, rank, false);
            }
        });
        result.time.matvec = sw.lap();
    }

    finish_total(result.time, wall.seconds());
    return result;
}

MttkrpResult mttkrp(const MttkrpRequest& request) {
    validate(request);
    MttkrpResult result;
    switch (request.algo) {
        case MttkrpAlgo::baseline:
            result = mttkrp_baseline(request);
            break;
        case MttkrpAlgo::one_step:
            result = mttkrp_one_step(request);
            break;
        case MttkrpAlgo::two_step:
            result = mttkrp_two_step(request);
            break;
        case MttkrpAlgo::automatic: {
            MttkrpRequest routed = request;
            routed.algo = is_boundary(request.tensor->shape(), request.mode) ? MttkrpAlgo::one_step
                                                                             : MttkrpAlgo::two_step;
            result = mttkrp(routed);
            return result;  // fault hook already applied in the nested call
        }
    }
    maybe_inject_fault(result.m);
    return result;
}

}  // namespace dmtk
