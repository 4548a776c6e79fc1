#include "dmtk/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "dmtk/kernels.hpp"
#include "dmtk/parallel.hpp"

namespace dmtk {

namespace {

constexpr std::int64_t kRowBlock = 256;
constexpr std::int64_t kContractionBlock = 64;
constexpr std::int64_t kDotBlock = 1024;

struct Strided {
    const double* p;
    std::int64_t rs;  // row stride
    std::int64_t cs;  // col stride
    double at(std::int64_t r, std::int64_t c) const { return p[r * rs + c * cs]; }
};

Strided strides_of(const MatView& v) {
    if (v.layout == Layout::row_major) return {v.data, v.ld, 1};
    return {v.data, 1, v.ld};
}

// B packed to row-major k x n (no-op view when it already is contiguous row-major).
struct PackedB {
    const double* p;
    std::int64_t ld;
    std::vector<double> storage;
};

PackedB pack_b_row_major(const MatView& b) {
    if (b.layout == Layout::row_major) return {b.data, b.ld, {}};
    PackedB packed;
    packed.storage.resize(static_cast<std::size_t>(b.rows * b.cols));
    for (std::int64_t k = 0; k < b.rows; ++k) {
        for (std::int64_t c = 0; c < b.cols; ++c) {
            packed.storage[static_cast<std::size_t>(k * b.cols + c)] = b.data[k + c * b.ld];
        }
    }
    packed.p = packed.storage.data();
    packed.ld = b.cols;
    return packed;
}

// B packed to its transpose, row-major n x k (for the dot-product scheme).
std::vector<double> pack_b_transposed(const MatView& b) {
    std::vector<double> bt(static_cast<std::size_t>(b.rows * b.cols));
    const Strided s = strides_of(b);
    for (std::int64_t c = 0; c < b.cols; ++c) {
        for (std::int64_t k = 0; k < b.rows; ++k) {
            bt[static_cast<std::size_t>(c * b.rows + k)] = s.at(k, c);
        }
    }
    return bt;
}

// C row-major: stream rows of B through C-length axpys. Works for either A
// layout (A is read one scalar at a time from a cache-blocked panel).
void gemm_c_row_major(const Strided& a, const double* b, std::int64_t ldb, const MutMatView& c,
                      std::int64_t kdim, bool accumulate, std::int64_t r0, std::int64_t r1) {
    const auto& k = kernels::active();
    for (std::int64_t rb = r0; rb < r1; rb += kRowBlock) {
        const std::int64_t rbe = std::min(r1, rb + kRowBlock);
        if (!accumulate) {
            for (std::int64_t r = rb; r < rbe; ++r) {
                std::memset(c.data + c.offset(r, 0), 0, static_cast<std::size_t>(c.cols) * sizeof(double));
            }
        }
        for (std::int64_t kb = 0; kb < kdim; kb += kContractionBlock) {
            const std::int64_t kbe = std::min(kdim, kb + kContractionBlock);
            for (std::int64_t r = rb; r < rbe; ++r) {
                double* crow = c.data + c.offset(r, 0);
                for (std::int64_t kk = kb; kk < kbe; ++kk) {
                    k.axpy(crow, a.at(r, kk), b + kk * ldb, c.cols);
                }
            }
        }
    }
}

// C col-major, A col-major: per-column axpys over contiguous column panels.
void gemm_c_col_a_col(const MatView& a, const double* b, std::int64_t ldb, const MutMatView& c,
                      bool accumulate, std::int64_t r0, std::int64_t r1) {
    const auto& k = kernels::active();
    const std::int64_t kdim = a.cols;
    for (std::int64_t rb = r0; rb < r1; rb += kRowBlock) {
        const std::int64_t rbe = std::min(r1, rb + kRowBlock);
        const std::int64_t len = rbe - rb;
        if (!accumulate) {
            for (std::int64_t col = 0; col < c.cols; ++col) {
                std::memset(c.data + c.offset(rb, col), 0, static_cast<std::size_t>(len) * sizeof(double));
            }
        }
        for (std::int64_t kb = 0; kb < kdim; kb += kContractionBlock) {
            const std::int64_t kbe = std::min(kdim, kb + kContractionBlock);
            for (std::int64_t col = 0; col < c.cols; ++col) {
                double* cseg = c.data + c.offset(rb, col);
                for (std::int64_t kk = kb; kk < kbe; ++kk) {
                    k.axpy(cseg, b[kk * ldb + col], a.data + kk * a.ld + rb, len);
                }
            }
        }
    }
}

// C col-major, A row-major: dot products against the packed transpose of B.
void gemm_c_col_a_row(const MatView& a, const double* bt, const MutMatView& c, bool accumulate,
                      std::int64_t r0, std::int64_t r1) {
    const auto& k = kernels::active();
    const std::int64_t kdim = a.cols;
    std::vector<double> acc(static_cast<std::size_t>(c.cols));
    for (std::int64_t r = r0; r < r1; ++r) {
        const double* arow = a.data + r * a.ld;
        if (accumulate) {
            for (std::int64_t col = 0; col < c.cols; ++col) acc[static_cast<std::size_t>(col)] = c.at(r, col);
        } else {
            std::fill(acc.begin(), acc.end(), 0.0);
        }
        for (std::int64_t kb = 0; kb < kdim; kb += kDotBlock) {
            const std::int64_t kbe = std::min(kdim, kb + kDotBlock);
            for (std::int64_t col = 0; col < c.cols; ++col) {
                acc[static_cast<std::size_t>(col)] += k.dot(arow + kb, bt + col * kdim + kb, kbe - kb);
            }
        }
        for (std::int64_t col = 0; col < c.cols; ++col) c.at(r, col) = acc[static_cast<std::size_t>(col)];
    }
}

}  // namespace

void gemm_acc(const MatView& A, const MatView& B, const MutMatView& C, bool accumulate, int threads) {
    const MatView a = A.normalized();
    const MatView b = B.normalized();
    if (a.rows != C.rows || b.cols != C.cols || a.cols != b.rows) {
        throw std::invalid_argument("gemm_acc: dimension mismatch: (" + std::to_string(a.rows) + "x" +
                                    std::to_string(a.cols) + ") * (" + std::to_string(b.rows) + "x" +
                                    std::to_string(b.cols) + ") -> (" + std::to_string(C.rows) + "x" +
                                    std::to_string(C.cols) + ")");
    }
    if (C.rows == 0 || C.cols == 0) return;

    const int t_max = static_cast<int>(std::min<std::int64_t>(threads, std::max<std::int64_t>(C.rows, 1)));
    const int T = std::max(1, t_max);

    if (C.layout == Layout::row_major) {
        const PackedB packed = pack_b_row_major(b);
        const Strided as = strides_of(a);
        run_on_threads(T, [&](int t) {
            const BlockRange r = balanced_block(C.rows, T, t);
            if (!r.empty()) gemm_c_row_major(as, packed.p, packed.ld, C, a.cols, accumulate, r.begin, r.end);
        });
        return;
    }

    if (a.layout == Layout::col_major) {
        const PackedB packed = pack_b_row_major(b);
        run_on_threads(T, [&](int t) {
            const BlockRange r = balanced_block(C.rows, T, t);
            if (!r.empty()) gemm_c_col_a_col(a, packed.p, packed.ld, C, accumulate, r.begin, r.end);
        });
        return;
    }

    const std::vector<double> bt = pack_b_transposed(b);
    run_on_threads(T, [&](int t) {
        const BlockRange r = balanced_block(C.rows, T, t);
        if (!r.empty()) gemm_c_col_a_row(a, bt.data(), C, accumulate, r.begin, r.end);
    });
}

void gemv(const MatView& A, const double* x, std::int64_t incx, double* y, std::int64_t incy,
          bool accumulate) {
    const MatView a = A.normalized();
    const auto& k = kernels::active();

    if (a.layout == Layout::row_major) {
        const double* xp = x;
        std::vector<double> packed;
        if (incx != 1 && a.cols > 0) {
            packed.resize(static_cast<std::size_t>(a.cols));
            for (std::int64_t i = 0; i < a.cols; ++i) packed[static_cast<std::size_t>(i)] = x[i * incx];
            xp = packed.data();
        }
        for (std::int64_t r = 0; r < a.rows; ++r) {
            const double v = k.dot(a.data + r * a.ld, xp, a.cols);
            double& dst = y[r * incy];
            dst = accumulate ? dst + v : v;
        }
        return;
    }

    std::vector<double> acc(static_cast<std::size_t>(a.rows), 0.0);
    for (std::int64_t col = 0; col < a.cols; ++col) {
        k.axpy(acc.data(), x[col * incx], a.data + col * a.ld, a.rows);
    }
    for (std::int64_t r = 0; r < a.rows; ++r) {
        double& dst = y[r * incy];
        dst = accumulate ? dst + acc[static_cast<std::size_t>(r)] : acc[static_cast<std::size_t>(r)];
    }
}

GramMatrix gram(const FactorMatrix& u) {
    const auto& k = kernels::active();
    const std::int64_t c = u.cols();
    GramMatrix g(c);
    for (std::int64_t r = 0; r < u.rows(); ++r) {
        const double* row = u.data() + r * c;
        for (std::int64_t c1 = 0; c1 < c; ++c1) {
            k.axpy(g.values.data() + c1 * c + c1, row[c1], row + c1, c - c1);
        }
    }
    for (std::int64_t c1 = 0; c1 < c; ++c1) {
        for (std::int64_t c2 = c1 + 1; c2 < c; ++c2) {
            g.at(c2, c1) = g.at(c1, c2);
        }
    }
    return g;
}

GramMatrix gram_hadamard(std::span<const FactorMatrix> factors, std::int64_t skip) {
    if (factors.empty()) {
        throw std::invalid_argument("gram_hadamard: no factors");
    }
    const auto& k = kernels::active();
    const std::int64_t c = factors.front().cols();
    GramMatrix h(c);
    std::fill(h.values.begin(), h.values.end(), 1.0);
    for (std::int64_t n = 0; n < static_cast<std::int64_t>(factors.size()); ++n) {
        if (n == skip) continue;
        const auto& u = factors[static_cast<std::size_t>(n)];
        if (u.cols() != c) {
            throw std::invalid_argument("gram_hadamard: factor " + std::to_string(n) +
                                        " has rank " + std::to_string(u.cols()) + ", expected " +
                                        std::to_string(c));
        }
        const GramMatrix g = gram(u);
        k.hadamard_inplace(h.values.data(), g.values.data(), c * c);
    }
    return h;
}

namespace {

// Lower-triangular Cholesky with a relative pivot floor. Returns false when
// a pivot drops to or below 1e-12 * trace(H).
bool cholesky(const GramMatrix& h, std::vector<double>& l) {
    const std::int64_t n = h.size;
    const double tol = 1e-12 * h.trace();
    l.assign(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t j = 0; j < n; ++j) {
        double d = h.at(j, j);
        for (std::int64_t k = 0; k < j; ++k) {
            const double v = l[static_cast<std::size_t>(j * n + k)];
            d -= v * v;
        }
        if (d <= tol) return false;
        const double root = std::sqrt(d);
        l[static_cast<std::size_t>(j * n + j)] = root;
        for (std::int64_t i = j + 1; i < n; ++i) {
            double s = h.at(i, j);
            for (std::int64_t k = 0; k < j; ++k) {
                s -= l[static_cast<std::size_t>(i * n + k)] * l[static_cast<std::size_t>(j * n + k)];
            }
            l[static_cast<std::size_t>(i * n + j)] = s / root;
        }
    }
    return true;
}

// Cyclic Jacobi eigendecomposition for a small symmetric matrix.
// On return a's diagonal holds the eigenvalues and v the eigenvectors
// (columns), a = v diag v^T.
void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, std::int64_t n) {
    v.assign(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i * n + i)] = 1.0;
    auto idx = [n](std::int64_t r, std::int64_t c) { return static_cast<std::size_t>(r * n + c); };

    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) off += a[idx(p, q)] * a[idx(p, q)];
        }
        if (off <= 1e-300) return;
        double diag = 0.0;
        for (std::int64_t p = 0; p < n; ++p) diag += a[idx(p, p)] * a[idx(p, p)];
        if (off <= 1e-30 * std::max(diag, 1e-300)) return;

        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) {
                const double apq = a[idx(p, q)];
                if (apq == 0.0) continue;
                const double theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cos = 1.0 / std::sqrt(t * t + 1.0);
                const double sin = t * cos;
                for (std::int64_t r = 0; r < n; ++r) {
                    const double arp = a[idx(r, p)];
                    const double arq = a[idx(r, q)];
                    a[idx(r, p)] = cos * arp - sin * arq;
                    a[idx(r, q)] = sin * arp + cos * arq;
                }
                for (std::int64_t c = 0; c < n; ++c) {
                    const double apc = a[idx(p, c)];
                    const double aqc = a[idx(q, c)];
                    a[idx(p, c)] = cos * apc - sin * aqc;
                    a[idx(q, c)] = sin * apc + cos * aqc;
                }
                for (std::int64_t r = 0; r < n; ++r) {
                    const double vrp = v[idx(r, p)];
                    const double vrq = v[idx(r, q)];
                    v[idx(r, p)] = cos * vrp - sin * vrq;
                    v[idx(r, q)] = sin * vrp + cos * vrq;
                }
            }
        }
    }
}

}  // namespace

FactorMatrix solve_psd(const GramMatrix& h, const FactorMatrix& m) {
    const std::int64_t n = h.size;
    if (m.cols() != n) {
        throw std::invalid_argument("solve_psd: M has " + std::to_string(m.cols()) +
                                    " columns, H is " + std::to_string(n) + "x" + std::to_string(n));
    }
    FactorMatrix u(m.rows(), n);

    std::vector<double> l;
    if (cholesky(h, l)) {
        std::vector<double> w(static_cast<std::size_t>(n));
        for (std::int64_t r = 0; r < m.rows(); ++r) {
            const double* mrow = m.data() + r * n;
            for (std::int64_t j = 0; j < n; ++j) {
                double s = mrow[j];
                for (std::int64_t k = 0; k < j; ++k) s -= l[static_cast<std::size_t>(j * n + k)] * w[static_cast<std::size_t>(k)];
                w[static_cast<std::size_t>(j)] = s / l[static_cast<std::size_t>(j * n + j)];
            }
            double* urow = u.data() + r * n;
            for (std::int64_t j = n; j-- > 0;) {
                double s = w[static_cast<std::size_t>(j)];
                for (std::int64_t k = j + 1; k < n; ++k) s -= l[static_cast<std::size_t>(k * n + j)] * urow[k];
                urow[j] = s / l[static_cast<std::size_t>(j * n + j)];
            }
        }
        return u;
    }

    // Rank-deficient or indefinite-from-rounding: pseudoinverse via Jacobi.
    std::vector<double> a(h.values);
    std::vector<double> v;
    jacobi_eigen(a, v, n);
    std::vector<double> gain(static_cast<std::size_t>(n), 0.0);
    double lam_max = 0.0;
    for (std::int64_t i = 0; i < n; ++i) lam_max = std::max(lam_max, a[static_cast<std::size_t>(i * n + i)]);
    const double floor = 1e-12 * lam_max;
    for (std::int64_t i = 0; i < n; ++i) {
        const double lam = a[static_cast<std::size_t>(i * n + i)];
        if (lam > floor && lam > 0.0) gain[static_cast<std::size_t>(i)] = 1.0 / lam;
    }

    std::vector<double> tmp(static_cast<std::size_t>(n));
    for (std::int64_t r = 0; r < m.rows(); ++r) {
        const double* mrow = m.data() + r * n;
        for (std::int64_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::int64_t c = 0; c < n; ++c) s += mrow[c] * v[static_cast<std::size_t>(c * n + j)];
            tmp[static_cast<std::size_t>(j)] = s * gain[static_cast<std::size_t>(j)];
        }
        double* urow = u.data() + r * n;
        for (std::int64_t c = 0; c < n; ++c) {
            double s = 0.0;
            for (std::int64_t j = 0; j < n; ++j) s += tmp[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(c * n + j)];
            urow[c] = s;
        }
    }
    return u;
}

FactorMatrix parallel_reduce(std::vector<FactorMatrix>&& accumulators, int threads) {
    if (accumulators.empty()) {
        throw std::invalid_argument("parallel_reduce: nothing to reduce");
    }
    const std::int64_t n = static_cast<std::int64_t>(accumulators.size());
    for (std::int64_t i = 1; i < n; ++i) {
        if (accumulators[static_cast<std::size_t>(i)].rows() != accumulators[0].rows() ||
            accumulators[static_cast<std::size_t>(i)].cols() != accumulators[0].cols()) {
            throw std::invalid_argument("parallel_reduce: accumulator shapes differ");
        }
    }
    const std::int64_t count = accumulators[0].rows() * accumulators[0].cols();
    for (std::int64_t stride = 1; stride < n; stride *= 2) {
        std::vector<std::int64_t> heads;
        for (std::int64_t i = 0; i + stride < n; i += 2 * stride) heads.push_back(i);
        const int T = static_cast<int>(std::min<std::int64_t>(threads, std::max<std::int64_t>(static_cast<std::int64_t>(heads.size()), 1)));
        run_on_threads(std::max(1, T), [&](int t) {
            const auto& k = kernels::active();
            const BlockRange r = balanced_block(static_cast<std::int64_t>(heads.size()), std::max(1, T), t);
            for (std::int64_t hi = r.begin; hi < r.end; ++hi) {
                const std::int64_t i = heads[static_cast<std::size_t>(hi)];
                k.add_inplace(accumulators[static_cast<std::size_t>(i)].data(),
                              accumulators[static_cast<std::size_t>(i + stride)].data(), count);
            }
        });
    }
    return std::move(accumulators[0]);
}

}  // namespace dmtk
