#include "dmtk/cp_als.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "dmtk/kernels.hpp"
#include "dmtk/linalg.hpp"

namespace dmtk {

namespace {

double uniform01(std::mt19937_64& rng) {
    // Explicit 53-bit scaling: identical streams on every standard library.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double frobenius(std::span<const double> v) {
    const auto& k = kernels::active();
    constexpr std::int64_t chunk = 1 << 20;
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); i += chunk) {
        const std::int64_t n = static_cast<std::int64_t>(std::min<std::size_t>(chunk, v.size() - i));
        acc += k.dot(v.data() + i, v.data() + i, n);
    }
    return std::sqrt(acc);
}

// <X, Y> and |Y|^2 from the last-mode MTTKRP: the pair every
// reconstruction-free fit needs.
FitResult fit_from_last_mode(double norm_x, const KruskalModel& model, const FactorMatrix& m_last,
                             const GramMatrix& h_skip_last) {
    const std::int64_t n_last = model.ndim() - 1;
    const FactorMatrix& u_last = model.factors[static_cast<std::size_t>(n_last)];
    const std::int64_t rank = model.rank();

    double inner = 0.0;
    for (std::int64_t i = 0; i < u_last.rows(); ++i) {
        const double* mrow = m_last.data() + i * rank;
        const double* urow = u_last.data() + i * rank;
        for (std::int64_t c = 0; c < rank; ++c) {
            inner += mrow[c] * model.lambda[static_cast<std::size_t>(c)] * urow[c];
        }
    }

    const GramMatrix g_last = gram(u_last);
    double norm_y_sq = 0.0;
    for (std::int64_t c1 = 0; c1 < rank; ++c1) {
        for (std::int64_t c2 = 0; c2 < rank; ++c2) {
            norm_y_sq += model.lambda[static_cast<std::size_t>(c1)] *
                         model.lambda[static_cast<std::size_t>(c2)] * h_skip_last.at(c1, c2) *
                         g_last.at(c1, c2);
        }
    }

    FitResult out;
    const double res_sq = std::max(0.0, norm_x * norm_x - 2.0 * inner + norm_y_sq);
    out.abs_residual = std::sqrt(res_sq);
    if (norm_x > 0.0) {
        out.rel_residual = out.abs_residual / norm_x;
        out.fit = 1.0 - out.rel_residual;
        out.defined = true;
    } else {
        out.rel_residual = 0.0;
        out.fit = 0.0;
        out.defined = false;
    }
    return out;
}

void validate_model(const DenseTensor& x, const KruskalModel& model) {
    if (model.ndim() != x.shape().ndim()) {
        throw std::invalid_argument("model has " + std::to_string(model.ndim()) +
                                    " factors for an order-" + std::to_string(x.shape().ndim()) +
                                    " tensor");
    }
    if (static_cast<std::int64_t>(model.lambda.size()) != model.rank()) {
        throw std::invalid_argument("model lambda length does not match rank");
    }
}

}  // namespace

KruskalModel KruskalModel::random(const Shape& shape, std::int64_t rank, std::uint64_t seed) {
    if (rank < 1) throw std::invalid_argument("KruskalModel::random: rank must be >= 1");
    std::mt19937_64 rng(seed);
    KruskalModel model;
    model.factors.reserve(static_cast<std::size_t>(shape.ndim()));
    for (std::int64_t n = 0; n < shape.ndim(); ++n) {
        FactorMatrix u(shape.dim(n), rank);
        for (double& v : u.values()) v = uniform01(rng);
        model.factors.push_back(std::move(u));
    }
    model.lambda.assign(static_cast<std::size_t>(rank), 1.0);
    return model;
}

void KruskalModel::normalize_mode(std::int64_t n) {
    FactorMatrix& u = factors.at(static_cast<std::size_t>(n));
    const std::int64_t rank_ = u.cols();
    lambda.assign(static_cast<std::size_t>(rank_), 0.0);
    for (std::int64_t c = 0; c < rank_; ++c) {
        double sq = 0.0;
        for (std::int64_t i = 0; i < u.rows(); ++i) {
            const double v = u(i, c);
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        lambda[static_cast<std::size_t>(c)] = norm;
        if (norm > 0.0) {
            const double inv = 1.0 / norm;
            for (std::int64_t i = 0; i < u.rows(); ++i) u(i, c) *= inv;
        }
    }
}

double tensor_norm(const DenseTensor& x) { return frobenius(x.values()); }

AlsIterRecord als_iterate(const DenseTensor& x, KruskalModel& model, const AlsConfig& config,
                          double norm_x, int iter_index) {
    validate_model(x, model);
    const std::int64_t n_modes = x.shape().ndim();

    Stopwatch wall;
    AlsIterRecord rec;
    rec.iter = iter_index;
    rec.mode_time.resize(static_cast<std::size_t>(n_modes));

    FactorMatrix m_last;
    GramMatrix h_last;
    for (std::int64_t n = 0; n < n_modes; ++n) {
        MttkrpRequest req;
        req.tensor = &x;
        req.factors = model.factors;
        req.mode = n;
        req.algo = config.algo;
        req.order = config.order;
        req.threads = config.threads;
        MttkrpResult res = mttkrp(req);
        rec.mode_time[static_cast<std::size_t>(n)] = res.time;

        GramMatrix h = gram_hadamard(model.factors, n);
        model.factors[static_cast<std::size_t>(n)] = solve_psd(h, res.m);
        model.normalize_mode(n);

        if (n == n_modes - 1) {
            m_last = std::move(res.m);
            h_last = std::move(h);
        }
    }

    rec.fit = fit_from_last_mode(norm_x, model, m_last, h_last);
    rec.total_seconds = wall.seconds();
    return rec;
}

FitResult fit(const DenseTensor& x, const KruskalModel& model, int threads) {
    validate_model(x, model);
    const std::int64_t n_last = x.shape().ndim() - 1;
    MttkrpRequest req;
    req.tensor = &x;
    req.factors = model.factors;
    req.mode = n_last;
    req.algo = MttkrpAlgo::one_step;
    req.threads = threads;
    const MttkrpResult res = mttkrp_one_step(req);
    const GramMatrix h = gram_hadamard(model.factors, n_last);
    return fit_from_last_mode(tensor_norm(x), model, res.m, h);
}

AlsResult cp_als(const DenseTensor& x, const AlsConfig& config) {
    if (config.rank < 1) throw std::invalid_argument("cp_als: rank must be >= 1");
    if (config.max_iters < 0) throw std::invalid_argument("cp_als: max_iters must be >= 0");
    if (config.threads < 1) throw std::invalid_argument("cp_als: threads must be >= 1");

    AlsResult result;
    result.trace.tensor_norm = tensor_norm(x);
    result.model = KruskalModel::random(x.shape(), config.rank, config.seed);

    if (result.trace.tensor_norm == 0.0) {
        // Nothing to fit: the least-squares solution is identically zero.
        for (auto& u : result.model.factors) u.fill(0.0);
        result.model.lambda.assign(static_cast<std::size_t>(config.rank), 0.0);
        result.trace.zero_tensor = true;
        return result;
    }

    double prev_fit = 0.0;
    for (int iter = 1; iter <= config.max_iters; ++iter) {
        AlsIterRecord rec = als_iterate(x, result.model, config, result.trace.tensor_norm, iter);
        const double f = rec.fit.fit;
        result.trace.iters.push_back(std::move(rec));
        if (iter > 1 && std::abs(f - prev_fit) < config.tol) break;
        prev_fit = f;
    }
    return result;
}

}  // namespace dmtk
