#include "dmtk/bench.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>

#include "dmtk/cp_als.hpp"
#include "dmtk/krp.hpp"
#include "dmtk/oracle.hpp"

namespace dmtk::bench {

namespace {

constexpr std::int64_t kCheckLimit = 1'000'000;
constexpr double kCheckTolerance = 1e-12;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t mode_seed(std::uint64_t seed, std::int64_t mode) {
    return seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(mode + 1);
}

double reduce_stat(std::vector<double> values, Stat stat) {
    if (values.empty()) return 0;
    if (stat == Stat::mean) {
        double sum = 0;
        for (double v : values) sum += v;
        return sum / static_cast<double>(values.size());
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TimeBreakdown reduce_times(const std::vector<TimeBreakdown>& trials, Stat stat) {
    auto field = [&](double TimeBreakdown::* member) {
        std::vector<double> values;
        values.reserve(trials.size());
        for (const TimeBreakdown& t : trials) values.push_back(t.*member);
        return reduce_stat(std::move(values), stat);
    };
    TimeBreakdown out;
    out.matmul = field(&TimeBreakdown::matmul);
    out.krp_full = field(&TimeBreakdown::krp_full);
    out.krp_partial = field(&TimeBreakdown::krp_partial);
    out.matvec = field(&TimeBreakdown::matvec);
    out.reduce = field(&TimeBreakdown::reduce);
    out.reorder = field(&TimeBreakdown::reorder);
    out.other = field(&TimeBreakdown::other);
    out.total = field(&TimeBreakdown::total);
    return out;
}

const char* stat_name(Stat stat) { return stat == Stat::median ? "median" : "mean"; }

double rel_frobenius(const FactorMatrix& got, const FactorMatrix& want) {
    double diff2 = 0;
    double ref2 = 0;
    const double* g = got.data();
    const double* w = want.data();
    const std::int64_t n = got.rows() * got.cols();
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = g[i] - w[i];
        diff2 += d * d;
        ref2 += w[i] * w[i];
    }
    if (ref2 == 0) return std::sqrt(diff2);
    return std::sqrt(diff2 / ref2);
}

void append_csv_times(std::string& line, const TimeBreakdown& t) {
    for (double v : {t.total, t.matmul, t.krp_full, t.krp_partial, t.matvec, t.reduce, t.reorder,
                     t.other}) {
        line += ',';
        line += format_double(v);
    }
}

}  // namespace

DenseTensor gen_tensor(const Shape& shape, std::uint64_t seed, Dist dist) {
    std::vector<double> values(static_cast<std::size_t>(shape.total()));
    if (dist == Dist::ones) {
        std::fill(values.begin(), values.end(), 1.0);
    } else {
        std::mt19937_64 rng(seed);
        for (double& v : values) v = uniform01(rng);
    }
    return DenseTensor(shape, std::move(values));
}

FactorMatrix gen_matrix(std::int64_t rows, std::int64_t cols, std::uint64_t seed) {
    FactorMatrix m(rows, cols);
    std::mt19937_64 rng(seed);
    double* p = m.data();
    const std::int64_t n = rows * cols;
    for (std::int64_t i = 0; i < n; ++i) p[i] = uniform01(rng);
    return m;
}

std::vector<FactorMatrix> gen_factors(const Shape& shape, std::int64_t rank, std::uint64_t seed) {
    if (rank < 1) throw std::invalid_argument("gen_factors: rank must be >= 1");
    std::vector<FactorMatrix> factors;
    factors.reserve(static_cast<std::size_t>(shape.ndim()));
    for (std::int64_t n = 0; n < shape.ndim(); ++n) {
        factors.push_back(gen_matrix(shape.dim(n), rank, mode_seed(seed, n)));
    }
    return factors;
}

std::span<const Preset> presets() {
    static const std::vector<Preset> table = {
        {"fmri3d", {225, 59, 19900}},
        {"fmri4d", {225, 59, 200, 200}},
        {"cube3", {900, 900, 900}},
        {"cube4", {165, 165, 165, 165}},
        {"cube5", {60, 60, 60, 60, 60}},
        {"cube6", {30, 30, 30, 30, 30, 30}},
        {"fmri3d-small", {35, 9, 3098}},
        {"fmri4d-small", {47, 12, 42, 42}},
        {"cube3-small", {100, 100, 100}},
        {"cube4-small", {32, 32, 32, 32}},
        {"cube5-small", {16, 16, 16, 16, 16}},
        {"cube6-small", {10, 10, 10, 10, 10, 10}},
    };
    return table;
}

const Preset* find_preset(const std::string& name) {
    for (const Preset& p : presets()) {
        if (name == p.name) return &p;
    }
    return nullptr;
}

const char* const kBenchCsvHeader =
    "command,preset,dims,rank,mode,algo,order,threads,stat,trials,checked,"
    "t_total,t_matmul,t_krp_full,t_krp_partial,t_matvec,t_reduce,t_reorder,t_other";

const char* const kCpCsvHeader =
    "command,preset,dims,rank,iter,mode,threads,fit,residual,"
    "t_total,t_matmul,t_krp_full,t_krp_partial,t_matvec,t_reduce,t_reorder,t_other";

std::string dims_string(std::span<const std::int64_t> dims) {
    std::string out;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) out += 'x';
        out += std::to_string(dims[i]);
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
    out << kBenchCsvHeader << '\n';
    for (const BenchRow& r : rows) {
        std::string line = r.command;
        line += ',';
        line += r.preset;
        line += ',';
        line += r.dims;
        line += ',';
        line += std::to_string(r.rank);
        line += ',';
        line += r.mode;
        line += ',';
        line += r.algo;
        line += ',';
        line += r.order;
        line += ',';
        line += std::to_string(r.threads);
        line += ',';
        line += r.stat;
        line += ',';
        line += std::to_string(r.trials);
        line += ',';
        line += r.checked;
        append_csv_times(line, r.time);
        out << line << '\n';
    }
    out.flush();
}

void write_cp_csv(std::ostream& out, std::span<const CpRow> rows) {
    out << kCpCsvHeader << '\n';
    for (const CpRow& r : rows) {
        std::string line = r.command;
        line += ',';
        line += r.preset;
        line += ',';
        line += r.dims;
        line += ',';
        line += std::to_string(r.rank);
        line += ',';
        line += std::to_string(r.iter);
        line += ',';
        line += r.mode;
        line += ',';
        line += std::to_string(r.threads);
        line += ',';
        line += r.fit;
        line += ',';
        line += r.residual;
        append_csv_times(line, r.time);
        out << line << '\n';
    }
    out.flush();
}

const char* algo_name(MttkrpAlgo algo) {
    switch (algo) {
        case MttkrpAlgo::baseline: return "baseline";
        case MttkrpAlgo::one_step: return "onestep";
        case MttkrpAlgo::two_step: return "twostep";
        case MttkrpAlgo::automatic: return "auto";
    }
    return "?";
}

const char* order_name(TwoStepOrder order) {
    switch (order) {
        case TwoStepOrder::automatic: return "auto";
        case TwoStepOrder::left: return "left";
        case TwoStepOrder::right: return "right";
    }
    return "?";
}

std::vector<BenchRow> bench_mttkrp(const MttkrpBenchArgs& args) {
    if (args.trials < 1) throw std::invalid_argument("bench_mttkrp: trials must be >= 1");
    std::optional<DenseTensor> generated;
    const DenseTensor* x = args.tensor;
    if (!x) {
        generated.emplace(gen_tensor(args.shape, args.seed, Dist::uniform));
        x = &*generated;
    }
    const Shape& shape = x->shape();
    const std::int64_t n = shape.ndim();

    std::vector<std::int64_t> modes = args.modes;
    if (modes.empty()) {
        if (args.algo == MttkrpAlgo::two_step) {
            for (std::int64_t m = 1; m + 1 < n; ++m) modes.push_back(m);
            if (modes.empty()) {
                throw std::invalid_argument(
                    "two-step applies to interior modes only and this tensor has none; "
                    "pick onestep or baseline");
            }
        } else {
            for (std::int64_t m = 0; m < n; ++m) modes.push_back(m);
        }
    }
    for (std::int64_t m : modes) {
        if (m < 0 || m >= n) {
            throw std::invalid_argument("mode " + std::to_string(m) + " out of range for " +
                                        std::to_string(n) + " modes");
        }
        if (args.algo == MttkrpAlgo::two_step && (m == 0 || m == n - 1)) {
            throw std::invalid_argument("two-step does not apply to boundary mode " +
                                        std::to_string(m) + "; use onestep or baseline");
        }
    }

    const std::vector<FactorMatrix> factors = gen_factors(shape, args.rank, args.seed + 1);
    const bool check_feasible = shape.total() <= kCheckLimit;
    if (args.check && !check_feasible) {
        std::cerr << "warning: --check skipped, tensor has " << shape.total()
                  << " entries (limit " << kCheckLimit << ")\n";
    }

    std::vector<BenchRow> rows;
    for (std::int64_t mode : modes) {
        MttkrpRequest request;
        request.tensor = x;
        request.factors = factors;
        request.mode = mode;
        request.algo = args.algo;
        request.order = args.order;
        request.threads = args.threads;

        std::optional<FactorMatrix> reference;
        if (args.check && check_feasible) {
            reference.emplace(oracle::mttkrp_loops(*x, factors, mode));
        }

        mttkrp(request);  // warm-up
        std::vector<TimeBreakdown> trials;
        trials.reserve(static_cast<std::size_t>(args.trials));
        for (int t = 0; t < args.trials; ++t) {
            MttkrpResult res = mttkrp(request);
            trials.push_back(res.time);
            if (reference) {
                const double err = rel_frobenius(res.m, *reference);
                if (!(err <= kCheckTolerance)) {
                    throw CheckFailure("mttkrp check failed: mode " + std::to_string(mode) +
                                       " algo " + algo_name(args.algo) + " trial " +
                                       std::to_string(t) + " relative error " +
                                       format_double(err));
                }
            }
        }

        MttkrpAlgo resolved = args.algo;
        if (resolved == MttkrpAlgo::automatic) {
            resolved = (mode == 0 || mode == n - 1) ? MttkrpAlgo::one_step : MttkrpAlgo::two_step;
        }
        BenchRow row;
        row.command = "mttkrp";
        row.preset = args.preset;
        row.dims = dims_string(shape.dims());
        row.rank = args.rank;
        row.mode = std::to_string(mode);
        row.algo = algo_name(resolved);
        if (resolved == MttkrpAlgo::two_step) {
            const TwoStepOrder order =
                args.order == TwoStepOrder::automatic ? choose_order(shape, mode) : args.order;
            row.order = order_name(order);
        }
        row.threads = args.threads;
        row.stat = stat_name(args.stat);
        row.trials = args.trials;
        row.checked = args.check ? (check_feasible ? "yes" : "skipped") : "no";
        row.time = reduce_times(trials, args.stat);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<BenchRow> bench_krp(const KrpBenchArgs& args) {
    if (args.trials < 1) throw std::invalid_argument("bench_krp: trials must be >= 1");
    if (args.dims.empty()) throw std::invalid_argument("bench_krp: need at least one input");
    const Shape shape(args.dims);  // validates extents and the row-count product

    std::vector<FactorMatrix> inputs;
    inputs.reserve(args.dims.size());
    FactorList ptrs;
    for (std::size_t z = 0; z < args.dims.size(); ++z) {
        inputs.push_back(gen_matrix(args.dims[z], args.rank,
                                    mode_seed(args.seed, static_cast<std::int64_t>(z))));
    }
    for (const FactorMatrix& m : inputs) ptrs.push_back(&m);

    const bool check_feasible = shape.total() <= kCheckLimit;
    if (args.check && !check_feasible) {
        std::cerr << "warning: --check skipped, product has " << shape.total()
                  << " rows (limit " << kCheckLimit << ")\n";
    }
    std::optional<FactorMatrix> reference;
    if (args.check && check_feasible) reference.emplace(oracle::krp_kron(ptrs));

    std::vector<BenchRow> rows;
    struct Variant {
        const char* name;
        FactorMatrix (*run)(const FactorList&, int, KrpStats*);
    };
    for (const Variant& variant : {Variant{"reuse", &krp}, Variant{"naive", &krp_naive}}) {
        variant.run(ptrs, args.threads, nullptr);  // warm-up
        std::vector<TimeBreakdown> trials;
        trials.reserve(static_cast<std::size_t>(args.trials));
        for (int t = 0; t < args.trials; ++t) {
            Stopwatch watch;
            FactorMatrix out = variant.run(ptrs, args.threads, nullptr);
            TimeBreakdown time;
            time.krp_full = watch.seconds();
            time.total = time.krp_full;
            trials.push_back(time);
            if (reference && !(out == *reference)) {
                throw CheckFailure(std::string("krp check failed: ") + variant.name +
                                   " variant differs from the Kronecker reference at trial " +
                                   std::to_string(t));
            }
        }
        BenchRow row;
        row.command = "krp";
        row.preset = args.preset;
        row.dims = dims_string(args.dims);
        row.rank = args.rank;
        row.algo = variant.name;
        row.threads = args.threads;
        row.stat = stat_name(args.stat);
        row.trials = args.trials;
        row.checked = args.check ? (check_feasible ? "yes" : "skipped") : "no";
        row.time = reduce_times(trials, args.stat);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<CpRow> bench_cp(const CpBenchArgs& args) {
    if (args.ranks.empty()) throw std::invalid_argument("bench_cp: need at least one rank");
    std::optional<DenseTensor> generated;
    const DenseTensor* x = args.tensor;
    if (!x) {
        generated.emplace(gen_tensor(args.shape, args.seed, Dist::uniform));
        x = &*generated;
    }
    const Shape& shape = x->shape();
    const std::string dims = dims_string(shape.dims());

    std::vector<CpRow> rows;
    for (std::int64_t rank : args.ranks) {
        AlsConfig config;
        config.rank = rank;
        config.max_iters = args.iters;
        config.tol = args.tol;
        config.seed = args.seed;
        config.threads = args.threads;
        config.algo = args.algo;
        config.order = args.order;
        AlsResult result = cp_als(*x, config);

        for (const AlsIterRecord& rec : result.trace.iters) {
            TimeBreakdown sum;
            for (std::size_t mode = 0; mode < rec.mode_time.size(); ++mode) {
                CpRow row;
                row.preset = args.preset;
                row.dims = dims;
                row.rank = rank;
                row.iter = rec.iter;
                row.mode = std::to_string(mode);
                row.threads = args.threads;
                row.time = rec.mode_time[mode];
                sum.accumulate(rec.mode_time[mode]);
                rows.push_back(std::move(row));
            }
            CpRow all;
            all.preset = args.preset;
            all.dims = dims;
            all.rank = rank;
            all.iter = rec.iter;
            all.mode = "all";
            all.threads = args.threads;
            if (rec.fit.defined) {
                all.fit = format_double(rec.fit.fit);
                all.residual = format_double(rec.fit.rel_residual);
            }
            all.time = sum;
            all.time.other += std::max(0.0, rec.total_seconds - sum.total);
            all.time.total = rec.total_seconds;
            rows.push_back(std::move(all));
        }
    }
    return rows;
}

}  // namespace dmtk::bench
