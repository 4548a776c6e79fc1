#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmtk/mttkrp.hpp"
#include "dmtk/shape.hpp"
#include "dmtk/tensor.hpp"
#include "dmtk/timing.hpp"

namespace dmtk::bench {

enum class Dist { uniform, ones };
enum class Stat { median, mean };

/// Seeded synthetic tensor; `uniform` draws are uniform(0,1), identical for
/// the same seed on every platform.
DenseTensor gen_tensor(const Shape& shape, std::uint64_t seed, Dist dist = Dist::uniform);

/// One uniform(0,1) matrix per mode, I_n x rank, seeds derived from `seed`.
std::vector<FactorMatrix> gen_factors(const Shape& shape, std::int64_t rank, std::uint64_t seed);

FactorMatrix gen_matrix(std::int64_t rows, std::int64_t cols, std::uint64_t seed);

struct Preset {
    const char* name;
    std::vector<std::int64_t> dims;
};

/// Named shapes: measurement-scale presets plus "-small" variants with the
/// same aspect ratios shrunk to roughly a million entries.
std::span<const Preset> presets();
const Preset* find_preset(const std::string& name);

/// Raised when --check finds a result outside tolerance of the brute-force
/// reference.
struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One CSV row of `mttkrp` / `krp` output. String fields hold "-" when a
/// column does not apply.
struct BenchRow {
    std::string command;
    std::string preset = "-";
    std::string dims;
    std::int64_t rank = 0;
    std::string mode = "-";
    std::string algo = "-";
    std::string order = "-";
    int threads = 1;
    std::string stat;
    int trials = 0;
    std::string checked = "no";
    TimeBreakdown time;
};

/// One CSV row of `cp` output: a per-mode row (fit/residual "-") or an
/// iteration summary row (mode "all").
struct CpRow {
    std::string command = "cp";
    std::string preset = "-";
    std::string dims;
    std::int64_t rank = 0;
    int iter = 0;
    std::string mode = "-";
    int threads = 1;
    std::string fit = "-";
    std::string residual = "-";
    TimeBreakdown time;
};

extern const char* const kBenchCsvHeader;
extern const char* const kCpCsvHeader;

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);
void write_cp_csv(std::ostream& out, std::span<const CpRow> rows);

std::string dims_string(std::span<const std::int64_t> dims);
std::string format_double(double v);

struct MttkrpBenchArgs {
    Shape shape{std::vector<std::int64_t>{1}};
    std::string preset = "-";
    std::int64_t rank = 10;
    std::vector<std::int64_t> modes;  // empty: all modes (two_step: interior modes)
    MttkrpAlgo algo = MttkrpAlgo::one_step;
    TwoStepOrder order = TwoStepOrder::automatic;
    int threads = 1;
    int trials = 10;
    std::uint64_t seed = 0;
    Stat stat = Stat::median;
    bool check = false;
    const DenseTensor* tensor = nullptr;  // preloaded input; generated when null
};

/// One untimed warm-up then `trials` timed passes per mode; each category is
/// reduced to its median or mean independently. With `check` every timed
/// result is compared against the exhaustive reference (relative Frobenius
/// error <= 1e-12) whenever the tensor has at most 10^6 entries; larger
/// inputs emit a warning and record "skipped".
std::vector<BenchRow> bench_mttkrp(const MttkrpBenchArgs& args);

struct KrpBenchArgs {
    std::vector<std::int64_t> dims;
    std::string preset = "-";
    std::int64_t rank = 10;
    int threads = 1;
    int trials = 100;
    std::uint64_t seed = 0;
    Stat stat = Stat::mean;
    bool check = false;
};

/// Times the cached-partial generator against the rebuild-every-row variant
/// over the same inputs; one row per variant ("reuse", "naive"). `check`
/// demands bitwise equality with the column-wise Kronecker construction.
std::vector<BenchRow> bench_krp(const KrpBenchArgs& args);

struct CpBenchArgs {
    Shape shape{std::vector<std::int64_t>{1}};
    std::string preset = "-";
    std::vector<std::int64_t> ranks = {10};
    int iters = 10;
    double tol = 0;  // 0: always run all `iters` iterations
    MttkrpAlgo algo = MttkrpAlgo::automatic;
    TwoStepOrder order = TwoStepOrder::automatic;
    int threads = 1;
    std::uint64_t seed = 0;
    const DenseTensor* tensor = nullptr;
};

/// Runs the full decomposition once per requested rank and emits one row per
/// (iteration, mode) plus an iteration summary row carrying fit and relative
/// residual.
std::vector<CpRow> bench_cp(const CpBenchArgs& args);

const char* algo_name(MttkrpAlgo algo);
const char* order_name(TwoStepOrder order);

}  // namespace dmtk::bench
