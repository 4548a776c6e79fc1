// dmtk: benchmark driver for the dense-tensor MTTKRP / CP-ALS kernels.
//
// Subcommands: gen (write a tensor file), mttkrp, cp, krp. Results go to
// stdout as CSV unless --out names a file. Exit codes: 0 success, 1 check
// failure, 2 usage or input errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dmtk/bench.hpp"
#include "dmtk/parallel.hpp"
#include "dmtk/tensor_io.hpp"

namespace {

using dmtk::DenseTensor;
using dmtk::MttkrpAlgo;
using dmtk::Shape;
using dmtk::TwoStepOrder;

MttkrpAlgo parse_algo(const std::string& s) {
    if (s == "baseline") return MttkrpAlgo::baseline;
    if (s == "onestep") return MttkrpAlgo::one_step;
    if (s == "twostep") return MttkrpAlgo::two_step;
    if (s == "auto") return MttkrpAlgo::automatic;
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

TwoStepOrder parse_order(const std::string& s) {
    if (s == "auto") return TwoStepOrder::automatic;
    if (s == "left") return TwoStepOrder::left;
    if (s == "right") return TwoStepOrder::right;
    throw std::invalid_argument("unknown order '" + s + "'");
}

dmtk::bench::Stat parse_stat(const std::string& s) {
    return s == "mean" ? dmtk::bench::Stat::mean : dmtk::bench::Stat::median;
}

std::string preset_help() {
    std::string help = "named shape; one of:";
    for (const dmtk::bench::Preset& p : dmtk::bench::presets()) {
        help += "\n  ";
        help += p.name;
        help += " (";
        help += dmtk::bench::dims_string(p.dims);
        help += ")";
    }
    return help;
}

std::vector<std::int64_t> resolve_dims(const std::vector<std::int64_t>& dims,
                                       const std::string& preset) {
    if (!preset.empty()) {
        const dmtk::bench::Preset* p = dmtk::bench::find_preset(preset);
        if (!p) throw std::invalid_argument("unknown preset '" + preset + "'");
        return p->dims;
    }
    if (dims.empty()) throw std::invalid_argument("one of --dims / --preset is required");
    return dims;
}

int resolve_threads(int flag_value) {
    return flag_value > 0 ? flag_value : dmtk::default_threads();
}

/// Tensor source shared by mttkrp and cp: a file, a preset, or --dims.
struct TensorSource {
    std::vector<std::int64_t> dims;
    std::string preset;
    std::string in_path;

    void add_options(CLI::App* cmd) {
        auto* dims_opt = cmd->add_option("--dims", dims, "tensor extents, e.g. 100,100,100")
                             ->delimiter(',');
        auto* preset_opt = cmd->add_option("--preset", preset, preset_help());
        auto* in_opt = cmd->add_option("--in", in_path, "read the tensor from a file")
                           ->check(CLI::ExistingFile);
        dims_opt->excludes(preset_opt)->excludes(in_opt);
        preset_opt->excludes(in_opt);
    }

    DenseTensor load(std::uint64_t seed) const {
        if (!in_path.empty()) return dmtk::read_tensor(in_path);
        return dmtk::bench::gen_tensor(Shape(resolve_dims(dims, preset)), seed,
                                       dmtk::bench::Dist::uniform);
    }

    std::string preset_label() const { return preset.empty() ? "-" : preset; }
};

template <typename Rows>
void emit(const std::string& out_path, const Rows& rows,
          void (*writer)(std::ostream&, Rows)) {
    if (out_path.empty()) {
        writer(std::cout, rows);
        return;
    }
    std::ofstream file(out_path, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    writer(file, rows);
    if (!file) throw std::runtime_error("write to '" + out_path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dense tensor MTTKRP / CP-ALS benchmarks"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a tensor and write it to a file");
    std::vector<std::int64_t> gen_dims;
    std::string gen_preset, gen_dist = "uniform", gen_out;
    std::uint64_t gen_seed = 0;
    {
        auto* dims_opt =
            gen->add_option("--dims", gen_dims, "tensor extents, e.g. 100,100,100")->delimiter(',');
        auto* preset_opt = gen->add_option("--preset", gen_preset, preset_help());
        dims_opt->excludes(preset_opt);
        gen->add_option("--seed", gen_seed, "RNG seed");
        gen->add_option("--dist", gen_dist, "entry distribution")
            ->check(CLI::IsMember({"uniform", "ones"}));
        gen->add_option("--out", gen_out, "output file")->required();
    }

    // mttkrp
    auto* mtt = app.add_subcommand("mttkrp", "time MTTKRP across modes");
    TensorSource mtt_src;
    std::vector<std::int64_t> mtt_modes;
    std::string mtt_algo = "onestep", mtt_order = "auto", mtt_stat = "median", mtt_out;
    std::int64_t mtt_rank = 10;
    int mtt_threads = 0, mtt_trials = 10;
    std::uint64_t mtt_seed = 0;
    bool mtt_check = false;
    {
        mtt_src.add_options(mtt);
        mtt->add_option("--rank", mtt_rank, "number of factor columns")
            ->check(CLI::PositiveNumber);
        mtt->add_option("--mode", mtt_modes, "mode(s) to run; default: all that apply")
            ->delimiter(',');
        mtt->add_option("--algo", mtt_algo, "algorithm")
            ->check(CLI::IsMember({"baseline", "onestep", "twostep"}));
        mtt->add_option("--order", mtt_order, "two-step partial order")
            ->check(CLI::IsMember({"auto", "left", "right"}));
        mtt->add_option("--threads", mtt_threads, "worker threads (0: DMTK_THREADS or hardware)")
            ->check(CLI::NonNegativeNumber);
        mtt->add_option("--trials", mtt_trials, "timed repetitions after one warm-up")
            ->check(CLI::PositiveNumber);
        mtt->add_option("--seed", mtt_seed, "RNG seed");
        mtt->add_option("--stat", mtt_stat, "per-category reduction across trials")
            ->check(CLI::IsMember({"median", "mean"}));
        mtt->add_option("--out", mtt_out, "CSV file (default: stdout)");
        mtt->add_flag("--check", mtt_check, "verify every result against the exhaustive reference");
    }

    // cp
    auto* cp = app.add_subcommand("cp", "time CP-ALS per iteration and mode");
    TensorSource cp_src;
    std::vector<std::int64_t> cp_ranks;
    std::string cp_algo = "auto", cp_order = "auto", cp_out;
    std::int64_t cp_rank = 10;
    int cp_threads = 0, cp_iters = 10;
    double cp_tol = 0;
    std::uint64_t cp_seed = 0;
    {
        cp_src.add_options(cp);
        auto* rank_opt =
            cp->add_option("--rank", cp_rank, "decomposition rank")->check(CLI::PositiveNumber);
        cp->add_option("--ranks", cp_ranks, "rank sweep, e.g. 10,15,20,25,30")
            ->delimiter(',')
            ->excludes(rank_opt);
        cp->add_option("--iters", cp_iters, "ALS iterations")->check(CLI::PositiveNumber);
        cp->add_option("--tol", cp_tol, "fit-change stop tolerance (0: run all iterations)");
        cp->add_option("--algo", cp_algo, "MTTKRP algorithm")
            ->check(CLI::IsMember({"auto", "baseline", "onestep", "twostep"}));
        cp->add_option("--order", cp_order, "two-step partial order")
            ->check(CLI::IsMember({"auto", "left", "right"}));
        cp->add_option("--threads", cp_threads, "worker threads (0: DMTK_THREADS or hardware)")
            ->check(CLI::NonNegativeNumber);
        cp->add_option("--seed", cp_seed, "RNG seed");
        cp->add_option("--out", cp_out, "CSV file (default: stdout)");
    }

    // krp
    auto* krp = app.add_subcommand("krp", "time Khatri-Rao row generation, cached vs naive");
    std::vector<std::int64_t> krp_dims;
    std::string krp_preset, krp_stat = "mean", krp_out;
    std::int64_t krp_rank = 10;
    int krp_threads = 0, krp_trials = 100;
    std::uint64_t krp_seed = 0;
    bool krp_check = false;
    {
        auto* dims_opt = krp->add_option("--dims", krp_dims, "input row counts, e.g. 100,100,100")
                             ->delimiter(',');
        auto* preset_opt = krp->add_option("--preset", krp_preset, preset_help());
        dims_opt->excludes(preset_opt);
        krp->add_option("--rank", krp_rank, "shared column count")->check(CLI::PositiveNumber);
        krp->add_option("--threads", krp_threads, "worker threads (0: DMTK_THREADS or hardware)")
            ->check(CLI::NonNegativeNumber);
        krp->add_option("--trials", krp_trials, "timed repetitions after one warm-up")
            ->check(CLI::PositiveNumber);
        krp->add_option("--seed", krp_seed, "RNG seed");
        krp->add_option("--stat", krp_stat, "per-category reduction across trials")
            ->check(CLI::IsMember({"median", "mean"}));
        krp->add_option("--out", krp_out, "CSV file (default: stdout)");
        krp->add_flag("--check", krp_check, "require bitwise agreement with the Kronecker form");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            const Shape shape(resolve_dims(gen_dims, gen_preset));
            const auto dist =
                gen_dist == "ones" ? dmtk::bench::Dist::ones : dmtk::bench::Dist::uniform;
            dmtk::write_tensor(gen_out, dmtk::bench::gen_tensor(shape, gen_seed, dist));
            std::cerr << "wrote " << gen_out << " (" << dmtk::bench::dims_string(shape.dims())
                      << ", " << shape.total() << " entries)\n";
        } else if (*mtt) {
            const DenseTensor tensor = mtt_src.load(mtt_seed);
            dmtk::bench::MttkrpBenchArgs args;
            args.tensor = &tensor;
            args.preset = mtt_src.preset_label();
            args.rank = mtt_rank;
            args.modes = mtt_modes;
            args.algo = parse_algo(mtt_algo);
            args.order = parse_order(mtt_order);
            args.threads = resolve_threads(mtt_threads);
            args.trials = mtt_trials;
            args.seed = mtt_seed;
            args.stat = parse_stat(mtt_stat);
            args.check = mtt_check;
            const auto rows = dmtk::bench::bench_mttkrp(args);
            emit<std::span<const dmtk::bench::BenchRow>>(mtt_out, rows,
                                                         &dmtk::bench::write_bench_csv);
        } else if (*cp) {
            const DenseTensor tensor = cp_src.load(cp_seed);
            dmtk::bench::CpBenchArgs args;
            args.tensor = &tensor;
            args.preset = cp_src.preset_label();
            args.ranks = cp_ranks.empty() ? std::vector<std::int64_t>{cp_rank} : cp_ranks;
            args.iters = cp_iters;
            args.tol = cp_tol;
            args.algo = parse_algo(cp_algo);
            args.order = parse_order(cp_order);
            args.threads = resolve_threads(cp_threads);
            args.seed = cp_seed;
            const auto rows = dmtk::bench::bench_cp(args);
            emit<std::span<const dmtk::bench::CpRow>>(cp_out, rows, &dmtk::bench::write_cp_csv);
        } else if (*krp) {
            dmtk::bench::KrpBenchArgs args;
            args.dims = resolve_dims(krp_dims, krp_preset);
            args.preset = krp_preset.empty() ? "-" : krp_preset;
            args.rank = krp_rank;
            args.threads = resolve_threads(krp_threads);
            args.trials = krp_trials;
            args.seed = krp_seed;
            args.stat = parse_stat(krp_stat);
            args.check = krp_check;
            const auto rows = dmtk::bench::bench_krp(args);
            emit<std::span<const dmtk::bench::BenchRow>>(krp_out, rows,
                                                         &dmtk::bench::write_bench_csv);
        }
    } catch (const dmtk::bench::CheckFailure& e) {
        std::cerr << "check failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
