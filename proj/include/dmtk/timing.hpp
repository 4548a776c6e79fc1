#pragma once

#include <chrono>

namespace dmtk {

/// Wall-clock seconds per work category of one MTTKRP / KRP / ALS pass.
/// Categories an algorithm never enters stay exactly 0. Inside threaded
/// regions each worker accumulates its own breakdown; mean_of() averages
/// them so the category sum stays below the region's wall time.
struct TimeBreakdown {
    double matmul = 0;
    double krp_full = 0;
    double krp_partial = 0;
    double matvec = 0;
    double reduce = 0;
    double reorder = 0;
    double other = 0;
    double total = 0;

    double category_sum() const {
        return matmul + krp_full + krp_partial + matvec + reduce + reorder + other;
    }

    void accumulate(const TimeBreakdown& o) {
        matmul += o.matmul;
        krp_full += o.krp_full;
        krp_partial += o.krp_partial;
        matvec += o.matvec;
        reduce += o.reduce;
        reorder += o.reorder;
        other += o.other;
        total += o.total;
    }

    void scale(double s) {
        matmul *= s;
        krp_full *= s;
        krp_partial *= s;
        matvec *= s;
        reduce *= s;
        reorder *= s;
        other *= s;
        total *= s;
    }
};

class Stopwatch {
public:
    Stopwatch() : start_(clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }
    double lap() {
        const auto now = clock::now();
        const double dt = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return dt;
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_;
};

}  // namespace dmtk
