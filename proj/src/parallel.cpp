#include "dmtk/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dmtk {

int default_threads() {
    if (const char* env = std::getenv("DMTK_THREADS"); env && *env) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

BlockRange balanced_block(std::int64_t total, int threads, int t) {
    if (threads < 1 || t < 0 || t >= threads) {
        throw std::invalid_argument("balanced_block: bad thread index");
    }
    const std::int64_t q = total / threads;
    const std::int64_t r = total % threads;
    const std::int64_t begin = t * q + std::min<std::int64_t>(t, r);
    return {begin, begin + q + (t < r ? 1 : 0)};
}

BlockRange ceil_chunk(std::int64_t total, int threads, int t) {
    if (threads < 1 || t < 0 || t >= threads) {
        throw std::invalid_argument("ceil_chunk: bad thread index");
    }
    const std::int64_t width = (total + threads - 1) / threads;
    const std::int64_t begin = std::min<std::int64_t>(total, t * width);
    return {begin, std::min<std::int64_t>(total, begin + width)};
}

void run_on_threads(int threads, const std::function<void(int)>& body) {
    if (threads < 1) throw std::invalid_argument("run_on_threads: threads must be >= 1");
    if (threads == 1) {
        body(0);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads) - 1);
    for (int t = 1; t < threads; ++t) {
        workers.emplace_back(body, t);
    }
    body(0);
    for (auto& w : workers) w.join();
}

}  // namespace dmtk
