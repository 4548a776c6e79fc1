#include "dmtk/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace dmtk::kernels {

namespace {

const Backend* detect() {
    if (const char* env = std::getenv("DMTK_SIMD"); env && *env) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_backend();
        if (std::strcmp(env, "avx2") == 0) {
            if (const Backend* b = avx2_backend()) return b;
            return &scalar_backend();  // requested but unavailable: degrade quietly
        }
        // "auto" or anything unrecognized falls through to detection
    }
    if (const Backend* b = avx2_backend()) return b;
    return &scalar_backend();
}

std::atomic<const Backend*> forced{nullptr};

}  // namespace

const Backend& active() {
    if (const Backend* f = forced.load(std::memory_order_acquire)) return *f;
    static const Backend* detected = detect();
    return *detected;
}

void force_backend(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        forced.store(&scalar_backend(), std::memory_order_release);
        return;
    }
    if (std::strcmp(name, "avx2") == 0) {
        const Backend* b = avx2_backend();
        if (!b) throw std::runtime_error("kernels: avx2 backend unavailable on this machine");
        forced.store(b, std::memory_order_release);
        return;
    }
    throw std::invalid_argument("kernels: unknown backend '" + std::string(name) + "'");
}

void reset_backend() { forced.store(nullptr, std::memory_order_release); }

}  // namespace dmtk::kernels
