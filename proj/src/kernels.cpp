#include "ktap/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ktap/errors.hpp"

namespace ktap::kern {

const Ops& scalar_ops();
#if KTAP_HAVE_AVX2
const Ops& avx2_ops();
#endif

namespace {

bool cpu_has_avx2() {
#if KTAP_HAVE_AVX2
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend pick_initial() {
    if (const char* env = std::getenv("KTAP_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& active_slot() {
    static std::atomic<Backend> slot{pick_initial()};
    return slot;
}

} // namespace

bool backend_available(Backend b) {
    switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return cpu_has_avx2();
    }
    return false;
}

const Ops& ops(Backend b) {
    switch (b) {
    case Backend::scalar: return scalar_ops();
    case Backend::avx2:
#if KTAP_HAVE_AVX2
        if (cpu_has_avx2()) return avx2_ops();
#endif
        throw invalid_parameter_error("avx2 kernel backend not available on this host");
    }
    throw invalid_parameter_error("unknown kernel backend");
}

const Ops& ops() { return ops(active_slot().load(std::memory_order_relaxed)); }

Backend active_backend() { return active_slot().load(std::memory_order_relaxed); }

std::string backend_name() {
    switch (active_backend()) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    }
    return "unknown";
}

void force_backend(Backend b) {
    if (!backend_available(b))
        throw invalid_parameter_error("requested kernel backend not available");
    active_slot().store(b, std::memory_order_relaxed);
}

} // namespace ktap::kern
