#pragma once

#include <cstddef>
#include <string>

namespace ktap::kern {

/// CPU backends for the arithmetic kernels. The scalar backend is the
/// reference implementation and is always available; vector backends are
/// selected at runtime when the host CPU supports them.
enum class Backend { scalar, avx2 };

/// Flat table of the data-parallel primitives used by the model's inner
/// loops. Reductions (dot, sum, ...) may associate differently between
/// backends; elementwise ops (add_scaled, rk4_combine) are bit-identical.
struct Ops {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*abs_max)(const double* a, std::size_t n);
    double (*weighted_abs_diff)(const double* f, const double* g, const double* w,
                                std::size_t n);
    // dst = x + c*k
    void (*add_scaled)(double* dst, const double* x, const double* k, double c,
                       std::size_t n);
    // dst = x + dt/6*(k1 + 2*k2 + 2*k3 + k4)
    void (*rk4_combine)(double* dst, const double* x, const double* k1,
                        const double* k2, const double* k3, const double* k4,
                        double dt, std::size_t n);
};

bool backend_available(Backend b);

/// Table for a specific backend; throws invalid_parameter_error if the
/// backend was not compiled in or the CPU lacks it.
const Ops& ops(Backend b);

/// The active table. Picked once per process: best available backend, or
/// the one named by the KTAP_SIMD environment variable (scalar|avx2).
const Ops& ops();

Backend active_backend();
std::string backend_name();

/// Override the active backend (tests/benchmarks). Not thread-safe against
/// concurrent kernel calls.
void force_backend(Backend b);

// Convenience forwarding to the active backend.
inline double dot(const double* a, const double* b, std::size_t n) { return ops().dot(a, b, n); }
inline double dot3(const double* a, const double* b, const double* c, std::size_t n) { return ops().dot3(a, b, c, n); }
inline double sum(const double* a, std::size_t n) { return ops().sum(a, n); }
inline double abs_max(const double* a, std::size_t n) { return ops().abs_max(a, n); }
inline double weighted_abs_diff(const double* f, const double* g, const double* w, std::size_t n) {
    return ops().weighted_abs_diff(f, g, w, n);
}
inline void add_scaled(double* dst, const double* x, const double* k, double c, std::size_t n) {
    ops().add_scaled(dst, x, k, c, n);
}
inline void rk4_combine(double* dst, const double* x, const double* k1, const double* k2,
                        const double* k3, const double* k4, double dt, std::size_t n) {
    ops().rk4_combine(dst, x, k1, k2, k3, k4, dt, n);
}

} // namespace ktap::kern
