#include "ktap/kernels.hpp"

#include <cmath>

// Reference backend. Plain left-to-right loops; every other backend is
// equivalence-tested against these.

namespace ktap::kern {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot3_scalar(const double* a, const double* b, const double* c, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i] * c[i];
    return acc;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double abs_max_scalar(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::fabs(a[i]);
        if (v > m) m = v;
    }
    return m;
}

double weighted_abs_diff_scalar(const double* f, const double* g, const double* w,
                                std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(f[i] - g[i]) * w[i];
    return acc;
}

void add_scaled_scalar(double* dst, const double* x, const double* k, double c,
                       std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = x[i] + c * k[i];
}

void rk4_combine_scalar(double* dst, const double* x, const double* k1, const double* k2,
                        const double* k3, const double* k4, double dt, std::size_t n) {
    const double c = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        dst[i] = x[i] + c * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

} // namespace

const Ops& scalar_ops() {
    static const Ops table{dot_scalar,    dot3_scalar,       sum_scalar,
                           abs_max_scalar, weighted_abs_diff_scalar,
                           add_scaled_scalar, rk4_combine_scalar};
    return table;
}

} // namespace ktap::kern
