#include "ktap/wealth_game.hpp"

#include <cmath>
#include <sstream>

#include "ktap/kernels.hpp"

namespace ktap {

void WealthGameParams::validate(int n) const {
    if (!(mu > 0.0 && mu <= 1.0))
        throw invalid_parameter_error("mu must be in (0, 1], got " + std::to_string(mu));
    if (!(std::fabs(s0) < 1.0))
        throw invalid_parameter_error("reference gap s0 must satisfy |s0| < 1, got " +
                                      std::to_string(s0));
    if (gamma0 < 0 || gamma0 > n)
        throw invalid_parameter_error("gamma0 must lie in [0, n]=[0, " +
                                      std::to_string(n) + "], got " +
                                      std::to_string(gamma0));
    if (!(eta0 > 0.0))
        throw invalid_parameter_error("eta0 must be positive");
}

double WealthKernel::entry(std::size_t h, std::size_t k, std::size_t i) const {
    const std::size_t nn = static_cast<std::size_t>(n);
    if (h >= nn || k >= nn || i >= nn)
        throw index_error("kernel index out of range");
    if (i + 1 == h) return down(h, k);
    if (i == h) return stay(h, k);
    if (i == h + 1) return up(h, k);
    return 0.0;
}

void WealthKernel::row(std::size_t h, std::size_t k, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(n))
        throw dimension_error("kernel row buffer has wrong length");
    std::fill(out.begin(), out.end(), 0.0);
    if (h > 0) out[h - 1] = down(h, k);
    out[h] = stay(h, k);
    if (h + 1 < static_cast<std::size_t>(n)) out[h + 1] = up(h, k);
}

double shift_probability(std::size_t h, std::size_t k, int n) {
    const auto d = h > k ? h - k : k - h;
    return static_cast<double>(d) / static_cast<double>(n - 1);
}

SocialGap social_gap_of_marginal(std::span<const double> g) {
    const std::size_t n = g.size();
    const std::size_t centre = (n - 1) / 2;
    SocialGap gap;
    gap.n_minus = kern::sum(g.data(), centre);
    gap.n_plus = kern::sum(g.data() + centre + 1, n - centre - 1);
    const double total = kern::sum(g.data(), n);
    gap.s = total > 0.0 ? (gap.n_minus - gap.n_plus) / total : 0.0;
    return gap;
}

SocialGap social_gap(const PopulationState& state) {
    const std::size_t n = state.classes();
    if (n % 2 == 0) throw invalid_parameter_error("social gap needs an odd class count");
    if (state.subsystems() == 1)
        return social_gap_of_marginal(state.f.row_span(0));
    std::vector<double> g(n, 0.0);
    for (std::size_t p = 0; p < state.subsystems(); ++p) {
        const double* row = state.f.row(p);
        for (std::size_t i = 0; i < n; ++i) g[i] += row[i];
    }
    return social_gap_of_marginal(g);
}

int critical_distance(double s, const WealthGameParams& params, int n, bool* clamped) {
    if (clamped) *clamped = false;
    if (params.control == GammaControl::constant) return params.gamma0;
    if (!(std::fabs(params.s0) < 1.0))
        throw invalid_parameter_error("critical distance undefined for |s0| = 1");

    const double s0 = params.s0;
    const double g0 = static_cast<double>(params.gamma0);
    const double nn = static_cast<double>(n);
    const double denom = 2.0 * (s0 * s0 - 1.0);
    const double quad = (2.0 * g0 - nn * (s0 + 1.0)) / denom;
    const double constant = (nn * s0 * (s0 + 1.0) - 2.0 * g0) / denom;
    const double x = quad * s * s + 0.5 * nn * s + constant;

    // Snap-then-floor: the anchor gaps (s0, +1, -1) land exactly on integers
    // in exact arithmetic, and floor would otherwise be unstable to last-ulp
    // rounding on either side of every integer.
    const double nearest = std::nearbyint(x);
    double floored = std::fabs(x - nearest) < 1e-9 ? nearest : std::floor(x);
    if (floored < 0.0) {
        floored = 0.0;
        if (clamped) *clamped = true;
    } else if (floored > nn) {
        floored = nn;
        if (clamped) *clamped = true;
    }
    return static_cast<int>(floored);
}

WealthKernel build_wealth_kernel(int n, int gamma) {
    if (n < 3 || n % 2 == 0)
        throw invalid_parameter_error("wealth kernel needs odd n >= 3");
    if (gamma < 0 || gamma > n)
        throw invalid_parameter_error("gamma must lie in [0, n], got " +
                                      std::to_string(gamma));
    WealthKernel kern;
    kern.n = n;
    kern.gamma = gamma;
    const std::size_t nn = static_cast<std::size_t>(n);
    kern.down = Matrix(nn, nn);
    kern.stay = Matrix(nn, nn);
    kern.up = Matrix(nn, nn);
    kern.sigma = Matrix(nn, nn);
    kern.shift_sign.assign(nn * nn, 0);

    const double delta_u = 2.0 / static_cast<double>(n - 1);
    const std::size_t last = nn - 1;

    for (std::size_t h = 0; h < nn; ++h) {
        for (std::size_t k = 0; k < nn; ++k) {
            const std::size_t dist = h > k ? h - k : k - h;
            const double a = shift_probability(h, k, n);
            signed char sign = 0;
            if (h == k) {
                kern.stay(h, k) = 1.0;
            } else if (dist <= static_cast<std::size_t>(gamma)) {
                // Competition: the poorer of the pair slides down, the richer
                // climbs, except that the extreme classes neither move nor
                // (as field) displace anyone.
                if (h == 0 || h == last) {
                    kern.stay(h, k) = 1.0;
                } else if (h < k) {
                    if (k != last) {
                        kern.down(h, k) = a;
                        kern.stay(h, k) = 1.0 - a;
                        sign = -1;
                    } else {
                        kern.stay(h, k) = 1.0;
                    }
                } else {
                    if (k != 0) {
                        kern.stay(h, k) = 1.0 - a;
                        kern.up(h, k) = a;
                        sign = +1;
                    } else {
                        kern.stay(h, k) = 1.0;
                    }
                }
            } else {
                // Cooperation: states drift toward each other.
                if (h < k) {
                    kern.stay(h, k) = 1.0 - a;
                    kern.up(h, k) = a;
                    sign = +1;
                } else {
                    kern.down(h, k) = a;
                    kern.stay(h, k) = 1.0 - a;
                    sign = -1;
                }
            }
            kern.shift_sign[h * nn + k] = sign;
            const double magnitude = a * delta_u;
            kern.sigma(h, k) = sign == 0 ? 0.0 : (sign > 0 ? magnitude : -magnitude);
        }
    }
    return kern;
}

EncounterRate build_encounter_rate(int n, int gamma, double mu, double eta0) {
    if (!(mu > 0.0 && mu <= 1.0))
        throw invalid_parameter_error("mu must be in (0, 1], got " + std::to_string(mu));
    if (!(eta0 > 0.0)) throw invalid_parameter_error("eta0 must be positive");
    if (gamma < 0 || gamma > n)
        throw invalid_parameter_error("gamma must lie in [0, n]");
    EncounterRate rate;
    rate.gamma = gamma;
    rate.mu = mu;
    rate.eta0 = eta0;
    const std::size_t nn = static_cast<std::size_t>(n);
    rate.eta = Matrix(nn, nn);
    const double coop = mu * eta0;
    for (std::size_t h = 0; h < nn; ++h)
        for (std::size_t k = 0; k < nn; ++k) {
            const std::size_t dist = h > k ? h - k : k - h;
            rate.eta(h, k) = dist <= static_cast<std::size_t>(gamma) ? eta0 : coop;
        }
    return rate;
}

namespace {

void record(CheckResult& cr, double violation, std::size_t h, std::size_t k, double tol) {
    if (violation > cr.max_violation) {
        cr.max_violation = violation;
        cr.h = static_cast<int>(h);
        cr.k = static_cast<int>(k);
    }
    if (violation > tol) cr.pass = false;
}

} // namespace

KernelConservationReport verify_conservation_conditions(const WealthKernel& kernel,
                                                        const ActivityGrid& grid,
                                                        double tol) {
    if (grid.n != kernel.n)
        throw dimension_error("kernel built for n=" + std::to_string(kernel.n) +
                              ", grid has n=" + std::to_string(grid.n));
    const std::size_t n = static_cast<std::size_t>(kernel.n);
    KernelConservationReport rep;
    std::vector<double> row(n);
    double sigma_total = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        for (std::size_t k = 0; k < n; ++k) {
            kernel.row(h, k, row);
            double row_sum = 0.0;
            for (double b : row) row_sum += b;
            record(rep.row_sums, std::fabs(row_sum - 1.0), h, k, tol);

            const double mean = kern::dot(grid.u.data(), row.data(), n);
            record(rep.mean_shift, std::fabs(mean - grid.u[h] - kernel.sigma(h, k)), h,
                   k, tol);

            record(rep.antisymmetry, std::fabs(kernel.sigma(h, k) + kernel.sigma(k, h)),
                   h, k, tol);
            sigma_total += kernel.sigma(h, k);
        }
    }
    record(rep.global_balance, std::fabs(sigma_total), 0, 0, tol);
    return rep;
}

std::string KernelConservationReport::to_string() const {
    const auto line = [](const char* name, const CheckResult& cr) {
        std::ostringstream os;
        os << "  " << name << ": " << (cr.pass ? "pass" : "FAIL")
           << " (max violation " << cr.max_violation;
        if (cr.h >= 0) os << " at h=" << cr.h + 1 << ", k=" << cr.k + 1;
        os << ")\n";
        return os.str();
    };
    std::string s = "wealth kernel conservation checks:\n";
    s += line("row sums = 1        ", row_sums);
    s += line("mean shift = sigma  ", mean_shift);
    s += line("sigma antisymmetric ", antisymmetry);
    s += line("sum(sigma) = 0      ", global_balance);
    return s;
}

} // namespace ktap
