#include "ktap/politics_game.hpp"

#include <cmath>
#include <sstream>

namespace ktap {

void PoliticsParams::validate() const {
    if (!(beta >= 0.0 && beta <= 0.5))
        throw invalid_parameter_error("beta must lie in [0, 1/2], got " +
                                      std::to_string(beta));
}

double OpinionKernel::entry(std::size_t h, std::size_t p, std::size_t r) const {
    if (h >= static_cast<std::size_t>(n) || p >= static_cast<std::size_t>(m) ||
        r >= static_cast<std::size_t>(m))
        throw index_error("opinion kernel index out of range");
    if (r + 1 == p) return down(h, p);
    if (r == p) return stay(h, p);
    if (r == p + 1) return up(h, p);
    return 0.0;
}

OpinionKernel build_opinion_kernel(const ActivityGrid& grid, const PoliticsParams& params,
                                   int m) {
    params.validate();
    if (m < 1 || m % 2 == 0)
        throw invalid_parameter_error("opinion kernel needs odd m >= 1, got m=" +
                                      std::to_string(m));
    OpinionKernel kern;
    kern.n = grid.n;
    kern.m = m;
    kern.beta = params.beta;
    kern.u0 = params.u0;
    const std::size_t nn = static_cast<std::size_t>(grid.n);
    const std::size_t mm = static_cast<std::size_t>(m);
    kern.down = Matrix(nn, mm);
    kern.stay = Matrix(nn, mm);
    kern.up = Matrix(nn, mm);

    const double beta = params.beta;
    const double two_beta = 2.0 * beta;
    const bool wealthy_society = params.u0 >= 0.0;

    for (std::size_t h = 0; h < nn; ++h) {
        const bool wealthy_class = grid.u[h] >= 0.0;
        for (std::size_t p = 0; p < mm; ++p) {
            if (mm == 1) {
                kern.stay(h, p) = 1.0;
            } else if (!wealthy_society && !wealthy_class) {
                // Poor in a poor society: drift toward opposition.
                if (p == 0) {
                    kern.stay(h, p) = 1.0;
                } else {
                    kern.down(h, p) = two_beta;
                    kern.stay(h, p) = 1.0 - two_beta;
                }
            } else if (wealthy_society && wealthy_class) {
                // Wealthy in a wealthy society: drift toward support.
                if (p == mm - 1) {
                    kern.stay(h, p) = 1.0;
                } else {
                    kern.stay(h, p) = 1.0 - two_beta;
                    kern.up(h, p) = two_beta;
                }
            } else {
                // Mixed signs: symmetric walk with reflecting ends.
                if (p == 0) {
                    kern.stay(h, p) = 1.0 - beta;
                    kern.up(h, p) = beta;
                } else if (p == mm - 1) {
                    kern.down(h, p) = beta;
                    kern.stay(h, p) = 1.0 - beta;
                } else {
                    kern.down(h, p) = beta;
                    kern.stay(h, p) = 1.0 - two_beta;
                    kern.up(h, p) = beta;
                }
            }
        }
    }
    return kern;
}

CombinedKernel::CombinedKernel(const WealthKernel& w, const OpinionKernel& o)
    : wealth(&w), opinion(&o) {
    if (w.n != o.n)
        throw dimension_error("wealth kernel n=" + std::to_string(w.n) +
                              " does not match opinion kernel n=" + std::to_string(o.n));
}

double CombinedKernel::entry(std::size_t p, std::size_t q, std::size_t h, std::size_t k,
                             std::size_t i, std::size_t r) const {
    if (q >= static_cast<std::size_t>(opinion->m))
        throw index_error("field subsystem index out of range");
    return wealth->entry(h, k, i) * opinion->entry(h, p, r);
}

OpinionNormalizationReport verify_opinion_normalization(const OpinionKernel& kernel,
                                                        double tol) {
    OpinionNormalizationReport rep;
    const std::size_t nn = static_cast<std::size_t>(kernel.n);
    const std::size_t mm = static_cast<std::size_t>(kernel.m);
    const auto note = [tol](CheckResult& cr, double violation, std::size_t h,
                            std::size_t p) {
        if (violation > cr.max_violation) {
            cr.max_violation = violation;
            cr.h = static_cast<int>(h);
            cr.k = static_cast<int>(p);
        }
        if (violation > tol) cr.pass = false;
    };
    for (std::size_t h = 0; h < nn; ++h) {
        for (std::size_t p = 0; p < mm; ++p) {
            // Neighbours first: the two off-diagonal probabilities are both
            // multiples of beta and their sum pairs exactly with the stay
            // entry's complement, so built kernels report deviation 0.
            const double row_sum = (kernel.down(h, p) + kernel.up(h, p)) +
                                   kernel.stay(h, p);
            note(rep.row_sums, std::fabs(row_sum - 1.0), h, p);
            for (std::size_t r = 0; r < mm; ++r) {
                const double e = kernel.entry(h, p, r);
                const bool local = r + 1 == p || r == p || r == p + 1;
                double violation = 0.0;
                if (!local)
                    violation = std::fabs(e);
                else if (e < 0.0 || e > 1.0)
                    violation = std::max(-e, e - 1.0);
                note(rep.locality, violation, h, p);
            }
        }
    }
    return rep;
}

std::string OpinionNormalizationReport::to_string() const {
    const auto line = [](const char* name, const CheckResult& cr) {
        std::ostringstream os;
        os << "  " << name << ": " << (cr.pass ? "pass" : "FAIL")
           << " (max violation " << cr.max_violation;
        if (cr.h >= 0) os << " at h=" << cr.h + 1 << ", p=" << cr.k + 1;
        os << ")\n";
        return os.str();
    };
    std::string s = "opinion kernel checks:\n";
    s += line("row sums = 1", row_sums);
    s += line("locality    ", locality);
    return s;
}

} // namespace ktap
