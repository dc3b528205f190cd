#pragma once

#include <string>

#include "ktap/grid.hpp"
#include "ktap/matrix.hpp"
#include "ktap/wealth_game.hpp"

namespace ktap {

struct PoliticsParams {
    double beta = 0.4;   // base opinion-change probability, in [0, 1/2]
    double u0 = 0.0;     // conserved mean wealth; its sign selects the table branch

    void validate() const;
};

/// Opinion-shift table: probability that a candidate in wealth class h and
/// subsystem p ends in subsystem r after an interaction. Transitions move at
/// most one subsystem, so storage is again three diagonals over (h, p):
///   down(h,p) = B^p_h(p-1), stay(h,p) = B^p_h(p), up(h,p) = B^p_h(p+1).
/// The branch depends only on the sign of u0 and of u_h: a poor candidate in
/// a poor society drifts toward opposition (p = 1 absorbing), a wealthy one
/// in a wealthy society toward support (p = m absorbing), and the mixed-sign
/// cases follow a symmetric random walk with reflecting ends. m = 1 is the
/// identity.
struct OpinionKernel {
    int n = 0;
    int m = 0;
    double beta = 0.0;
    double u0 = 0.0;
    Matrix down, stay, up;   // n x m each

    double entry(std::size_t h, std::size_t p, std::size_t r) const;
};

OpinionKernel build_opinion_kernel(const ActivityGrid& grid, const PoliticsParams& params,
                                   int m);

/// Factorized combined table B_hk^{pq}(i, r) = B_hk(i) * B^p_h(r). Kept as
/// references to the two factors; the full six-index tensor is never stored.
struct CombinedKernel {
    const WealthKernel* wealth = nullptr;
    const OpinionKernel* opinion = nullptr;

    CombinedKernel(const WealthKernel& w, const OpinionKernel& o);

    /// q is accepted (and range-checked) for interface fidelity; the value
    /// is independent of it by construction.
    double entry(std::size_t p, std::size_t q, std::size_t h, std::size_t k,
                 std::size_t i, std::size_t r) const;
};

struct OpinionNormalizationReport {
    CheckResult row_sums;    // sum_r B^p_h(r) = 1 for all h, p
    CheckResult locality;    // no mass outside {p-1, p, p+1} (structural here)
    bool pass() const { return row_sums.pass && locality.pass; }
    std::string to_string() const;
};

OpinionNormalizationReport verify_opinion_normalization(const OpinionKernel& kernel,
                                                        double tol = 0.0);

} // namespace ktap
