#pragma once

#include <span>
#include <string>
#include <vector>

#include "ktap/grid.hpp"
#include "ktap/matrix.hpp"
#include "ktap/state.hpp"

namespace ktap {

/// Constant: externally imposed critical distance, gamma == gamma0 always.
/// Variable: gamma recomputed from the instantaneous social gap at every
/// derivative evaluation, including integrator internal stages.
enum class GammaControl { constant, variable };

struct WealthGameParams {
    int gamma0 = 3;          // reference critical distance, integer in [0, n]
    double s0 = 0.0;         // reference social gap, |s0| < 1
    double mu = 0.3;         // cooperation/competition encounter-rate ratio, (0, 1]
    double eta0 = 1.0;       // base encounter rate; 1 absorbs it into the time unit
    GammaControl control = GammaControl::variable;

    void validate(int n) const;

    friend bool operator==(const WealthGameParams&, const WealthGameParams&) = default;
};

/// Aggregate poor and wealthy class masses (central class excluded from
/// both). s is normalized by total mass so it stays in [-1, 1] even for
/// non-unit-mass states; for a normalized population s = n_minus - n_plus.
struct SocialGap {
    double n_minus = 0.0;
    double n_plus = 0.0;
    double s = 0.0;
};

/// Encounter frequencies between wealth classes: eta0 within the critical
/// distance (competition), mu*eta0 beyond it (cooperation). Symmetric.
struct EncounterRate {
    Matrix eta;   // n x n
    int gamma = 0;
    double mu = 1.0;
    double eta0 = 1.0;
};

/// Transition table of the cooperation/competition game for one value of the
/// critical distance. A candidate in class h meeting field class k moves at
/// most one class, so the table is stored as the three diagonals
///   down(h,k) = B_hk(h-1),  stay(h,k) = B_hk(h),  up(h,k) = B_hk(h+1),
/// all other entries being identically zero. sigma(h,k) is the mean class-
/// value shift of the candidate (antisymmetric); shift_sign holds its sign
/// in {-1, 0, +1}.
struct WealthKernel {
    int n = 0;
    int gamma = 0;
    Matrix down, stay, up;            // n x n each
    Matrix sigma;                     // n x n, sigma_hk = sign * shift_prob * delta_u
    std::vector<signed char> shift_sign; // n x n row-major

    signed char sign(std::size_t h, std::size_t k) const {
        return shift_sign[h * static_cast<std::size_t>(n) + k];
    }

    /// Full transition probability B_hk(i); zero off the stored diagonals.
    double entry(std::size_t h, std::size_t k, std::size_t i) const;

    /// Writes the dense row B_hk(.) into out (length n).
    void row(std::size_t h, std::size_t k, std::span<double> out) const;
};

/// Probability that an interaction at class distance |k - h| actually moves
/// the candidate: |k - h| / (n - 1). Symmetric in (h, k); 0-based indices.
double shift_probability(std::size_t h, std::size_t k, int n);

SocialGap social_gap(const PopulationState& state);
SocialGap social_gap_of_marginal(std::span<const double> g);

/// The distribution-driven critical distance: a floor-rounded quadratic in
/// the social gap anchored at (s0 -> gamma0), (1 -> n), (-1 -> 0), clamped
/// to [0, n]. Values within 1e-9 of an integer are snapped to it before
/// flooring, so the anchors hold exactly under roundoff and the result does
/// not flip across a floor boundary from last-ulp noise. Constant mode
/// returns gamma0 unconditionally.
int critical_distance(double s, const WealthGameParams& params, int n,
                      bool* clamped = nullptr);

WealthKernel build_wealth_kernel(int n, int gamma);
EncounterRate build_encounter_rate(int n, int gamma, double mu, double eta0);

struct CheckResult {
    bool pass = true;
    double max_violation = 0.0;
    int h = -1, k = -1;   // 0-based location of the worst violation
};

/// Conservation diagnostics for a built (or hand-corrupted) kernel:
///   row_sums        sum_i B_hk(i) = 1
///   mean_shift      sum_i u_i B_hk(i) - u_h = sigma_hk
///   antisymmetry    sigma_hk + sigma_kh = 0
///   global_balance  sum_hk sigma_hk = 0
struct KernelConservationReport {
    CheckResult row_sums;
    CheckResult mean_shift;
    CheckResult antisymmetry;
    CheckResult global_balance;
    bool pass() const {
        return row_sums.pass && mean_shift.pass && antisymmetry.pass &&
               global_balance.pass;
    }
    std::string to_string() const;
};

KernelConservationReport verify_conservation_conditions(const WealthKernel& kernel,
                                                        const ActivityGrid& grid,
                                                        double tol = 1e-13);

} // namespace ktap
