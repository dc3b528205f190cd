#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ktap/integrate.hpp"
#include "ktap/matrix.hpp"
#include "ktap/state.hpp"

namespace ktap {

struct ScenarioConfig;

/// Weights for the L1 distance over wealth classes. The model leaves the
/// weighting open ("critical ranges" of the activity); uniform weights are
/// the default and anything nonnegative, not identically zero, is accepted.
struct NormSpec {
    std::vector<double> w;

    static NormSpec uniform(int n);
    void validate(int n) const;

    friend bool operator==(const NormSpec&, const NormSpec&) = default;
};

/// The phenomenologically expected asymptotic distribution the early-warning
/// distance is measured against, with a note on where it came from.
struct ReferenceDistribution {
    Matrix f_tilde;   // m x n
    std::string provenance;
};

/// Weighted L1 distance sum_i |f_i - g_i| w_i.
double weighted_l1(std::span<const double> f, std::span<const double> g,
                   const NormSpec& norm);

/// d_BS: the maximum over subsystems of the weighted L1 distance between the
/// current and the expected asymptotic distribution.
double dbs(const Matrix& f, const ReferenceDistribution& reference,
           const NormSpec& norm);
double dbs(const PopulationState& state, const ReferenceDistribution& reference,
           const NormSpec& norm);

/// d_BS evaluated at every trajectory sample.
std::vector<std::pair<double, double>> dbs_series(const Trajectory& trajectory,
                                                  const ReferenceDistribution& reference,
                                                  const NormSpec& norm);

struct TurnroundSignal {
    double t_min = 0.0;       // time of the interior global minimum
    double d_min = 0.0;
    double d_final = 0.0;
    double rise_ratio = 0.0;  // d_final / d_min; +inf when d_min == 0
};

/// Shape test for the early-warning signature: a dip followed by a rise.
/// Signals when the first global minimum lies strictly inside the series
/// (d_min < d(0)) and the series ends above it (d_final > d_min). Monotone
/// decay (genuine convergence to the reference) yields no signal.
std::optional<TurnroundSignal> detect_turnround(
    std::span<const std::pair<double, double>> series);

/// Runs the scenario's constant-gamma twin (gamma == gamma0 throughout) to
/// stationarity and returns its final state: the expected outcome of a
/// controller that presumes the imposed interaction rules stay in force.
/// Throws numerical_error (carrying the residual) if the twin is still
/// moving at t_max.
ReferenceDistribution build_reference_constant_gamma(const ScenarioConfig& scenario);

} // namespace ktap
