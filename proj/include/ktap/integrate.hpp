#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ktap/rhs.hpp"
#include "ktap/state.hpp"
#include "ktap/wealth_game.hpp"

namespace ktap {

enum class Method { rk4, euler };

struct IntegratorConfig {
    Method method = Method::rk4;
    double dt = 0.01;
    double t_max = 200.0;
    int sample_every = 10;           // recording stride in steps
    double stationarity_tol = 1e-8;  // stop when max |df/dt| falls below this
    double conservation_tol = 1e-9;  // alarm threshold on mass / mean-wealth drift
    double negativity_tol = 1e-9;    // alarm threshold for negative occupancies

    void validate() const;

    friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

struct SampleDiagnostics {
    double mass = 0.0;
    double mean_wealth = 0.0;
    SocialGap gap;
    int gamma = 0;
    double rhs_sup = 0.0;            // max |df/dt| at the sample state
    double min_occupancy = 0.0;
    bool gamma_switched = false;     // gamma changed within a step since last sample
};

struct TrajectorySample {
    double t = 0.0;
    Matrix f;
    SampleDiagnostics diag;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::optional<double> stationary_time;
    long gamma_switch_steps = 0;     // steps where gamma changed between stages
    long clamp_events = 0;           // gamma quadratic clamped to [0, n]

    const TrajectorySample& front() const { return samples.front(); }
    const TrajectorySample& back() const { return samples.back(); }
};

/// One explicit step of the configured method. Variable gamma is re-read
/// from each internal stage state. Throws numerical_error when the result
/// contains non-finite entries.
PopulationState step(const PopulationState& state, const Model& model,
                     const IntegratorConfig& config);

/// Steps from the initial state until t_max or stationarity, recording every
/// sample_every-th state (plus the first and last) with diagnostics.
/// Conservation problems never abort a run; they surface in the recorded
/// diagnostics and in conservation_report.
Trajectory integrate(const PopulationState& initial, const Model& model,
                     const IntegratorConfig& config);

/// Earliest sample time at which max |df/dt| < tol.
std::optional<double> detect_stationary(const Trajectory& trajectory, double tol);

struct TrajectoryConservationReport {
    double max_mass_drift = 0.0;
    double max_mean_wealth_drift = 0.0;
    double min_occupancy = 0.0;
    bool mass_ok = true;
    bool mean_wealth_ok = true;
    bool negativity_ok = true;
    bool pass() const { return mass_ok && mean_wealth_ok && negativity_ok; }
    std::string to_string() const;
};

TrajectoryConservationReport conservation_report(const Trajectory& trajectory,
                                                 const IntegratorConfig& config);

} // namespace ktap
