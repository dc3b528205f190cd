#include "ktap/earlywarning.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ktap/kernels.hpp"
#include "ktap/scenario.hpp"

namespace ktap {

NormSpec NormSpec::uniform(int n) {
    NormSpec spec;
    spec.w.assign(static_cast<std::size_t>(n), 1.0);
    return spec;
}

void NormSpec::validate(int n) const {
    if (w.size() != static_cast<std::size_t>(n))
        throw dimension_error("norm weights length " + std::to_string(w.size()) +
                              " does not match n=" + std::to_string(n));
    bool any_positive = false;
    for (double v : w) {
        if (v < 0.0) throw invalid_parameter_error("norm weights must be nonnegative");
        if (v > 0.0) any_positive = true;
    }
    if (!any_positive)
        throw invalid_parameter_error("norm weights must not be identically zero");
}

double weighted_l1(std::span<const double> f, std::span<const double> g,
                   const NormSpec& norm) {
    if (f.size() != g.size() || f.size() != norm.w.size())
        throw dimension_error("weighted_l1 operands have mismatched lengths");
    return kern::weighted_abs_diff(f.data(), g.data(), norm.w.data(), f.size());
}

double dbs(const Matrix& f, const ReferenceDistribution& reference,
           const NormSpec& norm) {
    if (!f.same_shape(reference.f_tilde))
        throw dimension_error("state and reference distribution shapes disagree");
    double worst = 0.0;
    for (std::size_t p = 0; p < f.rows(); ++p)
        worst = std::max(worst, weighted_l1(reference.f_tilde.row_span(p),
                                            f.row_span(p), norm));
    return worst;
}

double dbs(const PopulationState& state, const ReferenceDistribution& reference,
           const NormSpec& norm) {
    return dbs(state.f, reference, norm);
}

std::vector<std::pair<double, double>> dbs_series(const Trajectory& trajectory,
                                                  const ReferenceDistribution& reference,
                                                  const NormSpec& norm) {
    std::vector<std::pair<double, double>> series;
    series.reserve(trajectory.samples.size());
    for (const auto& sample : trajectory.samples)
        series.emplace_back(sample.t, dbs(sample.f, reference, norm));
    return series;
}

std::optional<TurnroundSignal> detect_turnround(
    std::span<const std::pair<double, double>> series) {
    if (series.size() < 3) return std::nullopt;
    std::size_t imin = 0;
    for (std::size_t i = 1; i < series.size(); ++i)
        if (series[i].second < series[imin].second) imin = i;
    const double d0 = series.front().second;
    const double d_min = series[imin].second;
    const double d_final = series.back().second;
    if (!(d_min < d0) || !(d_final > d_min)) return std::nullopt;
    TurnroundSignal signal;
    signal.t_min = series[imin].first;
    signal.d_min = d_min;
    signal.d_final = d_final;
    signal.rise_ratio = d_min > 0.0 ? d_final / d_min
                                    : std::numeric_limits<double>::infinity();
    return signal;
}

ReferenceDistribution build_reference_constant_gamma(const ScenarioConfig& scenario) {
    ScenarioConfig twin = scenario;
    twin.wealth.control = GammaControl::constant;
    twin.earlywarning.enabled = false;

    Model model(twin.n, twin.m, twin.wealth, PoliticsParams{twin.beta,
                mean_wealth(build_wealth_grid(twin.n), twin.initial.f0)});
    Trajectory traj = integrate(PopulationState(twin.initial.f0), model,
                                twin.integrator);
    if (!traj.stationary_time) {
        std::ostringstream os;
        os << "constant-gamma twin of '" << scenario.name
           << "' did not reach stationarity by t_max=" << twin.integrator.t_max
           << " (residual max|df/dt| = " << traj.samples.back().diag.rhs_sup << ")";
        throw numerical_error(os.str());
    }
    ReferenceDistribution ref;
    ref.f_tilde = traj.samples.back().f;
    std::ostringstream os;
    os << "constant-gamma twin of '" << scenario.name << "', gamma0="
       << twin.wealth.gamma0 << ", stationary at t=" << *traj.stationary_time;
    ref.provenance = os.str();
    return ref;
}

} // namespace ktap
