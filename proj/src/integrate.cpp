#include "ktap/integrate.hpp"

#include <cmath>
#include <sstream>

#include "ktap/kernels.hpp"

namespace ktap {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw invalid_parameter_error("dt must be positive");
    if (!(t_max > 0.0))
        throw invalid_parameter_error("t_max must be positive (zero-length horizon)");
    if (sample_every < 1)
        throw invalid_parameter_error("sample_every must be >= 1");
    if (!(stationarity_tol > 0.0) || !(conservation_tol > 0.0) ||
        !(negativity_tol > 0.0))
        throw invalid_parameter_error("integrator tolerances must be positive");
}

namespace {

void throw_non_finite(const Matrix& f, double t) {
    for (std::size_t p = 0; p < f.rows(); ++p)
        for (std::size_t i = 0; i < f.cols(); ++i)
            if (!std::isfinite(f(p, i))) {
                std::ostringstream os;
                os << "non-finite occupancy f[" << p + 1 << "][" << i + 1
                   << "] = " << f(p, i) << " at t = " << t;
                throw numerical_error(os.str());
            }
    throw numerical_error("non-finite value encountered at t = " + std::to_string(t));
}

struct Stepper {
    const Model& model;
    const IntegratorConfig& cfg;
    Matrix k2, k3, k4, stage;
    RhsWorkspace ws;

    Stepper(const Model& m, const IntegratorConfig& c) : model(m), cfg(c) {}

    // Advances f by one step using the precomputed start-of-step slope k1.
    // Returns true when gamma differed between internal stages.
    bool advance(Matrix& f, const Matrix& k1, int gamma_start, long& clamp_events) {
        const std::size_t len = f.size();
        if (cfg.method == Method::euler) {
            if (!stage.same_shape(f)) stage = f;
            kern::add_scaled(stage.data(), f.data(), k1.data(), cfg.dt, len);
            std::swap(f, stage);
            return false;
        }
        if (!stage.same_shape(f)) stage = f;
        bool clamped = false;
        bool switched = false;
        const double half = 0.5 * cfg.dt;

        kern::add_scaled(stage.data(), f.data(), k1.data(), half, len);
        switched |= model.derivative(stage, k2, ws, &clamped) != gamma_start;
        clamp_events += clamped;

        kern::add_scaled(stage.data(), f.data(), k2.data(), half, len);
        switched |= model.derivative(stage, k3, ws, &clamped) != gamma_start;
        clamp_events += clamped;

        kern::add_scaled(stage.data(), f.data(), k3.data(), cfg.dt, len);
        switched |= model.derivative(stage, k4, ws, &clamped) != gamma_start;
        clamp_events += clamped;

        kern::rk4_combine(stage.data(), f.data(), k1.data(), k2.data(), k3.data(),
                          k4.data(), cfg.dt, len);
        std::swap(f, stage);
        return switched;
    }
};

SampleDiagnostics diagnostics_of(const Model& model, const Matrix& f, int gamma,
                                 double rhs_sup) {
    SampleDiagnostics d;
    d.mass = kern::sum(f.data(), f.size());
    d.mean_wealth = mean_wealth(model.grid(), f);
    std::vector<double> g(f.cols(), 0.0);
    for (std::size_t p = 0; p < f.rows(); ++p) {
        const double* row = f.row(p);
        for (std::size_t i = 0; i < f.cols(); ++i) g[i] += row[i];
    }
    d.gap = social_gap_of_marginal(g);
    d.gamma = gamma;
    d.rhs_sup = rhs_sup;
    double mn = f.data()[0];
    for (std::size_t j = 1; j < f.size(); ++j) mn = std::min(mn, f.data()[j]);
    d.min_occupancy = mn;
    return d;
}

} // namespace

PopulationState step(const PopulationState& state, const Model& model,
                     const IntegratorConfig& config) {
    config.validate();
    Stepper stepper(model, config);
    Matrix k1;
    bool clamped = false;
    const int gamma = model.derivative(state.f, k1, stepper.ws, &clamped);
    Matrix f = state.f;
    long clamp_events = 0;
    stepper.advance(f, k1, gamma, clamp_events);
    if (!std::isfinite(kern::sum(f.data(), f.size()))) throw_non_finite(f, state.t);
    return PopulationState(std::move(f), state.t + config.dt);
}

Trajectory integrate(const PopulationState& initial, const Model& model,
                     const IntegratorConfig& config) {
    config.validate();
    const long steps = std::lround(config.t_max / config.dt);
    if (steps < 1)
        throw invalid_parameter_error("horizon t_max is shorter than one step");

    Trajectory traj;
    traj.samples.reserve(static_cast<std::size_t>(steps / config.sample_every) + 2);

    Stepper stepper(model, config);
    Matrix f = initial.f;
    Matrix k1;
    bool switched_since_sample = false;

    for (long it = 0;; ++it) {
        const double t = initial.t + static_cast<double>(it) * config.dt;
        bool clamped = false;
        const int gamma = model.derivative(f, k1, stepper.ws, &clamped);
        traj.clamp_events += clamped;
        const double rhs_sup = kern::abs_max(k1.data(), k1.size());
        if (!std::isfinite(rhs_sup) || !std::isfinite(kern::sum(f.data(), f.size())))
            throw_non_finite(f, t);

        const bool on_stride = it % config.sample_every == 0;
        const bool stationary = rhs_sup < config.stationarity_tol;
        const bool last = it == steps;
        if (on_stride || stationary || last) {
            TrajectorySample sample;
            sample.t = t;
            sample.f = f;
            sample.diag = diagnostics_of(model, f, gamma, rhs_sup);
            sample.diag.gamma_switched = switched_since_sample;
            traj.samples.push_back(std::move(sample));
            switched_since_sample = false;
        }
        if (stationary) {
            traj.stationary_time = t;
            break;
        }
        if (last) break;

        if (stepper.advance(f, k1, gamma, traj.clamp_events)) {
            ++traj.gamma_switch_steps;
            switched_since_sample = true;
        }
    }
    return traj;
}

std::optional<double> detect_stationary(const Trajectory& trajectory, double tol) {
    if (trajectory.samples.empty())
        throw invalid_parameter_error("detect_stationary needs a non-empty trajectory");
    for (const auto& sample : trajectory.samples)
        if (sample.diag.rhs_sup < tol) return sample.t;
    return std::nullopt;
}

TrajectoryConservationReport conservation_report(const Trajectory& trajectory,
                                                 const IntegratorConfig& config) {
    if (trajectory.samples.empty())
        throw invalid_parameter_error("conservation report needs a non-empty trajectory");
    TrajectoryConservationReport rep;
    const double mass0 = trajectory.samples.front().diag.mass;
    const double u0 = trajectory.samples.front().diag.mean_wealth;
    rep.min_occupancy = trajectory.samples.front().diag.min_occupancy;
    for (const auto& sample : trajectory.samples) {
        rep.max_mass_drift = std::max(rep.max_mass_drift,
                                      std::fabs(sample.diag.mass - mass0));
        rep.max_mean_wealth_drift = std::max(rep.max_mean_wealth_drift,
                                             std::fabs(sample.diag.mean_wealth - u0));
        rep.min_occupancy = std::min(rep.min_occupancy, sample.diag.min_occupancy);
    }
    rep.mass_ok = rep.max_mass_drift <= config.conservation_tol;
    rep.mean_wealth_ok = rep.max_mean_wealth_drift <= config.conservation_tol;
    rep.negativity_ok = rep.min_occupancy >= -config.negativity_tol;
    return rep;
}

std::string TrajectoryConservationReport::to_string() const {
    std::ostringstream os;
    os << "conservation: mass drift " << max_mass_drift
       << (mass_ok ? " (ok)" : " (ALARM)") << ", mean-wealth drift "
       << max_mean_wealth_drift << (mean_wealth_ok ? " (ok)" : " (ALARM)")
       << ", min occupancy " << min_occupancy << (negativity_ok ? " (ok)" : " (ALARM)");
    return os.str();
}

} // namespace ktap
