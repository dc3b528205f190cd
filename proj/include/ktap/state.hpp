#pragma once

#include <optional>
#include <vector>

#include "ktap/grid.hpp"
#include "ktap/matrix.hpp"

namespace ktap {

/// Class occupancies f^p_i for all subsystems at one time instant.
/// Row p = subsystem, column i = wealth class. Occupancies are population
/// fractions; a normalized state has total mass 1. Negative entries produced
/// by integration error are kept (clipping would break conservation) and are
/// reported through the integrator diagnostics instead.
struct PopulationState {
    Matrix f;   // m x n
    double t = 0.0;

    PopulationState() = default;
    PopulationState(std::size_t m, std::size_t n, double t0 = 0.0) : f(m, n), t(t0) {}
    explicit PopulationState(Matrix occupancies, double t0 = 0.0)
        : f(std::move(occupancies)), t(t0) {}

    std::size_t subsystems() const noexcept { return f.rows(); }
    std::size_t classes() const noexcept { return f.cols(); }
};

/// Weight vector over wealth classes for the moment sums. A unit-integral
/// weight satisfies sum_i w_i * delta_u = 1; indicator-style weights (poor /
/// wealthy class masks, all-ones) do not, and must be flagged as such at
/// construction. Which convention the moments "should" use is left to the
/// caller; this type only refuses silently inconsistent input.
struct MomentWeights {
    std::vector<double> w;
    bool indicator = false;

    static MomentWeights unit_uniform(const ActivityGrid& grid);
    static MomentWeights ones(int n);
    static MomentWeights indicator_poor(const ActivityGrid& grid);
    static MomentWeights indicator_wealthy(const ActivityGrid& grid);

    /// Validates nonnegativity, and the unit-integral condition unless the
    /// weight is indicator-flagged.
    static MomentWeights checked(std::vector<double> w, const ActivityGrid& grid,
                                 bool indicator);
};

/// Total mass: sum of the p-th row, or of the whole matrix when p is absent.
double mass(const PopulationState& state);
double mass(const PopulationState& state, std::size_t p);

/// Weighted moment of order l for subsystem p: sum_i u_i^l f^p_i w_i.
double moment(const ActivityGrid& grid, const PopulationState& state, std::size_t p,
              int l, const MomentWeights& weights);

/// Mean wealth of the whole system: sum_p sum_i u_i f^p_i. Coincides with
/// the conserved U_0 when evaluated at t = 0.
double mean_wealth(const ActivityGrid& grid, const PopulationState& state);
double mean_wealth(const ActivityGrid& grid, const Matrix& f);

} // namespace ktap
