#include "ktap/state.hpp"

#include <cmath>

#include "ktap/kernels.hpp"

namespace ktap {

MomentWeights MomentWeights::unit_uniform(const ActivityGrid& grid) {
    MomentWeights mw;
    mw.w.assign(static_cast<std::size_t>(grid.n),
                1.0 / (grid.n * grid.delta_u));
    return mw;
}

MomentWeights MomentWeights::ones(int n) {
    MomentWeights mw;
    mw.w.assign(static_cast<std::size_t>(n), 1.0);
    mw.indicator = true;
    return mw;
}

MomentWeights MomentWeights::indicator_poor(const ActivityGrid& grid) {
    MomentWeights mw;
    mw.w.assign(static_cast<std::size_t>(grid.n), 0.0);
    for (int i = 0; i < grid.centre(); ++i) mw.w[static_cast<std::size_t>(i)] = 1.0;
    mw.indicator = true;
    return mw;
}

MomentWeights MomentWeights::indicator_wealthy(const ActivityGrid& grid) {
    MomentWeights mw;
    mw.w.assign(static_cast<std::size_t>(grid.n), 0.0);
    for (int i = grid.centre() + 1; i < grid.n; ++i)
        mw.w[static_cast<std::size_t>(i)] = 1.0;
    mw.indicator = true;
    return mw;
}

MomentWeights MomentWeights::checked(std::vector<double> w, const ActivityGrid& grid,
                                     bool indicator) {
    if (w.size() != static_cast<std::size_t>(grid.n))
        throw dimension_error("moment weights length " + std::to_string(w.size()) +
                              " does not match grid n=" + std::to_string(grid.n));
    double integral = 0.0;
    for (double v : w) {
        if (v < 0.0)
            throw invalid_parameter_error("moment weights must be nonnegative");
        integral += v * grid.delta_u;
    }
    if (!indicator && std::fabs(integral - 1.0) > 1e-12)
        throw invalid_parameter_error(
            "weight integral is " + std::to_string(integral) +
            ", expected 1; flag the weight as indicator-type if intended");
    MomentWeights mw;
    mw.w = std::move(w);
    mw.indicator = indicator;
    return mw;
}

double mass(const PopulationState& state) {
    return kern::sum(state.f.data(), state.f.size());
}

double mass(const PopulationState& state, std::size_t p) {
    if (p >= state.subsystems())
        throw index_error("subsystem index " + std::to_string(p) + " out of range");
    return kern::sum(state.f.row(p), state.classes());
}

double moment(const ActivityGrid& grid, const PopulationState& state, std::size_t p,
              int l, const MomentWeights& weights) {
    if (p >= state.subsystems())
        throw index_error("subsystem index " + std::to_string(p) + " out of range");
    if (l < 0) throw invalid_parameter_error("moment order must be >= 0");
    const std::size_t n = state.classes();
    if (grid.u.size() != n || weights.w.size() != n)
        throw dimension_error("grid/weights/state sizes disagree");
    if (l == 0) return kern::dot(state.f.row(p), weights.w.data(), n);
    if (l == 1) return kern::dot3(grid.u.data(), state.f.row(p), weights.w.data(), n);
    std::vector<double> ul(grid.u);
    for (double& v : ul) v = std::pow(v, l);
    return kern::dot3(ul.data(), state.f.row(p), weights.w.data(), n);
}

double mean_wealth(const ActivityGrid& grid, const Matrix& f) {
    if (f.cols() != grid.u.size())
        throw dimension_error("state has " + std::to_string(f.cols()) +
                              " classes, grid has " + std::to_string(grid.u.size()));
    double total = 0.0;
    for (std::size_t p = 0; p < f.rows(); ++p)
        total += kern::dot(grid.u.data(), f.row(p), f.cols());
    return total;
}

double mean_wealth(const ActivityGrid& grid, const PopulationState& state) {
    return mean_wealth(grid, state.f);
}

} // namespace ktap
