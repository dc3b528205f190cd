#include "ktap/grid.hpp"

namespace ktap {

ActivityGrid build_wealth_grid(int n) {
    if (n < 3 || n % 2 == 0)
        throw invalid_parameter_error("wealth grid needs odd n >= 3, got n=" +
                                      std::to_string(n));
    ActivityGrid grid;
    grid.n = n;
    grid.u.resize(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        grid.u[static_cast<std::size_t>(i - 1)] =
            static_cast<double>(2 * i - (n + 1)) / static_cast<double>(n - 1);
    grid.delta_u = 2.0 / static_cast<double>(n - 1);
    return grid;
}

OpinionLattice build_opinion_lattice(int m) {
    if (m < 1 || m % 2 == 0)
        throw invalid_parameter_error("opinion lattice needs odd m >= 1, got m=" +
                                      std::to_string(m));
    OpinionLattice lattice;
    lattice.m = m;
    lattice.v.resize(static_cast<std::size_t>(m));
    if (m == 1) {
        lattice.v[0] = 0.0;
        return lattice;
    }
    for (int p = 1; p <= m; ++p)
        lattice.v[static_cast<std::size_t>(p - 1)] =
            static_cast<double>(2 * p - (m + 1)) / static_cast<double>(m - 1);
    return lattice;
}

} // namespace ktap
