#pragma once

#include <vector>

#include "ktap/errors.hpp"

namespace ktap {

/// Uniform wealth-class grid on [-1, 1]. n is odd so the central class sits
/// exactly at 0; classes below it are poor (u < 0), above it wealthy (u > 0).
/// Class values are u_i = (2i - (n+1))/(n-1) for i = 1..n, evaluated as a
/// single integer-over-integer division so endpoints and the centre are exact
/// and the grid is bitwise symmetric.
struct ActivityGrid {
    int n = 0;
    std::vector<double> u;
    double delta_u = 0.0;

    int centre() const noexcept { return (n - 1) / 2; } // 0-based index of u = 0
};

/// Uniform political-stance lattice on [-1, 1]: v_1 = -1 is the strongest
/// opposition, v_m = 1 the maximum support. m = 1 degenerates to v = {0}.
struct OpinionLattice {
    int m = 0;
    std::vector<double> v;
};

ActivityGrid build_wealth_grid(int n);
OpinionLattice build_opinion_lattice(int m);

} // namespace ktap
