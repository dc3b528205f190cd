#pragma once

#include <memory>
#include <vector>

#include "ktap/matrix.hpp"
#include "ktap/politics_game.hpp"
#include "ktap/state.hpp"
#include "ktap/wealth_game.hpp"

namespace ktap {

/// Everything the right-hand side needs for one value of the critical
/// distance: the game table, the encounter rate, and the rate-weighted
/// diagonals gain_* = eta .* (down|stay|up) that the gain contraction reads.
struct GameTables {
    WealthKernel kernel;
    EncounterRate rate;
    Matrix gain_down, gain_stay, gain_up;   // n x n each

    GameTables(WealthKernel k, EncounterRate r);
};

/// Scratch buffers for derivative evaluation; reused across calls so the
/// integrator's inner loop does not allocate.
struct RhsWorkspace {
    std::vector<double> field;          // aggregate wealth marginal g_k
    std::vector<double> flux_down;      // per h: sum_k eta_hk B_hk(h-1) g_k
    std::vector<double> flux_stay;
    std::vector<double> flux_up;
    std::vector<double> loss_rate;      // per i: sum_k eta_ik g_k
    Matrix candidate;                   // m x n opinion-contracted weights

    void resize(std::size_t m, std::size_t n);
};

/// Single-subsystem evolution right-hand side:
///   df_i/dt = sum_hk eta_hk B_hk(i) f_h f_k - f_i sum_k eta_ik f_k.
/// The state must have exactly one subsystem row.
Matrix rhs_single(const PopulationState& state, const WealthKernel& kernel,
                  const EncounterRate& rate);

/// Multi-subsystem right-hand side with factorized transitions:
///   df^r_i/dt = sum_pqhk eta_hk B_hk(i) B^p_h(r) f^p_h f^q_k
///               - f^r_i sum_qk eta_ik f^q_k.
/// The six-index sum is evaluated as two contractions: the field sum over
/// (q, k) collapses onto the aggregate marginal, and the opinion sum over p
/// onto per-(h, r) candidate weights.
Matrix rhs_multi(const PopulationState& state, const WealthKernel& wealth_kernel,
                 const OpinionKernel& opinion_kernel, const EncounterRate& rate);

void rhs_multi_into(const Matrix& f, const GameTables& tables,
                    const OpinionKernel& opinion, Matrix& out, RhsWorkspace& ws);

/// The bound model: grids, parameters, the opinion kernel, and game tables
/// cached per critical distance. Immutable after construction; derivative
/// evaluation is pure, so concurrent use on independent outputs is safe.
class Model {
public:
    Model(int n, int m, WealthGameParams wealth, PoliticsParams politics);

    const ActivityGrid& grid() const noexcept { return grid_; }
    const OpinionLattice& lattice() const noexcept { return lattice_; }
    const WealthGameParams& wealth_params() const noexcept { return wealth_; }
    const PoliticsParams& politics_params() const noexcept { return politics_; }
    const OpinionKernel& opinion_kernel() const noexcept { return opinion_; }
    int n() const noexcept { return grid_.n; }
    int m() const noexcept { return lattice_.m; }

    /// Tables for one gamma; cached at construction (all of [0, n] in
    /// variable mode, just gamma0 in constant mode).
    const GameTables& tables(int gamma) const;

    /// gamma for the given occupancies (from the instantaneous social gap in
    /// variable mode). clamped reports range clamping of the quadratic.
    int gamma_for(const Matrix& f, bool* clamped = nullptr) const;

    /// out = df/dt for the instantaneous gamma. Returns the gamma used.
    int derivative(const Matrix& f, Matrix& out, RhsWorkspace& ws,
                   bool* clamped = nullptr) const;

private:
    ActivityGrid grid_;
    OpinionLattice lattice_;
    WealthGameParams wealth_;
    PoliticsParams politics_;
    OpinionKernel opinion_;
    std::vector<std::unique_ptr<GameTables>> tables_;   // indexed by gamma
};

} // namespace ktap
