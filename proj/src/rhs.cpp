#include "ktap/rhs.hpp"

#include "ktap/kernels.hpp"

namespace ktap {

GameTables::GameTables(WealthKernel k, EncounterRate r)
    : kernel(std::move(k)), rate(std::move(r)) {
    if (rate.eta.rows() != static_cast<std::size_t>(kernel.n))
        throw dimension_error("encounter rate and kernel sizes disagree");
    if (rate.gamma != kernel.gamma)
        throw invalid_parameter_error("encounter rate built for gamma=" +
                                      std::to_string(rate.gamma) +
                                      ", kernel for gamma=" +
                                      std::to_string(kernel.gamma));
    const std::size_t n = static_cast<std::size_t>(kernel.n);
    gain_down = Matrix(n, n);
    gain_stay = Matrix(n, n);
    gain_up = Matrix(n, n);
    for (std::size_t h = 0; h < n; ++h)
        for (std::size_t k2 = 0; k2 < n; ++k2) {
            const double e = rate.eta(h, k2);
            gain_down(h, k2) = e * kernel.down(h, k2);
            gain_stay(h, k2) = e * kernel.stay(h, k2);
            gain_up(h, k2) = e * kernel.up(h, k2);
        }
}

void RhsWorkspace::resize(std::size_t m, std::size_t n) {
    field.resize(n);
    flux_down.resize(n);
    flux_stay.resize(n);
    flux_up.resize(n);
    loss_rate.resize(n);
    if (candidate.rows() != m || candidate.cols() != n) candidate = Matrix(m, n);
}

namespace {

// Per-h field contractions and per-i loss rates against the aggregate
// marginal; shared by the single- and multi-subsystem paths so both produce
// bit-identical arithmetic.
void field_contractions(const GameTables& t, const double* g, std::size_t n,
                        RhsWorkspace& ws) {
    for (std::size_t h = 0; h < n; ++h) {
        ws.flux_down[h] = kern::dot(t.gain_down.row(h), g, n);
        ws.flux_stay[h] = kern::dot(t.gain_stay.row(h), g, n);
        ws.flux_up[h] = kern::dot(t.gain_up.row(h), g, n);
    }
    for (std::size_t i = 0; i < n; ++i)
        ws.loss_rate[i] = kern::dot(t.rate.eta.row(i), g, n);
}

// out_i = sum_h candidate_h * (flux into class i from candidates at h),
// minus nothing; caller subtracts the loss term.
void accumulate_gain(const double* candidate, const RhsWorkspace& ws, std::size_t n,
                     double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        const double c = candidate[h];
        if (h > 0) out[h - 1] += c * ws.flux_down[h];
        out[h] += c * ws.flux_stay[h];
        if (h + 1 < n) out[h + 1] += c * ws.flux_up[h];
    }
}

void aggregate_marginal(const Matrix& f, std::vector<double>& g) {
    const std::size_t n = f.cols();
    const double* first = f.row(0);
    for (std::size_t i = 0; i < n; ++i) g[i] = first[i];
    for (std::size_t p = 1; p < f.rows(); ++p) {
        const double* row = f.row(p);
        for (std::size_t i = 0; i < n; ++i) g[i] += row[i];
    }
}

// candidate(r, h) = sum_p f^p_h * B^p_h(r); three terms by locality of the
// opinion kernel.
void opinion_contraction(const Matrix& f, const OpinionKernel& ok, Matrix& candidate) {
    const std::size_t m = f.rows();
    const std::size_t n = f.cols();
    for (std::size_t r = 0; r < m; ++r) {
        double* crow = candidate.row(r);
        for (std::size_t h = 0; h < n; ++h) {
            double acc = r > 0 ? f(r - 1, h) * ok.up(h, r - 1) : 0.0;
            acc += f(r, h) * ok.stay(h, r);
            if (r + 1 < m) acc += f(r + 1, h) * ok.down(h, r + 1);
            crow[h] = acc;
        }
    }
}

void check_shapes(const Matrix& f, const GameTables& t, const OpinionKernel* ok) {
    if (f.cols() != static_cast<std::size_t>(t.kernel.n))
        throw dimension_error("state has " + std::to_string(f.cols()) +
                              " classes, kernel has " + std::to_string(t.kernel.n));
    if (ok) {
        if (ok->n != t.kernel.n)
            throw dimension_error("opinion kernel class count mismatch");
        if (f.rows() != static_cast<std::size_t>(ok->m))
            throw dimension_error("state has " + std::to_string(f.rows()) +
                                  " subsystems, opinion kernel has " +
                                  std::to_string(ok->m));
    }
}

} // namespace

void rhs_multi_into(const Matrix& f, const GameTables& tables,
                    const OpinionKernel& opinion, Matrix& out, RhsWorkspace& ws) {
    check_shapes(f, tables, &opinion);
    const std::size_t m = f.rows();
    const std::size_t n = f.cols();
    if (!out.same_shape(f)) out = Matrix(m, n);
    ws.resize(m, n);

    aggregate_marginal(f, ws.field);
    field_contractions(tables, ws.field.data(), n, ws);
    opinion_contraction(f, opinion, ws.candidate);

    for (std::size_t r = 0; r < m; ++r) {
        double* orow = out.row(r);
        accumulate_gain(ws.candidate.row(r), ws, n, orow);
        const double* frow = f.row(r);
        for (std::size_t i = 0; i < n; ++i) orow[i] -= frow[i] * ws.loss_rate[i];
    }
}

Matrix rhs_single(const PopulationState& state, const WealthKernel& kernel,
                  const EncounterRate& rate) {
    if (state.subsystems() != 1)
        throw dimension_error("rhs_single expects a single-subsystem state");
    GameTables tables(kernel, rate);
    check_shapes(state.f, tables, nullptr);
    const std::size_t n = state.classes();
    RhsWorkspace ws;
    ws.resize(1, n);
    Matrix out(1, n);

    aggregate_marginal(state.f, ws.field);
    field_contractions(tables, ws.field.data(), n, ws);
    double* orow = out.row(0);
    accumulate_gain(state.f.row(0), ws, n, orow);
    const double* frow = state.f.row(0);
    for (std::size_t i = 0; i < n; ++i) orow[i] -= frow[i] * ws.loss_rate[i];
    return out;
}

Matrix rhs_multi(const PopulationState& state, const WealthKernel& wealth_kernel,
                 const OpinionKernel& opinion_kernel, const EncounterRate& rate) {
    GameTables tables(wealth_kernel, rate);
    Matrix out;
    RhsWorkspace ws;
    rhs_multi_into(state.f, tables, opinion_kernel, out, ws);
    return out;
}

Model::Model(int n, int m, WealthGameParams wealth, PoliticsParams politics)
    : grid_(build_wealth_grid(n)),
      lattice_(build_opinion_lattice(m)),
      wealth_(wealth),
      politics_(politics),
      opinion_(build_opinion_kernel(grid_, politics, m)) {
    wealth_.validate(n);
    tables_.resize(static_cast<std::size_t>(n) + 1);
    const auto build = [&](int gamma) {
        tables_[static_cast<std::size_t>(gamma)] = std::make_unique<GameTables>(
            build_wealth_kernel(n, gamma),
            build_encounter_rate(n, gamma, wealth_.mu, wealth_.eta0));
    };
    if (wealth_.control == GammaControl::variable) {
        for (int gamma = 0; gamma <= n; ++gamma) build(gamma);
    } else {
        build(wealth_.gamma0);
    }
}

const GameTables& Model::tables(int gamma) const {
    if (gamma < 0 || gamma > grid_.n || !tables_[static_cast<std::size_t>(gamma)])
        throw invalid_parameter_error("no cached tables for gamma=" +
                                      std::to_string(gamma));
    return *tables_[static_cast<std::size_t>(gamma)];
}

int Model::gamma_for(const Matrix& f, bool* clamped) const {
    if (wealth_.control == GammaControl::constant) {
        if (clamped) *clamped = false;
        return wealth_.gamma0;
    }
    std::vector<double> g(f.cols());
    aggregate_marginal(f, g);
    const SocialGap gap = social_gap_of_marginal(g);
    return critical_distance(gap.s, wealth_, grid_.n, clamped);
}

int Model::derivative(const Matrix& f, Matrix& out, RhsWorkspace& ws,
                      bool* clamped) const {
    if (f.rows() != static_cast<std::size_t>(lattice_.m) ||
        f.cols() != static_cast<std::size_t>(grid_.n))
        throw dimension_error("state shape does not match model dimensions");
    int gamma;
    if (wealth_.control == GammaControl::constant) {
        if (clamped) *clamped = false;
        gamma = wealth_.gamma0;
    } else {
        ws.resize(f.rows(), f.cols());
        aggregate_marginal(f, ws.field);
        const SocialGap gap = social_gap_of_marginal(ws.field);
        gamma = critical_distance(gap.s, wealth_, grid_.n, clamped);
    }
    rhs_multi_into(f, tables(gamma), opinion_, out, ws);
    return gamma;
}

} // namespace ktap
