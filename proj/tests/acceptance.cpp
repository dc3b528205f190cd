// Acceptance suite: one check per shipped claim, each printing a single
// [PASS]/[FAIL] line with the measured numbers and its wall time. A stated
// runtime budget is part of each check. Run with no arguments for the full
// suite, or pass criterion numbers to run a subset. Exit code is the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ktap/earlywarning.hpp"
#include "ktap/integrate.hpp"
#include "ktap/runner.hpp"
#include "ktap/scenario.hpp"
#include "oracles.hpp"

using namespace ktap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

// ---------------------------------------------------------------- C1
Outcome c1_kernel_exactness() {
    Outcome out;
    double worst_row = 0.0;
    std::vector<double> row;
    for (int n : {3, 5, 7, 9, 11}) {
        row.resize(static_cast<std::size_t>(n));
        for (int gamma = 0; gamma <= n; ++gamma) {
            const WealthKernel kern = build_wealth_kernel(n, gamma);
            for (std::size_t h = 0; h < static_cast<std::size_t>(n); ++h) {
                for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
                    kern.row(h, k, row);
                    double sum = 0.0;
                    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
                        sum += row[i];
                        if (row[i] != 0.0 && (i + 1 < h || i > h + 1))
                            out.require(false, "support outside {h-1,h,h+1} at n=" +
                                                   std::to_string(n));
                    }
                    worst_row = std::max(worst_row, std::fabs(sum - 1.0));
                    if (sum != 1.0)
                        out.require(false, "row sum not exactly 1 at n=" +
                                               std::to_string(n) + " gamma=" +
                                               std::to_string(gamma));
                    if (kern.sigma(h, k) != -kern.sigma(k, h))
                        out.require(false, "sigma not exactly antisymmetric");
                }
            }
        }
    }
    out.note("max |row sum - 1| = " + fmt(worst_row));
    return out;
}

// ---------------------------------------------------------------- C2
Outcome c2_conservation_under_integration() {
    Outcome out;
    std::mt19937 rng(271828);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double worst_mass = 0.0, worst_u = 0.0;

    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 100.0;
    cfg.sample_every = 10;
    cfg.stationarity_tol = 1e-300;   // integrate the full horizon

    const GammaControl modes[2] = {GammaControl::constant, GammaControl::variable};
    const int gamma0s[2] = {3, 7};
    std::vector<Model> models;
    for (int gi = 0; gi < 2; ++gi)
        for (int mi = 0; mi < 2; ++mi)
            models.emplace_back(9, 1,
                                WealthGameParams{gamma0s[gi], 0.0, 0.3, 1.0, modes[mi]},
                                PoliticsParams{0.4, -0.4});

    for (int run = 0; run < 100; ++run) {
        PopulationState state(1, 9);
        double total = 0.0;
        for (std::size_t i = 0; i < 9; ++i) total += state.f(0, i) = dist(rng);
        for (std::size_t i = 0; i < 9; ++i) state.f(0, i) /= total;

        const Trajectory traj = integrate(state, models[static_cast<std::size_t>(run % 4)], cfg);
        const auto report = conservation_report(traj, cfg);
        worst_mass = std::max(worst_mass, report.max_mass_drift);
        worst_u = std::max(worst_u, report.max_mean_wealth_drift);
    }
    out.require(worst_mass < 1e-10, "mass drift " + fmt(worst_mass) + " >= 1e-10");
    out.require(worst_u < 1e-9, "mean-wealth drift " + fmt(worst_u) + " >= 1e-9");
    out.note("100 runs to t=100: max mass drift " + fmt(worst_mass) +
             ", max U drift " + fmt(worst_u));
    return out;
}

// ---------------------------------------------------------------- C3
Outcome c3_gamma_anchors() {
    Outcome out;
    WealthGameParams params;
    params.control = GammaControl::variable;
    for (int n : {3, 5, 9, 15, 101}) {
        for (int gamma0 : {0, 1, n / 2, n - 1, n}) {
            for (double s0 : {-0.9, -0.5, -0.25, 0.0, 0.25, 0.5, 0.9}) {
                params.gamma0 = gamma0;
                params.s0 = s0;
                out.require(critical_distance(s0, params, n) == gamma0,
                            "gamma(s0) != gamma0 at n=" + std::to_string(n));
                out.require(critical_distance(1.0, params, n) == n,
                            "gamma(1) != n at n=" + std::to_string(n));
                out.require(critical_distance(-1.0, params, n) == 0,
                            "gamma(-1) != 0 at n=" + std::to_string(n));
            }
        }
    }
    params.s0 = 0.0;
    params.gamma0 = 3;
    const int g3 = critical_distance(8.0 / 15.0, params, 9);
    params.gamma0 = 7;
    const int g7 = critical_distance(8.0 / 15.0, params, 9);
    out.require(g3 == 5, "gamma(8/15; gamma0=3) = " + std::to_string(g3) + ", want 5");
    out.require(g7 == 8, "gamma(8/15; gamma0=7) = " + std::to_string(g7) + ", want 8");
    out.note("anchors hold on the scan grid; gamma(8/15) = {5, 8}");
    return out;
}

// ---------------------------------------------------------------- C4
Outcome c4_neutral_coincidence() {
    Outcome out;
    for (int gamma0 : {3, 7}) {
        const std::string base = "u0_neutral_g" + std::to_string(gamma0);
        const ScenarioConfig constant = preset_scenario(base);
        const ScenarioConfig variable = preset_scenario(base + "_variable");

        Model cm = build_model(constant);
        Model vm = build_model(variable);
        const Trajectory ct = integrate(initial_state(constant), cm,
                                        constant.integrator);
        const Trajectory vt = integrate(initial_state(variable), vm,
                                        variable.integrator);

        double sup = 0.0;
        const Matrix& cf = ct.back().f;
        const Matrix& vf = vt.back().f;
        for (std::size_t j = 0; j < cf.size(); ++j)
            sup = std::max(sup, std::fabs(cf.data()[j] - vf.data()[j]));
        out.require(sup < 1e-8, "steady-state sup diff " + fmt(sup) + " >= 1e-8");

        double worst_s = 0.0;
        for (const auto& s : ct.samples) worst_s = std::max(worst_s, std::fabs(s.diag.gap.s));
        for (const auto& s : vt.samples) worst_s = std::max(worst_s, std::fabs(s.diag.gap.s));
        out.require(worst_s < 1e-12, "max |S(t)| = " + fmt(worst_s) + " >= 1e-12");
        out.note("gamma0=" + std::to_string(gamma0) + ": sup diff " + fmt(sup) +
                 ", max |S| " + fmt(worst_s));
    }
    return out;
}

// ---------------------------------------------------------------- C5
Outcome c5_extreme_clustering() {
    Outcome out;
    const auto extreme_mass = [](const Matrix& f) {
        double total = 0.0;
        for (std::size_t p = 0; p < f.rows(); ++p)
            total += f(p, 0) + f(p, 1) + f(p, 7) + f(p, 8);
        return total;
    };
    for (const char* mode : {"", "_variable"}) {
        const ScenarioConfig g7 =
            preset_scenario(std::string("u0_poor_g7") + mode);
        const ScenarioConfig g3 =
            preset_scenario(std::string("u0_poor_g3") + mode);
        Model m7 = build_model(g7);
        Model m3 = build_model(g3);
        const double initial = extreme_mass(g7.initial.f0);
        const double final7 =
            extreme_mass(integrate(initial_state(g7), m7, g7.integrator).back().f);
        const double final3 =
            extreme_mass(integrate(initial_state(g3), m3, g3.integrator).back().f);
        const std::string tag = *mode ? "variable" : "constant";
        out.require(final7 > initial, tag + ": extreme mass " + fmt(final7) +
                                          " not above initial " + fmt(initial));
        out.require(final7 > final3, tag + ": gamma0=7 extreme mass " + fmt(final7) +
                                         " not above gamma0=3's " + fmt(final3));
        out.note(tag + ": initial " + fmt(initial) + " -> g3 " + fmt(final3) +
                 ", g7 " + fmt(final7));
    }
    return out;
}

// ---------------------------------------------------------------- C6
Outcome c6_opposition_radicalization() {
    Outcome out;
    for (int gamma0 : {3, 7}) {
        const std::string base = "u0_poor_g" + std::to_string(gamma0);
        const ScenarioConfig constant = preset_scenario(base + "_m9");
        const ScenarioConfig variable = preset_scenario(base + "_variable_m9");
        Model cm = build_model(constant);
        Model vm = build_model(variable);
        const Matrix cf =
            integrate(initial_state(constant), cm, constant.integrator).back().f;
        const Matrix vf =
            integrate(initial_state(variable), vm, variable.integrator).back().f;

        const auto subsystem_masses = [](const Matrix& f) {
            std::vector<double> masses(f.rows(), 0.0);
            for (std::size_t p = 0; p < f.rows(); ++p)
                for (std::size_t i = 0; i < f.cols(); ++i) masses[p] += f(p, i);
            return masses;
        };
        const auto cmass = subsystem_masses(cf);
        const auto vmass = subsystem_masses(vf);
        for (std::size_t p = 1; p < 9; ++p) {
            out.require(cmass[0] > cmass[p], "constant run: p=1 not the maximum");
            out.require(vmass[0] > vmass[p], "variable run: p=1 not the maximum");
        }
        out.require(vmass[0] > cmass[0],
                    "gamma0=" + std::to_string(gamma0) + ": variable p=1 mass " +
                        fmt(vmass[0], 6) + " does not exceed constant's " +
                        fmt(cmass[0], 6));
        out.note("gamma0=" + std::to_string(gamma0) + ": p1 constant " +
                 fmt(cmass[0], 6) + ", variable " + fmt(vmass[0], 6));
    }
    return out;
}

// ---------------------------------------------------------------- C7
Outcome c7_turnround() {
    Outcome out;
    for (int gamma0 : {3, 7}) {
        const ScenarioConfig cfg =
            preset_scenario("u0_poor_g" + std::to_string(gamma0) + "_variable_m9");
        const ReferenceDistribution ref = build_reference_constant_gamma(cfg);
        Model model = build_model(cfg);
        const Trajectory traj = integrate(initial_state(cfg), model, cfg.integrator);
        const auto series = dbs_series(traj, ref, cfg.norm);
        const auto signal = detect_turnround(series);
        if (!signal) {
            out.require(false, "gamma0=" + std::to_string(gamma0) + ": no turnround");
            continue;
        }
        out.require(signal->d_min < series.front().second,
                    "d_min does not undercut d_BS(0)");
        out.require(signal->d_final > signal->d_min, "series does not rise again");
        out.require(signal->d_final > 0.0, "final plateau is zero");
        out.note("gamma0=" + std::to_string(gamma0) + ": d(0)=" +
                 fmt(series.front().second) + ", d_min=" + fmt(signal->d_min) +
                 " at t=" + fmt(signal->t_min) + ", d_final=" + fmt(signal->d_final));
    }
    return out;
}

// ---------------------------------------------------------------- C8
Outcome c8_oracle_equivalence() {
    Outcome out;
    std::mt19937 rng(314159);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3;
        const int m = trial % 2 == 0 ? 1 : 3;
        const int gamma = trial % (n + 1);
        const double mu = 0.2 + 0.15 * (trial % 5);
        const double beta = 0.05 * (trial % 11);
        const double u0 = trial % 3 == 0 ? -0.4 : (trial % 3 == 1 ? 0.0 : 0.4);

        const ActivityGrid grid = build_wealth_grid(n);
        const WealthKernel kernel = build_wealth_kernel(n, gamma);
        const EncounterRate rate = build_encounter_rate(n, gamma, mu, 1.0);
        const OpinionKernel opinion =
            build_opinion_kernel(grid, PoliticsParams{beta, u0}, m);

        Matrix f(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
        double total = 0.0;
        for (std::size_t p = 0; p < f.rows(); ++p)
            for (std::size_t i = 0; i < f.cols(); ++i) total += f(p, i) = dist(rng);
        for (std::size_t p = 0; p < f.rows(); ++p)
            for (std::size_t i = 0; i < f.cols(); ++i) f(p, i) /= total;

        const Matrix got = rhs_multi(PopulationState(f), kernel, opinion, rate);
        const Matrix want = oracle::rhs_multi(
            f, oracle::wealth_table(n, gamma),
            oracle::opinion_table(grid.u, m, beta, u0),
            oracle::encounter_rate(n, gamma, mu, 1.0));
        for (std::size_t p = 0; p < f.rows(); ++p)
            for (std::size_t i = 0; i < f.cols(); ++i)
                worst = std::max(worst, std::fabs(got(p, i) - want(p, i)));
    }
    out.require(worst <= 1e-14, "max |optimized - oracle| = " + fmt(worst));
    out.note("50 instances, max deviation " + fmt(worst));
    return out;
}

// ---------------------------------------------------------------- C9
Outcome c9_integrator_order() {
    Outcome out;
    const Model model(3, 1, WealthGameParams{0, 0.0, 0.5, 1.0, GammaControl::constant},
                      PoliticsParams{0.4, 0.0});
    PopulationState state(1, 3);
    state.f(0, 0) = 0.5;
    state.f(0, 1) = 0.2;
    state.f(0, 2) = 0.3;

    IntegratorConfig cfg;
    cfg.t_max = 1.0;
    cfg.sample_every = 1 << 30;
    cfg.stationarity_tol = 1e-300;

    // the stated reference: explicit Euler at dt = 1e-5
    IntegratorConfig euler_cfg = cfg;
    euler_cfg.method = Method::euler;
    euler_cfg.dt = 1e-5;
    const Matrix euler_ref = integrate(state, model, euler_cfg).back().f;

    const auto sup_diff = [](const Matrix& a, const Matrix& b) {
        double sup = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j)
            sup = std::max(sup, std::fabs(a.data()[j] - b.data()[j]));
        return sup;
    };

    std::vector<double> errs;
    for (double dt : {0.1, 0.05, 0.025}) {
        IntegratorConfig run_cfg = cfg;
        run_cfg.dt = dt;
        errs.push_back(sup_diff(integrate(state, model, run_cfg).back().f, euler_ref));
    }
    const double r1 = errs[0] / errs[1];
    const double r2 = errs[1] / errs[2];
    out.require(r1 >= 8.0 && r1 <= 32.0,
                "ratio err(0.1)/err(0.05) = " + fmt(r1) + " outside [8, 32]");
    out.require(r2 >= 8.0 && r2 <= 32.0,
                "ratio err(0.05)/err(0.025) = " + fmt(r2) + " outside [8, 32]");
    out.note("vs Euler(1e-5) reference: errs {" + fmt(errs[0]) + ", " + fmt(errs[1]) +
             ", " + fmt(errs[2]) + "}, ratios {" + fmt(r1) + ", " + fmt(r2) + "}");

    // diagnostic only (not part of the criterion): the same errors measured
    // against a fine RK4 reference, which resolves the scheme's true order
    IntegratorConfig fine = cfg;
    fine.dt = 1e-4;
    const Matrix rk4_ref = integrate(state, model, fine).back().f;
    std::vector<double> derrs;
    for (double dt : {0.1, 0.05, 0.025}) {
        IntegratorConfig run_cfg = cfg;
        run_cfg.dt = dt;
        derrs.push_back(sup_diff(integrate(state, model, run_cfg).back().f, rk4_ref));
    }
    out.note("[diagnostic, not the criterion] vs RK4(1e-4) reference: ratios {" +
             fmt(derrs[0] / derrs[1]) + ", " + fmt(derrs[1] / derrs[2]) + "}");
    return out;
}

// ---------------------------------------------------------------- C10
Outcome c10_roundtrip_determinism() {
    Outcome out;
    for (const auto& name : preset_names()) {
        const ScenarioConfig preset = preset_scenario(name);
        if (!(parse_scenario(emit_scenario(preset)) == preset))
            out.require(false, "parse/emit round trip broke preset " + name);
    }
    out.note("16 presets round-trip exactly");

    const fs::path dir_a = fs::temp_directory_path() / "ktap_acc_det_a";
    const fs::path dir_b = fs::temp_directory_path() / "ktap_acc_det_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    const ScenarioConfig cfg = preset_scenario("u0_poor_g3_variable");
    RunOptions a, b;
    a.out_dir = dir_a;
    b.out_dir = dir_b;
    run_scenario(cfg, a);
    run_scenario(cfg, b);
    for (const char* fname : {"trajectory.csv", "steady_state.txt", "dbs.csv"}) {
        std::ifstream fa(dir_a / fname, std::ios::binary);
        std::ifstream fb(dir_b / fname, std::ios::binary);
        std::ostringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        if (sa.str() != sb.str())
            out.require(false, std::string(fname) + " differs between identical runs");
    }
    out.note("double run of u0_poor_g3_variable is byte-identical");
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    return out;
}

struct Criterion {
    int number;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "kernel-exactness", 1.0, c1_kernel_exactness},
        {2, "conservation-under-integration", 30.0, c2_conservation_under_integration},
        {3, "gamma-anchors", 1.0, c3_gamma_anchors},
        {4, "neutral-coincidence", 5.0, c4_neutral_coincidence},
        {5, "extreme-clustering", 10.0, c5_extreme_clustering},
        {6, "opposition-radicalization", 60.0, c6_opposition_radicalization},
        {7, "dbs-turnround", 60.0, c7_turnround},
        {8, "oracle-equivalence", 5.0, c8_oracle_equivalence},
        {9, "integrator-order", 10.0, c9_integrator_order},
        {10, "roundtrip-and-determinism", 10.0, c10_roundtrip_determinism},
    };

    std::vector<int> selected;
    for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.number) ==
                selected.end())
            continue;
        Outcome outcome;
        const auto start = std::chrono::steady_clock::now();
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.note(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (elapsed > criterion.budget_seconds) {
            outcome.pass = false;
            outcome.note("runtime " + fmt(elapsed) + " s exceeds budget " +
                         fmt(criterion.budget_seconds) + " s");
        }
        std::printf("[%s] C%d %s (%.2f s): %s\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.number, criterion.name, elapsed,
                    outcome.detail.c_str());
        failures += !outcome.pass;
    }
    return failures;
}
