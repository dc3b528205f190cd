#include <doctest.h>

#include <cmath>

#include "ktap/scenario.hpp"

using namespace ktap;

TEST_CASE("parse: shipped preset document round-trips and validates") {
    const ScenarioConfig preset = preset_scenario("u0_neutral_g3");
    CHECK(preset.n == 9);
    CHECK(preset.m == 1);
    CHECK(preset.wealth.mu == 0.3);
    CHECK(preset.wealth.gamma0 == 3);
    CHECK(preset.wealth.s0 == 0.0);
    CHECK(preset.wealth.control == GammaControl::constant);
    const ActivityGrid grid = build_wealth_grid(preset.n);
    CHECK(std::fabs(mean_wealth(grid, preset.initial.f0)) < 1e-15);

    const ScenarioConfig reparsed = parse_scenario(emit_scenario(preset));
    CHECK(reparsed == preset);
}

TEST_CASE("parse/emit round-trip holds for every shipped preset") {
    for (const auto& name : preset_names()) {
        const ScenarioConfig preset = preset_scenario(name);
        const ScenarioConfig reparsed = parse_scenario(emit_scenario(preset));
        CHECK(reparsed == preset);
    }
}

TEST_CASE("parse: minimal config applies documented defaults") {
    const ScenarioConfig cfg = parse_scenario("grid.n = 3\ngrid.m = 1\n");
    CHECK(cfg.name == "scenario");
    CHECK(cfg.n == 3);
    CHECK(cfg.wealth.mu == 0.3);
    CHECK(cfg.wealth.gamma0 == 3);
    CHECK(cfg.wealth.control == GammaControl::variable);
    CHECK(cfg.beta == 0.4);
    CHECK(cfg.integrator.method == Method::rk4);
    CHECK(cfg.integrator.dt == 0.01);
    CHECK(cfg.integrator.t_max == 200.0);
    CHECK(cfg.initial.kind == InitialKind::preset);
    // uniform initial: mass 1 across 3 classes
    CHECK(cfg.initial.f0(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(cfg.norm.w == std::vector<double>(3, 1.0));
    CHECK_FALSE(cfg.earlywarning.enabled);
}

TEST_CASE("parse: explicit matrix initial") {
    const std::string text =
        "grid.n = 3\n"
        "grid.m = 3\n"
        "initial.row.1 = [0.2, 0.1, 0.0]\n"
        "initial.row.2 = [0.1, 0.1, 0.1]\n"
        "initial.row.3 = [0.0, 0.2, 0.2]\n";
    const ScenarioConfig cfg = parse_scenario(text);
    CHECK(cfg.initial.kind == InitialKind::matrix);
    CHECK(cfg.initial.f0(0, 0) == 0.2);
    CHECK(cfg.initial.f0(2, 2) == 0.2);
    CHECK(mass(PopulationState(cfg.initial.f0)) == doctest::Approx(1.0));
}

TEST_CASE("parse: located errors") {
    // syntax error with line number
    try {
        parse_scenario("grid.n = 9\nbogus line\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(e.line() == 2);
    }

    // unknown key names itself and its line
    try {
        parse_scenario("grid.n = 9\nnot.a.key = 1\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("not.a.key") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_scenario("grid.n = 9\ngrid.n = 11\n"), config_error);
    CHECK_THROWS_AS(parse_scenario("outputs = [trajectory_csv\n"), config_error);
    CHECK_THROWS_AS(parse_scenario("grid.n = nine\n"), config_error);
    CHECK_THROWS_AS(parse_scenario("grid.n = 8\n"), config_error);
    CHECK_THROWS_AS(parse_scenario("params.mu = 0\n"), config_error);
    CHECK_THROWS_AS(parse_scenario("params.s0 = 1\n"), config_error);
    CHECK_THROWS_AS(parse_scenario("politics.beta = 0.7\n"), config_error);
    CHECK_THROWS_AS(parse_scenario("integrator.method = verlet\n"), config_error);
    CHECK_THROWS_AS(parse_scenario("outputs = [csv]\n"), config_error);
    CHECK_THROWS_AS(parse_scenario("initial.preset = u0_rich\n"), config_error);
}

TEST_CASE("parse: declared-but-wrong quantities are rejected with field paths") {
    // mass 0.9 declared normalized
    const std::string bad_mass =
        "grid.n = 3\n"
        "initial.row.1 = [0.3, 0.3, 0.3]\n";
    try {
        parse_scenario(bad_mass);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("normalized") != std::string::npos);
    }
    // same matrix accepted when declared un-normalized
    CHECK_NOTHROW(parse_scenario(bad_mass + "initial.normalized = false\n"));

    // declared u0 disagrees with the matrix
    const std::string bad_u0 =
        "grid.n = 3\n"
        "initial.row.1 = [0.5, 0.0, 0.5]\n"
        "initial.u0 = -0.2\n";
    try {
        parse_scenario(bad_u0);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("initial.u0") != std::string::npos);
    }

    // negative occupancy names the row
    try {
        parse_scenario("grid.n = 3\ninitial.row.1 = [0.5, -0.1, 0.6]\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("initial.row.1") != std::string::npos);
    }

    // preset and explicit rows conflict
    CHECK_THROWS_AS(parse_scenario("grid.n = 3\ninitial.preset = u0_neutral\n"
                                   "initial.row.1 = [0.4, 0.3, 0.3]\n"),
                    config_error);
}

TEST_CASE("poverty profile: hits its constraints and rejects infeasible targets") {
    const ActivityGrid grid = build_wealth_grid(9);
    const auto profile = poverty_profile(grid, -0.4, 8.0 / 15.0);
    double total = 0.0, u = 0.0, gap = 0.0;
    for (int i = 0; i < 9; ++i) {
        total += profile[static_cast<std::size_t>(i)];
        u += grid.u[static_cast<std::size_t>(i)] * profile[static_cast<std::size_t>(i)];
        if (i < 4) gap += profile[static_cast<std::size_t>(i)];
        if (i > 4) gap -= profile[static_cast<std::size_t>(i)];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(u == doctest::Approx(-0.4).epsilon(1e-13));
    CHECK(gap == doctest::Approx(8.0 / 15.0).epsilon(1e-13));
    for (double v : profile) CHECK(v > 0.0);
    // poverty-skewed: strictly decreasing in wealth
    for (int i = 0; i + 1 < 9; ++i)
        CHECK(profile[static_cast<std::size_t>(i)] >
              profile[static_cast<std::size_t>(i + 1)]);

    // n=3 cannot satisfy U0=-0.4 with S=8/15 (U = -S there)
    const ActivityGrid g3 = build_wealth_grid(3);
    CHECK_THROWS_AS(poverty_profile(g3, -0.4, 8.0 / 15.0), numerical_error);
}

TEST_CASE("presets: naming convention and politics variants") {
    CHECK(is_preset("u0_poor_g7_variable"));
    CHECK(is_preset("u0_neutral_g3"));
    CHECK(is_preset("u0_poor_g3_variable_m9"));
    CHECK_FALSE(is_preset("u0_rich_g3"));
    CHECK(preset_names().size() == 16);

    const ScenarioConfig m9 = preset_scenario("u0_poor_g7_variable_m9");
    CHECK(m9.m == 9);
    CHECK(m9.beta == 0.4);
    CHECK(m9.wealth.control == GammaControl::variable);
    CHECK(m9.earlywarning.enabled);
    CHECK(*m9.initial.declared_u0 == -0.4);
    // politics split: every subsystem carries the same wealth profile
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t p = 1; p < 9; ++p)
            CHECK(m9.initial.f0(p, i) == m9.initial.f0(0, i));

    CHECK_THROWS_AS(preset_scenario("nope"), invalid_parameter_error);
}

TEST_CASE("sweep spec parsing") {
    const std::string text =
        "base = base.cfg\n"
        "axis.1.path = params.gamma0\n"
        "axis.1.values = [3, 7]\n"
        "axis.2.path = params.control\n"
        "axis.2.values = [constant, variable]\n";
    const SweepSpec spec = parse_sweep(text);
    CHECK(spec.base_ref == "base.cfg");
    REQUIRE(spec.axes.size() == 2);
    CHECK(spec.axes[0].path == "params.gamma0");
    CHECK(spec.axes[0].values == std::vector<std::string>{"3", "7"});
    CHECK(spec.axes[1].values == std::vector<std::string>{"constant", "variable"});

    CHECK_THROWS_AS(parse_sweep("axis.1.path = params.mu\naxis.1.values = [1]\n"),
                    config_error);                       // missing base
    CHECK_THROWS_AS(parse_sweep("base = x.cfg\n"), config_error);   // no axes
    CHECK_THROWS_AS(parse_sweep("base = x.cfg\naxis.1.path = params.mu\n"
                                "axis.1.values = []\n"),
                    config_error);                       // empty value list
    CHECK_THROWS_AS(parse_sweep("base = x.cfg\naxis.1.path = params.nope\n"
                                "axis.1.values = [1]\n"),
                    config_error);                       // unresolvable path
}

TEST_CASE("config doc: comments, blanks, and overrides") {
    ConfigDoc doc = ConfigDoc::parse(
        "# a comment line\n"
        "\n"
        "grid.n = 9   # trailing comment\n"
        "grid.m = 1\n");
    CHECK(doc.find("grid.n")->values.front() == "9");
    doc.set("grid.n", "11");
    doc.set("params.mu", "0.5");
    const ScenarioConfig cfg = doc.to_scenario();
    CHECK(cfg.n == 11);
    CHECK(cfg.wealth.mu == 0.5);
}
