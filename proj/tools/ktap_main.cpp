// ktap: deterministic simulator for discrete kinetic wealth/opinion games
// with a distribution-driven critical distance and an early-warning distance
// signal. Subcommands: run, sweep, validate, presets.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ktap/kernels.hpp"
#include "ktap/politics_game.hpp"
#include "ktap/runner.hpp"
#include "ktap/scenario.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ktap::io_error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A scenario argument is a file path, "preset:<name>", or a bare preset name.
ktap::ScenarioConfig load_scenario(const std::string& ref) {
    if (ref.rfind("preset:", 0) == 0) return ktap::preset_scenario(ref.substr(7));
    if (fs::exists(ref)) return ktap::parse_scenario(read_file(ref));
    if (ktap::is_preset(ref)) return ktap::preset_scenario(ref);
    throw ktap::io_error("no such scenario file or preset: '" + ref + "'");
}

int run_command(const std::string& ref, const ktap::RunOptions& options) {
    const ktap::ScenarioConfig config = load_scenario(ref);
    const ktap::RunResult result = ktap::run_scenario(config, options);
    std::cout << result.summary.to_string();
    if (!result.summary.conservation.pass())
        std::cout << "warning: conservation alarms were raised (run not aborted)\n";
    return 0;
}

int sweep_command(const std::string& sweep_file, const ktap::RunOptions& options) {
    const fs::path sweep_path(sweep_file);
    const ktap::SweepSpec spec = ktap::parse_sweep(read_file(sweep_path));

    std::string base_text;
    if (spec.base_ref.rfind("preset:", 0) == 0) {
        base_text = ktap::emit_scenario(ktap::preset_scenario(spec.base_ref.substr(7)));
    } else {
        fs::path base_path(spec.base_ref);
        if (base_path.is_relative()) base_path = sweep_path.parent_path() / base_path;
        base_text = read_file(base_path);
    }
    const ktap::ConfigDoc base = ktap::ConfigDoc::parse(base_text);

    const ktap::SweepResult result = ktap::run_sweep(spec, base, options);
    int ok = 0;
    for (const auto& cell : result.cells) {
        std::cout << cell.dir << ": " << cell.status;
        if (!cell.message.empty()) std::cout << " (" << cell.message << ")";
        std::cout << "\n";
        ok += cell.status == "ok";
    }
    std::cout << ok << "/" << result.cells.size() << " cells ok, index at "
              << result.index_file.string() << "\n";
    // Per-cell failures are recorded in the index; the sweep itself succeeds.
    return 0;
}

int validate_command(const std::string& ref) {
    const ktap::ScenarioConfig config = load_scenario(ref);
    const ktap::ActivityGrid grid = ktap::build_wealth_grid(config.n);
    std::cout << "scenario '" << config.name << "' parsed: n=" << config.n
              << ", m=" << config.m << ", "
              << (config.wealth.control == ktap::GammaControl::variable ? "variable"
                                                                        : "constant")
              << " gamma, gamma0=" << config.wealth.gamma0 << "\n";
    std::cout << "initial: mass = "
              << ktap::format_double(ktap::mass(ktap::initial_state(config)))
              << ", U = "
              << ktap::format_double(ktap::mean_wealth(grid, config.initial.f0))
              << ", S = "
              << ktap::format_double(
                     ktap::social_gap(ktap::PopulationState(config.initial.f0)).s)
              << "\n";

    bool all_pass = true;
    const auto check_gamma = [&](int gamma) {
        const ktap::WealthKernel kernel = ktap::build_wealth_kernel(config.n, gamma);
        const auto report = ktap::verify_conservation_conditions(kernel, grid);
        if (!report.pass()) {
            std::cout << "gamma=" << gamma << ":\n" << report.to_string();
            all_pass = false;
        }
    };
    if (config.wealth.control == ktap::GammaControl::variable)
        for (int gamma = 0; gamma <= config.n; ++gamma) check_gamma(gamma);
    else
        check_gamma(config.wealth.gamma0);
    std::cout << "wealth kernel conservation checks: "
              << (all_pass ? "pass" : "FAIL") << " ("
              << (config.wealth.control == ktap::GammaControl::variable
                      ? "all gamma in [0, n]"
                      : "gamma0 only")
              << ")\n";

    const ktap::PoliticsParams politics{
        config.beta, ktap::mean_wealth(grid, config.initial.f0)};
    const ktap::OpinionKernel opinion =
        ktap::build_opinion_kernel(grid, politics, config.m);
    const auto opinion_report = ktap::verify_opinion_normalization(opinion);
    std::cout << "opinion kernel checks: "
              << (opinion_report.pass() ? "pass" : "FAIL") << "\n";
    if (!opinion_report.pass()) std::cout << opinion_report.to_string();

    return all_pass && opinion_report.pass() ? 0 : 1;
}

int presets_command(const std::string& export_dir) {
    if (!export_dir.empty()) {
        fs::create_directories(export_dir);
        for (const auto& name : ktap::preset_names()) {
            const fs::path path = fs::path(export_dir) / (name + ".cfg");
            std::ofstream out(path, std::ios::binary);
            if (!out) throw ktap::io_error("cannot write '" + path.string() + "'");
            out << ktap::emit_scenario(ktap::preset_scenario(name));
        }
        std::cout << "wrote " << ktap::preset_names().size() << " preset files to "
                  << export_dir << "\n";
        return 0;
    }
    for (const auto& name : ktap::preset_names())
        std::cout << name << "\n    " << ktap::preset_summary(name) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ktap: kinetic active-particle simulator for wealth/opinion games"};
    app.require_subcommand(1);

    std::string scenario_ref, sweep_file, out_dir = "out", export_dir;
    double dt = 0.0, tmax = 0.0;
    bool seedless = false;
    int jobs = 1;

    auto* run = app.add_subcommand("run", "run one scenario file or preset");
    run->add_option("scenario", scenario_ref, "scenario file or preset name")
        ->required();
    run->add_option("--out", out_dir, "output directory");
    auto* run_dt = run->add_option("--dt", dt, "override integrator.dt");
    auto* run_tmax = run->add_option("--tmax", tmax, "override integrator.t_max");
    run->add_flag("--seedless", seedless,
                  "run twice and fail if any output byte differs");

    auto* sweep = app.add_subcommand("sweep", "run the Cartesian product of a sweep file");
    sweep->add_option("sweepfile", sweep_file, "sweep description file")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "concurrent cells");
    auto* sweep_dt = sweep->add_option("--dt", dt, "override integrator.dt");
    auto* sweep_tmax = sweep->add_option("--tmax", tmax, "override integrator.t_max");

    auto* validate = app.add_subcommand(
        "validate", "parse a scenario and run the kernel verification only");
    validate->add_option("scenario", scenario_ref, "scenario file or preset name")
        ->required();

    auto* presets = app.add_subcommand("presets", "list shipped scenario presets");
    presets->add_option("--export", export_dir, "write each preset as a .cfg file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;   // usage problems are config errors
    }

    try {
        ktap::RunOptions options;
        options.out_dir = out_dir;
        options.seedless_check = seedless;
        options.jobs = jobs;
        if (*run_dt || *sweep_dt) options.dt_override = dt;
        if (*run_tmax || *sweep_tmax) options.tmax_override = tmax;

        if (run->parsed()) return run_command(scenario_ref, options);
        if (sweep->parsed()) return sweep_command(sweep_file, options);
        if (validate->parsed()) return validate_command(scenario_ref);
        if (presets->parsed()) return presets_command(export_dir);
        return 1;
    } catch (const ktap::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ktap::invalid_parameter_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ktap::dimension_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ktap::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const ktap::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
