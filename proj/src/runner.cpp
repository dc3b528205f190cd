#include "ktap/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace ktap {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);   // LF line endings everywhere
    if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void flush_or_throw(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw io_error("write failed for '" + path.string() + "'");
}

} // namespace

void write_trajectory_csv(const fs::path& path, const Trajectory& traj,
                          const std::vector<std::pair<double, double>>* dbs,
                          int m, int n) {
    if (dbs && dbs->size() != traj.samples.size())
        throw dimension_error("d_BS series and trajectory sample counts disagree");
    auto out = open_out(path);
    out << "t";
    for (int p = 1; p <= m; ++p)
        for (int i = 1; i <= n; ++i) out << ",f_" << p << "_" << i;
    out << ",mass,U,S,gamma";
    if (dbs) out << ",dBS";
    out << "\n";
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        const auto& sample = traj.samples[s];
        out << format_double(sample.t);
        for (std::size_t p = 0; p < sample.f.rows(); ++p)
            for (std::size_t i = 0; i < sample.f.cols(); ++i)
                out << "," << format_double(sample.f(p, i));
        out << "," << format_double(sample.diag.mass) << ","
            << format_double(sample.diag.mean_wealth) << ","
            << format_double(sample.diag.gap.s) << "," << sample.diag.gamma;
        if (dbs) out << "," << format_double((*dbs)[s].second);
        out << "\n";
    }
    flush_or_throw(out, path);
}

void write_steady_state(const fs::path& path, const ScenarioConfig& config,
                        const TrajectorySample& sample, const std::string& provenance) {
    auto out = open_out(path);
    out << "# ktap steady state\n";
    out << "# name = " << config.name << "\n";
    out << "# n = " << config.n << "\n";
    out << "# m = " << config.m << "\n";
    out << "# t = " << format_double(sample.t) << "\n";
    out << "# provenance = " << provenance << "\n";
    for (std::size_t p = 0; p < sample.f.rows(); ++p)
        for (std::size_t i = 0; i < sample.f.cols(); ++i)
            out << "f_" << p + 1 << "_" << i + 1 << " = "
                << format_double(sample.f(p, i)) << "\n";
    flush_or_throw(out, path);
}

void write_dbs_csv(const fs::path& path,
                   const std::vector<std::pair<double, double>>& series) {
    auto out = open_out(path);
    out << "t,dBS\n";
    for (const auto& [t, d] : series)
        out << format_double(t) << "," << format_double(d) << "\n";
    flush_or_throw(out, path);
}

void write_plotdata(const fs::path& data_path, const fs::path& desc_path,
                    const ScenarioConfig& config, const TrajectorySample& sample) {
    const ActivityGrid grid = build_wealth_grid(config.n);
    auto out = open_out(data_path);
    for (std::size_t i = 0; i < static_cast<std::size_t>(config.n); ++i) {
        out << format_double(grid.u[i]);
        for (std::size_t p = 0; p < sample.f.rows(); ++p)
            out << " " << format_double(sample.f(p, i));
        out << "\n";
    }
    flush_or_throw(out, data_path);

    auto desc = open_out(desc_path);
    desc << "columns: u";
    for (int p = 1; p <= config.m; ++p) desc << " f_" << p;
    desc << "\n";
    desc << "scenario: " << config.name << "\n";
    desc << "state at t = " << format_double(sample.t) << "\n";
    desc << "rows: one per wealth class, poorest first\n";
    flush_or_throw(desc, desc_path);
}

ReferenceDistribution read_state_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read state file '" + path.string() + "'");
    int n = -1, m = -1;
    std::string provenance = "file:" + path.string();
    std::vector<std::tuple<int, int, double>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream hs(line.substr(1));
            std::string key, eq;
            if (hs >> key >> eq && eq == "=") {
                std::string rest;
                std::getline(hs, rest);
                const auto b = rest.find_first_not_of(' ');
                rest = b == std::string::npos ? "" : rest.substr(b);
                if (key == "n") n = std::stoi(rest);
                else if (key == "m") m = std::stoi(rest);
                else if (key == "provenance") provenance = rest;
            }
            continue;
        }
        int p = 0, i = 0;
        char tail = '\0';
        double value = 0.0;
        // one "f_<p>_<i> = <value>" per line
        const int got = std::sscanf(line.c_str(), "f_%d_%d = %lf %c", &p, &i, &value,
                                    &tail);
        if (got != 3)
            throw io_error("state file '" + path.string() + "': malformed line " +
                           std::to_string(lineno) + ": '" + line + "'");
        entries.emplace_back(p, i, value);
    }
    if (n <= 0 || m <= 0)
        throw io_error("state file '" + path.string() + "' is missing n/m headers");
    ReferenceDistribution ref;
    ref.f_tilde = Matrix(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    std::vector<bool> seen(static_cast<std::size_t>(n) * static_cast<std::size_t>(m),
                           false);
    for (const auto& [p, i, value] : entries) {
        if (p < 1 || p > m || i < 1 || i > n)
            throw io_error("state file '" + path.string() + "': entry f_" +
                           std::to_string(p) + "_" + std::to_string(i) +
                           " is out of range");
        ref.f_tilde(static_cast<std::size_t>(p - 1), static_cast<std::size_t>(i - 1)) =
            value;
        seen[static_cast<std::size_t>(p - 1) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(i - 1)] = true;
    }
    for (bool s : seen)
        if (!s)
            throw io_error("state file '" + path.string() + "' has missing entries");
    ref.provenance = provenance;
    return ref;
}

namespace {

RunResult run_once(ScenarioConfig config, const fs::path& out_dir, bool write_files) {
    RunResult result;

    Model model = build_model(config);
    result.trajectory = integrate(initial_state(config), model, config.integrator);

    if (config.earlywarning.enabled) {
        if (config.earlywarning.source == ReferenceSource::twin)
            result.reference = build_reference_constant_gamma(config);
        else
            result.reference = read_state_file(config.earlywarning.reference_file);
        if (!result.reference->f_tilde.same_shape(result.trajectory.front().f))
            throw dimension_error("early-warning reference shape does not match state");
        result.dbs = dbs_series(result.trajectory, *result.reference, config.norm);
    }

    RunSummary& summary = result.summary;
    summary.name = config.name;
    summary.stationary_time = result.trajectory.stationary_time;
    const TrajectorySample& last = result.trajectory.back();
    summary.final_t = last.t;
    summary.final_mass = last.diag.mass;
    summary.final_mean_wealth = last.diag.mean_wealth;
    summary.final_gap = last.diag.gap;
    summary.final_gamma = last.diag.gamma;
    summary.final_rhs_sup = last.diag.rhs_sup;
    summary.conservation = conservation_report(result.trajectory, config.integrator);
    summary.gamma_switch_steps = result.trajectory.gamma_switch_steps;
    summary.clamp_events = result.trajectory.clamp_events;
    if (!result.dbs.empty()) {
        summary.dbs_final = result.dbs.back().second;
        summary.turnround = detect_turnround(result.dbs);
    }

    if (write_files) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec && !fs::is_directory(out_dir))
            throw io_error("cannot create output directory '" + out_dir.string() + "'");
        const auto emit = [&](OutputKind kind) {
            switch (kind) {
            case OutputKind::trajectory_csv: {
                const fs::path p = out_dir / "trajectory.csv";
                write_trajectory_csv(p, result.trajectory,
                                     config.earlywarning.enabled ? &result.dbs : nullptr,
                                     config.m, config.n);
                summary.files_written.push_back(p.string());
                break;
            }
            case OutputKind::steady_state: {
                const fs::path p = out_dir / "steady_state.txt";
                std::ostringstream prov;
                prov << "run of '" << config.name << "', "
                     << (result.trajectory.stationary_time ? "stationary" : "at t_max");
                write_steady_state(p, config, last, prov.str());
                summary.files_written.push_back(p.string());
                break;
            }
            case OutputKind::dbs_csv: {
                if (!config.earlywarning.enabled)
                    throw config_error("outputs: dbs_csv requires earlywarning.enabled");
                const fs::path p = out_dir / "dbs.csv";
                write_dbs_csv(p, result.dbs);
                summary.files_written.push_back(p.string());
                break;
            }
            case OutputKind::plotdata: {
                const fs::path p = out_dir / "plot.dat";
                const fs::path d = out_dir / "plot.txt";
                write_plotdata(p, d, config, last);
                summary.files_written.push_back(p.string());
                summary.files_written.push_back(d.string());
                break;
            }
            }
        };
        for (OutputKind kind : config.outputs) emit(kind);
    }

    result.config = std::move(config);
    return result;
}

void compare_runs_bytewise(const fs::path& a, const fs::path& b) {
    for (const auto& entry : fs::directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const fs::path other = b / entry.path().filename();
        const std::string ta = read_text(entry.path());
        const std::string tb = read_text(other);
        if (ta != tb)
            throw numerical_error("seedless check failed: '" +
                                  entry.path().filename().string() +
                                  "' differs between identical runs");
    }
}

} // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    ScenarioConfig effective = config;
    if (options.dt_override) effective.integrator.dt = *options.dt_override;
    if (options.tmax_override) effective.integrator.t_max = *options.tmax_override;
    effective.integrator.validate();

    if (options.seedless_check && options.write_outputs) {
        const fs::path check_dir = options.out_dir / ".seedless_check";
        RunResult first = run_once(effective, options.out_dir, true);
        run_once(effective, check_dir, true);
        compare_runs_bytewise(options.out_dir, check_dir);
        std::error_code ec;
        fs::remove_all(check_dir, ec);
        return first;
    }
    return run_once(effective, options.out_dir, options.write_outputs);
}

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')
                   ? c : '_';
    return out;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec, const ConfigDoc& base,
                      const RunOptions& options) {
    if (spec.axes.empty()) throw config_error("sweep declares no axes");

    std::size_t total = 1;
    for (const auto& axis : spec.axes) {
        if (axis.values.empty())
            throw config_error("sweep axis '" + axis.path + "' has no values");
        total *= axis.values.size();
    }

    SweepResult result;
    result.cells.resize(total);
    for (std::size_t cell = 0; cell < total; ++cell) {
        SweepCell& c = result.cells[cell];
        c.index = static_cast<int>(cell);
        std::size_t rem = cell;
        // row-major over axes in declaration order, last axis fastest
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const auto& axis = spec.axes[a];
            c.assignment.emplace_back(axis.path, axis.values[rem % axis.values.size()]);
            rem /= axis.values.size();
        }
        std::reverse(c.assignment.begin(), c.assignment.end());
        std::ostringstream dir;
        char idxbuf[16];
        std::snprintf(idxbuf, sizeof(idxbuf), "cell_%03d", c.index);
        dir << idxbuf;
        for (const auto& [path, value] : c.assignment) {
            const auto leaf = path.rfind('.');
            dir << "_" << sanitize(leaf == std::string::npos ? path
                                                             : path.substr(leaf + 1))
                << "=" << sanitize(value);
        }
        c.dir = dir.str();
    }

    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec && !fs::is_directory(options.out_dir))
        throw io_error("cannot create output directory '" + options.out_dir.string() +
                       "'");

    std::atomic<std::size_t> next{0};
    const int jobs = std::max(1, options.jobs);
    const auto worker = [&]() {
        for (;;) {
            const std::size_t cell = next.fetch_add(1);
            if (cell >= total) return;
            SweepCell& c = result.cells[cell];
            try {
                ConfigDoc doc = base;
                for (const auto& [path, value] : c.assignment) doc.set(path, value);
                ScenarioConfig config = doc.to_scenario();
                RunOptions cell_options = options;
                cell_options.out_dir = options.out_dir / c.dir;
                cell_options.jobs = 1;
                cell_options.seedless_check = false;
                RunResult r = run_scenario(config, cell_options);
                c.summary = std::move(r.summary);
                c.status = "ok";
            } catch (const config_error& e) {
                c.status = "config_error";
                c.message = e.what();
            } catch (const numerical_error& e) {
                c.status = "numerical_error";
                c.message = e.what();
            } catch (const io_error& e) {
                c.status = "io_error";
                c.message = e.what();
            } catch (const std::exception& e) {
                c.status = "config_error";
                c.message = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    result.index_file = options.out_dir / "index.csv";
    auto out = open_out(result.index_file);
    out << "cell,dir";
    for (const auto& axis : spec.axes) out << "," << axis.path;
    out << ",status,stationary_time,final_mass,final_U,final_S,final_gamma,"
           "dbs_final,turnround,message\n";
    for (const auto& c : result.cells) {
        out << c.index << "," << c.dir;
        for (const auto& [path, value] : c.assignment) out << "," << value;
        out << "," << c.status;
        if (c.summary) {
            const RunSummary& s = *c.summary;
            out << ","
                << (s.stationary_time ? format_double(*s.stationary_time) : "");
            out << "," << format_double(s.final_mass) << ","
                << format_double(s.final_mean_wealth) << ","
                << format_double(s.final_gap.s) << "," << s.final_gamma << ","
                << (s.dbs_final ? format_double(*s.dbs_final) : "") << ","
                << (s.turnround ? "yes" : "no");
        } else {
            for (int field = 0; field < 7; ++field) out << ",";
        }
        std::string msg = c.message;
        for (char& ch : msg)
            if (ch == ',' || ch == '\n') ch = ';';
        out << "," << msg << "\n";
    }
    flush_or_throw(out, result.index_file);
    return result;
}

bool SweepResult::all_ok() const {
    for (const auto& c : cells)
        if (c.status != "ok") return false;
    return true;
}

std::string RunSummary::to_string() const {
    std::ostringstream os;
    os << "scenario '" << name << "'\n";
    if (stationary_time)
        os << "  stationary at t = " << *stationary_time << "\n";
    else
        os << "  ran to t_max = " << final_t << " (max|df/dt| = " << final_rhs_sup
           << ")\n";
    os << "  final: mass = " << final_mass << ", U = " << final_mean_wealth
       << ", S = " << final_gap.s << ", gamma = " << final_gamma << "\n";
    os << "  " << conservation.to_string() << "\n";
    if (gamma_switch_steps > 0)
        os << "  gamma switched within " << gamma_switch_steps << " step(s)\n";
    if (clamp_events > 0)
        os << "  gamma quadratic clamped " << clamp_events << " time(s)\n";
    if (dbs_final) os << "  d_BS final = " << *dbs_final << "\n";
    if (turnround)
        os << "  turnround: d_min = " << turnround->d_min << " at t = "
           << turnround->t_min << ", d_final = " << turnround->d_final
           << ", rise ratio = " << turnround->rise_ratio << "\n";
    for (const auto& f : files_written) os << "  wrote " << f << "\n";
    return os.str();
}

} // namespace ktap
