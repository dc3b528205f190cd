#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ktap/earlywarning.hpp"
#include "ktap/integrate.hpp"
#include "ktap/scenario.hpp"

namespace ktap {

struct RunOptions {
    std::filesystem::path out_dir = "out";
    std::optional<double> dt_override;
    std::optional<double> tmax_override;
    bool seedless_check = false;   // run twice, fail on any byte difference
    int jobs = 1;                  // sweep cell concurrency
    bool write_outputs = true;
};

struct RunSummary {
    std::string name;
    std::optional<double> stationary_time;
    double final_t = 0.0;
    double final_mass = 0.0;
    double final_mean_wealth = 0.0;
    SocialGap final_gap;
    int final_gamma = 0;
    double final_rhs_sup = 0.0;
    TrajectoryConservationReport conservation;
    std::optional<double> dbs_final;
    std::optional<TurnroundSignal> turnround;
    long gamma_switch_steps = 0;
    long clamp_events = 0;
    std::vector<std::string> files_written;

    std::string to_string() const;
};

/// Full result of one scenario run, for callers that want the data rather
/// than the files.
struct RunResult {
    ScenarioConfig config;   // with overrides applied
    Trajectory trajectory;
    std::optional<ReferenceDistribution> reference;
    std::vector<std::pair<double, double>> dbs;
    RunSummary summary;
};

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options);

struct SweepCell {
    int index = 0;
    std::string dir;
    std::vector<std::pair<std::string, std::string>> assignment;
    std::string status;    // ok | config_error | numerical_error | io_error
    std::string message;
    std::optional<RunSummary> summary;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::filesystem::path index_file;
    bool all_ok() const;
};

SweepResult run_sweep(const SweepSpec& spec, const ConfigDoc& base,
                      const RunOptions& options);

// File formats (External Interfaces).
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::vector<std::pair<double, double>>* dbs,
                          int m, int n);
void write_steady_state(const std::filesystem::path& path, const ScenarioConfig& config,
                        const TrajectorySample& sample, const std::string& provenance);
void write_dbs_csv(const std::filesystem::path& path,
                   const std::vector<std::pair<double, double>>& series);
void write_plotdata(const std::filesystem::path& data_path,
                    const std::filesystem::path& desc_path,
                    const ScenarioConfig& config, const TrajectorySample& sample);

/// Reads a steady-state file back as a reference distribution (lossless for
/// files written by write_steady_state).
ReferenceDistribution read_state_file(const std::filesystem::path& path);

std::string format_double(double v);   // 17 significant digits

} // namespace ktap
