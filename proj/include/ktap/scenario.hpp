#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ktap/earlywarning.hpp"
#include "ktap/integrate.hpp"
#include "ktap/matrix.hpp"
#include "ktap/wealth_game.hpp"

namespace ktap {

enum class OutputKind { trajectory_csv, steady_state, dbs_csv, plotdata };

std::string to_string(OutputKind kind);
std::optional<OutputKind> output_kind_from(const std::string& token);

enum class ReferenceSource { twin, file };

struct EarlyWarningConfig {
    bool enabled = false;
    ReferenceSource source = ReferenceSource::twin;
    std::string reference_file;   // used when source == file

    friend bool operator==(const EarlyWarningConfig&, const EarlyWarningConfig&) = default;
};

enum class InitialKind { preset, matrix };

/// Initial occupancies: either a named constructive profile, or an explicit
/// matrix given row by row. The matrix is materialized at parse time either
/// way; declared_u0 / declared_gap are cross-checked against it.
struct InitialSpec {
    InitialKind kind = InitialKind::preset;
    std::string preset = "u0_neutral";
    std::optional<double> declared_u0;
    std::optional<double> declared_gap;
    bool normalized = true;
    Matrix f0;   // m x n

    friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

/// A complete, serializable experiment description.
struct ScenarioConfig {
    std::string name = "scenario";
    int n = 9;
    int m = 1;
    WealthGameParams wealth;
    double beta = 0.4;
    InitialSpec initial;
    IntegratorConfig integrator;
    NormSpec norm;                 // d_BS weights; uniform by default
    EarlyWarningConfig earlywarning;
    std::vector<OutputKind> outputs{OutputKind::trajectory_csv,
                                    OutputKind::steady_state};

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// One entry of the line-oriented key/value document. Arrays are single
/// bracketed lines; keys are dotted paths.
struct ConfigEntry {
    std::string key;
    std::vector<std::string> values;
    bool is_array = false;
    int line = 0;
};

/// Parsed form of a scenario document, before semantic validation. Sweeps
/// override entries here and rebuild, so every cell goes through exactly the
/// same validation as a hand-written file.
class ConfigDoc {
public:
    static ConfigDoc parse(const std::string& text);

    /// Overrides an existing key or appends a new scalar entry.
    void set(const std::string& key, const std::string& value);

    const ConfigEntry* find(const std::string& key) const;

    ScenarioConfig to_scenario() const;

private:
    std::vector<ConfigEntry> entries_;
};

ScenarioConfig parse_scenario(const std::string& text);

/// Canonical document for a config; parse_scenario(emit_scenario(c)) == c.
std::string emit_scenario(const ScenarioConfig& config);

/// True if the dotted path is a key parse_scenario understands (sweep axes
/// are validated against this).
bool is_known_scenario_key(const std::string& path);

struct SweepAxis {
    std::string path;
    std::vector<std::string> values;
};

/// base_ref is a scenario file path (relative paths resolve against the
/// sweep file) or "preset:<name>".
struct SweepSpec {
    std::string base_ref;
    std::vector<SweepAxis> axes;
};

SweepSpec parse_sweep(const std::string& text);

// Shipped scenario presets (complete configs, listed by the CLI).
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
ScenarioConfig preset_scenario(const std::string& name);
std::string preset_summary(const std::string& name);

// Constructive initial profiles.
/// Uniform occupancies 1/n: symmetric about the central class, mean wealth 0.
std::vector<double> uniform_profile(int n);

/// Poverty-skewed profile f_i proportional to exp(a u_i + b x_i), where x is
/// the poor-minus-wealthy class indicator. (a, b) are solved by Newton
/// iteration so the profile has unit mass, the requested mean wealth, and
/// the requested social gap; among all profiles meeting those constraints
/// this is the maximum-entropy one. The three constraints are the model-
/// anchored part; the exponential-family smoothing is this artifact's choice
/// and not canonical.
std::vector<double> poverty_profile(const ActivityGrid& grid, double u0_target,
                                    double gap_target);

/// Model bound to a scenario: politics branch selection uses the conserved
/// mean wealth of the scenario's initial state.
Model build_model(const ScenarioConfig& config);
PopulationState initial_state(const ScenarioConfig& config);

} // namespace ktap
