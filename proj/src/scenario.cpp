#include "ktap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace ktap {

namespace {

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    for (char c : key)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
            return false;
    return true;
}

} // namespace

std::string to_string(OutputKind kind) {
    switch (kind) {
    case OutputKind::trajectory_csv: return "trajectory_csv";
    case OutputKind::steady_state: return "steady_state";
    case OutputKind::dbs_csv: return "dbs_csv";
    case OutputKind::plotdata: return "plotdata";
    }
    return "?";
}

std::optional<OutputKind> output_kind_from(const std::string& token) {
    if (token == "trajectory_csv") return OutputKind::trajectory_csv;
    if (token == "steady_state") return OutputKind::steady_state;
    if (token == "dbs_csv") return OutputKind::dbs_csv;
    if (token == "plotdata") return OutputKind::plotdata;
    return std::nullopt;
}

ConfigDoc ConfigDoc::parse(const std::string& text) {
    ConfigDoc doc;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value'", lineno, 1);
        ConfigEntry entry;
        entry.key = trim(line.substr(0, eq));
        entry.line = lineno;
        if (!valid_key(entry.key))
            throw config_error("malformed key '" + entry.key + "'", lineno, 1);
        if (!seen.insert(entry.key).second)
            throw config_error("duplicate key '" + entry.key + "'", lineno, 1);
        std::string value = trim(line.substr(eq + 1));
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw config_error("unterminated array for key '" + entry.key + "'",
                                   lineno, static_cast<int>(raw.find('[')) + 1);
            entry.is_array = true;
            std::string body = value.substr(1, value.size() - 2);
            if (!trim(body).empty()) {
                std::size_t pos = 0;
                while (pos <= body.size()) {
                    const auto comma = body.find(',', pos);
                    const std::string item =
                        trim(comma == std::string::npos ? body.substr(pos)
                                                        : body.substr(pos, comma - pos));
                    if (item.empty())
                        throw config_error("empty array element for key '" + entry.key +
                                           "'", lineno, 1);
                    entry.values.push_back(item);
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
            }
        } else {
            if (value.empty())
                throw config_error("missing value for key '" + entry.key + "'", lineno,
                                   static_cast<int>(eq) + 2);
            entry.values.push_back(value);
        }
        doc.entries_.push_back(std::move(entry));
    }
    return doc;
}

void ConfigDoc::set(const std::string& key, const std::string& value) {
    for (auto& entry : entries_)
        if (entry.key == key) {
            entry.values.assign(1, value);
            entry.is_array = false;
            return;
        }
    ConfigEntry entry;
    entry.key = key;
    entry.values.push_back(value);
    entries_.push_back(std::move(entry));
}

const ConfigEntry* ConfigDoc::find(const std::string& key) const {
    for (const auto& entry : entries_)
        if (entry.key == key) return &entry;
    return nullptr;
}

namespace {

// Typed accessors over a ConfigDoc with consumption tracking, so unknown
// keys can be reported with their source line.
class Reader {
public:
    explicit Reader(const std::vector<const ConfigEntry*>& entries) {
        for (const auto* e : entries) by_key_[e->key] = e;
    }

    const ConfigEntry* take(const std::string& key) {
        const auto it = by_key_.find(key);
        if (it == by_key_.end()) return nullptr;
        consumed_.insert(key);
        return it->second;
    }

    std::optional<std::string> scalar(const std::string& key) {
        const ConfigEntry* e = take(key);
        if (!e) return std::nullopt;
        if (e->is_array)
            throw config_error("key '" + key + "' expects a scalar, got an array",
                               e->line);
        return e->values.front();
    }

    std::optional<double> number(const std::string& key) {
        const ConfigEntry* e = by_key_.count(key) ? by_key_[key] : nullptr;
        auto s = scalar(key);
        if (!s) return std::nullopt;
        return parse_double(*s, key, e ? e->line : 0);
    }

    std::optional<long> integer(const std::string& key) {
        const ConfigEntry* e = by_key_.count(key) ? by_key_[key] : nullptr;
        auto s = scalar(key);
        if (!s) return std::nullopt;
        char* end = nullptr;
        const long v = std::strtol(s->c_str(), &end, 10);
        if (end == s->c_str() || *end != '\0')
            throw config_error("key '" + key + "' expects an integer, got '" + *s + "'",
                               e ? e->line : 0);
        return v;
    }

    std::optional<bool> boolean(const std::string& key) {
        const ConfigEntry* e = by_key_.count(key) ? by_key_[key] : nullptr;
        auto s = scalar(key);
        if (!s) return std::nullopt;
        if (*s == "true") return true;
        if (*s == "false") return false;
        throw config_error("key '" + key + "' expects true|false, got '" + *s + "'",
                           e ? e->line : 0);
    }

    static double parse_double(const std::string& s, const std::string& key, int line) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw config_error("key '" + key + "' expects a number, got '" + s + "'",
                               line);
        return v;
    }

    void fail_on_unconsumed() const {
        for (const auto& [key, entry] : by_key_)
            if (!consumed_.count(key))
                throw config_error("unknown key '" + key + "'", entry->line);
    }

private:
    std::map<std::string, const ConfigEntry*> by_key_;
    std::set<std::string> consumed_;
};

Matrix materialize_initial(InitialSpec& spec, int n, int m,
                           const std::vector<std::pair<int, const ConfigEntry*>>& rows) {
    const ActivityGrid grid = build_wealth_grid(n);
    Matrix f0(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    if (spec.kind == InitialKind::matrix) {
        std::vector<bool> have(static_cast<std::size_t>(m), false);
        for (const auto& [p, entry] : rows) {
            if (p < 1 || p > m)
                throw config_error("initial.row." + std::to_string(p) +
                                   " is outside 1.." + std::to_string(m), entry->line);
            if (!entry->is_array || entry->values.size() != static_cast<std::size_t>(n))
                throw config_error("initial.row." + std::to_string(p) + " must be an"
                                   " array of " + std::to_string(n) + " occupancies",
                                   entry->line);
            for (int i = 0; i < n; ++i) {
                const double v = Reader::parse_double(
                    entry->values[static_cast<std::size_t>(i)], entry->key, entry->line);
                if (v < 0.0)
                    throw config_error("initial.row." + std::to_string(p) +
                                       ": occupancies must be nonnegative", entry->line);
                f0(static_cast<std::size_t>(p - 1), static_cast<std::size_t>(i)) = v;
            }
            have[static_cast<std::size_t>(p - 1)] = true;
        }
        for (int p = 1; p <= m; ++p)
            if (!have[static_cast<std::size_t>(p - 1)])
                throw config_error("initial.row." + std::to_string(p) + " is missing");
        return f0;
    }

    std::vector<double> wealth;
    if (spec.preset == "u0_neutral") {
        wealth = uniform_profile(n);
    } else if (spec.preset == "u0_poor") {
        const double u0 = spec.declared_u0.value_or(-0.4);
        const double gap = spec.declared_gap.value_or(8.0 / 15.0);
        try {
            wealth = poverty_profile(grid, u0, gap);
        } catch (const std::exception& e) {
            throw config_error(std::string("initial.preset u0_poor: ") + e.what());
        }
    } else {
        throw config_error("unknown initial preset '" + spec.preset + "'");
    }
    for (int p = 0; p < m; ++p)
        for (int i = 0; i < n; ++i)
            f0(static_cast<std::size_t>(p), static_cast<std::size_t>(i)) =
                wealth[static_cast<std::size_t>(i)] / static_cast<double>(m);
    return f0;
}

} // namespace

ScenarioConfig ConfigDoc::to_scenario() const {
    std::vector<const ConfigEntry*> plain;
    std::vector<std::pair<int, const ConfigEntry*>> initial_rows;
    for (const auto& entry : entries_) {
        if (entry.key.rfind("initial.row.", 0) == 0) {
            const std::string idx = entry.key.substr(12);
            char* end = nullptr;
            const long p = std::strtol(idx.c_str(), &end, 10);
            if (end == idx.c_str() || *end != '\0')
                throw config_error("malformed key '" + entry.key + "'", entry.line);
            initial_rows.emplace_back(static_cast<int>(p), &entry);
        } else {
            plain.push_back(&entry);
        }
    }

    Reader rd(plain);
    ScenarioConfig cfg;

    if (auto v = rd.scalar("name")) cfg.name = *v;
    if (auto v = rd.integer("grid.n")) cfg.n = static_cast<int>(*v);
    if (auto v = rd.integer("grid.m")) cfg.m = static_cast<int>(*v);
    if (cfg.n < 3 || cfg.n % 2 == 0)
        throw config_error("grid.n must be odd and >= 3, got " + std::to_string(cfg.n));
    if (cfg.m < 1 || cfg.m % 2 == 0)
        throw config_error("grid.m must be odd and >= 1, got " + std::to_string(cfg.m));

    if (auto v = rd.scalar("params.control")) {
        if (*v == "constant") cfg.wealth.control = GammaControl::constant;
        else if (*v == "variable") cfg.wealth.control = GammaControl::variable;
        else throw config_error("params.control must be constant|variable, got '" +
                                *v + "'");
    }
    if (auto v = rd.integer("params.gamma0")) cfg.wealth.gamma0 = static_cast<int>(*v);
    if (auto v = rd.number("params.s0")) cfg.wealth.s0 = *v;
    if (auto v = rd.number("params.mu")) cfg.wealth.mu = *v;
    if (auto v = rd.number("params.eta0")) cfg.wealth.eta0 = *v;
    try {
        cfg.wealth.validate(cfg.n);
    } catch (const std::exception& e) {
        throw config_error(std::string("params: ") + e.what());
    }

    if (auto v = rd.number("politics.beta")) cfg.beta = *v;
    try {
        PoliticsParams{cfg.beta, 0.0}.validate();
    } catch (const std::exception& e) {
        throw config_error(std::string("politics.beta: ") + e.what());
    }

    if (auto v = rd.scalar("integrator.method")) {
        if (*v == "rk4") cfg.integrator.method = Method::rk4;
        else if (*v == "euler") cfg.integrator.method = Method::euler;
        else throw config_error("integrator.method must be rk4|euler, got '" + *v + "'");
    }
    if (auto v = rd.number("integrator.dt")) cfg.integrator.dt = *v;
    if (auto v = rd.number("integrator.t_max")) cfg.integrator.t_max = *v;
    if (auto v = rd.integer("integrator.sample_every"))
        cfg.integrator.sample_every = static_cast<int>(*v);
    if (auto v = rd.number("integrator.stationarity_tol"))
        cfg.integrator.stationarity_tol = *v;
    if (auto v = rd.number("integrator.conservation_tol"))
        cfg.integrator.conservation_tol = *v;
    if (auto v = rd.number("integrator.negativity_tol"))
        cfg.integrator.negativity_tol = *v;
    try {
        cfg.integrator.validate();
    } catch (const std::exception& e) {
        throw config_error(std::string("integrator: ") + e.what());
    }

    if (const ConfigEntry* e = rd.take("norm.weights")) {
        if (!e->is_array)
            throw config_error("norm.weights must be an array", e->line);
        cfg.norm.w.clear();
        for (const auto& item : e->values)
            cfg.norm.w.push_back(Reader::parse_double(item, "norm.weights", e->line));
    } else {
        cfg.norm = NormSpec::uniform(cfg.n);
    }
    try {
        cfg.norm.validate(cfg.n);
    } catch (const std::exception& e) {
        throw config_error(std::string("norm.weights: ") + e.what());
    }

    if (auto v = rd.boolean("earlywarning.enabled")) cfg.earlywarning.enabled = *v;
    if (auto v = rd.scalar("earlywarning.reference")) {
        if (*v == "twin") {
            cfg.earlywarning.source = ReferenceSource::twin;
        } else if (v->rfind("file:", 0) == 0) {
            cfg.earlywarning.source = ReferenceSource::file;
            cfg.earlywarning.reference_file = v->substr(5);
            if (cfg.earlywarning.reference_file.empty())
                throw config_error("earlywarning.reference file path is empty");
        } else {
            throw config_error("earlywarning.reference must be twin or file:<path>");
        }
    }

    if (const ConfigEntry* e = rd.take("outputs")) {
        if (!e->is_array) throw config_error("outputs must be an array", e->line);
        cfg.outputs.clear();
        for (const auto& item : e->values) {
            const auto kind = output_kind_from(item);
            if (!kind)
                throw config_error("unknown output kind '" + item + "'", e->line);
            cfg.outputs.push_back(*kind);
        }
    }

    if (auto v = rd.scalar("initial.preset")) {
        cfg.initial.kind = InitialKind::preset;
        cfg.initial.preset = *v;
    }
    if (!initial_rows.empty()) {
        if (const ConfigEntry* preset_entry = find("initial.preset"))
            throw config_error("give either initial.preset or initial.row entries, "
                               "not both", preset_entry->line);
        cfg.initial.kind = InitialKind::matrix;
        cfg.initial.preset.clear();
    }
    if (auto v = rd.number("initial.u0")) cfg.initial.declared_u0 = *v;
    if (auto v = rd.number("initial.gap")) cfg.initial.declared_gap = *v;
    if (auto v = rd.boolean("initial.normalized")) cfg.initial.normalized = *v;

    rd.fail_on_unconsumed();

    cfg.initial.f0 = materialize_initial(cfg.initial, cfg.n, cfg.m, initial_rows);

    // Cross-checks against the materialized matrix.
    const ActivityGrid grid = build_wealth_grid(cfg.n);
    const PopulationState state0(cfg.initial.f0);
    const double m0 = mass(state0);
    if (cfg.initial.normalized && std::fabs(m0 - 1.0) > 1e-12)
        throw config_error("initial: declared normalized but mass is " + format17(m0));
    const double u0 = mean_wealth(grid, state0);
    if (cfg.initial.declared_u0 && std::fabs(u0 - *cfg.initial.declared_u0) > 1e-9)
        throw config_error("initial.u0: declared " + format17(*cfg.initial.declared_u0) +
                           " but the initial matrix has mean wealth " + format17(u0));
    if (cfg.initial.declared_gap) {
        const double s = social_gap(state0).s;
        if (std::fabs(s - *cfg.initial.declared_gap) > 1e-9)
            throw config_error("initial.gap: declared " +
                               format17(*cfg.initial.declared_gap) +
                               " but the initial matrix has social gap " + format17(s));
    }
    return cfg;
}

ScenarioConfig parse_scenario(const std::string& text) {
    return ConfigDoc::parse(text).to_scenario();
}

std::string emit_scenario(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "name = " << cfg.name << "\n";
    os << "grid.n = " << cfg.n << "\n";
    os << "grid.m = " << cfg.m << "\n";
    os << "params.control = "
       << (cfg.wealth.control == GammaControl::constant ? "constant" : "variable")
       << "\n";
    os << "params.gamma0 = " << cfg.wealth.gamma0 << "\n";
    os << "params.s0 = " << format17(cfg.wealth.s0) << "\n";
    os << "params.mu = " << format17(cfg.wealth.mu) << "\n";
    os << "params.eta0 = " << format17(cfg.wealth.eta0) << "\n";
    os << "politics.beta = " << format17(cfg.beta) << "\n";
    if (cfg.initial.kind == InitialKind::preset) {
        os << "initial.preset = " << cfg.initial.preset << "\n";
    } else {
        for (std::size_t p = 0; p < cfg.initial.f0.rows(); ++p) {
            os << "initial.row." << p + 1 << " = [";
            for (std::size_t i = 0; i < cfg.initial.f0.cols(); ++i)
                os << (i ? ", " : "") << format17(cfg.initial.f0(p, i));
            os << "]\n";
        }
    }
    if (cfg.initial.declared_u0)
        os << "initial.u0 = " << format17(*cfg.initial.declared_u0) << "\n";
    if (cfg.initial.declared_gap)
        os << "initial.gap = " << format17(*cfg.initial.declared_gap) << "\n";
    os << "initial.normalized = " << (cfg.initial.normalized ? "true" : "false") << "\n";
    os << "integrator.method = "
       << (cfg.integrator.method == Method::rk4 ? "rk4" : "euler") << "\n";
    os << "integrator.dt = " << format17(cfg.integrator.dt) << "\n";
    os << "integrator.t_max = " << format17(cfg.integrator.t_max) << "\n";
    os << "integrator.sample_every = " << cfg.integrator.sample_every << "\n";
    os << "integrator.stationarity_tol = " << format17(cfg.integrator.stationarity_tol)
       << "\n";
    os << "integrator.conservation_tol = " << format17(cfg.integrator.conservation_tol)
       << "\n";
    os << "integrator.negativity_tol = " << format17(cfg.integrator.negativity_tol)
       << "\n";
    os << "norm.weights = [";
    for (std::size_t i = 0; i < cfg.norm.w.size(); ++i)
        os << (i ? ", " : "") << format17(cfg.norm.w[i]);
    os << "]\n";
    os << "earlywarning.enabled = " << (cfg.earlywarning.enabled ? "true" : "false")
       << "\n";
    os << "earlywarning.reference = "
       << (cfg.earlywarning.source == ReferenceSource::twin
               ? std::string("twin")
               : "file:" + cfg.earlywarning.reference_file)
       << "\n";
    os << "outputs = [";
    for (std::size_t i = 0; i < cfg.outputs.size(); ++i)
        os << (i ? ", " : "") << to_string(cfg.outputs[i]);
    os << "]\n";
    return os.str();
}

bool is_known_scenario_key(const std::string& path) {
    static const std::set<std::string> keys = {
        "name", "grid.n", "grid.m",
        "params.control", "params.gamma0", "params.s0", "params.mu", "params.eta0",
        "politics.beta",
        "initial.preset", "initial.u0", "initial.gap", "initial.normalized",
        "integrator.method", "integrator.dt", "integrator.t_max",
        "integrator.sample_every", "integrator.stationarity_tol",
        "integrator.conservation_tol", "integrator.negativity_tol",
        "norm.weights",
        "earlywarning.enabled", "earlywarning.reference",
        "outputs"};
    if (keys.count(path)) return true;
    if (path.rfind("initial.row.", 0) == 0) {
        const std::string idx = path.substr(12);
        return !idx.empty() &&
               std::all_of(idx.begin(), idx.end(),
                           [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    }
    return false;
}

SweepSpec parse_sweep(const std::string& text) {
    const ConfigDoc doc = ConfigDoc::parse(text);
    SweepSpec spec;
    std::map<long, SweepAxis> axes;
    // Re-walk entries through the public find/accessors: the document is
    // small and axis keys are structured, so scan axis indices 1..64.
    const ConfigEntry* base = doc.find("base");
    if (!base || base->is_array)
        throw config_error("sweep file needs 'base = <scenario file | preset:name>'");
    spec.base_ref = base->values.front();

    for (long idx = 1; idx <= 64; ++idx) {
        const std::string prefix = "axis." + std::to_string(idx) + ".";
        const ConfigEntry* path = doc.find(prefix + "path");
        const ConfigEntry* values = doc.find(prefix + "values");
        if (!path && !values) continue;
        if (!path || path->is_array)
            throw config_error("sweep axis " + std::to_string(idx) +
                               " is missing a scalar 'path'");
        if (!values || !values->is_array)
            throw config_error("sweep axis " + std::to_string(idx) +
                               " is missing an array 'values'", path->line);
        if (values->values.empty())
            throw config_error("sweep axis " + std::to_string(idx) +
                               " has an empty value list", values->line);
        if (!is_known_scenario_key(path->values.front()))
            throw config_error("sweep axis path '" + path->values.front() +
                               "' is not a scenario key", path->line);
        SweepAxis axis;
        axis.path = path->values.front();
        axis.values = values->values;
        axes[idx] = std::move(axis);
    }
    if (axes.empty()) throw config_error("sweep file declares no axes");
    for (auto& [idx, axis] : axes) spec.axes.push_back(std::move(axis));
    return spec;
}

std::vector<double> uniform_profile(int n) {
    if (n < 1) throw invalid_parameter_error("profile needs n >= 1");
    return std::vector<double>(static_cast<std::size_t>(n),
                               1.0 / static_cast<double>(n));
}

std::vector<double> poverty_profile(const ActivityGrid& grid, double u0_target,
                                    double gap_target) {
    const std::size_t n = static_cast<std::size_t>(grid.n);
    const std::size_t centre = static_cast<std::size_t>(grid.centre());
    std::vector<double> chi(n, 0.0);
    for (std::size_t i = 0; i < centre; ++i) chi[i] = 1.0;
    for (std::size_t i = centre + 1; i < n; ++i) chi[i] = -1.0;

    double a = 0.0, b = 0.0;
    std::vector<double> f(n);
    for (int iter = 0; iter < 200; ++iter) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = std::exp(a * grid.u[i] + b * chi[i]);
            total += f[i];
        }
        for (std::size_t i = 0; i < n; ++i) f[i] /= total;

        double eu = 0.0, ec = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            eu += grid.u[i] * f[i];
            ec += chi[i] * f[i];
        }
        const double r1 = eu - u0_target;
        const double r2 = ec - gap_target;
        if (std::fabs(r1) < 1e-14 && std::fabs(r2) < 1e-14) return f;

        double euu = 0.0, euc = 0.0, ecc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            euu += grid.u[i] * grid.u[i] * f[i];
            euc += grid.u[i] * chi[i] * f[i];
            ecc += chi[i] * chi[i] * f[i];
        }
        const double j11 = euu - eu * eu;
        const double j12 = euc - eu * ec;
        const double j22 = ecc - ec * ec;
        const double det = j11 * j22 - j12 * j12;
        if (!(std::fabs(det) > 1e-30))
            throw numerical_error("poverty profile: singular constraint system "
                                  "(targets infeasible on this grid)");
        a -= (j22 * r1 - j12 * r2) / det;
        b -= (j11 * r2 - j12 * r1) / det;
        if (!std::isfinite(a) || !std::isfinite(b))
            throw numerical_error("poverty profile: iteration diverged "
                                  "(targets infeasible on this grid)");
    }
    throw numerical_error("poverty profile: no convergence to the requested mean "
                          "wealth and social gap");
}

namespace {

struct PresetDef {
    std::string name;
    bool poor;
    int gamma0;
    GammaControl control;
    int m;
};

std::vector<PresetDef> preset_defs() {
    std::vector<PresetDef> defs;
    for (bool poor : {false, true})
        for (int gamma0 : {3, 7})
            for (GammaControl control : {GammaControl::constant, GammaControl::variable})
                for (int m : {1, 9}) {
                    PresetDef def;
                    def.poor = poor;
                    def.gamma0 = gamma0;
                    def.control = control;
                    def.m = m;
                    def.name = std::string("u0_") + (poor ? "poor" : "neutral") + "_g" +
                               std::to_string(gamma0) +
                               (control == GammaControl::variable ? "_variable" : "") +
                               (m == 9 ? "_m9" : "");
                    defs.push_back(std::move(def));
                }
    return defs;
}

ScenarioConfig make_preset(const PresetDef& def) {
    ScenarioConfig cfg;
    cfg.name = def.name;
    cfg.n = 9;
    cfg.m = def.m;
    cfg.wealth.gamma0 = def.gamma0;
    cfg.wealth.s0 = 0.0;
    cfg.wealth.mu = 0.3;
    cfg.wealth.eta0 = 1.0;
    cfg.wealth.control = def.control;
    cfg.beta = 0.4;
    cfg.initial.kind = InitialKind::preset;
    cfg.initial.preset = def.poor ? "u0_poor" : "u0_neutral";
    cfg.initial.declared_u0 = def.poor ? -0.4 : 0.0;
    if (def.poor) cfg.initial.declared_gap = 8.0 / 15.0;
    cfg.initial.normalized = true;
    cfg.integrator.method = Method::rk4;
    cfg.integrator.dt = 0.01;
    cfg.integrator.t_max = 600.0;
    cfg.integrator.sample_every = 10;
    cfg.norm = NormSpec::uniform(cfg.n);
    cfg.outputs = {OutputKind::trajectory_csv, OutputKind::steady_state};
    if (def.control == GammaControl::variable) {
        cfg.earlywarning.enabled = true;
        cfg.earlywarning.source = ReferenceSource::twin;
        cfg.outputs.push_back(OutputKind::dbs_csv);
    }
    // Materialize the initial matrix the same way parsing would.
    const ActivityGrid grid = build_wealth_grid(cfg.n);
    std::vector<double> wealth = def.poor
        ? poverty_profile(grid, -0.4, 8.0 / 15.0)
        : uniform_profile(cfg.n);
    cfg.initial.f0 = Matrix(static_cast<std::size_t>(cfg.m),
                            static_cast<std::size_t>(cfg.n));
    for (int p = 0; p < cfg.m; ++p)
        for (int i = 0; i < cfg.n; ++i)
            cfg.initial.f0(static_cast<std::size_t>(p), static_cast<std::size_t>(i)) =
                wealth[static_cast<std::size_t>(i)] / static_cast<double>(cfg.m);
    return cfg;
}

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& def : preset_defs()) names.push_back(def.name);
    return names;
}

bool is_preset(const std::string& name) {
    for (const auto& def : preset_defs())
        if (def.name == name) return true;
    return false;
}

ScenarioConfig preset_scenario(const std::string& name) {
    for (const auto& def : preset_defs())
        if (def.name == name) return make_preset(def);
    throw invalid_parameter_error("unknown preset '" + name + "'");
}

std::string preset_summary(const std::string& name) {
    for (const auto& def : preset_defs())
        if (def.name == name) {
            std::ostringstream os;
            os << (def.poor ? "poor society (U0=-0.4, S(0)=8/15)"
                            : "neutral society (U0=0, uniform)")
               << ", gamma0=" << def.gamma0 << ", "
               << (def.control == GammaControl::variable ? "variable" : "constant")
               << " gamma, n=9, m=" << def.m;
            return os.str();
        }
    throw invalid_parameter_error("unknown preset '" + name + "'");
}

Model build_model(const ScenarioConfig& config) {
    const ActivityGrid grid = build_wealth_grid(config.n);
    PoliticsParams politics;
    politics.beta = config.beta;
    politics.u0 = mean_wealth(grid, config.initial.f0);
    return Model(config.n, config.m, config.wealth, politics);
}

PopulationState initial_state(const ScenarioConfig& config) {
    return PopulationState(config.initial.f0, 0.0);
}

} // namespace ktap
