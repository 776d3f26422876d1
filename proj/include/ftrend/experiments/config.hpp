#pragma once

#include "ftrend/arma_model.hpp"
#include "ftrend/calibration.hpp"
#include "ftrend/io.hpp"
#include "ftrend/trend.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ftrend::experiments {

inline constexpr int schema_version = 1;

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors)
        : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

    [[nodiscard]] const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
    static std::string join(const std::vector<std::string>& e) {
        std::string s = "invalid config:";
        for (const auto& x : e) s += "\n  " + x;
        return s;
    }
    std::vector<std::string> errors_;
};

struct Inputs {
    std::string temperature;
    std::string temperature_format = "giss_annual";
    std::string forcing;
    std::string forcing_map;
    std::string scenario;
    std::string scenario_map;
    std::string ensemble_dir;
    std::string ensemble_format = "ensemble_member";
};

struct TrendSection {
    double f2x = default_f2x;
    double rho_max = 0.9999;
    int grid_n_a = 40;
    int grid_n_n = 40;
    std::string search = "anchored";
    double start_rho_a = 0.5;
    double start_rho_n = 0.5;
    double start_step = 0.1;
    int max_starts = 5;
    std::optional<int> first_year;
    std::optional<int> last_year;
};

struct NoiseSection {
    int p_max = 5;
    int q_max = 2;
    std::string select = "aicc";
    std::optional<std::pair<int, int>> order;  // fixed order; otherwise chosen by `select`
};

struct BootstrapSection {
    std::vector<std::pair<double, double>> levels = {{5.0, 95.0}, {2.5, 97.5}, {0.5, 99.5}};
    int burn_in = 500;
};

struct ProjectionSection {
    int splice_year = 2015;
    int last_year = 2400;
    std::pair<double, double> band = {2.5, 97.5};
};

struct LearningSection {
    std::vector<int> end_years = {2025, 2050, 2075, 2100};
    std::pair<double, double> band = {2.5, 97.5};
};

struct ScalingSection {
    int reference_year = 2011;
    std::vector<double> endpoints = {1.13, 3.33};
};

struct CalibrationSection {
    std::vector<std::string> models = {"ar1", "arma11", "farima", "ar2", "arma41"};
    std::vector<int> n = {20, 50, 100, 500, 1000};
    std::vector<std::string> methods = {"ols_t", "ar1_t", "ar1_t_reml", "ar1_parboot", "aicc_t", "block_boot"};
    int inner_replicates = 199;
    std::vector<int> block_lengths = {2, 3, 4, 5, 8, 12, 16};
    std::vector<double> alphas = {0.01, 0.05, 0.10};
};

struct SpectrumSection {
    int width = 5;
    int passes = 2;
    std::vector<std::string> models = {"arma11", "farima"};
};

struct SimulateSection {
    ArfimaModel model{{0.5}, {}, 0.0, 1.0};
    int n = 200;
    int burn_in = 500;
};

struct EnergyBalanceRow {
    std::string label;
    double delta_t{};
    double delta_f{};
    double delta_q{};
};

struct TcrSection {
    std::pair<double, double> band = {2.5, 97.5};
    std::vector<EnergyBalanceRow> energy_balance;
};

/// Fully materialized experiment configuration; every field has a value.
struct ExperimentConfig {
    int schema_version{};
    std::string name;
    std::uint64_t seed{};
    int replicates{};
    std::string output_dir;
    Inputs inputs;
    TrendSection trend;
    NoiseSection noise;
    BootstrapSection bootstrap;
    ProjectionSection projection;
    LearningSection learning;
    ScalingSection scaling;
    CalibrationSection calibration;
    SpectrumSection spectrum;
    SimulateSection simulate;
    TcrSection tcr;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c = {"fit",      "project",  "bootstrap", "learn",         "calibrate",
                                               "spectrum", "simulate", "tcr",       "scale-forcing", "ensemble"};
    return c;
}

namespace detail {

/// Walks one JSON object, collecting errors instead of stopping at the first.
class Reader {
public:
    Reader(const nlohmann::json* j, std::string path, std::vector<std::string>& errors)
        : j_(j), path_(std::move(path)), errors_(errors) {
        if (j_ && !j_->is_object()) {
            fail("", "must be an object");
            j_ = nullptr;
        }
    }

    ~Reader() {
        if (!j_) return;
        for (auto& [k, v] : j_->items()) {
            if (!seen_.count(k)) errors_.push_back(where(k) + ": unknown key");
        }
    }

    Reader(const Reader&) = delete;
    Reader& operator=(const Reader&) = delete;

    template <class T>
    bool required(const char* key, T& out) {
        seen_.insert(key);
        if (!j_ || !j_->contains(key)) {
            errors_.push_back(where(key) + ": required field missing");
            return false;
        }
        return get(key, out);
    }

    template <class T>
    bool optional(const char* key, T& out) {
        seen_.insert(key);
        if (!j_ || !j_->contains(key)) return false;
        return get(key, out);
    }

    template <class T>
    bool optional(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        if (!j_ || !j_->contains(key) || (*j_)[key].is_null()) return false;
        T v{};
        if (!get(key, v)) return false;
        out = v;
        return true;
    }

    /// Child object; a missing key yields an empty reader.
    [[nodiscard]] const nlohmann::json* child(const char* key) {
        seen_.insert(key);
        if (!j_ || !j_->contains(key)) return nullptr;
        return &(*j_)[key];
    }

    [[nodiscard]] bool has(const char* key) const { return j_ && j_->contains(key); }
    [[nodiscard]] std::string where(const std::string& key) const {
        return path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
    }
    void fail(const std::string& key, const std::string& msg) { errors_.push_back(where(key) + ": " + msg); }
    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] std::vector<std::string>& errors() { return errors_; }

private:
    template <class T>
    bool get(const char* key, T& out) {
        const auto& v = (*j_)[key];
        try {
            if constexpr (std::is_same_v<T, int>) {
                if (!v.is_number_integer()) throw std::invalid_argument("");
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
                    throw std::invalid_argument("");
                }
            } else if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw std::invalid_argument("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw std::invalid_argument("");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw std::invalid_argument("");
            }
            out = v.get<T>();
            return true;
        } catch (const std::exception&) {
            errors_.push_back(where(key) + ": expected " + type_name<T>() + ", got " + v.dump());
            return false;
        }
    }

    template <class T>
    static std::string type_name() {
        if constexpr (std::is_same_v<T, int>) return "an integer";
        if constexpr (std::is_same_v<T, std::uint64_t>) return "a non-negative integer";
        if constexpr (std::is_same_v<T, double>) return "a number";
        if constexpr (std::is_same_v<T, std::string>) return "a string";
        if constexpr (std::is_same_v<T, bool>) return "a boolean";
        return "a different type";
    }

    const nlohmann::json* j_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

inline void check(bool ok, Reader& r, const char* key, const std::string& msg) {
    if (!ok) r.fail(key, msg);
}

inline void read_band(Reader& r, const char* key, std::pair<double, double>& band) {
    std::vector<double> v;
    if (!r.optional(key, v)) return;
    if (v.size() != 2 || !(v[0] > 0.0 && v[0] <= v[1] && v[1] < 100.0)) {
        r.fail(key, "expected [lower, upper] percentiles with 0 < lower <= upper < 100");
        return;
    }
    band = {v[0], v[1]};
}

inline void read_inputs(const nlohmann::json* j, Inputs& in, std::vector<std::string>& errors) {
    Reader r(j, "inputs", errors);
    r.optional("temperature", in.temperature);
    if (r.optional("temperature_format", in.temperature_format)) {
        try {
            (void)temperature_format_from_string(in.temperature_format);
        } catch (const std::exception& e) {
            r.fail("temperature_format", e.what());
        }
    }
    r.optional("forcing", in.forcing);
    r.optional("forcing_map", in.forcing_map);
    r.optional("scenario", in.scenario);
    r.optional("scenario_map", in.scenario_map);
    r.optional("ensemble_dir", in.ensemble_dir);
    if (r.optional("ensemble_format", in.ensemble_format)) {
        try {
            (void)temperature_format_from_string(in.ensemble_format);
        } catch (const std::exception& e) {
            r.fail("ensemble_format", e.what());
        }
    }
}

inline void read_trend(const nlohmann::json* j, TrendSection& t, std::vector<std::string>& errors) {
    Reader r(j, "trend", errors);
    if (r.optional("f2x", t.f2x)) check(t.f2x > 0.0, r, "f2x", "must be positive");
    if (r.optional("rho_max", t.rho_max)) {
        check(t.rho_max > 0.0 && t.rho_max < 1.0, r, "rho_max", "must lie in (0, 1), got " + csv::format(t.rho_max));
    }
    if (r.optional("grid_n_a", t.grid_n_a)) check(t.grid_n_a >= 3, r, "grid_n_a", "must be >= 3");
    if (r.optional("grid_n_n", t.grid_n_n)) check(t.grid_n_n >= 3, r, "grid_n_n", "must be >= 3");
    if (r.optional("search", t.search)) {
        check(t.search == "anchored" || t.search == "global", r, "search", "must be \"anchored\" or \"global\"");
    }
    if (r.optional("start_rho_a", t.start_rho_a)) {
        check(t.start_rho_a >= 0.0 && t.start_rho_a < 1.0, r, "start_rho_a", "must lie in [0, 1)");
    }
    if (r.optional("start_rho_n", t.start_rho_n)) {
        check(t.start_rho_n >= 0.0 && t.start_rho_n < 1.0, r, "start_rho_n", "must lie in [0, 1)");
    }
    if (r.optional("start_step", t.start_step)) check(t.start_step > 0.0, r, "start_step", "must be positive");
    if (r.optional("max_starts", t.max_starts)) check(t.max_starts >= 1, r, "max_starts", "must be >= 1");
    r.optional("first_year", t.first_year);
    r.optional("last_year", t.last_year);
    if (t.first_year && t.last_year && *t.first_year >= *t.last_year) r.fail("last_year", "must exceed first_year");
}

inline void read_noise(const nlohmann::json* j, NoiseSection& n, std::vector<std::string>& errors) {
    Reader r(j, "noise", errors);
    if (r.optional("p_max", n.p_max)) check(n.p_max >= 0 && n.p_max <= 10, r, "p_max", "must lie in [0, 10]");
    if (r.optional("q_max", n.q_max)) check(n.q_max >= 0 && n.q_max <= 10, r, "q_max", "must lie in [0, 10]");
    if (r.optional("select", n.select)) {
        check(n.select == "aicc" || n.select == "bic", r, "select", "must be \"aicc\" or \"bic\"");
    }
    std::optional<std::vector<int>> order;
    if (r.optional("order", order)) {
        if (order->size() != 2 || (*order)[0] < 0 || (*order)[1] < 0) {
            r.fail("order", "expected [p, q] with non-negative entries, or null");
        } else {
            n.order = std::pair{(*order)[0], (*order)[1]};
        }
    }
}

inline void read_bootstrap(const nlohmann::json* j, BootstrapSection& b, std::vector<std::string>& errors) {
    Reader r(j, "bootstrap", errors);
    std::vector<std::vector<double>> levels;
    if (r.optional("levels", levels)) {
        b.levels.clear();
        for (const auto& l : levels) {
            if (l.size() != 2 || !(l[0] > 0.0 && l[0] <= l[1] && l[1] < 100.0)) {
                r.fail("levels", "each level must be [lower, upper] with 0 < lower <= upper < 100");
                break;
            }
            b.levels.emplace_back(l[0], l[1]);
        }
    }
    if (r.optional("burn_in", b.burn_in)) check(b.burn_in >= 0, r, "burn_in", "must be >= 0");
}

inline void read_projection(const nlohmann::json* j, ProjectionSection& p, std::vector<std::string>& errors) {
    Reader r(j, "projection", errors);
    r.optional("splice_year", p.splice_year);
    r.optional("last_year", p.last_year);
    if (p.last_year <= p.splice_year) r.fail("last_year", "must exceed splice_year");
    read_band(r, "band", p.band);
}

inline void read_learning(const nlohmann::json* j, LearningSection& l, std::vector<std::string>& errors) {
    Reader r(j, "learning", errors);
    if (r.optional("end_years", l.end_years)) check(!l.end_years.empty(), r, "end_years", "must not be empty");
    read_band(r, "band", l.band);
}

inline void read_scaling(const nlohmann::json* j, ScalingSection& s, std::vector<std::string>& errors) {
    Reader r(j, "scaling", errors);
    r.optional("reference_year", s.reference_year);
    if (r.optional("endpoints", s.endpoints)) {
        bool ok = !s.endpoints.empty();
        for (double v : s.endpoints) ok = ok && v > 0.0;
        check(ok, r, "endpoints", "must be a non-empty list of positive forcings");
    }
}

inline void read_calibration(const nlohmann::json* j, CalibrationSection& c, std::vector<std::string>& errors) {
    Reader r(j, "calibration", errors);
    if (r.optional("models", c.models)) {
        for (const auto& m : c.models) {
            if (!calibration_models().count(m)) r.fail("models", "unknown model '" + m + "'");
        }
    }
    if (r.optional("n", c.n)) {
        bool ok = !c.n.empty();
        for (int v : c.n) ok = ok && v >= 8;
        check(ok, r, "n", "must be a non-empty list of lengths >= 8");
    }
    if (r.optional("methods", c.methods)) {
        for (const auto& m : c.methods) {
            const auto& all = calibration_methods();
            if (std::find(all.begin(), all.end(), m) == all.end()) r.fail("methods", "unknown method '" + m + "'");
        }
    }
    if (r.optional("inner_replicates", c.inner_replicates)) {
        check(c.inner_replicates >= 1, r, "inner_replicates", "must be >= 1");
    }
    if (r.optional("block_lengths", c.block_lengths)) {
        bool ok = !c.block_lengths.empty();
        for (int v : c.block_lengths) ok = ok && v >= 1;
        check(ok, r, "block_lengths", "must be a non-empty list of positive lengths");
    }
    if (r.optional("alphas", c.alphas)) {
        bool ok = !c.alphas.empty();
        for (double a : c.alphas) ok = ok && a > 0.0 && a < 1.0;
        check(ok, r, "alphas", "must be a non-empty list in (0, 1)");
    }
}

inline void read_spectrum(const nlohmann::json* j, SpectrumSection& s, std::vector<std::string>& errors) {
    Reader r(j, "spectrum", errors);
    if (r.optional("width", s.width)) check(s.width >= 1 && s.width % 2 == 1, r, "width", "must be a positive odd integer");
    if (r.optional("passes", s.passes)) check(s.passes >= 1, r, "passes", "must be >= 1");
    if (r.optional("models", s.models)) {
        for (const auto& m : s.models) {
            if (!calibration_models().count(m)) r.fail("models", "unknown model '" + m + "'");
        }
    }
}

inline void read_simulate(const nlohmann::json* j, SimulateSection& s, std::vector<std::string>& errors) {
    Reader r(j, "simulate", errors);
    if (const auto* m = r.child("model")) {
        try {
            s.model = m->get<ArfimaModel>();
            validate(s.model);
        } catch (const std::exception& e) {
            r.fail("model", e.what());
        }
    }
    if (r.optional("n", s.n)) check(s.n >= 2, r, "n", "must be >= 2");
    if (r.optional("burn_in", s.burn_in)) check(s.burn_in >= 0, r, "burn_in", "must be >= 0");
}

inline void read_tcr(const nlohmann::json* j, TcrSection& t, std::vector<std::string>& errors) {
    Reader r(j, "tcr", errors);
    read_band(r, "band", t.band);
    if (const auto* rows = r.child("energy_balance")) {
        if (!rows->is_array()) {
            r.fail("energy_balance", "must be an array");
            return;
        }
        for (std::size_t i = 0; i < rows->size(); ++i) {
            Reader e(&(*rows)[i], r.where("energy_balance") + "[" + std::to_string(i) + "]", errors);
            EnergyBalanceRow row;
            e.required("label", row.label);
            e.required("delta_t", row.delta_t);
            e.required("delta_f", row.delta_f);
            e.required("delta_q", row.delta_q);
            if (row.delta_f == row.delta_q && e.has("delta_f") && e.has("delta_q")) {
                e.fail("delta_q", "must differ from delta_f");
            }
            t.energy_balance.push_back(row);
        }
    }
}

inline void require_inputs(const ExperimentConfig& c, const std::string& command, std::vector<std::string>& errors) {
    auto need = [&](const std::string& v, const char* key) {
        if (v.empty()) errors.push_back(std::string("inputs.") + key + ": required for '" + command + "'");
    };
    const bool fits = command == "fit" || command == "bootstrap" || command == "project" || command == "learn" ||
                      command == "tcr" || command == "scale-forcing" || command == "spectrum";
    if (fits) need(c.inputs.temperature, "temperature");
    if (fits || command == "ensemble") {
        need(c.inputs.forcing, "forcing");
        need(c.inputs.forcing_map, "forcing_map");
    }
    if (command == "project" || command == "learn") {
        need(c.inputs.scenario, "scenario");
        need(c.inputs.scenario_map, "scenario_map");
    }
    if (command == "ensemble") need(c.inputs.ensemble_dir, "ensemble_dir");
}

}  // namespace detail

struct ConfigResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;
};

/**
 * @brief Strict validation with every default materialized.
 *
 * Unknown keys are errors at every level. All problems are collected before
 * returning. When `command` is given, the inputs that command reads are
 * required as well.
 */
[[nodiscard]] inline ConfigResult validate_config(const nlohmann::json& j, const std::string& command = "") {
    ConfigResult out;
    auto& errors = out.errors;
    ExperimentConfig c;
    if (!j.is_object()) {
        errors.push_back("config: top level must be a JSON object");
        for (const char* k : {"schema_version", "name", "seed", "replicates", "output_dir", "inputs"}) {
            errors.push_back(std::string(k) + ": required field missing");
        }
        return out;
    }
    if (!command.empty() && std::find(commands().begin(), commands().end(), command) == commands().end()) {
        errors.push_back("command: unknown subcommand '" + command + "'");
    }
    {
        detail::Reader r(&j, "", errors);
        if (r.required("schema_version", c.schema_version) && c.schema_version != schema_version) {
            r.fail("schema_version", "unsupported version " + std::to_string(c.schema_version) + " (expected " +
                                         std::to_string(schema_version) + ")");
        }
        if (r.required("name", c.name) && c.name.empty()) r.fail("name", "must not be empty");
        r.required("seed", c.seed);
        if (r.required("replicates", c.replicates) && c.replicates < 1) r.fail("replicates", "must be >= 1");
        if (r.required("output_dir", c.output_dir) && c.output_dir.empty()) r.fail("output_dir", "must not be empty");
        if (!r.has("inputs")) r.fail("inputs", "required field missing");
        detail::read_inputs(r.child("inputs"), c.inputs, errors);
        detail::read_trend(r.child("trend"), c.trend, errors);
        detail::read_noise(r.child("noise"), c.noise, errors);
        detail::read_bootstrap(r.child("bootstrap"), c.bootstrap, errors);
        detail::read_projection(r.child("projection"), c.projection, errors);
        detail::read_learning(r.child("learning"), c.learning, errors);
        detail::read_scaling(r.child("scaling"), c.scaling, errors);
        detail::read_calibration(r.child("calibration"), c.calibration, errors);
        detail::read_spectrum(r.child("spectrum"), c.spectrum, errors);
        detail::read_simulate(r.child("simulate"), c.simulate, errors);
        detail::read_tcr(r.child("tcr"), c.tcr, errors);
    }
    if (!command.empty()) detail::require_inputs(c, command, errors);
    if (errors.empty()) out.config = std::move(c);
    return out;
}

[[nodiscard]] inline ExperimentConfig validated(const nlohmann::json& j, const std::string& command = "") {
    auto r = validate_config(j, command);
    if (!r.config) throw ConfigError(r.errors);
    return *r.config;
}

/// Parses a file as JSON; an empty file is treated as an empty object.
[[nodiscard]] inline nlohmann::json read_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"config: cannot open '" + path + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (csv::trim(text).empty()) return nlohmann::json::object();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({"config: '" + path + "' is not valid JSON (" + e.what() + ")"});
    }
}

/**
 * Applies `key.path=value`. The value is parsed as JSON when it can be and
 * kept as a string otherwise; intermediate objects are created as needed.
 */
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError({"override '" + assignment + "': expected key=value"});
    }
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        value = text;
    }
    if (!j.is_object()) j = nlohmann::json::object();
    nlohmann::json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError({"override '" + assignment + "': empty key segment"});
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        auto& next = (*node)[part];
        if (!next.is_object()) next = nlohmann::json::object();
        node = &next;
        start = dot + 1;
    }
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    auto opt_year = [](const std::optional<int>& y) { return y ? nlohmann::json(*y) : nlohmann::json(nullptr); };
    auto pair = [](std::pair<double, double> p) { return nlohmann::json::array({p.first, p.second}); };
    nlohmann::json levels = nlohmann::json::array();
    for (auto l : c.bootstrap.levels) levels.push_back(pair(l));
    nlohmann::json eb = nlohmann::json::array();
    for (const auto& r : c.tcr.energy_balance) {
        eb.push_back({{"label", r.label}, {"delta_t", r.delta_t}, {"delta_f", r.delta_f}, {"delta_q", r.delta_q}});
    }
    j = {
        {"schema_version", c.schema_version},
        {"name", c.name},
        {"seed", c.seed},
        {"replicates", c.replicates},
        {"output_dir", c.output_dir},
        {"inputs",
         {{"temperature", c.inputs.temperature},
          {"temperature_format", c.inputs.temperature_format},
          {"forcing", c.inputs.forcing},
          {"forcing_map", c.inputs.forcing_map},
          {"scenario", c.inputs.scenario},
          {"scenario_map", c.inputs.scenario_map},
          {"ensemble_dir", c.inputs.ensemble_dir},
          {"ensemble_format", c.inputs.ensemble_format}}},
        {"trend",
         {{"f2x", c.trend.f2x},
          {"rho_max", c.trend.rho_max},
          {"grid_n_a", c.trend.grid_n_a},
          {"grid_n_n", c.trend.grid_n_n},
          {"search", c.trend.search},
          {"start_rho_a", c.trend.start_rho_a},
          {"start_rho_n", c.trend.start_rho_n},
          {"start_step", c.trend.start_step},
          {"max_starts", c.trend.max_starts},
          {"first_year", opt_year(c.trend.first_year)},
          {"last_year", opt_year(c.trend.last_year)}}},
        {"noise",
         {{"p_max", c.noise.p_max},
          {"q_max", c.noise.q_max},
          {"select", c.noise.select},
          {"order", c.noise.order ? nlohmann::json::array({c.noise.order->first, c.noise.order->second})
                                  : nlohmann::json(nullptr)}}},
        {"bootstrap", {{"levels", levels}, {"burn_in", c.bootstrap.burn_in}}},
        {"projection",
         {{"splice_year", c.projection.splice_year},
          {"last_year", c.projection.last_year},
          {"band", pair(c.projection.band)}}},
        {"learning", {{"end_years", c.learning.end_years}, {"band", pair(c.learning.band)}}},
        {"scaling", {{"reference_year", c.scaling.reference_year}, {"endpoints", c.scaling.endpoints}}},
        {"calibration",
         {{"models", c.calibration.models},
          {"n", c.calibration.n},
          {"methods", c.calibration.methods},
          {"inner_replicates", c.calibration.inner_replicates},
          {"block_lengths", c.calibration.block_lengths},
          {"alphas", c.calibration.alphas}}},
        {"spectrum",
         {{"width", c.spectrum.width}, {"passes", c.spectrum.passes}, {"models", c.spectrum.models}}},
        {"simulate", {{"model", c.simulate.model}, {"n", c.simulate.n}, {"burn_in", c.simulate.burn_in}}},
        {"tcr", {{"band", pair(c.tcr.band)}, {"energy_balance", eb}}},
    };
}

/// Trend-fit options as configured (exploring the grid for the headline fit).
[[nodiscard]] inline RhoGrid rho_grid(const TrendSection& t, bool explore = true) {
    RhoGrid g;
    g.n_a = t.grid_n_a;
    g.n_n = t.grid_n_n;
    g.rho_max = t.rho_max;
    g.search = t.search == "global" ? RhoSearch::global : RhoSearch::anchored;
    g.start_rho_a = t.start_rho_a;
    g.start_rho_n = t.start_rho_n;
    g.start_step = t.start_step;
    g.max_starts = t.max_starts;
    g.explore = explore || g.search == RhoSearch::global;
    return g;
}

}  // namespace ftrend::experiments
