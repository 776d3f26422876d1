#pragma once

#include "ftrend/bootstrap.hpp"
#include "ftrend/calibration.hpp"
#include "ftrend/experiments/config.hpp"
#include "ftrend/experiments/report.hpp"
#include "ftrend/innovations.hpp"
#include "ftrend/io.hpp"
#include "ftrend/learning.hpp"
#include "ftrend/simulate.hpp"
#include "ftrend/spectrum.hpp"
#include "ftrend/trend.hpp"

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ftrend::experiments {

struct RunOptions {
    unsigned threads = 1;
};

// ---------------------------------------------------------------------------
// Inputs

[[nodiscard]] inline AnnualSeries load_temperature(const ExperimentConfig& c) {
    auto t = parse_temperature_csv(c.inputs.temperature, temperature_format_from_string(c.inputs.temperature_format));
    const int first = c.trend.first_year.value_or(t.start_year());
    const int last = c.trend.last_year.value_or(t.end_year());
    return (first == t.start_year() && last == t.end_year()) ? t : t.slice(first, last);
}

[[nodiscard]] inline ForcingTable load_forcing(const ExperimentConfig& c) {
    return parse_forcing_table(c.inputs.forcing, load_column_map(c.inputs.forcing_map));
}

[[nodiscard]] inline Scenario load_scenario(const ExperimentConfig& c, const ForcingTable& historical) {
    auto future = parse_forcing_table(c.inputs.scenario, load_column_map(c.inputs.scenario_map));
    return build_scenario(historical, future, c.projection.splice_year,
                          std::filesystem::path(c.inputs.scenario).stem().string());
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces

struct HistoricalPipeline {
    TrendFit fit;
    OrderSelection aicc;
    OrderSelection bic;
    std::pair<int, int> order;
    ArfimaModel noise;
};

/// Trend fit, both order selections and the noise model used downstream.
[[nodiscard]] inline HistoricalPipeline historical_pipeline(const ExperimentConfig& c, const AnnualSeries& temps,
                                                            const ForcingTable& forcing) {
    HistoricalPipeline h{fit_trend(temps, forcing, c.trend.f2x, rho_grid(c.trend)), {}, {}, {}, {}};
    const auto r = h.fit.residuals.values();
    h.aicc = select_order(r, c.noise.p_max, c.noise.q_max, OrderCriterion::aicc);
    h.bic = select_order(r, c.noise.p_max, c.noise.q_max, OrderCriterion::bic);
    if (c.noise.order) {
        h.order = *c.noise.order;
        h.noise = fit_arma_mle(r, h.order.first, h.order.second).model;
    } else {
        const auto& s = c.noise.select == "bic" ? h.bic : h.aicc;
        h.order = {s.p, s.q};
        h.noise = s.model;
    }
    return h;
}

[[nodiscard]] inline BootstrapOptions bootstrap_options(const ExperimentConfig& c, const RunOptions& run) {
    BootstrapOptions o;
    o.grid = rho_grid(c.trend, false);
    o.threads = run.threads;
    o.burn_in = static_cast<std::size_t>(c.bootstrap.burn_in);
    return o;
}

[[nodiscard]] inline BootstrapSample historical_bootstrap(const ExperimentConfig& c, const HistoricalPipeline& h,
                                                           const ForcingTable& forcing, const RunOptions& run) {
    return parametric_bootstrap(h.fit, h.noise, forcing, c.replicates, c.seed, h.order, bootstrap_options(c, run));
}

[[nodiscard]] inline std::vector<TrendParams> replicate_params(const BootstrapSample& s) {
    std::vector<TrendParams> out;
    const auto mu = s.column("mu0"), la = s.column("lambda_a"), ra = s.column("rho_a"), ln = s.column("lambda_n"),
               rn = s.column("rho_n");
    for (std::size_t i = 0; i < mu.size(); ++i) out.push_back({mu[i], la[i], ra[i], ln[i], rn[i]});
    return out;
}

inline nlohmann::json model_json(const ArfimaModel& m) { return nlohmann::json(m); }

inline nlohmann::json selection_json(const OrderSelection& s, int n) {
    auto ic = information_criteria(s.loglik, s.p + s.q + 1, n);
    return {{"p", s.p}, {"q", s.q}, {"model", model_json(s.model)}, {"loglik", s.loglik}, {"aicc", ic.aicc},
            {"bic", ic.bic}};
}

inline void write_fit_tables(Report& rep, const AnnualSeries& temps, const TrendFit& fit) {
    {
        auto os = rep.table("fit.csv");
        csv::Writer w(os);
        w.header({"year", "observed", "fitted", "residual"});
        for (std::size_t i = 0; i < temps.size(); ++i) {
            w.row(temps.start_year() + static_cast<int>(i), temps[i], fit.fitted[i], fit.residuals[i]);
        }
    }
    auto os = rep.table("trace.csv");
    csv::Writer w(os);
    w.header({"rho_a", "rho_n", "rss", "stage"});
    for (const auto& t : fit.optimizer_trace) w.row(t.rho_a, t.rho_n, t.rss, to_string(t.stage));
}

inline void write_noise_tables(Report& rep, const HistoricalPipeline& h, int width, int passes) {
    {
        auto os = rep.table("noise_candidates.csv");
        csv::Writer w(os);
        w.header({"p", "q", "ok", "loglik", "aicc", "bic", "converged", "error"});
        for (const auto& c : h.aicc.log) w.row(c.p, c.q, c.ok ? 1 : 0, c.loglik, c.aicc, c.bic, c.converged ? 1 : 0, c.error);
    }
    {
        const auto pg = periodogram(h.fit.residuals.values());
        const auto sm = smooth_periodogram(pg, width, passes);
        const auto fa = arma_spectral_density(h.aicc.model, pg.fourier_frequencies);
        const auto fb = arma_spectral_density(h.bic.model, pg.fourier_frequencies);
        auto os = rep.table("periodogram.csv");
        csv::Writer w(os);
        w.header({"frequency", "raw", "smoothed", "aicc_model", "bic_model"});
        for (std::size_t i = 0; i < pg.ordinates.size(); ++i) {
            w.row(pg.fourier_frequencies[i], pg.ordinates[i], sm.ordinates[i], fa.power[i], fb.power[i]);
        }
    }
    auto innov = sample_innovations(h.noise, h.fit.residuals.values());
    std::sort(innov.begin(), innov.end());
    const boost::math::normal z;
    auto os = rep.table("innovations_qq.csv");
    csv::Writer w(os);
    w.header({"normal_quantile", "innovation"});
    const double n = static_cast<double>(innov.size());
    for (std::size_t i = 0; i < innov.size(); ++i) {
        w.row(boost::math::quantile(z, (static_cast<double>(i) + 0.5) / n), innov[i]);
    }
}

inline void write_bootstrap_tables(Report& rep, const BootstrapSample& s,
                                   const std::vector<std::pair<double, double>>& levels) {
    {
        auto os = rep.table("bootstrap.csv");
        write_csv(s, os);
    }
    if (!s.usable()) return;
    auto os = rep.table("intervals.csv");
    csv::Writer w(os);
    w.header({"parameter", "lower_pct", "upper_pct", "lower", "upper"});
    for (const auto& c : s.columns) {
        for (auto [lo, hi] : levels) {
            auto iv = percentile_interval(s, c, lo, hi);
            w.row(c, lo, hi, iv.lower, iv.upper);
        }
    }
}

inline nlohmann::json fit_json(const TrendFit& fit) {
    nlohmann::json j = {{"params", fit.params},
                        {"rss", fit.rss},
                        {"condition", fit.condition},
                        {"rho_a_at_cap", fit.rho_a_at_cap},
                        {"rho_n_at_cap", fit.rho_n_at_cap},
                        {"degenerate_grid_points", fit.degenerate_grid_points},
                        {"tcr", tcr(fit.params, fit.f2x)}};
    j["global_alternative"] = fit.global_alternative
                                  ? nlohmann::json{{"params", fit.global_alternative->params},
                                                   {"rss", fit.global_alternative->rss}}
                                  : nlohmann::json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// Recipes

/// Trend fit, residual spectrum, noise-order table, innovations Q-Q and bootstrap intervals.
inline nlohmann::json run_historical_fit(const ExperimentConfig& c, const RunOptions& run = {}) {
    Report rep(c, "fit");
    const auto temps = load_temperature(c);
    const auto forcing = load_forcing(c);
    const auto h = historical_pipeline(c, temps, forcing);
    write_fit_tables(rep, temps, h.fit);
    write_noise_tables(rep, h, c.spectrum.width, c.spectrum.passes);
    const auto s = historical_bootstrap(c, h, forcing, run);
    write_bootstrap_tables(rep, s, c.bootstrap.levels);
    const int n = static_cast<int>(temps.size());
    nlohmann::json results = {{"fit", fit_json(h.fit)},
                              {"noise",
                               {{"aicc", selection_json(h.aicc, n)},
                                {"bic", selection_json(h.bic, n)},
                                {"used", {{"p", h.order.first}, {"q", h.order.second}, {"model", model_json(h.noise)}}}}},
                              {"bootstrap", summary_json(s, c.bootstrap.levels)}};
    rep.finish(results);
    return results;
}

inline nlohmann::json run_bootstrap(const ExperimentConfig& c, const RunOptions& run = {}) {
    Report rep(c, "bootstrap");
    const auto temps = load_temperature(c);
    const auto forcing = load_forcing(c);
    const auto h = historical_pipeline(c, temps, forcing);
    const auto s = historical_bootstrap(c, h, forcing, run);
    write_bootstrap_tables(rep, s, c.bootstrap.levels);
    nlohmann::json results = {{"fit", fit_json(h.fit)},
                              {"noise", {{"p", h.order.first}, {"q", h.order.second}, {"model", model_json(h.noise)}}},
                              {"bootstrap", summary_json(s, c.bootstrap.levels)}};
    rep.finish(results);
    return results;
}

struct BandRow {
    int year{};
    double point{};
    double lower{};
    double median{};
    double upper{};
};

/// Pointwise percentile band of mean responses over a set of parameter draws.
[[nodiscard]] inline std::vector<BandRow> projection_band(const TrendParams& point, const std::vector<TrendParams>& draws,
                                                          const Scenario& scenario, int first, int last, double f2x,
                                                          std::pair<double, double> band) {
    if (draws.empty()) throw NumericalError("projection band needs at least one parameter draw");
    const auto centre = project(point, scenario, first, last, f2x);
    const auto n = static_cast<std::size_t>(last - first + 1);
    std::vector<std::vector<double>> by_year(n, std::vector<double>(draws.size()));
    for (std::size_t d = 0; d < draws.size(); ++d) {
        const auto m = project(draws[d], scenario, first, last, f2x);
        for (std::size_t t = 0; t < n; ++t) by_year[t][d] = m[t];
    }
    std::vector<BandRow> out;
    for (std::size_t t = 0; t < n; ++t) {
        out.push_back({first + static_cast<int>(t), centre[t], quantile_type7(by_year[t], band.first / 100.0),
                       quantile_type7(by_year[t], 0.5), quantile_type7(by_year[t], band.second / 100.0)});
    }
    return out;
}

inline nlohmann::json run_projection(const ExperimentConfig& c, const RunOptions& run = {}) {
    Report rep(c, "project");
    const auto temps = load_temperature(c);
    const auto forcing = load_forcing(c);
    const auto scenario = load_scenario(c, forcing);
    const auto h = historical_pipeline(c, temps, forcing);
    const auto s = historical_bootstrap(c, h, forcing, run);
    if (!s.usable()) throw NumericalError("bootstrap sample is unusable (" + s.flag + ")");
    const auto rows = projection_band(h.fit.params, replicate_params(s), scenario, temps.start_year(),
                                      c.projection.last_year, c.trend.f2x, c.projection.band);
    {
        auto os = rep.table("projection.csv");
        csv::Writer w(os);
        w.header({"year", "point", "lower", "median", "upper"});
        for (const auto& r : rows) w.row(r.year, r.point, r.lower, r.median, r.upper);
    }
    nlohmann::json years = nlohmann::json::object();
    for (const auto& r : rows) {
        if (r.year % 50 == 0 || r.year == temps.end_year()) {
            years[std::to_string(r.year)] = {{"point", r.point}, {"lower", r.lower}, {"upper", r.upper}};
        }
    }
    nlohmann::json results = {{"fit", fit_json(h.fit)},
                              {"scenario",
                               {{"label", scenario.label},
                                {"splice_year", scenario.splice_year},
                                {"anthropogenic_shift", scenario.anthropogenic_shift}}},
                              {"band", {c.projection.band.first, c.projection.band.second}},
                              {"bootstrap", {{"successes", s.replicates.size()}, {"failures", s.failures}}},
                              {"years", years}};
    rep.finish(results);
    return results;
}

inline nlohmann::json run_learning_curve(const ExperimentConfig& c, const RunOptions& run = {}) {
    Report rep(c, "learn");
    const auto temps = load_temperature(c);
    const auto forcing = load_forcing(c);
    const auto scenario = load_scenario(c, forcing);
    const auto h = historical_pipeline(c, temps, forcing);
    const auto rows = learning_experiment(h.fit, h.noise, scenario, c.learning.end_years, c.replicates, c.seed,
                                          c.learning.band.first, c.learning.band.second, bootstrap_options(c, run));
    nlohmann::json table = nlohmann::json::array();
    {
        auto os = rep.table("learning.csv");
        csv::Writer w(os);
        w.header({"end_year", "lower_pct", "upper_pct", "lower", "upper", "warming", "successes", "failures", "at_cap"});
        for (const auto& r : rows) {
            w.row(r.end_year, r.lambda_a.lower_pct, r.lambda_a.upper_pct, r.lambda_a.lower, r.lambda_a.upper,
                  r.warming, r.successes, r.failures, r.at_cap);
            table.push_back({{"end_year", r.end_year},
                             {"lower", r.lambda_a.lower},
                             {"upper", r.lambda_a.upper},
                             {"warming", r.warming},
                             {"successes", r.successes},
                             {"failures", r.failures},
                             {"at_cap", r.at_cap}});
        }
    }
    {
        auto os = rep.table("learning_replicates.csv");
        csv::Writer w(os);
        w.header({"end_year", "lambda_a"});
        for (const auto& r : rows) {
            for (double v : r.lambda_a_star) w.row(r.end_year, v);
        }
    }
    nlohmann::json results = {{"fit", fit_json(h.fit)},
                              {"noise", {{"p", h.order.first}, {"q", h.order.second}, {"model", model_json(h.noise)}}},
                              {"band", {c.learning.band.first, c.learning.band.second}},
                              {"rows", table}};
    rep.finish(results);
    return results;
}

inline std::string block_label(const std::optional<int>& l) { return l ? std::to_string(*l) : std::string(); }

/// Type-I error tables over the configured (model, n, method) grid.
inline nlohmann::json run_calibration_study(const ExperimentConfig& c, const RunOptions& run = {}) {
    Report rep(c, "calibrate");
    CalibrationOptions opt;
    opt.methods = c.calibration.methods;
    opt.inner_b = c.calibration.inner_replicates;
    opt.block_lengths = c.calibration.block_lengths;
    opt.p_max = c.noise.p_max;
    opt.q_max = c.noise.q_max;
    opt.threads = run.threads;
    std::vector<PValueSample> samples;
    for (const auto& m : c.calibration.models) {
        for (int n : c.calibration.n) {
            auto cell = calibration_cell(m, n, c.replicates, c.seed, opt);
            for (auto& s : cell) samples.push_back(std::move(s));
        }
    }
    std::vector<std::string> header = {"model", "n", "method", "block_length", "successes", "failures"};
    for (double a : c.calibration.alphas) header.push_back("type1_" + csv::format(a));
    header.push_back("ks_statistic");
    header.push_back("ks_p_value");
    nlohmann::json rows = nlohmann::json::array();
    {
        auto os = rep.table("type1.csv");
        csv::Writer w(os);
        w.header(std::span<const std::string>(header));
        for (const auto& s : samples) {
            const auto r = type_one_errors(s, c.calibration.alphas);
            os << r.model << ',' << r.n << ',' << r.method << ',' << block_label(r.block_length) << ','
               << r.successes << ',' << r.failures;
            for (double v : r.rates) os << ',' << csv::format(v);
            os << ',' << csv::format(r.ks_statistic) << ',' << csv::format(r.ks_p_value) << '\n';
            nlohmann::json rates = nlohmann::json::object();
            for (std::size_t i = 0; i < r.alphas.size(); ++i) rates[csv::format(r.alphas[i])] = r.rates[i];
            rows.push_back({{"model", r.model},
                            {"n", r.n},
                            {"method", r.method},
                            {"block_length", r.block_length ? nlohmann::json(*r.block_length) : nlohmann::json(nullptr)},
                            {"successes", r.successes},
                            {"failures", r.failures},
                            {"type1", rates},
                            {"ks_statistic", r.ks_statistic},
                            {"ks_p_value", r.ks_p_value}});
        }
    }
    {
        auto os = rep.table("pvalues.csv");
        csv::Writer w(os);
        w.header({"model", "n", "method", "block_length", "p_value"});
        for (const auto& s : samples) {
            for (double p : s.p_values) w.row(s.model, s.n, s.method, block_label(s.block_length), p);
        }
    }
    {
        auto os = rep.table("qq.csv");
        csv::Writer w(os);
        w.header({"model", "n", "method", "block_length", "uniform", "p_value"});
        for (const auto& s : samples) {
            for (const auto& q : qq_uniform(s.p_values)) {
                w.row(s.model, s.n, s.method, block_label(s.block_length), q.uniform, q.p_value);
            }
        }
    }
    nlohmann::json results = {{"outer_replicates", c.replicates}, {"cells", rows}};
    rep.finish(results);
    return results;
}

/// Refits with the anthropogenic trajectory rescaled to each endpoint at the reference year.
inline nlohmann::json run_forcing_scaling(const ExperimentConfig& c, const RunOptions& = {}) {
    Report rep(c, "scale-forcing");
    const auto temps = load_temperature(c);
    const auto forcing = load_forcing(c);
    const double ref = forcing.anthropogenic_at(c.scaling.reference_year);
    if (!(ref > 0.0)) throw DataError("anthropogenic forcing at the reference year must be positive");
    struct Row {
        std::string label;
        double target, scale;
        TrendFit fit;
    };
    std::vector<Row> rows;
    rows.push_back({"baseline", ref, 1.0, fit_trend(temps, forcing, c.trend.f2x, rho_grid(c.trend))});
    for (double e : c.scaling.endpoints) {
        const double scale = e / ref;
        rows.push_back({"endpoint_" + csv::format(e), e, scale,
                        fit_trend(temps, scale_anthropogenic(forcing, scale), c.trend.f2x, rho_grid(c.trend))});
    }
    nlohmann::json out = nlohmann::json::array();
    auto os = rep.table("scaling.csv");
    csv::Writer w(os);
    w.header({"label", "target_forcing", "scale", "mu0", "lambda_a", "rho_a", "lambda_n", "rho_n", "rss"});
    for (const auto& r : rows) {
        const auto& p = r.fit.params;
        w.row(r.label, r.target, r.scale, p.mu0, p.lambda_a, p.rho_a, p.lambda_n, p.rho_n, r.fit.rss);
        out.push_back({{"label", r.label}, {"target_forcing", r.target}, {"scale", r.scale}, {"fit", fit_json(r.fit)}});
    }
    nlohmann::json results = {{"reference_year", c.scaling.reference_year},
                              {"reference_forcing", ref},
                              {"rows", out}};
    rep.finish(results);
    return results;
}

inline nlohmann::json run_ensemble_refit(const ExperimentConfig& c, const RunOptions& run = {}) {
    Report rep(c, "ensemble");
    const auto forcing = load_forcing(c);
    const auto files = list_files(c.inputs.ensemble_dir);
    if (files.empty()) throw DataError("no .csv members in '" + c.inputs.ensemble_dir + "'");
    const auto fmt = temperature_format_from_string(c.inputs.ensemble_format);
    struct Member {
        std::optional<TrendFit> fit;
        std::string error;
    };
    std::vector<Member> members(files.size());
    parallel_for(files.size(), run.threads, [&](std::size_t i) {
        try {
            auto t = parse_temperature_csv(files[i], fmt);
            const int first = c.trend.first_year.value_or(t.start_year());
            const int last = c.trend.last_year.value_or(t.end_year());
            if (first != t.start_year() || last != t.end_year()) t = t.slice(first, last);
            members[i].fit = fit_trend(t, forcing, c.trend.f2x, rho_grid(c.trend));
        } catch (const std::exception& e) {
            members[i].error = e.what();
        }
    });
    static const char* names[] = {"mu0", "lambda_a", "rho_a", "lambda_n", "rho_n"};
    std::vector<std::vector<double>> cols(5);
    int failures = 0;
    nlohmann::json errors = nlohmann::json::object();
    {
        auto os = rep.table("ensemble.csv");
        csv::Writer w(os);
        w.header({"member", "ok", "mu0", "lambda_a", "rho_a", "lambda_n", "rho_n", "rss", "error"});
        for (std::size_t i = 0; i < files.size(); ++i) {
            const auto member = std::filesystem::path(files[i]).filename().string();
            if (const auto& f = members[i].fit) {
                const auto& p = f->params;
                w.row(member, 1, p.mu0, p.lambda_a, p.rho_a, p.lambda_n, p.rho_n, f->rss, "");
                const double v[] = {p.mu0, p.lambda_a, p.rho_a, p.lambda_n, p.rho_n};
                for (int k = 0; k < 5; ++k) cols[static_cast<std::size_t>(k)].push_back(v[k]);
            } else {
                ++failures;
                errors[member] = members[i].error;
                os << member << ",0,,,,,,,\"" << members[i].error << "\"\n";
            }
        }
    }
    nlohmann::json spread = nlohmann::json::object();
    for (int k = 0; k < 5; ++k) {
        const auto& v = cols[static_cast<std::size_t>(k)];
        if (v.empty()) continue;
        spread[names[k]] = {{"min", *std::min_element(v.begin(), v.end())},
                            {"q025", quantile_type7(v, 0.025)},
                            {"median", quantile_type7(v, 0.5)},
                            {"q975", quantile_type7(v, 0.975)},
                            {"max", *std::max_element(v.begin(), v.end())}};
    }
    nlohmann::json results = {{"members", files.size()},
                              {"failures", failures},
                              {"errors", errors},
                              {"spread", spread}};
    rep.finish(results);
    return results;
}

inline nlohmann::json run_tcr_report(const ExperimentConfig& c, const RunOptions& run = {}) {
    Report rep(c, "tcr");
    const auto temps = load_temperature(c);
    const auto forcing = load_forcing(c);
    const auto h = historical_pipeline(c, temps, forcing);
    const auto s = historical_bootstrap(c, h, forcing, run);
    if (!s.usable()) throw NumericalError("bootstrap sample is unusable (" + s.flag + ")");
    std::vector<double> star;
    for (const auto& p : replicate_params(s)) star.push_back(tcr(p, c.trend.f2x));
    {
        auto os = rep.table("tcr_replicates.csv");
        csv::Writer w(os);
        w.header({"tcr"});
        for (double v : star) w.row(v);
    }
    const auto iv = percentile_interval(star, c.tcr.band.first, c.tcr.band.second);
    nlohmann::json eb = nlohmann::json::array();
    {
        auto os = rep.table("energy_balance.csv");
        csv::Writer w(os);
        w.header({"label", "delta_t", "delta_f", "delta_q", "sensitivity"});
        for (const auto& r : c.tcr.energy_balance) {
            const double v = energy_balance_sensitivity(r.delta_t, r.delta_f, r.delta_q, c.trend.f2x);
            w.row(r.label, r.delta_t, r.delta_f, r.delta_q, v);
            eb.push_back({{"label", r.label}, {"sensitivity", v}});
        }
    }
    nlohmann::json results = {{"tcr", tcr(h.fit.params, c.trend.f2x)},
                              {"interval", {{"lower_pct", iv.lower_pct}, {"upper_pct", iv.upper_pct},
                                            {"lower", iv.lower}, {"upper", iv.upper}}},
                              {"bootstrap", {{"successes", s.replicates.size()}, {"failures", s.failures}}},
                              {"energy_balance", eb}};
    rep.finish(results);
    return results;
}

/// Residual periodogram plus calibration-model spectra and their best AR(1) approximations.
inline nlohmann::json run_spectrum(const ExperimentConfig& c, const RunOptions& = {}) {
    Report rep(c, "spectrum");
    const auto temps = load_temperature(c);
    const auto forcing = load_forcing(c);
    const auto h = historical_pipeline(c, temps, forcing);
    write_noise_tables(rep, h, c.spectrum.width, c.spectrum.passes);
    const auto grid = kl_grid();
    nlohmann::json approx = nlohmann::json::object();
    auto os = rep.table("model_spectra.csv");
    csv::Writer w(os);
    w.header({"model", "frequency", "power", "best_ar1_power"});
    for (const auto& name : c.spectrum.models) {
        const auto& m = calibration_model(name);
        const auto f = arfima_spectral_density(m, grid);
        const auto a = best_ar1_kl(f);
        const auto g = arma_spectral_density(a, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) w.row(name, grid[i], f.power[i], g.power[i]);
        approx[name] = {{"model", model_json(m)}, {"best_ar1", model_json(a)}};
    }
    nlohmann::json results = {{"noise",
                               {{"aicc", selection_json(h.aicc, static_cast<int>(temps.size()))},
                                {"bic", selection_json(h.bic, static_cast<int>(temps.size()))}}},
                              {"best_ar1", approx}};
    rep.finish(results);
    return results;
}

/// `replicates` independent series of the configured model, series r from stream (seed, r).
inline nlohmann::json run_simulate(const ExperimentConfig& c, const RunOptions& run = {}) {
    Report rep(c, "simulate");
    const auto& m = c.simulate.model;
    std::vector<std::vector<double>> series(static_cast<std::size_t>(c.replicates));
    parallel_for(series.size(), run.threads, [&](std::size_t r) {
        series[r] = simulate(m, static_cast<std::size_t>(c.simulate.n), derive_seed(c.seed, r),
                             static_cast<std::size_t>(c.simulate.burn_in));
    });
    auto os = rep.table("simulations.csv");
    csv::Writer w(os);
    w.header({"replicate", "t", "value"});
    for (std::size_t r = 0; r < series.size(); ++r) {
        for (std::size_t t = 0; t < series[r].size(); ++t) w.row(r, t, series[r][t]);
    }
    nlohmann::json results = {{"model", model_json(m)}, {"n", c.simulate.n}, {"series", c.replicates}};
    rep.finish(results);
    return results;
}

/// Dispatch by subcommand name.
inline nlohmann::json run_command(const std::string& command, const ExperimentConfig& c, const RunOptions& run = {}) {
    if (command == "fit") return run_historical_fit(c, run);
    if (command == "bootstrap") return run_bootstrap(c, run);
    if (command == "project") return run_projection(c, run);
    if (command == "learn") return run_learning_curve(c, run);
    if (command == "calibrate") return run_calibration_study(c, run);
    if (command == "scale-forcing") return run_forcing_scaling(c, run);
    if (command == "ensemble") return run_ensemble_refit(c, run);
    if (command == "tcr") return run_tcr_report(c, run);
    if (command == "spectrum") return run_spectrum(c, run);
    if (command == "simulate") return run_simulate(c, run);
    throw std::invalid_argument("unknown subcommand '" + command + "'");
}

}  // namespace ftrend::experiments
