#pragma once

#include "ftrend/error.hpp"
#include "ftrend/lag.hpp"
#include "ftrend/nelder_mead.hpp"
#include "ftrend/ols.hpp"
#include "ftrend/series.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ftrend {

inline constexpr double default_f2x = 3.7;

struct TrendParams {
    double mu0{};
    double lambda_a{};
    double rho_a{};
    double lambda_n{};
    double rho_n{};
};

inline void validate(const TrendParams& p, double rho_max = 0.9999) {
    for (double v : {p.mu0, p.lambda_a, p.rho_a, p.lambda_n, p.rho_n}) {
        if (!std::isfinite(v)) throw ModelError("trend parameters must be finite");
    }
    if (p.rho_a < 0.0 || p.rho_a > rho_max || p.rho_n < 0.0 || p.rho_n > rho_max) {
        throw ModelError("rho_a and rho_n must lie in [0, " + std::to_string(rho_max) + "]");
    }
}

struct LinearTrendParams {
    double alpha{};  // value of the line at calendar year 0
    double beta{};   // per year
    int t0{};
    int t1{};
};

enum class RhoSearch {
    anchored,  // simplex from `start`; the grid is evaluated for the trace and the alternative
    global     // simplex from every grid local minimum, lowest rss wins
};

struct RhoGrid {
    int n_a = 40;
    int n_n = 40;
    double rho_max = 0.9999;
    double max_condition = 1e10;
    RhoSearch search = RhoSearch::anchored;
    double start_rho_a = 0.5;
    double start_rho_n = 0.5;
    double start_step = 0.1;
    // Grid local minima polished when searching globally (best first).
    int max_starts = 5;
    // Skip the grid and the global alternative (anchored search only; used inside resampling loops).
    bool explore = true;
    // Fitting requires the forcing record to start this early (spin-up).
    int latest_forcing_start = 1750;
};

enum class TraceStage { grid, polish, refine };

inline const char* to_string(TraceStage s) {
    switch (s) {
        case TraceStage::grid: return "grid";
        case TraceStage::polish: return "polish";
        case TraceStage::refine: return "refine";
    }
    return "unknown";
}

struct TraceEntry {
    double rho_a{};
    double rho_n{};
    double rss{};
    // grid point, simplex from a grid local minimum, or the returned fit's own simplex
    TraceStage stage{};
};

struct AlternativeOptimum {
    TrendParams params;
    double rss{};
};

struct TrendFit {
    TrendParams params;
    AnnualSeries fitted;
    AnnualSeries residuals;
    double rss{};
    std::vector<TraceEntry> optimizer_trace;
    double f2x = default_f2x;
    double rho_max = 0.9999;
    bool rho_a_at_cap = false;
    bool rho_n_at_cap = false;
    double condition{};
    int degenerate_grid_points = 0;
    // Best polished grid local minimum, set when its rss is below the returned fit's.
    std::optional<AlternativeOptimum> global_alternative;
};

struct LinearTrendFit {
    LinearTrendParams params;
    AnnualSeries fitted;
    AnnualSeries residuals;
    double rss{};
};

namespace detail {

inline void check_f2x(double f2x) {
    if (!(f2x > 0.0) || !std::isfinite(f2x)) throw std::invalid_argument("f2x must be positive");
}

/// Normalized forcing over the full table plus the row offset of the target window.
class LagDesign {
public:
    LagDesign(const ForcingTable& forcing, int first_year, int last_year, double f2x)
        : offset_(static_cast<std::size_t>(first_year - forcing.start_year())),
          n_(static_cast<std::size_t>(last_year - first_year + 1)) {
        check_f2x(f2x);
        if (first_year > last_year) throw DataError("empty year range");
        if (!forcing.covers(first_year) || !forcing.covers(last_year)) {
            throw DataError("forcing table (" + std::to_string(forcing.start_year()) + "-" +
                            std::to_string(forcing.end_year()) + ") does not cover years " +
                            std::to_string(first_year) + "-" + std::to_string(last_year));
        }
        const std::size_t end = offset_ + n_;
        fa_.assign(forcing.anthropogenic().begin(), forcing.anthropogenic().begin() + end);
        fn_.assign(forcing.natural().begin(), forcing.natural().begin() + end);
        for (auto& v : fa_) v /= f2x;
        for (auto& v : fn_) v /= f2x;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    // Years before the table are held at the first tabulated value.
    [[nodiscard]] Eigen::VectorXd h_a(double rho) const { return window(lag_filter(rho, fa_, fa_.front())); }
    [[nodiscard]] Eigen::VectorXd h_n(double rho) const { return window(lag_filter(rho, fn_, fn_.front())); }

    [[nodiscard]] Eigen::VectorXd mean(const TrendParams& p) const {
        return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_), p.mu0) + p.lambda_a * h_a(p.rho_a) +
               p.lambda_n * h_n(p.rho_n);
    }

private:
    [[nodiscard]] Eigen::VectorXd window(const std::vector<double>& h) const {
        return Eigen::Map<const Eigen::VectorXd>(h.data() + offset_, static_cast<Eigen::Index>(n_));
    }

    std::size_t offset_;
    std::size_t n_;
    std::vector<double> fa_, fn_;
};

inline OlsResult inner_fit(const Eigen::VectorXd& y, const Eigen::VectorXd& ha, const Eigen::VectorXd& hn,
                           double max_condition) {
    Eigen::MatrixXd x(y.size(), 3);
    x.col(0).setOnes();
    x.col(1) = ha;
    x.col(2) = hn;
    return ols(x, y, max_condition);
}

}  // namespace detail

/// mu0 + lambda_a h(rho_a, F_A/f2x) + lambda_n h(rho_n, F_N/f2x) on [first_year, last_year].
[[nodiscard]] inline AnnualSeries mean_response(const TrendParams& params, const ForcingTable& forcing,
                                                int first_year, int last_year, double f2x = default_f2x) {
    validate(params, std::nextafter(1.0, 0.0));
    detail::LagDesign design(forcing, first_year, last_year, f2x);
    Eigen::VectorXd m = design.mean(params);
    return {first_year, std::vector<double>(m.data(), m.data() + m.size()), Unit::celsius_anomaly};
}

[[nodiscard]] inline AnnualSeries project(const TrendParams& params, const Scenario& scenario,
                                          int first_year, int last_year, double f2x = default_f2x) {
    return mean_response(params, scenario.forcing, first_year, last_year, f2x);
}

/**
 * @brief Least-squares fit of the two-timescale lag model.
 *
 * The inner problem in (mu0, lambda_a, lambda_n) is solved exactly for each
 * (rho_a, rho_n), leaving a 2-D profile surface that is minimized by a
 * box-projected simplex. The surface is multimodal in rho_n: slow natural
 * responses can fit the pre-1880 eruptions' recovery through the spin-up.
 * The anchored search (default) takes the local minimum reached from a fixed
 * start; the 40x40 grid is still evaluated, its local minima are polished, and
 * the best of those is reported as global_alternative when it beats the
 * anchored fit. The global search returns that best polished minimum instead.
 * Every evaluated point is appended to optimizer_trace.
 */
[[nodiscard]] inline TrendFit fit_trend(const AnnualSeries& temps, const ForcingTable& forcing,
                                        double f2x = default_f2x, const RhoGrid& grid = {}) {
    if (temps.size() < 10) throw DataError("fit_trend needs at least 10 years of temperatures");
    if (forcing.start_year() > grid.latest_forcing_start) {
        throw DataError("forcing table starts in " + std::to_string(forcing.start_year()) +
                        "; historical fits need forcing from " +
                        std::to_string(grid.latest_forcing_start) + " or earlier");
    }
    if (grid.n_a < 2 || grid.n_n < 2) throw std::invalid_argument("rho grid needs at least 2 points per axis");
    if (!(grid.rho_max > 0.0 && grid.rho_max < 1.0)) throw std::invalid_argument("rho_max must lie in (0, 1)");
    const bool explore = grid.explore || grid.search == RhoSearch::global;

    detail::LagDesign design(forcing, temps.start_year(), temps.end_year(), f2x);
    const Eigen::VectorXd yv =
        Eigen::Map<const Eigen::VectorXd>(temps.values().data(), static_cast<Eigen::Index>(temps.size()));

    TrendFit out{TrendParams{}, temps, temps, 0.0, {}, f2x, grid.rho_max};
    auto& trace = out.optimizer_trace;
    const double inf = std::numeric_limits<double>::infinity();
    TraceStage stage = TraceStage::polish;

    auto objective = [&](const std::vector<double>& r) {
        try {
            double v = detail::inner_fit(yv, design.h_a(r[0]), design.h_n(r[1]), grid.max_condition).rss;
            trace.push_back({r[0], r[1], v, stage});
            return v;
        } catch (const NumericalError&) {
            return inf;
        }
    };
    SimplexOptions opt;
    opt.lower = {0.0, 0.0};
    opt.upper = {grid.rho_max, grid.rho_max};
    opt.f_tol = 1e-13;
    opt.x_tol = 1e-9;
    opt.max_evals = 1500;

    struct Optimum {
        double rss;
        double rho_a, rho_n;
    };
    std::optional<Optimum> anchored, best_polished;

    if (explore) {
        trace.reserve(static_cast<std::size_t>(grid.n_a * grid.n_n) + 3000);
        auto axis = [&](int n) {
            std::vector<double> v(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = grid.rho_max * i / (n - 1);
            return v;
        };
        const auto ra = axis(grid.n_a), rn = axis(grid.n_n);
        std::vector<Eigen::VectorXd> ha, hn;
        for (double r : ra) ha.push_back(design.h_a(r));
        for (double r : rn) hn.push_back(design.h_n(r));

        std::vector<double> g(ra.size() * rn.size(), inf);
        auto at = [&](std::size_t i, std::size_t j) -> double& { return g[i * rn.size() + j]; };
        for (std::size_t i = 0; i < ra.size(); ++i) {
            for (std::size_t j = 0; j < rn.size(); ++j) {
                try {
                    at(i, j) = detail::inner_fit(yv, ha[i], hn[j], grid.max_condition).rss;
                    trace.push_back({ra[i], rn[j], at(i, j), TraceStage::grid});
                } catch (const NumericalError&) {
                    ++out.degenerate_grid_points;
                }
            }
        }
        if (out.degenerate_grid_points == static_cast<int>(g.size())) {
            throw NumericalError("degenerate design: every grid point has collinear lag columns");
        }

        struct Start {
            double rss;
            std::size_t i, j;
        };
        std::vector<Start> starts;
        const auto na = static_cast<std::ptrdiff_t>(ra.size()), nn = static_cast<std::ptrdiff_t>(rn.size());
        for (std::ptrdiff_t i = 0; i < na; ++i) {
            for (std::ptrdiff_t j = 0; j < nn; ++j) {
                const double v = at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                if (!std::isfinite(v)) continue;
                bool local_min = true;
                for (std::ptrdiff_t ii = std::max<std::ptrdiff_t>(i - 1, 0); ii <= std::min(i + 1, na - 1); ++ii) {
                    for (std::ptrdiff_t jj = std::max<std::ptrdiff_t>(j - 1, 0); jj <= std::min(j + 1, nn - 1); ++jj) {
                        if (at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) < v) local_min = false;
                    }
                }
                if (local_min) starts.push_back({v, static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
            }
        }
        std::stable_sort(starts.begin(), starts.end(), [](auto& a, auto& b) { return a.rss < b.rss; });
        if (starts.size() > static_cast<std::size_t>(grid.max_starts)) {
            starts.resize(static_cast<std::size_t>(grid.max_starts));
        }
        const std::vector<double> step = {grid.rho_max / (grid.n_a - 1), grid.rho_max / (grid.n_n - 1)};
        stage = grid.search == RhoSearch::global ? TraceStage::refine : TraceStage::polish;
        for (const auto& s : starts) {
            auto r = nelder_mead(objective, {ra[s.i], rn[s.j]}, step, opt);
            Optimum o = r.fx <= s.rss ? Optimum{r.fx, r.x[0], r.x[1]} : Optimum{s.rss, ra[s.i], rn[s.j]};
            if (!best_polished || o.rss < best_polished->rss) best_polished = o;
        }
    }

    if (grid.search == RhoSearch::anchored) {
        const std::vector<double> start = {std::clamp(grid.start_rho_a, 0.0, grid.rho_max),
                                           std::clamp(grid.start_rho_n, 0.0, grid.rho_max)};
        stage = TraceStage::refine;
        auto r = nelder_mead(objective, start, {grid.start_step, grid.start_step}, opt);
        if (!std::isfinite(r.fx)) {
            throw NumericalError("degenerate design: no finite least-squares fit from the anchored start");
        }
        anchored = Optimum{r.fx, r.x[0], r.x[1]};
    }

    const Optimum chosen = anchored ? *anchored : *best_polished;
    auto params_at = [&](double rho_a, double rho_n, OlsResult* keep) {
        OlsResult f = detail::inner_fit(yv, design.h_a(rho_a), design.h_n(rho_n), grid.max_condition);
        TrendParams p{f.coef(0), f.coef(1), rho_a, f.coef(2), rho_n};
        if (keep) *keep = std::move(f);
        return p;
    };
    if (best_polished && best_polished->rss < chosen.rss) {
        out.global_alternative =
            AlternativeOptimum{params_at(best_polished->rho_a, best_polished->rho_n, nullptr), best_polished->rss};
    }
    OlsResult final_fit;
    out.params = params_at(chosen.rho_a, chosen.rho_n, &final_fit);
    out.rss = final_fit.rss;
    out.condition = final_fit.condition;
    const double cap_edge = grid.rho_max - 1e-6;
    out.rho_a_at_cap = chosen.rho_a >= cap_edge;
    out.rho_n_at_cap = chosen.rho_n >= cap_edge;
    Eigen::VectorXd fitted = yv - final_fit.residuals;
    out.fitted = AnnualSeries(temps.start_year(), std::vector<double>(fitted.data(), fitted.data() + fitted.size()),
                              Unit::celsius_anomaly, temps.baseline());
    out.residuals = AnnualSeries(temps.start_year(),
                                 std::vector<double>(final_fit.residuals.data(),
                                                     final_fit.residuals.data() + final_fit.residuals.size()),
                                 Unit::celsius_anomaly, temps.baseline());
    return out;
}

/// OLS line over [t0, t1]; the time axis is centred internally for conditioning.
[[nodiscard]] inline LinearTrendFit fit_linear_trend(const AnnualSeries& temps, int t0, int t1) {
    if (t1 - t0 < 2 || !temps.contains(t0) || !temps.contains(t1)) {
        throw DataError("linear trend window " + std::to_string(t0) + "-" + std::to_string(t1) +
                        " must span at least 3 years inside " + std::to_string(temps.start_year()) + "-" +
                        std::to_string(temps.end_year()));
    }
    const auto w = temps.slice(t0, t1);
    const Eigen::Index n = static_cast<Eigen::Index>(w.size());
    const double tmid = 0.5 * (t0 + t1);
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = static_cast<double>(t0 + i) - tmid;
        y(i) = w[static_cast<std::size_t>(i)];
    }
    auto f = ols(x, y);
    Eigen::VectorXd fitted = y - f.residuals;
    return {{f.coef(0) - f.coef(1) * tmid, f.coef(1), t0, t1},
            AnnualSeries(t0, std::vector<double>(fitted.data(), fitted.data() + n), Unit::celsius_anomaly),
            AnnualSeries(t0, std::vector<double>(f.residuals.data(), f.residuals.data() + n), Unit::celsius_anomaly),
            f.rss};
}

/**
 * @brief Transient climate response of the anthropogenic component.
 *
 * Forcing ramps linearly from zero to one doubling over 70 years (1%/yr CO2
 * growth is linear in forcing) with no natural forcing; returns the
 * temperature change at year 70 relative to mu0.
 */
[[nodiscard]] inline double tcr(const TrendParams& params, double f2x = default_f2x) {
    validate(params, std::nextafter(1.0, 0.0));
    detail::check_f2x(f2x);
    std::vector<double> x(70);
    for (int t = 1; t <= 70; ++t) x[static_cast<std::size_t>(t - 1)] = t / 70.0;
    return params.lambda_a * lag_filter(params.rho_a, x, 0.0).back();
}

/// f2x * dT / (dF - dQ), the energy-budget sensitivity per doubling.
[[nodiscard]] inline double energy_balance_sensitivity(double delta_t, double delta_f, double delta_q,
                                                       double f2x = default_f2x) {
    if (delta_f == delta_q) throw std::domain_error("energy balance: delta_f equals delta_q (division by zero)");
    return f2x * delta_t / (delta_f - delta_q);
}

inline void to_json(nlohmann::json& j, const TrendParams& p) {
    j = {{"mu0", p.mu0}, {"lambda_a", p.lambda_a}, {"rho_a", p.rho_a}, {"lambda_n", p.lambda_n}, {"rho_n", p.rho_n}};
}

inline void from_json(const nlohmann::json& j, TrendParams& p) {
    j.at("mu0").get_to(p.mu0);
    j.at("lambda_a").get_to(p.lambda_a);
    j.at("rho_a").get_to(p.rho_a);
    j.at("lambda_n").get_to(p.lambda_n);
    j.at("rho_n").get_to(p.rho_n);
}

inline nlohmann::json series_json(const AnnualSeries& s) {
    return {{"start_year", s.start_year()}, {"values", s.vector()}};
}

inline void to_json(nlohmann::json& j, const TrendFit& f) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : f.optimizer_trace) trace.push_back({t.rho_a, t.rho_n, t.rss, to_string(t.stage)});
    j = {{"params", f.params},
         {"rss", f.rss},
         {"f2x", f.f2x},
         {"rho_max", f.rho_max},
         {"rho_a_at_cap", f.rho_a_at_cap},
         {"rho_n_at_cap", f.rho_n_at_cap},
         {"condition", f.condition},
         {"degenerate_grid_points", f.degenerate_grid_points},
         {"fitted", series_json(f.fitted)},
         {"residuals", series_json(f.residuals)},
         {"optimizer_trace_columns", {"rho_a", "rho_n", "rss", "stage"}},
         {"optimizer_trace", trace}};
    if (f.global_alternative) {
        j["global_alternative"] = {{"params", f.global_alternative->params}, {"rss", f.global_alternative->rss}};
    } else {
        j["global_alternative"] = nullptr;
    }
}

}  // namespace ftrend
