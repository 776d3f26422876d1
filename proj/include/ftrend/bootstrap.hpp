#pragma once

#include "ftrend/arma_fit.hpp"
#include "ftrend/csv.hpp"
#include "ftrend/parallel.hpp"
#include "ftrend/rng.hpp"
#include "ftrend/simulate.hpp"
#include "ftrend/stats.hpp"
#include "ftrend/trend.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ftrend {

enum class BootstrapMethod { parametric, circular_block };

inline const char* to_string(BootstrapMethod m) {
    return m == BootstrapMethod::parametric ? "parametric" : "circular_block";
}

/**
 * Replicate estimates, one row per successful replicate. Failed replicates
 * are counted, not stored; the sample is usable when at least 95% of the b
 * requested replicates succeeded.
 */
struct BootstrapSample {
    BootstrapMethod method = BootstrapMethod::parametric;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> replicates;
    std::uint64_t seed{};
    int b{};
    std::optional<int> block_length;
    int failures{};
    int at_cap{};  // successful replicates with rho_a or rho_n on the cap
    std::string flag;  // empty when usable

    [[nodiscard]] bool usable() const noexcept { return flag.empty(); }

    [[nodiscard]] std::vector<double> column(const std::string& name) const {
        auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw std::invalid_argument("bootstrap sample has no column '" + name + "'");
        const auto c = static_cast<std::size_t>(it - columns.begin());
        std::vector<double> out;
        out.reserve(replicates.size());
        for (const auto& r : replicates) out.push_back(r[c]);
        return out;
    }
};

inline void finalize_flag(BootstrapSample& s) {
    if (s.b <= 0) {
        s.flag = "no replicates";
    } else if (static_cast<double>(s.replicates.size()) < 0.95 * s.b) {
        s.flag = "unusable: " + std::to_string(s.failures) + " of " + std::to_string(s.b) + " replicates failed";
    } else {
        s.flag.clear();
    }
}

struct PercentileInterval {
    double lower_pct{};
    double upper_pct{};
    double lower{};
    double upper{};
};

[[nodiscard]] inline PercentileInterval percentile_interval(std::vector<double> values, double lower_pct,
                                                            double upper_pct) {
    if (!(lower_pct > 0.0 && upper_pct < 100.0 && lower_pct <= upper_pct)) {
        throw std::invalid_argument("percentiles must satisfy 0 < lower <= upper < 100");
    }
    return {lower_pct, upper_pct, quantile_type7(values, lower_pct / 100.0), quantile_type7(values, upper_pct / 100.0)};
}

/// Type-7 percentile interval of one replicate column.
[[nodiscard]] inline PercentileInterval percentile_interval(const BootstrapSample& s, const std::string& param,
                                                            double lower_pct, double upper_pct) {
    if (!s.usable()) throw NumericalError("bootstrap sample is unusable (" + s.flag + ")");
    return percentile_interval(s.column(param), lower_pct, upper_pct);
}

struct BootstrapOptions {
    RhoGrid grid = [] {
        RhoGrid g;
        g.explore = false;
        return g;
    }();
    unsigned threads = 1;
    std::size_t burn_in = 500;
};

/**
 * @brief Parametric bootstrap of the two-step pipeline.
 *
 * Each replicate adds a simulated noise path to the fitted mean, refits the
 * trend by least squares and then refits ARMA(p, q) to the new residuals.
 * Columns: mu0, lambda_a, rho_a, lambda_n, rho_n, sigma. Replicate r draws
 * from stream (seed, r), so rows do not depend on the thread count.
 */
[[nodiscard]] inline BootstrapSample parametric_bootstrap(const TrendFit& fit, const ArfimaModel& noise,
                                                          const ForcingTable& forcing, int b, std::uint64_t seed,
                                                          std::pair<int, int> refit_order,
                                                          const BootstrapOptions& opt = {}) {
    BootstrapSample s;
    s.method = BootstrapMethod::parametric;
    s.columns = {"mu0", "lambda_a", "rho_a", "lambda_n", "rho_n", "sigma"};
    s.seed = seed;
    s.b = std::max(b, 0);
    if (b <= 0) {
        finalize_flag(s);
        return s;
    }
    validate(noise);
    const auto n = fit.fitted.size();
    std::vector<std::optional<std::vector<double>>> rows(static_cast<std::size_t>(b));
    std::vector<char> capped(static_cast<std::size_t>(b), 0);
    parallel_for(static_cast<std::size_t>(b), opt.threads, [&](std::size_t r) {
        try {
            auto e = simulate(noise, n, derive_seed(seed, r), opt.burn_in);
            std::vector<double> y(fit.fitted.vector());
            for (std::size_t t = 0; t < n; ++t) y[t] += e[t];
            AnnualSeries ys(fit.fitted.start_year(), std::move(y), Unit::celsius_anomaly);
            auto refit = fit_trend(ys, forcing, fit.f2x, opt.grid);
            auto nf = fit_arma_mle(refit.residuals.values(), refit_order.first, refit_order.second);
            const auto& p = refit.params;
            rows[r] = std::vector<double>{p.mu0, p.lambda_a, p.rho_a, p.lambda_n, p.rho_n, nf.model.sigma};
            capped[r] = refit.rho_a_at_cap || refit.rho_n_at_cap;
        } catch (const std::exception&) {
        }
    });
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r]) {
            s.replicates.push_back(std::move(*rows[r]));
            s.at_cap += capped[r];
        } else {
            ++s.failures;
        }
    }
    finalize_flag(s);
    return s;
}

inline void write_csv(const BootstrapSample& s, std::ostream& os) {
    csv::Writer w(os);
    w.header(std::span<const std::string>(s.columns));
    for (const auto& r : s.replicates) w.row(std::span<const double>(r));
}

inline nlohmann::json summary_json(const BootstrapSample& s, const std::vector<std::pair<double, double>>& levels) {
    nlohmann::json intervals = nlohmann::json::object();
    if (s.usable()) {
        for (const auto& c : s.columns) {
            nlohmann::json per = nlohmann::json::array();
            for (auto [lo, hi] : levels) {
                auto iv = percentile_interval(s, c, lo, hi);
                per.push_back({{"lower_pct", lo}, {"upper_pct", hi}, {"lower", iv.lower}, {"upper", iv.upper}});
            }
            intervals[c] = per;
        }
    }
    return {{"method", to_string(s.method)},
            {"seed", s.seed},
            {"b", s.b},
            {"block_length", s.block_length ? nlohmann::json(*s.block_length) : nlohmann::json(nullptr)},
            {"successes", s.replicates.size()},
            {"failures", s.failures},
            {"at_cap", s.at_cap},
            {"usable", s.usable()},
            {"flag", s.flag},
            {"intervals", intervals}};
}

}  // namespace ftrend
