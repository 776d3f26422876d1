#pragma once

#include "ftrend/bootstrap.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace ftrend {

struct LearningRow {
    int end_year{};
    PercentileInterval lambda_a;
    double warming{};  // fitted mean at end_year minus the mean at the forcing start
    int successes{};
    int failures{};
    int at_cap{};
    std::vector<double> lambda_a_star;
};

/**
 * @brief How the lambda_a interval shrinks as the record grows.
 *
 * Replicate r simulates one noise path from stream (seed, r) spanning the
 * fit's first year through the last end year, adds it to the fitted mean under
 * the scenario forcing, and refits the trend on every prefix ending at an end
 * year. Reusing the path across end years mirrors a single growing record.
 */
[[nodiscard]] inline std::vector<LearningRow> learning_experiment(const TrendFit& fit, const ArfimaModel& noise,
                                                                  const Scenario& scenario,
                                                                  std::vector<int> end_years, int b,
                                                                  std::uint64_t seed, double lower_pct = 2.5,
                                                                  double upper_pct = 97.5,
                                                                  const BootstrapOptions& opt = {}) {
    if (end_years.empty()) throw std::invalid_argument("learning_experiment: no end years");
    if (b <= 0) throw std::invalid_argument("learning_experiment: b must be positive");
    validate(noise);
    std::sort(end_years.begin(), end_years.end());
    end_years.erase(std::unique(end_years.begin(), end_years.end()), end_years.end());
    const int first = fit.fitted.start_year();
    const int last = end_years.back();
    if (end_years.front() < first + 9) throw DataError("learning_experiment: end years must leave at least 10 years");
    if (!scenario.forcing.covers(last)) {
        throw DataError("scenario forcing ends in " + std::to_string(scenario.forcing.end_year()) +
                        ", before end year " + std::to_string(last));
    }
    const auto mean = project(fit.params, scenario, first, last, fit.f2x);
    const auto n = static_cast<std::size_t>(last - first + 1);
    const std::size_t k = end_years.size();

    struct Cell {
        std::optional<double> lambda_a;
        bool capped = false;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(b) * k);
    parallel_for(static_cast<std::size_t>(b), opt.threads, [&](std::size_t r) {
        std::vector<double> e;
        try {
            e = simulate(noise, n, derive_seed(seed, r), opt.burn_in);
        } catch (const std::exception&) {
            return;
        }
        for (std::size_t j = 0; j < k; ++j) {
            const auto len = static_cast<std::size_t>(end_years[j] - first + 1);
            std::vector<double> y(len);
            for (std::size_t t = 0; t < len; ++t) y[t] = mean[t] + e[t];
            try {
                auto refit = fit_trend(AnnualSeries(first, std::move(y), Unit::celsius_anomaly), scenario.forcing,
                                       fit.f2x, opt.grid);
                auto& c = cells[r * k + j];
                c.lambda_a = refit.params.lambda_a;
                c.capped = refit.rho_a_at_cap || refit.rho_n_at_cap;
            } catch (const std::exception&) {
            }
        }
    });

    const int origin = scenario.forcing.start_year();
    const double base = project(fit.params, scenario, origin, origin + 1, fit.f2x)[0];
    std::vector<LearningRow> rows;
    for (std::size_t j = 0; j < k; ++j) {
        LearningRow row;
        row.end_year = end_years[j];
        row.warming = mean[static_cast<std::size_t>(end_years[j] - first)] - base;
        for (std::size_t r = 0; r < static_cast<std::size_t>(b); ++r) {
            const auto& c = cells[r * k + j];
            if (c.lambda_a) {
                row.lambda_a_star.push_back(*c.lambda_a);
                row.at_cap += c.capped;
            } else {
                ++row.failures;
            }
        }
        row.successes = static_cast<int>(row.lambda_a_star.size());
        if (static_cast<double>(row.successes) < 0.95 * b) {
            throw NumericalError("learning_experiment: " + std::to_string(row.failures) + " of " + std::to_string(b) +
                                 " refits failed at end year " + std::to_string(row.end_year));
        }
        row.lambda_a = percentile_interval(row.lambda_a_star, lower_pct, upper_pct);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ftrend
