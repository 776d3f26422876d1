#pragma once

#include "ftrend/trend_tests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ftrend {

/// Trendless noise models used to check p-value calibration (unit innovation variance).
[[nodiscard]] inline const std::map<std::string, ArfimaModel>& calibration_models() {
    static const std::map<std::string, ArfimaModel> models = {
        {"ar1", {{0.5}, {}, 0.0, 1.0}},
        {"arma11", {{0.5}, {0.25}, 0.0, 1.0}},
        {"farima", {{0.5}, {}, 0.25, 1.0}},
        {"ar2", {{0.5, -0.25}, {}, 0.0, 1.0}},
        {"arma41", {{-0.29, 0.36, 0.05, 0.24}, {0.80}, 0.0, 1.0}},
    };
    return models;
}

[[nodiscard]] inline const ArfimaModel& calibration_model(const std::string& name) {
    const auto& m = calibration_models();
    auto it = m.find(name);
    if (it == m.end()) throw std::invalid_argument("unknown calibration model '" + name + "'");
    return it->second;
}

inline const std::vector<std::string>& calibration_methods() {
    static const std::vector<std::string> methods = {"ols_t", "ar1_t", "ar1_t_reml", "ar1_parboot", "aicc_t",
                                                     "block_boot"};
    return methods;
}

/// One p-value sample. Block-bootstrap samples carry their block length; the
/// entry named "block_boot" is the length closest to uniform in KS distance.
struct PValueSample {
    std::string model;
    int n{};
    std::string method;
    std::optional<int> block_length;
    std::vector<double> p_values;  // successful replicates, in replicate order
    int failures{};
};

struct CalibrationOptions {
    std::vector<std::string> methods = {"ols_t", "ar1_t", "ar1_parboot", "aicc_t", "block_boot"};
    int inner_b = 199;
    std::vector<int> block_lengths = {2, 3, 4, 5, 8, 12, 16};
    int p_max = 5;
    int q_max = 2;
    unsigned threads = 1;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace detail

/// Seed of the (model, n) cell; independent of which other cells are run.
[[nodiscard]] inline std::uint64_t calibration_cell_seed(std::uint64_t seed, const std::string& model, int n) {
    return derive_seed(derive_seed(seed, detail::fnv1a(model)), static_cast<std::uint64_t>(n));
}

/**
 * @brief Nominal p-values for a zero trend under one true noise model.
 *
 * Replicate r simulates a trendless series from stream (cell seed, r) and
 * every requested method is applied to that same series. A method that throws
 * on a replicate counts as a failure for that method only.
 */
[[nodiscard]] inline std::vector<PValueSample> calibration_cell(const std::string& model_name, int n, int r_outer,
                                                                std::uint64_t seed,
                                                                const CalibrationOptions& opt = {}) {
    const auto& model = calibration_model(model_name);
    if (n < 8) throw std::invalid_argument("calibration needs n >= 8");
    if (r_outer < 1) throw std::invalid_argument("calibration needs at least one replicate");
    for (const auto& m : opt.methods) {
        if (std::find(calibration_methods().begin(), calibration_methods().end(), m) == calibration_methods().end()) {
            throw std::invalid_argument("unknown calibration method '" + m + "'");
        }
    }
    std::vector<int> lengths;
    for (int l : opt.block_lengths) {
        if (l >= 1 && l <= n) lengths.push_back(l);
    }
    const bool block = std::find(opt.methods.begin(), opt.methods.end(), "block_boot") != opt.methods.end();
    if (block && lengths.empty()) throw std::invalid_argument("no block length fits n = " + std::to_string(n));

    std::vector<std::string> plain;
    for (const auto& m : opt.methods) {
        if (m != "block_boot") plain.push_back(m);
    }
    const std::size_t cols = plain.size() + (block ? lengths.size() : 0);
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> table(static_cast<std::size_t>(r_outer) * cols, nan);
    const std::uint64_t cell = calibration_cell_seed(seed, model_name, n);

    parallel_for(static_cast<std::size_t>(r_outer), opt.threads, [&](std::size_t r) {
        const std::uint64_t s = derive_seed(cell, r);
        std::vector<double> x;
        try {
            x = simulate(model, static_cast<std::size_t>(n), s);
        } catch (const std::exception&) {
            return;
        }
        double* row = table.data() + r * cols;
        for (std::size_t j = 0; j < plain.size(); ++j) {
            const auto& m = plain[j];
            try {
                if (m == "ols_t") {
                    row[j] = ttest_trend(x, NoiseSpec::independent).p_value;
                } else if (m == "ar1_t") {
                    row[j] = ttest_trend(x, NoiseSpec::ar1).p_value;
                } else if (m == "ar1_t_reml") {
                    row[j] = ttest_trend(x, NoiseSpec::ar1, opt.p_max, opt.q_max, VarianceCriterion::reml).p_value;
                } else if (m == "aicc_t") {
                    row[j] = ttest_trend(x, NoiseSpec::aicc_selected, opt.p_max, opt.q_max).p_value;
                } else if (m == "ar1_parboot") {
                    row[j] = parametric_bootstrap_pvalue(x, {1, 0}, opt.inner_b, derive_seed(s, 1)).p_value;
                }
            } catch (const std::exception&) {
            }
        }
        if (block) {
            try {
                auto bb = circular_block_bootstrap_pvalue(x, lengths, opt.inner_b, derive_seed(s, 2));
                for (std::size_t i = 0; i < lengths.size(); ++i) row[plain.size() + i] = bb.p_values[i];
            } catch (const std::exception&) {
            }
        }
    });

    auto column = [&](std::size_t j, PValueSample& out) {
        for (std::size_t r = 0; r < static_cast<std::size_t>(r_outer); ++r) {
            const double v = table[r * cols + j];
            if (std::isfinite(v)) {
                out.p_values.push_back(v);
            } else {
                ++out.failures;
            }
        }
    };
    std::vector<PValueSample> out;
    for (const auto& m : opt.methods) {
        if (m == "block_boot") {
            std::vector<PValueSample> per;
            for (std::size_t i = 0; i < lengths.size(); ++i) {
                PValueSample ps{model_name, n, "block_boot_l" + std::to_string(lengths[i]), lengths[i], {}, 0};
                column(plain.size() + i, ps);
                per.push_back(std::move(ps));
            }
            std::vector<std::vector<double>> samples;
            for (const auto& ps : per) samples.push_back(ps.p_values.empty() ? std::vector<double>{0.0} : ps.p_values);
            PValueSample best = per[most_favorable(samples)];
            best.method = "block_boot";
            out.push_back(std::move(best));
            for (auto& ps : per) out.push_back(std::move(ps));
        } else {
            const auto j = static_cast<std::size_t>(std::find(plain.begin(), plain.end(), m) - plain.begin());
            PValueSample ps{model_name, n, m, std::nullopt, {}, 0};
            column(j, ps);
            out.push_back(std::move(ps));
        }
    }
    return out;
}

struct TypeIRow {
    std::string model;
    int n{};
    std::string method;
    std::optional<int> block_length;
    int successes{};
    int failures{};
    std::vector<double> alphas;
    std::vector<double> rates;  // fraction of p-values <= alpha
    double ks_statistic{};
    double ks_p_value{};
};

[[nodiscard]] inline TypeIRow type_one_errors(const PValueSample& s, const std::vector<double>& alphas) {
    TypeIRow row{s.model, s.n, s.method, s.block_length, static_cast<int>(s.p_values.size()), s.failures, alphas, {}};
    for (double a : alphas) {
        std::size_t hits = 0;
        for (double p : s.p_values) hits += p <= a;
        row.rates.push_back(s.p_values.empty() ? std::numeric_limits<double>::quiet_NaN()
                                               : static_cast<double>(hits) / static_cast<double>(s.p_values.size()));
    }
    if (!s.p_values.empty()) {
        auto ks = ks_uniform(s.p_values);
        row.ks_statistic = ks.statistic;
        row.ks_p_value = ks.p_value;
    } else {
        row.ks_statistic = row.ks_p_value = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

struct QQPoint {
    double uniform{};  // i / (m + 1)
    double p_value{};
};

/// Sorted p-values against uniform plotting positions.
[[nodiscard]] inline std::vector<QQPoint> qq_uniform(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    std::vector<QQPoint> out;
    out.reserve(p.size());
    const double m = static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back({static_cast<double>(i + 1) / (m + 1.0), p[i]});
    return out;
}

}  // namespace ftrend
