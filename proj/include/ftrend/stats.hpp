#pragma once

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace ftrend {

/// Linear-interpolation sample quantile (Hyndman-Fan type 7), 0 <= prob <= 1.
[[nodiscard]] inline double quantile_type7(std::vector<double> v, double prob) {
    if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

[[nodiscard]] inline double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

[[nodiscard]] inline double variance(std::span<const double> v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return v.size() < 2 ? 0.0 : s / static_cast<double>(v.size() - 1);
}

/// Lag-k sample autocorrelation (mean removed, divisor n).
[[nodiscard]] inline double autocorrelation(std::span<const double> v, std::size_t lag) {
    const double m = mean(v);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
        den += (v[t] - m) * (v[t] - m);
        if (t >= lag) num += (v[t] - m) * (v[t - lag] - m);
    }
    return num / den;
}

/// Two-sided p-value of a t statistic.
[[nodiscard]] inline double t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("t test needs positive degrees of freedom");
    if (!std::isfinite(t)) return 0.0;
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

/// Kolmogorov limiting survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
[[nodiscard]] inline double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

struct KsResult {
    double statistic{};
    double p_value{};
};

/// One-sample KS test against Uniform(0, 1); p-value from the asymptotic law with Stephens' correction.
[[nodiscard]] inline KsResult ks_uniform(std::vector<double> u) {
    if (u.empty()) throw std::invalid_argument("KS test of an empty sample");
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = std::clamp(u[i], 0.0, 1.0);
        d = std::max({d, (i + 1.0) / n - x, x - i / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

/// One-sample KS test against Exponential(mean).
[[nodiscard]] inline KsResult ks_exponential(std::span<const double> x, double mean_value) {
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = 1.0 - std::exp(-x[i] / mean_value);
    return ks_uniform(std::move(u));
}

/// Kendall's tau-b (ties in either margin handled); O(n^2).
[[nodiscard]] inline double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("kendall_tau_b: need paired samples");
    double concordant = 0.0, discordant = 0.0, ties_x = 0.0, ties_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) continue;
            if (dx == 0.0) {
                ties_x += 1.0;
            } else if (dy == 0.0) {
                ties_y += 1.0;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                concordant += 1.0;
            } else {
                discordant += 1.0;
            }
        }
    }
    const double den = std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
    return den > 0.0 ? (concordant - discordant) / den : 0.0;
}

}  // namespace ftrend
