#pragma once

#include "ftrend/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace ftrend {

/// x_t - sum phi_k x_{t-k} = (1 - B)^{-d} (e_t + sum theta_k e_{t-k}), e_t ~ N(0, sigma^2).
struct ArfimaModel {
    std::vector<double> ar;
    std::vector<double> ma;
    double d = 0.0;
    double sigma = 1.0;

    [[nodiscard]] int p() const noexcept { return static_cast<int>(ar.size()); }
    [[nodiscard]] int q() const noexcept { return static_cast<int>(ma.size()); }
};

/**
 * Reflection coefficients of 1 - sum c_k z^k via the step-down recursion.
 * All roots lie outside the unit circle iff every |r_k| < 1.
 */
[[nodiscard]] inline std::vector<double> step_down(std::span<const double> c) {
    std::vector<double> a(c.begin(), c.end()), r(c.size());
    for (std::size_t k = a.size(); k-- > 0;) {
        const double rk = a[k];
        r[k] = rk;
        if (std::abs(rk) >= 1.0) break;  // caller only needs to see a non-stationary coefficient
        const double den = 1.0 - rk * rk;
        std::vector<double> prev(k);
        for (std::size_t j = 0; j < k; ++j) prev[j] = (a[j] + rk * a[k - 1 - j]) / den;
        a = std::move(prev);
    }
    return r;
}

/// Coefficients c of 1 - sum c_k z^k from reflection coefficients (Durbin-Levinson step-up).
[[nodiscard]] inline std::vector<double> step_up(std::span<const double> r) {
    std::vector<double> a;
    for (std::size_t k = 0; k < r.size(); ++k) {
        std::vector<double> next(k + 1);
        for (std::size_t j = 0; j < k; ++j) next[j] = a[j] - r[k] * a[k - 1 - j];
        next[k] = r[k];
        a = std::move(next);
    }
    return a;
}

[[nodiscard]] inline bool roots_outside_unit_circle(std::span<const double> c) {
    for (double v : c) {
        if (!std::isfinite(v)) return false;
    }
    for (double r : step_down(c)) {
        if (!(std::abs(r) < 1.0)) return false;
    }
    return true;
}

[[nodiscard]] inline std::vector<double> negated(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    for (auto& x : out) x = -x;
    return out;
}

[[nodiscard]] inline bool is_stationary(const ArfimaModel& m) { return roots_outside_unit_circle(m.ar); }
[[nodiscard]] inline bool is_invertible(const ArfimaModel& m) { return roots_outside_unit_circle(negated(m.ma)); }

inline void validate(const ArfimaModel& m) {
    if (!(m.sigma > 0.0) || !std::isfinite(m.sigma)) throw ModelError("ARFIMA model: sigma must be positive");
    if (!(m.d >= 0.0 && m.d < 0.5)) throw ModelError("ARFIMA model: d must lie in [0, 0.5)");
    if (!is_stationary(m)) throw ModelError("ARFIMA model: AR polynomial is not stationary");
    if (!is_invertible(m)) throw ModelError("ARFIMA model: MA polynomial is not invertible");
}

inline void validate_arma(const ArfimaModel& m) {
    validate(m);
    if (m.d != 0.0) throw ModelError("ARMA operation requires d = 0");
}

inline void to_json(nlohmann::json& j, const ArfimaModel& m) {
    j = {{"ar", m.ar}, {"ma", m.ma}, {"d", m.d}, {"sigma", m.sigma}};
}

inline void from_json(const nlohmann::json& j, ArfimaModel& m) {
    static const char* keys[] = {"ar", "ma", "d", "sigma"};
    for (auto& [k, v] : j.items()) {
        bool known = false;
        for (auto* name : keys) known = known || k == name;
        if (!known) throw ModelError("model file: unknown key '" + k + "'");
    }
    m.ar = j.value("ar", std::vector<double>{});
    m.ma = j.value("ma", std::vector<double>{});
    m.d = j.value("d", 0.0);
    m.sigma = j.at("sigma").get<double>();
}

}  // namespace ftrend
