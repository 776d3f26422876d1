#pragma once

#include "ftrend/series.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftrend {

inline void check_rho(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw std::invalid_argument("rho must lie in [0, 1), got " + std::to_string(rho));
    }
}

/// h_t = rho h_{t-1} + (1 - rho) x_t, with h_{-1} = spinup. Exact for a constant pre-sample history.
[[nodiscard]] inline std::vector<double> lag_filter(double rho, std::span<const double> x, double spinup) {
    check_rho(rho);
    std::vector<double> h(x.size());
    const double w = 1.0 - rho;
    double prev = spinup;
    for (std::size_t t = 0; t < x.size(); ++t) {
        prev = rho * prev + w * x[t];
        h[t] = prev;
    }
    return h;
}

[[nodiscard]] inline AnnualSeries lag_response(double rho, const AnnualSeries& x, double spinup) {
    return {x.start_year(), lag_filter(rho, x.values(), spinup), x.unit(), x.baseline()};
}

/// Response to a unit step switched on at k = 0: lambda (1 - rho^(k+1)).
[[nodiscard]] inline std::vector<double> step_response(double lambda, double rho, int horizon) {
    check_rho(rho);
    if (horizon < 1) throw std::invalid_argument("step_response: horizon must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(horizon));
    double pk = rho;
    for (auto& v : out) {
        v = lambda * (1.0 - pk);
        pk *= rho;
    }
    return out;
}

}  // namespace ftrend
