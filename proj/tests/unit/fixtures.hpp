#pragma once

#include "ftrend/arma_fit.hpp"
#include "ftrend/io.hpp"
#include "ftrend/trend.hpp"

#include <string>

namespace fixtures {

inline std::string data(const std::string& name) { return std::string(FTREND_DATA) + "/" + name; }

inline const ftrend::AnnualSeries& temperatures() {
    static const auto t = ftrend::parse_temperature_csv(data("gistemp_loti_annual.csv"),
                                                        ftrend::TemperatureFormat::giss_annual);
    return t;
}

inline const ftrend::ForcingTable& forcing() {
    static const auto f = ftrend::parse_forcing_table(data("forcing_ar5_annex2.csv"),
                                                      ftrend::load_column_map(data("forcing_ar5_annex2.json")));
    return f;
}

inline const ftrend::ForcingTable& rcp85() {
    static const auto f = ftrend::parse_forcing_table(data("rcp85_forcing.csv"),
                                                      ftrend::load_column_map(data("rcp85_forcing.json")));
    return f;
}

inline const ftrend::Scenario& scenario() {
    static const auto s = ftrend::build_scenario(forcing(), rcp85(), 2015, "rcp85");
    return s;
}

inline const ftrend::TrendFit& historical_fit() {
    static const auto fit = ftrend::fit_trend(temperatures(), forcing());
    return fit;
}

inline const ftrend::ArfimaModel& arma41() {
    static const auto m = ftrend::fit_arma_mle(historical_fit().residuals.values(), 4, 1).model;
    return m;
}

}  // namespace fixtures
