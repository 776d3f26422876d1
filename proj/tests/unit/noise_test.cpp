#include "fixtures.hpp"

#include "ftrend/arma_fit.hpp"
#include "ftrend/innovations.hpp"
#include "ftrend/simulate.hpp"
#include "ftrend/spectrum.hpp"
#include "ftrend/stats.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

using namespace ftrend;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<ArfimaModel> arma_battery() {
    return {
        {{}, {}, 0.0, 1.0},
        {{0.5}, {}, 0.0, 1.0},
        {{0.5}, {0.25}, 0.0, 0.7},
        {{0.5, -0.25}, {}, 0.0, 1.3},
        {{}, {0.4, -0.3}, 0.0, 1.0},
        {{-0.29, 0.36, 0.05, 0.24}, {0.80}, 0.0, 0.09},
        {{0.9}, {-0.5}, 0.0, 1.0},
    };
}

double dense_loglik(const ArfimaModel& m, const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    auto g = arma_autocovariance(m, n);
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) cov(i, j) = g[static_cast<std::size_t>(std::abs(i - j))];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
    Eigen::VectorXd z = llt.matrixL().solve(v);
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return -0.5 * n * std::log(2.0 * pi) - 0.5 * logdet - 0.5 * z.squaredNorm();
}

double lowest_grid_power(const ArfimaModel& m) {
    const auto grid = kl_grid();
    return arfima_spectral_density(m, std::span<const double>(grid.data(), 1)).power[0];
}

}  // namespace

TEST(Autocovariance, ClosedForms) {
    auto w = arma_autocovariance({{}, {}, 0.0, 1.0}, 5);
    EXPECT_NEAR(w[0], 1.0, 1e-15);
    for (int k = 1; k <= 5; ++k) EXPECT_NEAR(w[static_cast<std::size_t>(k)], 0.0, 1e-15);
    auto a = arma_autocovariance({{0.5}, {}, 0.0, 1.0}, 10);
    for (int k = 0; k <= 10; ++k) EXPECT_NEAR(a[static_cast<std::size_t>(k)], 4.0 / 3.0 * std::pow(0.5, k), 1e-12);
}

TEST(Autocovariance, SpectralDuality) {
    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    for (const auto& m : arma_battery()) {
        auto g = arma_autocovariance(m, 6);
        for (int k = 0; k <= 6; ++k) {
            auto f = [&](double w) {
                const double om[] = {std::max(w, 1e-300)};
                return 2.0 * arma_spectral_density(m, om).power[0] * std::cos(k * w);
            };
            const double v = gk.integrate(f, 0.0, pi, 15, 1e-12);
            EXPECT_NEAR(v, g[static_cast<std::size_t>(k)], 1e-6) << "lag " << k;
        }
    }
}

TEST(PsiWeights, ArOneIsGeometric) {
    auto psi = psi_weights({{0.6}, {}, 0.0, 1.0}, 8);
    for (std::size_t j = 0; j < psi.size(); ++j) EXPECT_NEAR(psi[j], std::pow(0.6, static_cast<double>(j)), 1e-14);
}

TEST(Model, StepDownUpRoundTrip) {
    std::vector<double> phi = {-0.29, 0.36, 0.05, 0.24};
    auto r = step_down(phi);
    for (double v : r) EXPECT_LT(std::abs(v), 1.0);
    auto back = step_up(r);
    for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR(back[i], phi[i], 1e-12);
    EXPECT_FALSE(is_stationary({{1.1}, {}, 0.0, 1.0}));
    EXPECT_FALSE(is_invertible({{}, {1.2}, 0.0, 1.0}));
    EXPECT_THROW(validate(ArfimaModel{{0.5}, {}, 0.0, -1.0}), ModelError);
}

TEST(Spectrum, ClosedForms) {
    const double om[] = {1e-9, 0.7, pi};
    for (double v : arma_spectral_density({{}, {}, 0.0, 1.0}, om).power) EXPECT_NEAR(v, 1.0 / (2.0 * pi), 1e-15);
    EXPECT_NEAR(arma_spectral_density({{0.5}, {}, 0.0, 1.0}, om).power[0], 2.0 / pi, 1e-9);
    EXPECT_NEAR(arma_spectral_density({{0.5}, {0.25}, 0.0, 1.0}, om).power[2], 0.5625 / 2.25 / (2.0 * pi), 1e-14);
}

TEST(Spectrum, FractionalClosedForms) {
    const double om[] = {0.3, 1.1, pi};
    ArfimaModel arma{{0.5}, {0.25}, 0.0, 1.0};
    auto a = arma_spectral_density(arma, om), b = arfima_spectral_density(arma, om);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(a.power[i], b.power[i]);
    ArfimaModel fn{{}, {}, 0.25, 1.0};
    EXPECT_NEAR(arfima_spectral_density(fn, om).power[2], std::pow(2.0, -0.5) / (2.0 * pi), 1e-14);
    const double small[] = {1e-4, 2e-4};
    auto s = arfima_spectral_density(fn, small).power;
    EXPECT_NEAR(s[0] / s[1], std::pow(2.0, 0.5), 1e-6);
    const double zero[] = {0.0};
    EXPECT_THROW((void)arfima_spectral_density(fn, zero), std::domain_error);
}

TEST(Loglik, MatchesDenseCovariance) {
    for (const auto& m : arma_battery()) {
        for (std::size_t n : {3u, 7u, 20u, 50u}) {
            if (n < m.ar.size() + m.ma.size() + 1) continue;
            auto x = simulate(m, n, 1000 + n);
            EXPECT_NEAR(loglik_exact(m, x), dense_loglik(m, x), 1e-8) << "n " << n;
        }
    }
}

TEST(Loglik, ArOneLengthThreeTo1e10) {
    ArfimaModel m{{0.5}, {}, 0.0, 1.0};
    std::vector<double> x = {0.3, -1.2, 0.8};
    EXPECT_NEAR(loglik_exact(m, x), dense_loglik(m, x), 1e-10);
}

TEST(Loglik, WhiteNoiseAtMean) {
    std::vector<double> x(10, 0.0);
    EXPECT_NEAR(loglik_exact({{}, {}, 0.0, 1.0}, x), -5.0 * std::log(2.0 * pi), 1e-12);
}

TEST(Loglik, ScaleChangeOfVariables) {
    ArfimaModel m{{0.5}, {0.25}, 0.0, 0.8};
    auto x = simulate(m, 40, 7);
    const double c = 3.0;
    ArfimaModel mc = m;
    mc.sigma *= c;
    std::vector<double> xc = x;
    for (auto& v : xc) v *= c;
    EXPECT_NEAR(loglik_exact(mc, xc), loglik_exact(m, x) - 40.0 * std::log(c), 1e-9);
}

TEST(Simulate, SigmaScalesExactly) {
    ArfimaModel a{{0.5}, {0.3}, 0.2, 1.0}, b = a;
    b.sigma = 2.0;
    auto x = simulate(a, 300, 42), y = simulate(b, 300, 42);
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(y[i], 2.0 * x[i]);
}

TEST(Simulate, ArOneAutocorrelation) {
    auto x = simulate({{0.5}, {}, 0.0, 1.0}, 100000, 3);
    EXPECT_NEAR(autocorrelation(x, 1), 0.5, 0.01);
}

TEST(Simulate, FractionalLogPeriodogramSlope) {
    const std::size_t n = 65536;
    auto x = simulate({{0.5}, {}, 0.25, 1.0}, n, 11);
    auto pg = periodogram(x);
    const std::size_t m = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < m; ++j) {
        lx.push_back(std::log(2.0 * std::sin(pg.fourier_frequencies[j] / 2.0)));
        ly.push_back(std::log(pg.ordinates[j]));
    }
    const double mx = mean(lx), my = mean(ly);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        sxy += (lx[j] - mx) * (ly[j] - my);
        sxx += (lx[j] - mx) * (lx[j] - mx);
    }
    EXPECT_NEAR(sxy / sxx, -0.5, 0.1);
}

TEST(Periodogram, CosineConcentratesAtItsFrequency) {
    const std::size_t n = 128, j = 9;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = std::cos(2.0 * pi * j * t / n);
    auto pg = periodogram(x);
    const double top = pg.ordinates[j - 1];
    for (std::size_t i = 0; i < pg.ordinates.size(); ++i) {
        if (i != j - 1) EXPECT_LT(pg.ordinates[i], 1e-10 * top);
    }
}

TEST(Periodogram, ConstantSeriesIsZero) {
    for (double v : periodogram(std::vector<double>(64, 2.5)).ordinates) EXPECT_NEAR(v, 0.0, 1e-20);
}

TEST(Periodogram, Parseval) {
    for (std::size_t n : {4096u, 1001u}) {
        auto x = simulate({{0.3}, {}, 0.0, 1.0}, n, 5);
        auto pg = periodogram(x);
        EXPECT_NEAR(pg.weighted_mean(), variance(x), 1e-8);
    }
}

TEST(Periodogram, WhiteNoiseOrdinatesAreExponential) {
    auto x = simulate({{}, {}, 0.0, 1.0}, 4096, 17);
    auto pg = periodogram(x);
    std::vector<double> ord(pg.ordinates.begin(), pg.ordinates.end() - 1);  // drop the chi-square(1) Nyquist term
    EXPECT_GT(ks_exponential(ord, variance(x)).p_value, 0.01);
}

TEST(Smoothing, WidthOneImpulseAndRamp) {
    Periodogram p{{1, 2, 3, 4, 5}, {0, 0, 1, 0, 0}, 11};
    EXPECT_EQ(smooth_periodogram(p, 1, 3).ordinates, p.ordinates);
    for (double v : smooth_periodogram(p, 5, 1).ordinates) EXPECT_NEAR(v, 0.2, 1e-15);
    Periodogram ramp{{}, {}, 41};
    for (int i = 0; i < 20; ++i) {
        ramp.fourier_frequencies.push_back(i);
        ramp.ordinates.push_back(0.5 + 0.25 * i);
    }
    auto s = smooth_periodogram(ramp, 5, 2).ordinates;
    for (int i = 4; i < 16; ++i) EXPECT_NEAR(s[static_cast<std::size_t>(i)], 0.5 + 0.25 * i, 1e-12);
}

TEST(BestAr1, RecoversArOne) {
    auto a = best_ar1_kl(ArfimaModel{{0.5}, {}, 0.0, 1.0});
    ASSERT_EQ(a.p(), 1);
    EXPECT_NEAR(a.ar[0], 0.5, 1e-4);
    EXPECT_NEAR(a.sigma, 1.0, 1e-4);
}

TEST(BestAr1, LowFrequencyMisrepresentation) {
    ArfimaModel arma11{{0.5}, {0.25}, 0.0, 1.0}, farima{{0.5}, {}, 0.25, 1.0};
    EXPECT_GT(lowest_grid_power(best_ar1_kl(arma11)), lowest_grid_power(arma11));
    EXPECT_LT(lowest_grid_power(best_ar1_kl(farima)), lowest_grid_power(farima));
}

TEST(FitArma, ArOneConsistency) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto x = simulate({{0.5}, {}, 0.0, 1.0}, 5000, seed);
        EXPECT_NEAR(fit_arma_mle(x, 1, 0).model.ar[0], 0.5, 0.03) << seed;
    }
}

TEST(FitArma, HistoricalResidualCoefficients) {
    const auto& m = fixtures::arma41();
    const double phi[] = {-0.29, 0.36, 0.05, 0.24};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(m.ar[static_cast<std::size_t>(i)], phi[i], 0.15);
    EXPECT_NEAR(m.ma[0], 0.80, 0.15);
    EXPECT_NEAR(m.sigma, 0.09, 0.015);
    auto ar1 = fit_arma_mle(fixtures::historical_fit().residuals.values(), 1, 0).model;
    EXPECT_NEAR(ar1.ar[0], 0.52, 0.1);
    EXPECT_NEAR(ar1.sigma, 0.09, 0.015);
}

TEST(InformationCriteria, Definitions) {
    auto z = information_criteria(-12.5, 0, 30);
    EXPECT_EQ(z.aic, 25.0);
    EXPECT_EQ(z.aicc, 25.0);
    EXPECT_EQ(z.bic, 25.0);
    auto c = information_criteria(10.0, 3, 50);
    EXPECT_DOUBLE_EQ(c.aicc, -20.0 + 6.0 + 24.0 / 46.0);
    EXPECT_DOUBLE_EQ(c.bic, -20.0 + 3.0 * std::log(50.0));
    EXPECT_THROW((void)information_criteria(0.0, 5, 6), std::invalid_argument);
}

TEST(SelectOrder, HistoricalResiduals) {
    const auto r = fixtures::historical_fit().residuals.values();
    auto a = select_order(r, 5, 2, OrderCriterion::aicc);
    auto b = select_order(r, 5, 2, OrderCriterion::bic);
    EXPECT_EQ(std::pair(a.p, a.q), std::pair(4, 1));
    EXPECT_EQ(std::pair(b.p, b.q), std::pair(1, 0));
    EXPECT_EQ(a.log.size(), 18u);
    const int n = static_cast<int>(r.size());
    auto ic41 = information_criteria(a.loglik, 6, n), ic10 = information_criteria(b.loglik, 2, n);
    EXPECT_NEAR(ic41.aicc - ic10.aicc, -1.0, 2.0);
    EXPECT_NEAR(ic41.bic - ic10.bic, 10.0, 2.0);
}

TEST(SelectOrder, WhiteNoiseUnderBic) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto x = simulate({{}, {}, 0.0, 1.0}, 2000, 500 + seed);
        auto s = select_order(x, 2, 1, OrderCriterion::bic);
        hits += s.p == 0 && s.q == 0;
    }
    EXPECT_GE(hits, 90);
}

TEST(Innovations, WhiteNoiseIsStandardized) {
    std::vector<double> x = {1.0, 3.0, -2.0, 0.5};
    auto e = sample_innovations({{}, {}, 0.0, 2.0}, x);
    const double m = 0.625;
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(e[i], (x[i] - m) / 2.0, 1e-14);
}

TEST(Innovations, Whiteness) {
    ArfimaModel m{{0.5}, {}, 0.0, 1.0};
    auto x = simulate(m, 4096, 23);
    auto e = sample_innovations(m, x);
    EXPECT_NEAR(variance(e), 1.0, 0.05);
    EXPECT_LT(std::abs(autocorrelation(e, 1)), 2.0 / std::sqrt(4096.0));
}
