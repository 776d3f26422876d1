#include "fixtures.hpp"

#include "ftrend/bootstrap.hpp"
#include "ftrend/learning.hpp"
#include "ftrend/stats.hpp"
#include "ftrend/trend_tests.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace ftrend;

namespace {

std::vector<double> line(std::size_t n, double a, double b) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = a + b * static_cast<double>(t);
    return x;
}

double rejection_rate(const std::vector<double>& p, double alpha) {
    return static_cast<double>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= alpha; })) /
           static_cast<double>(p.size());
}

}  // namespace

TEST(Quantile, TypeSevenByHand) {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    auto iv = percentile_interval(v, 5.0, 95.0);
    EXPECT_NEAR(iv.lower, 5.95, 1e-12);
    EXPECT_NEAR(iv.upper, 95.05, 1e-12);
    auto c = percentile_interval(std::vector<double>(17, 2.5), 2.5, 97.5);
    EXPECT_EQ(c.lower, 2.5);
    EXPECT_EQ(c.upper, 2.5);
    EXPECT_THROW((void)percentile_interval(v, 0.0, 95.0), std::invalid_argument);
    EXPECT_THROW((void)percentile_interval(v, 60.0, 40.0), std::invalid_argument);
}

TEST(Stats, KendallAndKs) {
    std::vector<double> a = {1, 2, 3, 4, 5}, b = {2, 4, 6, 8, 10}, c = {5, 4, 3, 2, 1};
    EXPECT_NEAR(kendall_tau_b(a, b), 1.0, 1e-15);
    EXPECT_NEAR(kendall_tau_b(a, c), -1.0, 1e-15);
    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
    auto ks = ks_uniform(grid);
    EXPECT_NEAR(ks.statistic, 0.0005, 1e-12);
    EXPECT_GT(ks.p_value, 0.99);
    EXPECT_LT(ks_uniform(std::vector<double>(100, 0.01)).p_value, 1e-10);
}

TEST(ParametricBootstrap, ZeroReplicatesFlagged) {
    const auto& fit = fixtures::historical_fit();
    auto s = parametric_bootstrap(fit, fixtures::arma41(), fixtures::forcing(), 0, 1, {4, 1});
    EXPECT_TRUE(s.replicates.empty());
    EXPECT_EQ(s.flag, "no replicates");
    EXPECT_THROW((void)percentile_interval(s, "lambda_a", 5, 95), NumericalError);
}

TEST(ParametricBootstrap, VanishingNoiseRecoversPointEstimate) {
    const auto& fit = fixtures::historical_fit();
    ArfimaModel tiny{{0.5}, {}, 0.0, 1e-8};
    auto s = parametric_bootstrap(fit, tiny, fixtures::forcing(), 20, 9, {1, 0});
    ASSERT_TRUE(s.usable());
    for (double v : s.column("lambda_a")) EXPECT_NEAR(v, fit.params.lambda_a, 1e-3);
}

TEST(ParametricBootstrap, IndependentOfThreadCount) {
    const auto& fit = fixtures::historical_fit();
    BootstrapOptions one, four;
    four.threads = 4;
    auto a = parametric_bootstrap(fit, fixtures::arma41(), fixtures::forcing(), 24, 77, {4, 1}, one);
    auto b = parametric_bootstrap(fit, fixtures::arma41(), fixtures::forcing(), 24, 77, {4, 1}, four);
    ASSERT_EQ(a.replicates.size(), b.replicates.size());
    for (std::size_t i = 0; i < a.replicates.size(); ++i) EXPECT_EQ(a.replicates[i], b.replicates[i]);
    std::ostringstream ca, cb;
    write_csv(a, ca);
    write_csv(b, cb);
    EXPECT_EQ(ca.str(), cb.str());
}

TEST(TrendTest, OverwhelmingSignal) {
    auto x = line(40, 1.0, 0.5);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] += 1e-3 * std::sin(1.7 * static_cast<double>(t * t));
    for (auto spec : {NoiseSpec::independent, NoiseSpec::ar1, NoiseSpec::aicc_selected}) {
        EXPECT_LT(ttest_trend(x, spec, 2, 1).p_value, 1e-6);
    }
}

TEST(TrendTest, IidCalibratedUnderIndependence) {
    std::vector<double> p;
    for (std::uint64_t s = 0; s < 2000; ++s) p.push_back(ttest_trend(simulate({{}, {}, 0.0, 1.0}, 1000, s), NoiseSpec::independent).p_value);
    EXPECT_GT(ks_uniform(p).p_value, 0.01);
}

TEST(TrendTest, IndependenceAnticonservativeUnderArOne) {
    std::vector<double> p;
    for (std::uint64_t s = 0; s < 2000; ++s) p.push_back(ttest_trend(simulate({{0.5}, {}, 0.0, 1.0}, 20, s), NoiseSpec::independent).p_value);
    EXPECT_GT(rejection_rate(p, 0.05), 0.10);
}

TEST(TrendTest, RemlBetterCalibratedThanMlAtTwenty) {
    std::vector<double> ml, reml;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        auto x = simulate({{0.5}, {}, 0.0, 1.0}, 20, derive_seed(31, s));
        ml.push_back(ttest_trend(x, NoiseSpec::ar1, 5, 2, VarianceCriterion::ml).p_value);
        reml.push_back(ttest_trend(x, NoiseSpec::ar1, 5, 2, VarianceCriterion::reml).p_value);
    }
    EXPECT_LT(ks_uniform(reml).statistic, ks_uniform(ml).statistic);
}

TEST(RegressionArma, WhiteNoiseReducesToOls) {
    auto x = simulate({{}, {}, 0.0, 1.0}, 60, 4);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] += 0.02 * static_cast<double>(t);
    auto design = detail::line_design(x.size());
    Eigen::Map<const Eigen::VectorXd> y(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
    const double rss = (y - design * coef).squaredNorm();
    auto ml = fit_regression_arma(x, design, 0, 0, VarianceCriterion::ml);
    auto re = fit_regression_arma(x, design, 0, 0, VarianceCriterion::reml);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(ml.coef(i), coef(i), 1e-10);
        EXPECT_NEAR(re.coef(i), coef(i), 1e-10);
    }
    EXPECT_NEAR(ml.model.sigma * ml.model.sigma, rss / 60.0, 1e-10);
    EXPECT_NEAR(re.model.sigma * re.model.sigma, rss / 58.0, 1e-10);
}

TEST(RegressionArma, SlopeCoverage) {
    int covered = 0;
    auto design = detail::line_design(5000);
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto x = simulate({{0.5}, {}, 0.0, 1.0}, 5000, derive_seed(8, s));
        for (std::size_t t = 0; t < x.size(); ++t) x[t] += 1.0 + 0.001 * (static_cast<double>(t) - 2499.5);
        auto fit = fit_regression_arma(x, design, 1, 0);
        covered += std::abs(fit.coef(1) - 0.001) <= 3.0 * std::sqrt(fit.coef_cov(1, 1));
    }
    EXPECT_GE(covered, 198);
}

TEST(RegressionArma, RankDeficientDesign) {
    Eigen::MatrixXd d(20, 2);
    d.col(0).setOnes();
    d.col(1).setOnes();
    std::vector<double> x(20, 0.5);
    EXPECT_THROW((void)fit_regression_arma(x, d, 1, 0), NumericalError);
}

TEST(BootstrapP, RankArithmetic) {
    std::vector<double> star(199);
    for (std::size_t i = 0; i < star.size(); ++i) star[i] = (static_cast<double>(i) - 99.0) * 1e-3;
    EXPECT_DOUBLE_EQ(bootstrap_p(1.0, star), 1.0 / 200.0);
    EXPECT_DOUBLE_EQ(bootstrap_p(0.0, star), 1.0);
}

TEST(ParametricBootstrapP, CalibratedAtFifty) {
    std::vector<double> p;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        auto x = simulate({{0.5}, {}, 0.0, 1.0}, 50, derive_seed(50, s));
        p.push_back(parametric_bootstrap_pvalue(x, {1, 0}, 199, derive_seed(51, s)).p_value);
    }
    EXPECT_NEAR(rejection_rate(p, 0.05), 0.05, 0.02);
}

TEST(BlockBootstrap, FullLengthBlocksAreRotations) {
    std::vector<double> e = {1, 2, 3, 4, 5, 6, 7};
    auto gen = make_stream(3);
    for (int r = 0; r < 20; ++r) {
        auto s = circular_block_resample(e, 7, gen);
        const auto k = static_cast<std::size_t>(s[0] - 1.0);
        for (std::size_t t = 0; t < e.size(); ++t) ASSERT_EQ(s[t], e[(k + t) % e.size()]);
    }
    auto x = simulate({{0.5}, {}, 0.0, 1.0}, 30, 5);
    auto a = circular_block_bootstrap_pvalue(x, {30}, 99, 12), b = circular_block_bootstrap_pvalue(x, {30}, 99, 12);
    EXPECT_EQ(a.p_values, b.p_values);
    EXPECT_GT(a.p_values[0], 0.0);
    EXPECT_LE(a.p_values[0], 1.0);
}

TEST(BlockBootstrap, UnitBlocksCalibratedOnIid) {
    std::vector<double> p;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        auto x = simulate({{}, {}, 0.0, 1.0}, 1000, derive_seed(70, s));
        p.push_back(circular_block_bootstrap_pvalue(x, {1}, 199, derive_seed(71, s)).p_values[0]);
    }
    EXPECT_NEAR(rejection_rate(p, 0.05), 0.05, 0.02);
}

TEST(BlockBootstrap, RejectsBadLengths) {
    std::vector<double> x(10, 0.0);
    EXPECT_THROW((void)circular_block_bootstrap_pvalue(x, {11}, 10, 1), std::invalid_argument);
    EXPECT_THROW((void)circular_block_bootstrap_pvalue(x, {0}, 10, 1), std::invalid_argument);
}

TEST(Learning, LastHistoricalYearMatchesBootstrap) {
    const auto& fit = fixtures::historical_fit();
    auto rows = learning_experiment(fit, fixtures::arma41(), fixtures::scenario(), {2015, 2100}, 60, 5);
    ASSERT_EQ(rows.size(), 2u);
    auto boot = parametric_bootstrap(fit, fixtures::arma41(), fixtures::forcing(), 60, 6, {4, 1});
    auto iv = percentile_interval(boot, "lambda_a", 2.5, 97.5);
    EXPECT_LE(rows[0].lambda_a.lower, iv.upper);
    EXPECT_LE(iv.lower, rows[0].lambda_a.upper);
    EXPECT_LT(rows[1].lambda_a.upper, rows[0].lambda_a.upper);
    EXPECT_GT(rows[1].warming, rows[0].warming);
}

TEST(Learning, InputChecks) {
    const auto& fit = fixtures::historical_fit();
    EXPECT_THROW((void)learning_experiment(fit, fixtures::arma41(), fixtures::scenario(), {}, 10, 1),
                 std::invalid_argument);
    EXPECT_THROW((void)learning_experiment(fit, fixtures::arma41(), fixtures::scenario(), {3000}, 10, 1), DataError);
}
