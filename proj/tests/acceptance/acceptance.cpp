// Acceptance run: one PASS/FAIL line per criterion on the bundled fixtures.
// Usage: acceptance [--calibration-replicates R] (default 2000)

#include "ftrend/experiments/recipes.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

using namespace ftrend;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t seed = 20160203;
int failures = 0;

std::string data(const std::string& name) { return std::string(FTREND_DATA) + "/" + name; }

class Clock {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(const std::string& id, bool pass, const std::string& detail) {
    failures += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << id << ": " << detail << std::endl;
}

void info(const std::string& id, const std::string& detail) { std::cout << "INFO " << id << ": " << detail << std::endl; }

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

std::string check(const std::string& name, double v, double target, double tol, bool& ok) {
    const bool good = within(v, target, tol);
    ok = ok && good;
    return name + " " + fmt(v) + (good ? "" : " (!)") + " [" + fmt(target, 2) + "+-" + fmt(tol, 2) + "]";
}

std::string runtime(double secs, double limit, bool& ok) {
    ok = ok && secs < limit;
    return "runtime " + fmt(secs, 1) + " s [< " + fmt(limit, 0) + " s]";
}

double rate(const PValueSample& s, double alpha = 0.05) { return type_one_errors(s, {alpha}).rates[0]; }

const PValueSample& pick(const std::vector<PValueSample>& cell, const std::string& method) {
    for (const auto& s : cell) {
        if (s.method == method) return s;
    }
    throw std::runtime_error("missing method " + method);
}

double dense_loglik(const ArfimaModel& m, const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    auto g = arma_autocovariance(m, n);
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) cov(i, j) = g[static_cast<std::size_t>(std::abs(i - j))];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    Eigen::VectorXd z = llt.matrixL().solve(Eigen::Map<const Eigen::VectorXd>(x.data(), n));
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * logdet - 0.5 * z.squaredNorm();
}

std::map<std::string, std::string> csv_files(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".csv") continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        out[e.path().filename().string()] = ss.str();
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    int calibration_r = 2000;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--calibration-replicates") calibration_r = std::stoi(argv[i + 1]);
    }
    const unsigned threads = default_threads();
    std::cout << "acceptance: seed " << seed << ", " << threads << " thread(s), calibration R=" << calibration_r
              << std::endl;

    const auto temps = parse_temperature_csv(data("gistemp_loti_annual.csv"), TemperatureFormat::giss_annual);
    const auto forcing =
        parse_forcing_table(data("forcing_ar5_annex2.csv"), load_column_map(data("forcing_ar5_annex2.json")));
    const auto future = parse_forcing_table(data("rcp85_forcing.csv"), load_column_map(data("rcp85_forcing.json")));
    const auto scenario = build_scenario(forcing, future, 2015, "rcp85");

    // 1. historical fit
    Clock c1;
    const auto fit = fit_trend(temps, forcing);
    const double t1 = c1.seconds();
    {
        bool ok = true;
        const auto& p = fit.params;
        std::string d = check("lambda_a", p.lambda_a, 1.8, 0.15, ok) + ", " + check("rho_a", p.rho_a, 0.80, 0.05, ok) +
                        ", " + check("lambda_n", p.lambda_n, 0.21, 0.15, ok) + ", " +
                        check("rho_n", p.rho_n, 0.58, 0.15, ok) + ", " + runtime(t1, 10, ok);
        report("1 historical fit", ok, d);
        if (fit.global_alternative) {
            const auto& g = *fit.global_alternative;
            info("1 global alternative", "lambda_a " + fmt(g.params.lambda_a) + ", rho_a " + fmt(g.params.rho_a) +
                                             ", lambda_n " + fmt(g.params.lambda_n) + ", rho_n " +
                                             fmt(g.params.rho_n) + ", rss " + fmt(g.rss, 5) + " vs " + fmt(fit.rss, 5));
        }
    }

    // 2. noise selection
    Clock c2;
    const auto resid = fit.residuals.values();
    const auto aicc = select_order(resid, 5, 2, OrderCriterion::aicc);
    const auto bic = select_order(resid, 5, 2, OrderCriterion::bic);
    const auto arma41 = fit_arma_mle(resid, 4, 1);
    const auto ar1 = fit_arma_mle(resid, 1, 0);
    const double t2 = c2.seconds();
    {
        bool ok = aicc.p == 4 && aicc.q == 1 && bic.p == 1 && bic.q == 0;
        const int n = static_cast<int>(resid.size());
        const auto i41 = information_criteria(arma41.loglik, 6, n), i10 = information_criteria(ar1.loglik, 2, n);
        std::string d = "AICc -> (" + std::to_string(aicc.p) + "," + std::to_string(aicc.q) + "), BIC -> (" +
                        std::to_string(bic.p) + "," + std::to_string(bic.q) + "), " +
                        check("dAICc", i41.aicc - i10.aicc, -1.0, 2.0, ok) + ", " +
                        check("dBIC", i41.bic - i10.bic, 10.0, 2.0, ok);
        const double phi[] = {-0.29, 0.36, 0.05, 0.24};
        for (int i = 0; i < 4; ++i) {
            d += ", " + check("phi" + std::to_string(i + 1), arma41.model.ar[static_cast<std::size_t>(i)], phi[i], 0.15, ok);
        }
        d += ", " + check("theta1", arma41.model.ma[0], 0.80, 0.15, ok) + ", " +
             check("sigma", arma41.model.sigma, 0.09, 0.015, ok) + ", " + runtime(t2, 30, ok);
        report("2 noise selection", ok, d);
    }

    // 3. parametric bootstrap
    Clock c3;
    BootstrapOptions bopt;
    bopt.threads = threads;
    const auto boot = parametric_bootstrap(fit, arma41.model, forcing, 1000, seed, {4, 1}, bopt);
    const double t3 = c3.seconds();
    {
        bool ok = boot.usable();
        std::string d;
        if (ok) {
            const auto i90 = percentile_interval(boot, "lambda_a", 5, 95);
            const auto i95 = percentile_interval(boot, "lambda_a", 2.5, 97.5);
            const auto n95 = percentile_interval(boot, "lambda_n", 2.5, 97.5);
            const bool tail = i95.upper > 50, brackets = n95.lower < 0 && n95.upper > 0;
            d = "lambda_a 90%: " + check("lower", i90.lower, 1.5, 0.15, ok) + ", " +
                check("upper", i90.upper, 3.0, 0.6, ok) + "; lambda_a 97.5% " + fmt(i95.upper, 1) +
                (tail ? "" : " (!)") + " [> 50]; lambda_n 95% (" + fmt(n95.lower) + ", " + fmt(n95.upper) + ")" +
                (brackets ? "" : " (!)") + " [brackets 0]; at cap " + std::to_string(boot.at_cap) + "/" +
                std::to_string(boot.replicates.size()) + ", failures " + std::to_string(boot.failures) + ", ";
            ok = ok && tail && brackets;
        } else {
            d = "unusable sample: " + boot.flag + ", ";
        }
        d += runtime(t3, 900, ok);
        report("3 parametric bootstrap", ok, d);
    }

    // 4. projection band
    Clock c4;
    {
        bool ok = boot.usable();
        std::string d;
        if (ok) {
            const auto rows = experiments::projection_band(fit.params, experiments::replicate_params(boot), scenario,
                                                           temps.start_year(), 2400, default_f2x, {2.5, 97.5});
            const auto& y2000 = rows[static_cast<std::size_t>(2000 - temps.start_year())];
            d = "year 2000 band: " + check("lower", y2000.lower, 0.4, 0.1, ok) + ", " +
                check("upper", y2000.upper, 0.6, 0.1, ok) + ", ";
        }
        d += runtime(c4.seconds(), 60, ok);
        report("4 projection", ok, d);
    }

    // 5. learning curve
    Clock c5;
    {
        bool ok = true;
        std::string d;
        try {
            const auto rows = learning_experiment(fit, arma41.model, scenario, {2025, 2050, 2075, 2100}, 500, seed,
                                                  2.5, 97.5, bopt);
            bool decreasing = true;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                d += std::to_string(rows[i].end_year) + " (" + fmt(rows[i].lambda_a.lower, 2) + ", " +
                     fmt(rows[i].lambda_a.upper, 2) + ") warming " + fmt(rows[i].warming, 2) + "; ";
                if (i) decreasing = decreasing && rows[i].lambda_a.upper <= rows[i - 1].lambda_a.upper;
            }
            const bool start = rows.front().lambda_a.upper > 8, end = rows.back().lambda_a.upper < 2.5;
            ok = decreasing && start && end;
            d += std::string("97.5% decreasing ") + (decreasing ? "yes" : "no (!)") + ", 2025 > 8 " +
                 (start ? "yes" : "no (!)") + ", 2100 < 2.5 " + (end ? "yes" : "no (!)") + "; 2100 interval " +
                 check("lower", rows.back().lambda_a.lower, 1.7, 0.15, ok) + ", " +
                 check("upper", rows.back().lambda_a.upper, 2.0, 0.3, ok) + ", ";
        } catch (const std::exception& e) {
            ok = false;
            d = std::string("error: ") + e.what() + ", ";
        }
        d += runtime(c5.seconds(), 1800, ok);
        report("5 learning curve", ok, d);
    }

    // 6. TCR
    Clock c6;
    {
        bool ok = boot.usable();
        std::string d = check("point", tcr(fit.params), 1.7, 0.15, ok);
        if (boot.usable()) {
            std::vector<double> star;
            for (const auto& p : experiments::replicate_params(boot)) star.push_back(tcr(p));
            const auto iv = percentile_interval(star, 2.5, 97.5);
            d += ", 95%: " + check("lower", iv.lower, 1.2, 0.15, ok) + ", " + check("upper", iv.upper, 1.9, 0.3, ok);
        }
        d += ", " + runtime(c6.seconds(), 60, ok);
        report("6 TCR", ok, d);
    }

    // 7. forcing scaling
    Clock c7;
    {
        bool ok = true;
        const double ref = forcing.anthropogenic_at(2011);
        const auto low = fit_trend(temps, scale_anthropogenic(forcing, 3.33 / ref));
        const auto high = fit_trend(temps, scale_anthropogenic(forcing, 1.13 / ref));
        std::string d = "F_A(2011) " + fmt(ref, 3) + "; endpoint 3.33: " +
                        check("lambda_a", low.params.lambda_a, 1.2, 0.2, ok) + "; endpoint 1.13: " +
                        check("lambda_a", high.params.lambda_a, 3.7, 0.5, ok) + ", " + runtime(c7.seconds(), 30, ok);
        report("7 forcing scaling", ok, d);
    }

    // 8. calibration: the cells the criteria read, at full R
    Clock c8;
    {
        CalibrationOptions base;
        base.threads = threads;
        auto cell = [&](const std::string& model, int n, std::vector<std::string> methods) {
            CalibrationOptions o = base;
            o.methods = std::move(methods);
            return calibration_cell(model, n, calibration_r, seed, o);
        };

        {
            bool ok = true;
            std::string d;
            for (int n : {500, 1000}) {
                const auto c = cell("ar1", n, {"ar1_t", "ar1_parboot"});
                for (const char* m : {"ar1_t", "ar1_parboot"}) {
                    const double r = rate(pick(c, m));
                    const bool good = r >= 0.035 && r <= 0.065;
                    ok = ok && good;
                    d += std::string(m) + "@" + std::to_string(n) + " " + fmt(100 * r, 2) + "%" + (good ? "" : " (!)") + "; ";
                }
            }
            report("8a AR(1) large-n calibration", ok, d + "[3.5%, 6.5%]");
        }

        const auto ar1_20 = cell("ar1", 20, {"ols_t", "ar1_t", "ar1_t_reml", "block_boot"});
        {
            const auto& bb = pick(ar1_20, "block_boot");
            const double rb = rate(bb), ro = rate(pick(ar1_20, "ols_t"));
            report("8b AR(1) n=20 block worse than OLS", rb > ro,
                   "block_boot (l=" + std::to_string(bb.block_length.value_or(0)) + ") " + fmt(100 * rb, 2) +
                       "% vs ols_t " + fmt(100 * ro, 2) + "%");
        }
        {
            const auto c = cell("arma11", 1000, {"ar1_t"});
            const double r = rate(pick(c, "ar1_t"));
            report("8c ARMA(1,1) n=1000 AR(1) t-test conservative", r < 0.05, "ar1_t " + fmt(100 * r, 2) + "% [< 5%]");
        }
        {
            bool ok = true;
            std::string d = "n=100:";
            const auto c100 = cell("farima", 100, {"ols_t", "ar1_t", "ar1_parboot", "aicc_t", "block_boot"});
            for (const char* m : {"ols_t", "ar1_t", "ar1_parboot", "aicc_t", "block_boot"}) {
                const double r = rate(pick(c100, m));
                ok = ok && r > 0.10;
                d += std::string(" ") + m + " " + fmt(100 * r, 2) + "%" + (r > 0.10 ? "" : " (!)");
            }
            d += " [> 10%]; n=20:";
            const auto c20 = cell("farima", 20, {"ar1_t", "ar1_parboot", "block_boot"});
            const double rb = rate(pick(c20, "block_boot"));
            for (const char* m : {"ar1_t", "ar1_parboot"}) {
                const double r = rate(pick(c20, m));
                ok = ok && r <= rb;
                d += std::string(" ") + m + " " + fmt(100 * r, 2) + "%" + (r <= rb ? "" : " (!)");
            }
            d += " vs block_boot " + fmt(100 * rb, 2) + "% [parametric <= block]";
            report("8d fractional AR(1)", ok, d);
        }
        {
            const double ml = type_one_errors(pick(ar1_20, "ar1_t"), {0.05}).ks_statistic;
            const double reml = type_one_errors(pick(ar1_20, "ar1_t_reml"), {0.05}).ks_statistic;
            report("8e REML vs ML at n=20", reml < ml, "KS reml " + fmt(reml, 4) + " vs ml " + fmt(ml, 4));
        }
        const double needed = c8.seconds();

        // Full-grid cost: a short pilot of every (model, n) cell with every method, scaled to R.
        Clock pilot;
        const int pilot_r = 4;
        CalibrationOptions all = base;
        all.methods = calibration_methods();
        for (const auto& [name, model] : calibration_models()) {
            for (int n : {20, 50, 100, 500, 1000}) (void)calibration_cell(name, n, pilot_r, seed + 1, all);
        }
        const double full = pilot.seconds() * 2000.0 / pilot_r;
        report("8 runtime", full < 3600,
               "criteria cells " + fmt(needed / 60, 1) + " min; full grid (5 models x 5 n x 6 methods) estimated " +
                   fmt(full / 60, 0) + " min at R=2000 on " + std::to_string(threads) + " thread(s) [< 60 min]");
    }

    // 9. mathematical oracles
    Clock c9;
    {
        bool ok = true;
        const std::vector<ArfimaModel> battery = {{{0.5}, {}, 0.0, 1.0},
                                                  {{0.5}, {0.25}, 0.0, 0.7},
                                                  {{0.5, -0.25}, {}, 0.0, 1.3},
                                                  {{-0.29, 0.36, 0.05, 0.24}, {0.80}, 0.0, 0.09}};
        double e_lik = 0.0, e_acf = 0.0, e_parseval = 0.0, e_dc = 0.0, e_kl = 0.0;
        boost::math::quadrature::gauss_kronrod<double, 61> gk;
        for (std::size_t i = 0; i < battery.size(); ++i) {
            const auto& m = battery[i];
            for (std::size_t n : {7u, 20u, 50u}) {
                const auto x = simulate(m, n, 100 + i * 7 + n);
                e_lik = std::max(e_lik, std::abs(loglik_exact(m, x) - dense_loglik(m, x)));
            }
            const auto g = arma_autocovariance(m, 5);
            for (int k = 0; k <= 5; ++k) {
                auto f = [&](double w) {
                    const double om[] = {std::max(w, 1e-300)};
                    return 2.0 * arma_spectral_density(m, om).power[0] * std::cos(k * w);
                };
                e_acf = std::max(e_acf, std::abs(gk.integrate(f, 0.0, std::numbers::pi, 15, 1e-12) -
                                                 g[static_cast<std::size_t>(k)]));
            }
            const auto x = simulate(m, 4096 + i, 9 + i);
            e_parseval = std::max(e_parseval, std::abs(periodogram(x).weighted_mean() - variance(x)));
        }
        for (double rho : {0.0, 0.3, 0.8, 0.99}) {
            const std::vector<double> x(400, 2.5);
            for (double v : lag_filter(rho, x, 2.5)) e_dc = std::max(e_dc, std::abs(v / 2.5 - 1.0));
        }
        const auto a = best_ar1_kl(ArfimaModel{{0.5}, {}, 0.0, 1.0});
        e_kl = std::max(std::abs(a.ar[0] - 0.5), std::abs(a.sigma - 1.0));
        auto item = [&](const char* name, double e, double tol) {
            ok = ok && e <= tol;
            char b[96];
            std::snprintf(b, sizeof b, "%s %.1e%s [%.0e]", name, e, e <= tol ? "" : " (!)", tol);
            return std::string(b);
        };
        std::string d = item("likelihood", e_lik, 1e-8) + ", " + item("acf/spectrum", e_acf, 1e-6) + ", " +
                        item("parseval", e_parseval, 1e-8) + ", " + item("dc gain", e_dc, 1e-12) + ", " +
                        item("best_ar1", e_kl, 1e-4) + ", " + runtime(c9.seconds(), 120, ok);
        report("9 mathematical oracles", ok, d);
    }

    // 10. determinism
    {
        const auto root = fs::temp_directory_path() / "ftrend_acceptance";
        fs::remove_all(root);
        nlohmann::json j = {{"schema_version", 1},
                            {"name", "determinism"},
                            {"seed", seed},
                            {"replicates", 16},
                            {"output_dir", ""},
                            {"inputs",
                             {{"temperature", data("gistemp_loti_annual.csv")},
                              {"forcing", data("forcing_ar5_annex2.csv")},
                              {"forcing_map", data("forcing_ar5_annex2.json")},
                              {"scenario", data("rcp85_forcing.csv")},
                              {"scenario_map", data("rcp85_forcing.json")}}},
                            {"learning", {{"end_years", {2050, 2100}}}},
                            {"calibration", {{"models", {"ar1", "farima"}}, {"n", {20, 50}}, {"inner_replicates", 19}}}};
        bool ok = true;
        std::string d;
        for (const std::string cmd : {"fit", "project", "learn", "calibrate", "simulate"}) {
            std::map<std::string, std::string> first;
            for (unsigned t : {1u, 4u}) {
                for (int rep = 0; rep < (t == 1u ? 2 : 1); ++rep) {
                    const auto dir = root / (cmd + "_" + std::to_string(t) + "_" + std::to_string(rep));
                    j["output_dir"] = dir.string();
                    (void)experiments::run_command(cmd, experiments::validated(j, cmd), {t});
                    auto files = csv_files(dir);
                    if (first.empty()) {
                        first = std::move(files);
                    } else if (files != first) {
                        ok = false;
                        d += cmd + " differs (threads " + std::to_string(t) + ", run " + std::to_string(rep) + "); ";
                    }
                }
            }
            d += cmd + " " + std::to_string(first.size()) + " csv; ";
        }
        report("10 determinism", ok, d + "threads {1, 4} and repeated runs byte-identical");
        fs::remove_all(root);
    }

    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criterion line(s) FAIL") << std::endl;
    return failures == 0 ? 0 : 1;
}
