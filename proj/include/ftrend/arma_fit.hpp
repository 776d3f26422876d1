#pragma once

#include "ftrend/arma_model.hpp"
#include "ftrend/error.hpp"
#include "ftrend/innovations.hpp"
#include "ftrend/nelder_mead.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ftrend {

enum class VarianceCriterion { ml, reml };

struct ArmaFit {
    ArfimaModel model;
    double loglik{};
    bool converged{};
    int evals{};
};

struct RegressionArmaFit {
    Eigen::VectorXd coef;
    ArfimaModel model;
    double loglik{};  // profile (ml) or restricted (reml) log-likelihood
    Eigen::MatrixXd coef_cov;
    bool converged{};
    int evals{};
};

struct InformationCriteria {
    double aic{};
    double aicc{};
    double bic{};
};

[[nodiscard]] inline InformationCriteria information_criteria(double loglik, int k, int n) {
    if (n <= k + 1) throw std::invalid_argument("information criteria need n > k + 1");
    const double aic = -2.0 * loglik + 2.0 * k;
    return {aic, aic + 2.0 * k * (k + 1.0) / (n - k - 1.0), -2.0 * loglik + k * std::log(static_cast<double>(n))};
}

namespace detail {

/// Unconstrained coordinates -> (phi, theta) through tanh-mapped partial autocorrelations.
inline void unpack(std::span<const double> u, int p, int q, ArfimaModel& m) {
    std::vector<double> r(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) r[static_cast<std::size_t>(i)] = std::tanh(u[static_cast<std::size_t>(i)]);
    m.ar = step_up(r);
    r.resize(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) r[static_cast<std::size_t>(i)] = std::tanh(u[static_cast<std::size_t>(p + i)]);
    m.ma = negated(step_up(r));
}

inline std::vector<double> pack(const ArfimaModel& m, double clip = 0.98) {
    std::vector<double> u;
    auto push = [&](std::span<const double> c) {
        for (double r : step_down(c)) u.push_back(std::atanh(std::clamp(r, -clip, clip)));
    };
    push(m.ar);
    push(negated(m.ma));
    return u;
}

/// Profiled Gaussian objective for regression-plus-ARMA; design may have zero columns.
class ArmaObjective {
public:
    ArmaObjective(std::span<const double> y, const Eigen::MatrixXd& x, int p, int q, VarianceCriterion crit)
        : yx_(static_cast<Eigen::Index>(y.size()), x.cols() + 1), k_(x.cols()), p_(p), q_(q), crit_(crit) {
        yx_.col(0) = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
        yx_.rightCols(k_) = x;
    }

    struct Value {
        double loglik = -std::numeric_limits<double>::infinity();
        double sigma2{};
        Eigen::VectorXd coef;
        Eigen::MatrixXd xtx_inv;
    };

    [[nodiscard]] Value evaluate(const ArfimaModel& m, bool want_cov = false) const {
        Value out;
        const auto n = static_cast<double>(yx_.rows());
        const auto k = static_cast<double>(k_);
        try {
            InnovationsFilter f(m, static_cast<std::size_t>(yx_.rows()));
            double logdet = f.log_det();
            if (!std::isfinite(logdet)) return out;
            const Eigen::MatrixXd w = f.whiten(yx_);
            double ss = 0.0, reml_term = 0.0;
            if (k_ == 0) {
                ss = w.col(0).squaredNorm();
            } else {
                Eigen::HouseholderQR<Eigen::MatrixXd> qr(w.rightCols(k_));
                out.coef = qr.solve(w.col(0));
                ss = (w.col(0) - w.rightCols(k_) * out.coef).squaredNorm();
                Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k_, k_).triangularView<Eigen::Upper>();
                for (Eigen::Index i = 0; i < r.rows(); ++i) reml_term += 2.0 * std::log(std::abs(r(i, i)));
                if (want_cov) {
                    Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k_, k_));
                    out.xtx_inv = rinv * rinv.transpose();
                }
            }
            const double dof = crit_ == VarianceCriterion::reml ? n - k : n;
            out.sigma2 = ss / dof;
            double ll = -0.5 * dof * std::log(2.0 * std::numbers::pi * out.sigma2) - 0.5 * logdet - 0.5 * dof;
            if (crit_ == VarianceCriterion::reml) ll -= 0.5 * reml_term;
            if (std::isfinite(ll) && out.sigma2 > 0.0) out.loglik = ll;
        } catch (const std::exception&) {
        }
        return out;
    }

    [[nodiscard]] double negloglik(std::span<const double> u) const {
        ArfimaModel m;
        unpack(u, p_, q_, m);
        double ll = evaluate(m).loglik;
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    }

    [[nodiscard]] int p() const { return p_; }
    [[nodiscard]] int q() const { return q_; }

private:
    Eigen::MatrixXd yx_;  // [y, X]
    Eigen::Index k_;
    int p_, q_;
    VarianceCriterion crit_;
};

/// Sample autocovariances (divisor n) of a series about zero mean.
inline std::vector<double> sample_acov(std::span<const double> x, std::size_t max_lag) {
    std::vector<double> g(max_lag + 1, 0.0);
    const std::size_t n = x.size();
    for (std::size_t h = 0; h <= max_lag && h < n; ++h) {
        double s = 0.0;
        for (std::size_t t = h; t < n; ++t) s += x[t] * x[t - h];
        g[h] = s / static_cast<double>(n);
    }
    return g;
}

/// Yule-Walker AR(order) by Durbin-Levinson; always stationary.
inline std::vector<double> yule_walker(std::span<const double> x, std::size_t order) {
    auto g = sample_acov(x, order);
    if (!(g[0] > 0.0)) return std::vector<double>(order, 0.0);
    std::vector<double> r(order);
    std::vector<double> phi;
    double v = g[0];
    for (std::size_t k = 0; k < order; ++k) {
        double num = g[k + 1];
        for (std::size_t j = 0; j < k; ++j) num -= phi[j] * g[k - j];
        double rk = std::clamp(num / v, -0.99, 0.99);
        std::vector<double> next(k + 1);
        for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - rk * phi[k - 1 - j];
        next[k] = rk;
        phi = std::move(next);
        v *= 1.0 - rk * rk;
    }
    return phi;
}

/// Hannan-Rissanen moment estimate: long AR residuals as proxies for the innovations.
inline ArfimaModel hannan_rissanen(std::span<const double> x, int p, int q) {
    ArfimaModel m;
    const std::size_t n = x.size();
    if (q == 0) {
        m.ar = yule_walker(x, static_cast<std::size_t>(p));
        return m;
    }
    const std::size_t big = std::min<std::size_t>(std::max<std::size_t>(static_cast<std::size_t>(p + q) + 4, 10), n / 4);
    const std::size_t start = big + static_cast<std::size_t>(std::max(p, q));
    if (big < 1 || start + static_cast<std::size_t>(p + q) + 2 >= n) {
        m.ar.assign(static_cast<std::size_t>(p), 0.0);
        m.ma.assign(static_cast<std::size_t>(q), 0.0);
        return m;
    }
    auto a = yule_walker(x, big);
    std::vector<double> e(n, 0.0);
    for (std::size_t t = big; t < n; ++t) {
        double v = x[t];
        for (std::size_t i = 1; i <= big; ++i) v -= a[i - 1] * x[t - i];
        e[t] = v;
    }
    const auto rows = static_cast<Eigen::Index>(n - start);
    Eigen::MatrixXd z(rows, p + q);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = start + static_cast<std::size_t>(r);
        y(r) = x[t];
        for (int i = 0; i < p; ++i) z(r, i) = x[t - static_cast<std::size_t>(i) - 1];
        for (int j = 0; j < q; ++j) z(r, p + j) = e[t - static_cast<std::size_t>(j) - 1];
    }
    Eigen::VectorXd b = z.colPivHouseholderQr().solve(y);
    for (int i = 0; i < p; ++i) m.ar.push_back(b(i));
    for (int j = 0; j < q; ++j) m.ma.push_back(b(p + j));
    return m;
}

struct Optimum {
    std::vector<double> u;
    double value = std::numeric_limits<double>::infinity();
    bool converged = false;
    int evals = 0;
};

inline Optimum optimize(const ArmaObjective& obj, std::span<const double> y) {
    const int k = obj.p() + obj.q();
    Optimum best;
    if (k == 0) {
        best.value = obj.negloglik({});
        best.converged = std::isfinite(best.value);
        best.evals = 1;
        return best;
    }
    if (k == 1) {
        // Scan the reflection coefficient, then polish with Brent inside the best bracket.
        auto f = [&](double r) {
            const double u = std::atanh(r);
            ++best.evals;
            return obj.negloglik(std::span<const double>(&u, 1));
        };
        const int scan = 12;
        const double lim = 0.999;
        double r_best = 0.0, v_best = f(0.0);
        for (int i = -scan + 1; i < scan; ++i) {
            const double r = lim * i / scan;
            const double v = f(r);
            if (v < v_best) {
                v_best = v;
                r_best = r;
            }
        }
        const double step = lim / scan;
        std::uintmax_t iters = 200;
        auto res = boost::math::tools::brent_find_minima(f, std::max(-lim, r_best - step), std::min(lim, r_best + step), 32, iters);
        if (res.second <= v_best) {
            r_best = res.first;
            v_best = res.second;
        }
        best.u = {std::atanh(r_best)};
        best.value = v_best;
        best.converged = std::isfinite(v_best) && iters < 200;
        return best;
    }

    auto f = [&](const std::vector<double>& u) { return obj.negloglik(u); };
    SimplexOptions opt;
    opt.f_tol = 1e-10;
    opt.x_tol = 1e-7;
    opt.max_evals = 400 * k;
    std::vector<std::vector<double>> starts;
    starts.push_back(pack(hannan_rissanen(y, obj.p(), obj.q())));
    ArfimaModel small;
    small.ar.assign(static_cast<std::size_t>(obj.p()), 0.0);
    small.ma.assign(static_cast<std::size_t>(obj.q()), 0.0);
    if (obj.p() > 0) small.ar[0] = 0.1;
    if (obj.q() > 0) small.ma[0] = 0.1;
    starts.push_back(pack(small));
    for (const auto& s : starts) {
        auto r = nelder_mead(f, s, std::vector<double>(static_cast<std::size_t>(k), 0.3), opt);
        best.evals += r.evals;
        if (r.fx < best.value) best = Optimum{r.x, r.fx, r.converged, best.evals};
    }
    if (!std::isfinite(best.value)) return best;
    // Restart from the best point to escape a collapsed simplex.
    auto r = nelder_mead(f, best.u, std::vector<double>(static_cast<std::size_t>(k), 0.1), opt);
    best.evals += r.evals;
    if (r.fx <= best.value) {
        best.u = r.x;
        best.value = r.fx;
    }
    best.converged = r.converged;
    return best;
}

}  // namespace detail

/**
 * @brief Exact Gaussian ML fit of a zero-mean ARMA(p, q).
 *
 * Coefficients are optimized through partial autocorrelations so every trial
 * point is stationary and invertible; sigma^2 is profiled out. Starts from a
 * Hannan-Rissanen estimate and from small default coefficients, then restarts
 * from the better. Throws NumericalError only when no finite likelihood was
 * found; otherwise a non-converged search is reported by the flag.
 */
[[nodiscard]] inline ArmaFit fit_arma_mle(std::span<const double> x, int p, int q) {
    if (p < 0 || q < 0) throw std::invalid_argument("fit_arma_mle: negative order");
    if (x.size() <= static_cast<std::size_t>(p + q + 2)) {
        throw std::invalid_argument("fit_arma_mle: need n > p + q + 2");
    }
    detail::ArmaObjective obj(x, Eigen::MatrixXd(static_cast<Eigen::Index>(x.size()), 0), p, q, VarianceCriterion::ml);
    auto best = detail::optimize(obj, x);
    if (!std::isfinite(best.value)) {
        throw NumericalError("ARMA(" + std::to_string(p) + "," + std::to_string(q) + ") fit found no finite likelihood");
    }
    ArmaFit out;
    detail::unpack(best.u, p, q, out.model);
    auto v = obj.evaluate(out.model);
    out.model.sigma = std::sqrt(v.sigma2);
    out.loglik = v.loglik;
    out.converged = best.converged;
    out.evals = best.evals;
    return out;
}

/**
 * @brief Linear regression with ARMA(p, q) errors by exact ML or REML.
 *
 * Regression coefficients are profiled by generalized least squares on the
 * innovations-whitened data. reml adds -1/2 log det(X' V^-1 X) and uses n - k
 * in the variance estimate; coef_cov is sigma2_hat (X' V^-1 X)^-1.
 */
[[nodiscard]] inline RegressionArmaFit fit_regression_arma(std::span<const double> y, const Eigen::MatrixXd& design,
                                                           int p, int q,
                                                           VarianceCriterion crit = VarianceCriterion::ml) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (design.rows() != n) throw std::invalid_argument("fit_regression_arma: design rows differ from series length");
    if (n <= p + q + design.cols() + 2) throw std::invalid_argument("fit_regression_arma: need n > p + q + cols + 2");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) throw NumericalError("fit_regression_arma: rank-deficient design");
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    const Eigen::VectorXd ols_resid = yv - design * qr.solve(yv);

    detail::ArmaObjective obj(y, design, p, q, crit);
    std::vector<double> start(ols_resid.data(), ols_resid.data() + n);
    auto best = detail::optimize(obj, start);
    if (!std::isfinite(best.value)) throw NumericalError("regression ARMA fit found no finite likelihood");
    RegressionArmaFit out;
    detail::unpack(best.u, p, q, out.model);
    auto v = obj.evaluate(out.model, true);
    out.model.sigma = std::sqrt(v.sigma2);
    out.coef = v.coef;
    out.coef_cov = v.sigma2 * v.xtx_inv;
    out.loglik = v.loglik;
    out.converged = best.converged;
    out.evals = best.evals;
    return out;
}

enum class OrderCriterion { aicc, bic };

struct OrderCandidate {
    int p{}, q{};
    bool ok{};
    double loglik = std::numeric_limits<double>::quiet_NaN();
    double aicc = std::numeric_limits<double>::quiet_NaN();
    double bic = std::numeric_limits<double>::quiet_NaN();
    bool converged{};
    std::string error;
};

struct OrderSelection {
    int p{}, q{};
    ArfimaModel model;
    double loglik{};
    std::vector<OrderCandidate> log;
};

/**
 * @brief Exhaustive ARMA order search minimizing AICc or BIC.
 *
 * k = p + q + 1 + extra_params (extra_params counts regression coefficients
 * when comparing joint fits). Ties go to the smaller p + q, then the smaller q.
 * Failed candidates are skipped and recorded in the log.
 */
[[nodiscard]] inline OrderSelection select_order(std::span<const double> x, int p_max, int q_max,
                                                 OrderCriterion crit = OrderCriterion::aicc, int extra_params = 0) {
    OrderSelection out;
    std::optional<std::size_t> best;
    std::vector<ArmaFit> fits;
    auto score = [&](const OrderCandidate& c) { return crit == OrderCriterion::aicc ? c.aicc : c.bic; };
    for (int p = 0; p <= p_max; ++p) {
        for (int q = 0; q <= q_max; ++q) {
            OrderCandidate c{p, q};
            ArmaFit fit;
            try {
                fit = fit_arma_mle(x, p, q);
                auto ic = information_criteria(fit.loglik, p + q + 1 + extra_params, static_cast<int>(x.size()));
                c.ok = true;
                c.loglik = fit.loglik;
                c.aicc = ic.aicc;
                c.bic = ic.bic;
                c.converged = fit.converged;
            } catch (const std::exception& e) {
                c.error = e.what();
            }
            out.log.push_back(c);
            fits.push_back(fit);
            if (!c.ok) continue;
            const std::size_t idx = out.log.size() - 1;
            if (!best) {
                best = idx;
                continue;
            }
            const auto& b = out.log[*best];
            const bool better = score(c) < score(b) ||
                                (score(c) == score(b) &&
                                 (c.p + c.q < b.p + b.q || (c.p + c.q == b.p + b.q && c.q < b.q)));
            if (better) best = idx;
        }
    }
    if (!best) throw NumericalError("select_order: every candidate fit failed");
    out.p = out.log[*best].p;
    out.q = out.log[*best].q;
    out.model = fits[*best].model;
    out.loglik = fits[*best].loglik;
    return out;
}

}  // namespace ftrend
