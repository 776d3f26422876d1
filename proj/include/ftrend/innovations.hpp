#pragma once

#include "ftrend/arma_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace ftrend {

/// MA(infinity) weights psi_0..psi_{count-1} of the ARMA part.
[[nodiscard]] inline std::vector<double> psi_weights(const ArfimaModel& m, std::size_t count) {
    std::vector<double> psi(count, 0.0);
    if (count == 0) return psi;
    psi[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        double v = j <= m.ma.size() ? m.ma[j - 1] : 0.0;
        for (std::size_t i = 1; i <= std::min(j, m.ar.size()); ++i) v += m.ar[i - 1] * psi[j - i];
        psi[j] = v;
    }
    return psi;
}

/**
 * @brief Autocovariances gamma(0..max_lag) of a stationary ARMA process.
 *
 * Solves the first p+1 moment equations as a linear system and extends with
 * the homogeneous recursion.
 */
[[nodiscard]] inline std::vector<double> arma_autocovariance(const ArfimaModel& m, int max_lag) {
    validate_arma(m);
    if (max_lag < 0) throw std::invalid_argument("arma_autocovariance: max_lag must be >= 0");
    const int p = m.p(), q = m.q();
    const double s2 = m.sigma * m.sigma;
    const auto psi = psi_weights(m, static_cast<std::size_t>(q + 1));
    auto theta = [&](int j) { return j == 0 ? 1.0 : (j <= q ? m.ma[static_cast<std::size_t>(j - 1)] : 0.0); };
    // rhs_k = sigma^2 sum_{j=k}^{q} theta_j psi_{j-k}
    auto rhs = [&](int k) {
        double v = 0.0;
        for (int j = k; j <= q; ++j) v += theta(j) * psi[static_cast<std::size_t>(j - k)];
        return s2 * v;
    };

    std::vector<double> g(static_cast<std::size_t>(std::max(max_lag, p) + 1), 0.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p + 1, p + 1);
    Eigen::VectorXd b(p + 1);
    for (int k = 0; k <= p; ++k) {
        a(k, k) += 1.0;
        for (int i = 1; i <= p; ++i) a(k, std::abs(k - i)) -= m.ar[static_cast<std::size_t>(i - 1)];
        b(k) = rhs(k);
    }
    Eigen::VectorXd g0 = a.fullPivLu().solve(b);
    for (int k = 0; k <= p; ++k) g[static_cast<std::size_t>(k)] = g0(k);
    for (int k = p + 1; k < static_cast<int>(g.size()); ++k) {
        double v = rhs(k);
        for (int i = 1; i <= p; ++i) v += m.ar[static_cast<std::size_t>(i - 1)] * g[static_cast<std::size_t>(k - i)];
        g[static_cast<std::size_t>(k)] = v;
    }
    g.resize(static_cast<std::size_t>(max_lag + 1));
    return g;
}

/**
 * @brief Innovations algorithm for a causal ARMA process of length n.
 *
 * Applied to the transformed process W_t = X_t (t <= m) and phi(B) X_t
 * (t > m), m = max(p, q), whose covariance is banded after m; the innovation
 * coefficients then vanish beyond lag q and the recursion costs O(n q^2).
 * Covariances are computed with unit innovation variance, so `r` holds the
 * one-step mean squared errors in units of sigma^2. The filter is linear, so
 * applying it to regressors whitens them for generalized least squares.
 */
class InnovationsFilter {
public:
    InnovationsFilter(const ArfimaModel& model, std::size_t n)
        : phi_(model.ar), p_(model.ar.size()), q_(model.ma.size()), m_(std::max(p_, q_)), n_(n) {
        ArfimaModel unit = model;
        unit.sigma = 1.0;
        auto gamma = arma_autocovariance(unit, static_cast<int>(2 * m_ + 1));
        std::vector<double> th(q_ + 1);
        th[0] = 1.0;
        for (std::size_t j = 0; j < q_; ++j) th[j + 1] = model.ma[j];

        auto g = [&](std::ptrdiff_t h) { return gamma[static_cast<std::size_t>(std::abs(h))]; };
        // 0-based indices i, j correspond to times i+1, j+1
        auto kappa = [&](std::size_t i, std::size_t j) -> double {
            const std::size_t lo = std::min(i, j) + 1, hi = std::max(i, j) + 1;
            const auto h = static_cast<std::ptrdiff_t>(hi - lo);
            if (hi <= m_) return g(h);
            if (lo <= m_) {
                if (hi > 2 * m_) return 0.0;
                double v = g(h);
                for (std::size_t r = 1; r <= p_; ++r) v -= phi_[r - 1] * g(static_cast<std::ptrdiff_t>(r) - h);
                return v;
            }
            if (static_cast<std::size_t>(h) > q_) return 0.0;
            double v = 0.0;
            for (std::size_t r = 0; r + static_cast<std::size_t>(h) <= q_; ++r) v += th[r] * th[r + static_cast<std::size_t>(h)];
            return v;
        };

        width_ = std::max<std::size_t>(m_, 1);
        theta_.assign(n_ * width_, 0.0);
        r_.assign(n_, 0.0);
        if (n_ == 0) return;
        r_[0] = kappa(0, 0);
        for (std::size_t t = 1; t < n_; ++t) {
            // theta_{t, t-k} for k = lo..t-1, zero for lags beyond q once t >= m
            const std::size_t lo = t >= m_ ? (t > q_ ? t - q_ : 0) : 0;
            for (std::size_t k = lo; k < t; ++k) {
                double v = kappa(t, k);
                for (std::size_t j = std::max(lo, k >= width_ ? k - width_ : 0); j < k; ++j) {
                    v -= coef(k, k - j) * coef(t, t - j) * r_[j];
                }
                set(t, t - k, v / r_[k]);
            }
            double v = kappa(t, t);
            for (std::size_t j = lo; j < t; ++j) v -= coef(t, t - j) * coef(t, t - j) * r_[j];
            r_[t] = v;
        }
        inv_sqrt_r_.resize(n_);
        for (std::size_t t = 0; t < n_; ++t) {
            // pure AR: r_t is exactly 1 after the first m steps
            const bool unit = r_[t] == 1.0;
            inv_sqrt_r_[t] = unit ? 1.0 : 1.0 / std::sqrt(r_[t]);
            log_det_ += unit ? 0.0 : std::log(r_[t]);
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] const std::vector<double>& mse() const noexcept { return r_; }

    [[nodiscard]] double log_det() const noexcept { return log_det_; }

    /// One-step prediction errors X_t - Xhat_t (unstandardized).
    [[nodiscard]] std::vector<double> errors(std::span<const double> x) const {
        std::vector<double> e(n_);
        errors_into(x.data(), e.data());
        return e;
    }

    /// Errors divided by sqrt(r_t): iid N(0, sigma^2) under the model.
    [[nodiscard]] std::vector<double> whiten(std::span<const double> x) const {
        auto e = errors(x);
        for (std::size_t t = 0; t < n_; ++t) e[t] *= inv_sqrt_r_[t];
        return e;
    }

    [[nodiscard]] Eigen::MatrixXd whiten(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd out(x.rows(), x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            double* o = out.col(c).data();
            errors_into(x.col(c).data(), o);
            for (std::size_t t = 0; t < n_; ++t) o[t] *= inv_sqrt_r_[t];
        }
        return out;
    }

private:
    void errors_into(const double* x, double* e) const {
        for (std::size_t t = 0; t < n_; ++t) {
            double pred = 0.0;
            if (t >= m_) {
                for (std::size_t i = 1; i <= p_; ++i) pred += phi_[i - 1] * x[t - i];
            }
            const std::size_t jmax = t >= m_ ? std::min(q_, t) : t;
            for (std::size_t j = 1; j <= jmax; ++j) pred += coef(t, j) * e[t - j];
            e[t] = x[t] - pred;
        }
    }

    [[nodiscard]] double coef(std::size_t t, std::size_t lag) const {
        return lag == 0 || lag > width_ ? 0.0 : theta_[t * width_ + lag - 1];
    }
    void set(std::size_t t, std::size_t lag, double v) {
        if (lag >= 1 && lag <= width_) theta_[t * width_ + lag - 1] = v;
    }

    std::vector<double> phi_;
    std::size_t p_, q_, m_, n_, width_ = 1;
    std::vector<double> theta_;  // theta_{t, lag}, lag = 1..width
    std::vector<double> r_;
    std::vector<double> inv_sqrt_r_;
    double log_det_ = 0.0;
};

/// Exact Gaussian log-likelihood of a zero-mean ARMA series.
[[nodiscard]] inline double loglik_exact(const ArfimaModel& model, std::span<const double> x) {
    validate_arma(model);
    if (x.size() < static_cast<std::size_t>(model.p() + model.q() + 1)) {
        throw std::invalid_argument("loglik_exact: series shorter than p+q+1");
    }
    InnovationsFilter f(model, x.size());
    auto w = f.whiten(x);
    double ss = 0.0;
    for (double v : w) ss += v * v;
    const double n = static_cast<double>(x.size()), s2 = model.sigma * model.sigma;
    return -0.5 * n * std::log(2.0 * std::numbers::pi * s2) - 0.5 * f.log_det() - 0.5 * ss / s2;
}

/// Standardized one-step innovations of the mean-removed series.
[[nodiscard]] inline std::vector<double> sample_innovations(const ArfimaModel& model, std::span<const double> x) {
    validate_arma(model);
    if (x.empty()) throw std::invalid_argument("sample_innovations: empty series");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    std::vector<double> xc(x.begin(), x.end());
    for (auto& v : xc) v -= mean;
    auto w = InnovationsFilter(model, xc.size()).whiten(xc);
    for (auto& v : w) v /= model.sigma;
    return w;
}

}  // namespace ftrend
