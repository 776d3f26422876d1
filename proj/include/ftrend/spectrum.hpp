#pragma once

#include "ftrend/arma_model.hpp"
#include "ftrend/error.hpp"

#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace ftrend {

/// Power on (0, pi], normalized so that the integral of 2 f over (0, pi] is the variance.
struct Spectrum {
    std::vector<double> frequencies;
    std::vector<double> power;
    static constexpr const char* normalization = "integral_0^pi 2 f(w) dw = variance";
};

struct Periodogram {
    std::vector<double> fourier_frequencies;  // 2 pi j / n, j = 1..floor(n/2)
    std::vector<double> ordinates;
    std::size_t n{};

    /// Ordinate mean with the Nyquist ordinate (even n) weighted 1/2; equals the n-1 divisor variance.
    [[nodiscard]] double weighted_mean() const {
        double s = 0.0, w = 0.0;
        for (std::size_t j = 0; j < ordinates.size(); ++j) {
            const double wj = (n % 2 == 0 && j + 1 == n / 2) ? 0.5 : 1.0;
            s += wj * ordinates[j];
            w += wj;
        }
        return s / w;
    }
};

namespace detail {

inline void check_frequencies(std::span<const double> omegas, bool allow_zero) {
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double w = omegas[i];
        if (!std::isfinite(w) || w < 0.0 || w > std::numbers::pi + 1e-12) {
            throw std::invalid_argument("spectral frequencies must lie in (0, pi]");
        }
        if (w == 0.0 && !allow_zero) {
            throw std::domain_error("spectral density is infinite at frequency 0 when d > 0");
        }
        if (i > 0 && !(w > omegas[i - 1])) throw std::invalid_argument("spectral frequencies must be strictly increasing");
    }
}

inline double poly_power(std::span<const double> c, double sign, double w) {
    // |1 + sign * sum c_k e^{-ikw}|^2
    std::complex<double> z = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) z += sign * c[k] * std::polar(1.0, -static_cast<double>(k + 1) * w);
    return std::norm(z);
}

}  // namespace detail

[[nodiscard]] inline std::vector<double> fractional_factor(std::span<const double> omegas, double d) {
    std::vector<double> out(omegas.size(), 1.0);
    if (d == 0.0) return out;
    for (std::size_t i = 0; i < omegas.size(); ++i) out[i] = std::pow(2.0 * std::sin(0.5 * omegas[i]), -2.0 * d);
    return out;
}

/// (sigma^2 / 2 pi) |theta(e^{-iw})|^2 / |phi(e^{-iw})|^2
[[nodiscard]] inline Spectrum arma_spectral_density(const ArfimaModel& m, std::span<const double> omegas) {
    validate_arma(m);
    detail::check_frequencies(omegas, true);
    Spectrum s{{omegas.begin(), omegas.end()}, std::vector<double>(omegas.size())};
    const double scale = m.sigma * m.sigma / (2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        s.power[i] = scale * detail::poly_power(m.ma, 1.0, omegas[i]) / detail::poly_power(m.ar, -1.0, omegas[i]);
    }
    return s;
}

[[nodiscard]] inline Spectrum arfima_spectral_density(const ArfimaModel& m, std::span<const double> omegas) {
    validate(m);
    detail::check_frequencies(omegas, m.d == 0.0);
    ArfimaModel arma = m;
    arma.d = 0.0;
    auto s = arma_spectral_density(arma, omegas);
    auto f = fractional_factor(omegas, m.d);
    for (std::size_t i = 0; i < omegas.size(); ++i) s.power[i] *= f[i];
    return s;
}

/// Raw periodogram |sum_t (x_t - xbar) e^{-i w_j t}|^2 / n at the positive Fourier frequencies.
[[nodiscard]] inline Periodogram periodogram(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 4) throw DataError("periodogram needs at least 4 observations");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> xc(x.begin(), x.end());
    for (auto& v : xc) v -= mean;
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, xc);
    Periodogram p;
    p.n = n;
    for (std::size_t j = 1; j <= n / 2; ++j) {
        p.fourier_frequencies.push_back(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
        p.ordinates.push_back(std::norm(spec[j]) / static_cast<double>(n));
    }
    return p;
}

/**
 * Repeated centred moving average. Out-of-range neighbours are mirrored about
 * the half-sample point (index -1 maps to 0, n maps to n-1).
 */
[[nodiscard]] inline Periodogram smooth_periodogram(const Periodogram& p, int width = 5, int passes = 2) {
    if (width < 1 || width % 2 == 0) throw std::invalid_argument("smoothing width must be a positive odd integer");
    if (passes < 1) throw std::invalid_argument("smoothing passes must be >= 1");
    const auto n = static_cast<std::ptrdiff_t>(p.ordinates.size());
    auto reflect = [n](std::ptrdiff_t j) {
        const std::ptrdiff_t period = 2 * n;
        j %= period;
        if (j < 0) j += period;
        return j < n ? j : period - 1 - j;
    };
    Periodogram out = p;
    const int half = width / 2;
    for (int pass = 0; pass < passes; ++pass) {
        std::vector<double> next(out.ordinates.size());
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = -half; k <= half; ++k) s += out.ordinates[static_cast<std::size_t>(reflect(i + k))];
            next[static_cast<std::size_t>(i)] = s / width;
        }
        out.ordinates = std::move(next);
    }
    return out;
}

/// Fixed divergence grid w_k = k pi / 4096, k = 1..4096.
[[nodiscard]] inline std::vector<double> kl_grid(int points = 4096) {
    std::vector<double> w(static_cast<std::size_t>(points));
    for (int k = 1; k <= points; ++k) w[static_cast<std::size_t>(k - 1)] = k * std::numbers::pi / points;
    return w;
}

/**
 * @brief AR(1) minimizing the Whittle (Itakura-Saito) divergence from a target spectrum.
 *
 * The divergence sum_k [f(w_k)/g(w_k) + log g(w_k)] is taken over the target's
 * own frequencies with equal weights. sigma^2 is profiled out in closed form
 * and phi found by a coarse scan refined with Brent's method.
 */
[[nodiscard]] inline ArfimaModel best_ar1_kl(const Spectrum& target) {
    const auto& w = target.frequencies;
    const auto& f = target.power;
    if (w.empty() || w.size() != f.size()) throw std::invalid_argument("best_ar1_kl: empty or mismatched target spectrum");
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]) || !(f[i] > 0.0) || w[i] <= 0.0) {
            throw std::domain_error("best_ar1_kl: target spectrum must be finite and positive on (0, pi]");
        }
    }
    std::vector<double> cosw(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) cosw[i] = std::cos(w[i]);
    const double nk = static_cast<double>(w.size());
    // g = s2 a(w), a = 1 / (2 pi (1 - 2 phi cos w + phi^2)); s2 = mean(f / a)
    auto profiled = [&](double phi, double* s2_out) {
        double s2 = 0.0, loga = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double inv_a = 2.0 * std::numbers::pi * (1.0 - 2.0 * phi * cosw[i] + phi * phi);
            s2 += f[i] * inv_a;
            loga -= std::log(inv_a);
        }
        s2 /= nk;
        if (s2_out) *s2_out = s2;
        return nk + nk * std::log(s2) + loga;
    };
    const int scan = 400;
    double best_phi = 0.0, best = profiled(0.0, nullptr);
    for (int i = -scan + 1; i < scan; ++i) {
        const double phi = 0.9999 * i / scan;
        const double v = profiled(phi, nullptr);
        if (v < best) {
            best = v;
            best_phi = phi;
        }
    }
    const double step = 0.9999 / scan;
    const double lo = std::max(-0.99999, best_phi - step), hi = std::min(0.99999, best_phi + step);
    auto r = boost::math::tools::brent_find_minima([&](double phi) { return profiled(phi, nullptr); }, lo, hi, 52);
    double s2 = 0.0;
    profiled(r.first, &s2);
    return {{r.first}, {}, 0.0, std::sqrt(s2)};
}

[[nodiscard]] inline ArfimaModel best_ar1_kl(const ArfimaModel& target) {
    return best_ar1_kl(arfima_spectral_density(target, kl_grid()));
}

}  // namespace ftrend
