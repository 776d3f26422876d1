#pragma once

#include "ftrend/arma_model.hpp"
#include "ftrend/rng.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace ftrend {

/// psi_k of (1 - B)^{-d}: psi_0 = 1, psi_k = psi_{k-1} (k - 1 + d) / k.
[[nodiscard]] inline std::vector<double> fractional_weights(double d, std::size_t count) {
    std::vector<double> psi(count, 0.0);
    if (count == 0) return psi;
    psi[0] = 1.0;
    for (std::size_t k = 1; k < count; ++k) psi[k] = psi[k - 1] * (static_cast<double>(k) - 1.0 + d) / static_cast<double>(k);
    return psi;
}

/// Linear convolution by FFT, returning the first a.size() terms of a * b.
[[nodiscard]] inline std::vector<double> fft_convolve_head(const std::vector<double>& a, const std::vector<double>& b) {
    std::size_t len = 1;
    while (len < a.size() + b.size()) len <<= 1;
    std::vector<double> pa(a), pb(b);
    pa.resize(len, 0.0);
    pb.resize(len, 0.0);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> fa, fb;
    fft.fwd(fa, pa);
    fft.fwd(fb, pb);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    std::vector<double> out;
    fft.inv(out, fa);
    out.resize(a.size());
    return out;
}

/**
 * @brief Gaussian ARFIMA sample path of length n.
 *
 * The ARMA recursion starts from zeros and discards `burn_in` values. For
 * d > 0 the ARMA output is passed through the (1 - B)^{-d} weights truncated at
 * max(10 n, 1000) lags; that many extra ARMA values precede the returned
 * window, so every output uses the full truncated filter.
 */
[[nodiscard]] inline std::vector<double> simulate(const ArfimaModel& m, std::size_t n, std::uint64_t seed,
                                                  std::size_t burn_in = 500) {
    validate(m);
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
    const std::size_t trunc = m.d > 0.0 ? std::max<std::size_t>(10 * n, 1000) : 0;
    const std::size_t total = burn_in + trunc + n;
    auto gen = make_stream(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> e(total), x(total);
    for (auto& v : e) v = normal(gen);
    const std::size_t p = m.ar.size(), q = m.ma.size();
    for (std::size_t t = 0; t < total; ++t) {
        double v = e[t];
        for (std::size_t j = 1; j <= std::min(q, t); ++j) v += m.ma[j - 1] * e[t - j];
        for (std::size_t i = 1; i <= std::min(p, t); ++i) v += m.ar[i - 1] * x[t - i];
        x[t] = v;
    }
    std::vector<double> out;
    if (m.d > 0.0) {
        std::vector<double> u(x.begin() + static_cast<std::ptrdiff_t>(burn_in), x.end());
        auto y = fft_convolve_head(u, fractional_weights(m.d, trunc + 1));
        out.assign(y.end() - static_cast<std::ptrdiff_t>(n), y.end());
    } else {
        out.assign(x.end() - static_cast<std::ptrdiff_t>(n), x.end());
    }
    // Scaling by sigma last keeps the path exactly proportional to sigma for a fixed seed.
    for (auto& v : out) v *= m.sigma;
    return out;
}

}  // namespace ftrend
