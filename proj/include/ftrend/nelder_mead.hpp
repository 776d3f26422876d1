#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace ftrend {

struct SimplexOptions {
    std::vector<double> lower;  // empty = unbounded
    std::vector<double> upper;
    double f_tol = 1e-12;       // spread of simplex values, relative to |f_best| + f_tol
    double x_tol = 1e-9;        // max vertex distance from the best vertex
    int max_evals = 4000;
};

struct SimplexResult {
    std::vector<double> x;
    double fx = std::numeric_limits<double>::infinity();
    int evals = 0;
    bool converged = false;
};

/**
 * @brief Nelder-Mead simplex minimization with projection onto a box.
 *
 * Trial points are clipped to [lower, upper] before evaluation, so the
 * objective is never called outside the box. Non-finite objective values are
 * treated as +inf.
 */
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, const std::vector<double>& step,
                                 const SimplexOptions& opt = {}) {
    const std::size_t n = x0.size();
    const bool boxed = !opt.lower.empty();
    auto project = [&](std::vector<double>& x) {
        if (!boxed) return;
        for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], opt.lower[i], opt.upper[i]);
    };
    SimplexResult res;
    auto eval = [&](std::vector<double>& x) {
        project(x);
        ++res.evals;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    project(pts[0]);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = pts[i + 1];
        p[i] += step[i];
        // Reflect the initial step inward when it would leave the box.
        if (boxed && p[i] > opt.upper[i]) p[i] = pts[0][i] - step[i];
        if (boxed && p[i] < opt.lower[i]) p[i] = pts[0][i] + step[i];
    }
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (res.evals < opt.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        double spread = fv[worst] - fv[best];
        double size = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(pts[i][j] - pts[best][j]));
        }
        if ((std::isfinite(spread) && spread <= opt.f_tol * (std::abs(fv[best]) + opt.f_tol)) ||
            size <= opt.x_tol) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
        }
        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - pts[worst][j]);
        double fr = eval(xr);
        if (fr < fv[best]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
            double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            pts[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        for (std::size_t j = 0; j < n; ++j) {
            xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j])
                            : centroid[j] + 0.5 * (pts[worst][j] - centroid[j]);
        }
        double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            pts[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
            fv[i] = eval(pts[i]);
        }
    }
    auto it = std::min_element(fv.begin(), fv.end());
    res.x = pts[static_cast<std::size_t>(it - fv.begin())];
    res.fx = *it;
    return res;
}

}  // namespace ftrend
