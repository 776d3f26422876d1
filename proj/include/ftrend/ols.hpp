#pragma once

#include "ftrend/error.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>

namespace ftrend {

struct OlsResult {
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
    double rss{};
    double condition{};
};

/// Condition number of X from the singular values of its triangular factor.
[[nodiscard]] inline double triangular_condition(const Eigen::MatrixXd& r) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / s(s.size() - 1);
}

/**
 * @brief Least squares by column-pivoted Householder QR.
 *
 * Throws NumericalError("degenerate design") when the condition number of X
 * exceeds max_condition.
 */
[[nodiscard]] inline OlsResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   double max_condition = 1e10) {
    if (x.rows() != y.size()) throw std::invalid_argument("ols: row count mismatch");
    if (x.rows() < x.cols()) throw NumericalError("degenerate design: fewer rows than columns");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::Index k = x.cols();
    Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const double cond = triangular_condition(r);
    if (!(cond <= max_condition)) {
        throw NumericalError("degenerate design: condition number " + std::to_string(cond) +
                             " exceeds " + std::to_string(max_condition));
    }
    OlsResult out;
    out.coef = qr.solve(y);
    out.residuals = y - x * out.coef;
    out.rss = out.residuals.squaredNorm();
    out.condition = cond;
    return out;
}

}  // namespace ftrend
