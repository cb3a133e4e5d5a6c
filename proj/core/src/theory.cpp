#include "switchsim/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "switchsim/errors.hpp"

namespace switchsim {

namespace {

double hadamard_total(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("theory: Hadamard operand shape mismatch");
    return A.cwiseProduct(B).sum();
}

double factorial(int r) {
    double f = 1.0;
    for (int i = 2; i <= r; ++i) f *= i;
    return f;
}

}  // namespace

double ht_limit(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Sigma_a,
                const Eigen::MatrixXd& gram_inv, const Eigen::MatrixXd& Sigma_B, double eps) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("ht_limit: eps outside (0,1)");
    const double arrivals = hadamard_total(H, Sigma_a);
    const double service = hadamard_total(gram_inv, Sigma_B);
    const double value = (arrivals + service) / (2.0 * eps);
    if (value < -1e-12) throw NumericalError("ht_limit: negative value");
    return value < 0.0 ? 0.0 : value;
}

double ulb(const Eigen::VectorXd& c, double b, const Eigen::MatrixXd& Sigma_a, double sigma_B2,
           double b_max, double eps) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("ulb: eps outside (0,1)");
    if (b <= 0.0) throw std::invalid_argument("ulb: b must be positive");
    const double quad = c.dot(Sigma_a * c);
    return (quad + sigma_B2) / (2.0 * eps * b) - (1.0 - eps) * b_max / 2.0;
}

GapReport crp_gap_bound(double ulb_value, double sim_mean, double sim_ci, double eps) {
    GapReport r;
    r.gap = sim_mean - ulb_value;
    r.log_ratio = r.gap / std::log(1.0 / eps);
    r.violation = sim_mean < ulb_value - 3.0 * sim_ci;
    return r;
}

namespace {

// Iterated multiplication keeps integer-valued bounds bit-exact up to 2^53,
// unlike std::pow.
double pow_iter(double base, int r) {
    double v = 1.0;
    for (int i = 0; i < r; ++i) v *= base;
    return v;
}

SscBound guarded_bound(double base1, double base2, double base3_pow, int r, bool third_pow_r) {
    if (r < 1) throw std::invalid_argument("ssc bound: r must be >= 1");
    const double t1 = pow_iter(base1, r);
    const double t2 = pow_iter(base2, r) * (third_pow_r ? pow_iter(base3_pow, r) : base3_pow) *
                      factorial(r);
    const double v = t1 + t2;
    if (!std::isfinite(v)) return {std::numeric_limits<double>::max(), true};
    return {v, false};
}

}  // namespace

SscBound ssc_bound_Rr(int n, double alpha, double delta, int r) {
    if (delta <= 0.0) throw std::invalid_argument("ssc bound: delta must be positive");
    const double rootn = std::sqrt(static_cast<double>(n));
    return guarded_bound(8.0 * n * alpha * alpha / delta, 8.0 * rootn * alpha,
                         (8.0 * rootn * alpha + delta) / delta, r, /*third_pow_r=*/true);
}

SscBound ssc_bound_jsq(int n, double alpha, double delta, int r) {
    if (delta <= 0.0) throw std::invalid_argument("ssc bound: delta must be positive");
    const double rootn = std::sqrt(static_cast<double>(n));
    return guarded_bound(6.0 * n * alpha * alpha / delta, 8.0 * alpha * rootn,
                         (4.0 * alpha + delta) / delta, r, /*third_pow_r=*/false);
}

double jsq_limit(double sigma_a2, const Eigen::VectorXd& sigma_s2, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("jsq_limit: eps must be positive");
    return (sigma_a2 + sigma_s2.sum()) / (2.0 * eps);
}

LogFit fit_log_error(std::span<const double> eps, std::span<const double> residual) {
    const std::size_t m = eps.size();
    if (m < 3 || residual.size() != m)
        throw std::invalid_argument("fit: need >= 3 (eps, residual) points");
    for (std::size_t i = 0; i < m; ++i) {
        if (eps[i] <= 0.0 || eps[i] >= 1.0) throw std::invalid_argument("fit: eps outside (0,1)");
        if (residual[i] < 0.0) throw std::invalid_argument("fit: residuals must be nonnegative");
        for (std::size_t j = i + 1; j < m; ++j)
            if (eps[i] == eps[j]) throw std::invalid_argument("fit: eps values must be distinct");
    }

    LogFit fit;
    // residual ~ a + b * log(1/eps), ordinary least squares.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(1.0 / eps[i]);
        sx += x;
        sy += residual[i];
        sxx += x * x;
        sxy += x * residual[i];
    }
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(1.0 / eps[i]);
        const double e = residual[i] - (fit.intercept + fit.slope * x);
        fit.log_model_sse += e * e;
        fit.max_ratio = std::max(fit.max_ratio, residual[i] / x);
    }

    // Competing polynomial error model residual ~ c / eps (through the origin).
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = 1.0 / eps[i];
        num += x * residual[i];
        den += x * x;
    }
    fit.inv_model_coef = num / den;
    for (std::size_t i = 0; i < m; ++i) {
        const double e = residual[i] - fit.inv_model_coef / eps[i];
        fit.inv_model_sse += e * e;
    }
    return fit;
}

}  // namespace switchsim
