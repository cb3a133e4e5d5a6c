#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace switchsim {

/// Heavy-traffic value of the tight-facet-weighted mean queue length:
/// (1/2eps) * [ 1^T (H o Sigma_a) 1 + 1^T ((C^T C)^{-1} o Sigma_B) 1 ],
/// with o the entrywise product.
double ht_limit(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Sigma_a,
                const Eigen::MatrixXd& gram_inv, const Eigen::MatrixXd& Sigma_B, double eps);

/// Policy-independent lower bound on E<q, c> when a single facet is tight:
/// (1/(2 eps b)) (c^T Sigma_a c + sigma_B^2) - (1-eps) b_max / 2.
double ulb(const Eigen::VectorXd& c, double b, const Eigen::MatrixXd& Sigma_a, double sigma_B2,
           double b_max, double eps);

struct GapReport {
    double gap = 0.0;        // sim_mean - ulb_value
    double log_ratio = 0.0;  // gap / log(1/eps)
    bool violation = false;  // sim_mean below the bound beyond 3 CI half-widths
};

GapReport crp_gap_bound(double ulb_value, double sim_mean, double sim_ci, double eps);

struct SscBound {
    double value = 0.0;
    bool saturated = false;  // overflowed; value clamped
};

/// Switch moment bound: (8 n a^2 / d)^r + (8 sqrt(n) a)^r ((8 sqrt(n) a + d)/d)^r r!.
SscBound ssc_bound_Rr(int n, double alpha, double delta, int r);

/// JSQ moment bound: (6 n a^2 / d)^r + (8 a sqrt(n))^r ((4 a + d)/d) r!.
/// Note the third factor carries no exponent here, unlike the switch bound.
SscBound ssc_bound_jsq(int n, double alpha, double delta, int r);

/// Heavy-traffic value of E[sum q] under JSQ: (sigma_a^2 + sum_i sigma_s_i^2) / (2 eps).
double jsq_limit(double sigma_a2, const Eigen::VectorXd& sigma_s2, double eps);

struct LogFit {
    double intercept = 0.0;  // a in residual ~ a + b log(1/eps)
    double slope = 0.0;      // b
    double max_ratio = 0.0;  // max_j residual_j / log(1/eps_j)
    double log_model_sse = 0.0;
    double inv_model_coef = 0.0;  // c in the competing residual ~ c / eps
    double inv_model_sse = 0.0;
};

/// Least-squares fit of the residual against log(1/eps), with the competing
/// c/eps model fitted alongside for comparison. Needs >= 3 distinct eps.
LogFit fit_log_error(std::span<const double> eps, std::span<const double> residual);

struct TheoryPoint {
    double eps = 0.0;
    double ht_limit = 0.0;
    std::optional<double> ulb;        // CRP case only (|P| = 1)
    std::optional<double> jsq_limit;  // load-balancing runs only
    std::vector<std::pair<int, double>> R_r;  // moment order -> bound
};

struct TheoryReport {
    std::vector<TheoryPoint> points;  // one per eps, grid order
    std::optional<LogFit> beta_fit;
    double b_max = 0.0;
};

}  // namespace switchsim
