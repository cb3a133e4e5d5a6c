#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchsim/experiments.hpp"
#include "switchsim/geometry.hpp"
#include "switchsim/model.hpp"

namespace switchsim::verify {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 20260809;
    RunOverrides run;  // horizon/burn_in > 0 override the per-check defaults
    int workers = 1;
};

/// Suites: geometry {1,2,3}, drift {4,6,7}, crp {5,8,11}, ssc {9}, jsq {10}.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opts);
std::vector<CheckResult> run_all(const VerifyOptions& opts);
const std::vector<std::string>& suite_names();

// ---- independent oracles (no shared code with the paths they check) ----

/// Exhaustive N!-permutation maximum of sum_i w[i][perm(i)].
std::int64_t brute_force_matching_weight(const std::vector<std::int64_t>& weights, int N);

/// Projected-gradient solve of min ||x - N xi||, xi >= 0 (fixed iteration count).
Eigen::VectorXd projected_gradient_cone(const Eigen::VectorXd& x, const Eigen::MatrixXd& normals,
                                        int iterations = 100000);

/// Brute-force facet list of the mixture region via candidate normals from
/// point subsets; independent of the incremental-hull construction.
std::vector<Facet> oracle_region_facets(const ChannelModel& channel);

/// Signed margin of x against an explicit facet list (max <c,x> - b).
double facet_margin(const std::vector<Facet>& facets, const Eigen::VectorXd& x);

/// Stationary mean queue length of the exact n=1 switch chain truncated to
/// {0..cap}: MaxWeight serves the largest feasible rate, with a uniform draw
/// over the whole service set when the queue is empty.
double chain_stationary_mean(const DiscretePmf& arrivals, const ChannelModel& channel, int cap);

// ---- reference scenarios used by the acceptance checks ----

ExperimentConfig on_off_n1_config();     // Bernoulli arrivals, on/off channel, nu = 0.8
ExperimentConfig two_queue_pooled_config();  // single state {0, e1, e2}, one tight facet
ExperimentConfig iq_switch_2x2_config();
ExperimentConfig jsq_two_server_config();

}  // namespace switchsim::verify
