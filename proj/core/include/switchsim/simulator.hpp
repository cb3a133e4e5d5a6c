#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "switchsim/geometry.hpp"
#include "switchsim/model.hpp"
#include "switchsim/stats.hpp"

namespace switchsim {

/// Fully determines one simulation run (together with the model and geometry).
struct RunConfig {
    std::uint64_t burn_in = 0;
    std::uint64_t horizon = 0;  // post-burn-in slots; must be >= 10 * batches
    int batches = 20;
    std::uint64_t seed = 1;
    std::vector<int> moment_orders = {1, 2, 3, 4};
    /// Weight vector; for a switch it must lie on every tight facet
    /// (<c_l, w> = b_l within 1e-8 for all l in P).
    Eigen::VectorXd w;
};

struct MomentEstimate {
    int order = 0;
    Estimate perp_K;
    Estimate perp_H;
};

struct DriftEstimates {
    Estimate t1;  // 2 <q_par, s_par - a_par>
    Estimate t2;  // ||a_par - s_par||^2
    Estimate t3;  // ||u_par||^2
    Estimate t4;  // 2 <q_next_par, u_par>
    /// Per-slot t1 - (t2 - t3 + t4); zero in steady state.
    Estimate balance;
};

struct SimRecord {
    Estimate mean_qw;
    Eigen::VectorXd mean_q;
    DriftEstimates drift;
    std::vector<MomentEstimate> perp_moments;     // ordered by moment order
    Eigen::MatrixXd pi_hat;                       // states x |P|; 0x0 for JSQ runs
    std::vector<Estimate> flow_balance;           // per queue, mean of a - (s - u)
    std::uint64_t slots_used = 0;
    std::uint64_t burn_in = 0;
    std::uint64_t seed = 0;
    bool diverging = false;
};

/// One slot of the switch dynamics: observe the channel, schedule under
/// MaxWeight, draw arrivals, apply the queue recursion. Advances `state`.
StepOutcome simulate_slot(const SwitchModel& model, SystemState& state, RngStream& rng);

/// Simulates the switch under MaxWeight and collects steady-state estimates.
/// Requires the scaled arrival mean strictly inside the capacity region.
SimRecord run_switch(const SwitchModel& model, const ConeGeometry& geom,
                     const RunConfig& cfg);

/// Simulates the load-balancing system under JSQ. State-space-collapse probes
/// use the all-queues-equal line (closed-form projection).
SimRecord run_jsq(const LoadBalanceModel& model, const RunConfig& cfg);

}  // namespace switchsim
