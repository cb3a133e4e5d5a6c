#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchsim/pmf.hpp"
#include "switchsim/rng.hpp"

namespace switchsim {

/// Explicit joint law over arrival vectors, for correlated per-queue arrivals.
struct JointArrivalPmf {
    std::vector<std::vector<int>> atoms;  // each of length n
    std::vector<double> probs;
};

enum class ArrivalKind { PerQueueIndependent, SingleStream };

/// Arrival process for one slot: either an independent (or jointly specified)
/// vector of per-queue arrivals, or a single aggregate stream.
class ArrivalModel {
  public:
    static ArrivalModel per_queue(std::vector<DiscretePmf> pmfs,
                                  std::optional<ArrivalFamily> family = {});
    static ArrivalModel joint(JointArrivalPmf table);
    static ArrivalModel single_stream(DiscretePmf pmf,
                                      std::optional<ArrivalFamily> family = {});

    ArrivalKind kind() const { return kind_; }
    /// Number of queues fed (1 for a single stream).
    int dimension() const { return n_; }
    bool is_joint() const { return joint_.has_value(); }

    Eigen::VectorXd mean() const;
    /// Covariance of the slot arrival vector (diagonal unless jointly specified).
    Eigen::MatrixXd covariance() const;
    int a_max() const { return a_max_; }

    bool has_family() const { return family_.has_value(); }
    const ArrivalFamily& family() const;

    /// Draw one slot. `out` has length dimension() (length 1 for single stream).
    void sample(RngStream& rng, std::span<std::int64_t> out) const;

    const std::vector<DiscretePmf>& queue_pmfs() const { return pmfs_; }

  private:
    ArrivalModel() = default;

    ArrivalKind kind_ = ArrivalKind::PerQueueIndependent;
    int n_ = 0;
    int a_max_ = 0;
    std::vector<DiscretePmf> pmfs_;  // per queue, or a single entry for a stream
    std::optional<JointArrivalPmf> joint_;
    std::vector<double> joint_cdf_;
    std::optional<ArrivalFamily> family_;
};

/// Channel-state process: finite state space with pmf psi, and one finite set
/// of integer service vectors per state. Every set must contain the
/// coordinate-axis projections of each of its elements.
class ChannelModel {
  public:
    ChannelModel(std::vector<std::string> state_names, std::vector<double> psi,
                 std::vector<std::vector<std::vector<int>>> service_sets);

    int n() const { return n_; }
    int num_states() const { return static_cast<int>(psi_.size()); }
    int s_max() const { return s_max_; }
    const std::vector<double>& psi() const { return psi_; }
    const std::vector<std::string>& state_names() const { return names_; }
    const std::vector<std::vector<int>>& service_set(int m) const {
        return sets_[static_cast<std::size_t>(m)];
    }

    int sample_state(RngStream& rng) const {
        const double u = rng.uniform01();
        for (std::size_t m = 0; m + 1 < cdf_.size(); ++m)
            if (u < cdf_[m]) return static_cast<int>(m);
        return static_cast<int>(cdf_.size()) - 1;
    }

  private:
    int n_ = 0;
    int s_max_ = 0;
    std::vector<std::string> names_;
    std::vector<double> psi_;
    std::vector<double> cdf_;
    std::vector<std::vector<std::vector<int>>> sets_;
};

/// Generalized switch: n queues, per-queue arrivals, channel-dependent service sets.
struct SwitchModel {
    int n;
    ArrivalModel arrival;  // per-queue kind
    ChannelModel channel;

    SwitchModel(ArrivalModel arrival_in, ChannelModel channel_in);
};

/// Load-balancing system: one arrival stream dispatched to n queues, each with
/// its own independent bounded integer service law.
struct LoadBalanceModel {
    int n;
    ArrivalModel arrival;  // single-stream kind
    std::vector<DiscretePmf> service;

    LoadBalanceModel(int n_in, ArrivalModel arrival_in, std::vector<DiscretePmf> service_in);

    double mu_sigma() const;
    Eigen::VectorXd mu() const;
    Eigen::VectorXd sigma_s2() const;
    int s_max() const;
};

struct SystemState {
    std::vector<std::int64_t> q;
    std::uint64_t slot = 0;
};

struct StepOutcome {
    std::vector<std::int64_t> a;
    int m = 0;
    std::vector<std::int64_t> s;
    std::vector<std::int64_t> u;
    std::vector<std::int64_t> q_next;
};

/// One slot draw from the arrival model (vector of length n, or length 1).
std::vector<std::int64_t> sample_arrivals(const ArrivalModel& model, RngStream& rng);

struct StepResult {
    std::vector<std::int64_t> q_next;
    std::vector<std::int64_t> u;
};

/// Queue update: q_next = max(q + a - s, 0), u = max(s - q - a, 0), exactly in
/// integer arithmetic. Throws on dimension mismatch.
StepResult step(std::span<const std::int64_t> q, std::span<const std::int64_t> a,
                std::span<const std::int64_t> s);

/// In-place variant used by the simulation loop.
void step_into(std::span<const std::int64_t> q, std::span<const std::int64_t> a,
               std::span<const std::int64_t> s, std::span<std::int64_t> q_next,
               std::span<std::int64_t> u);

/// Re-target the arrival means for the heavy-traffic parametrization:
/// per-queue models get mean (1-eps)*nu, a single stream gets mean nu[0]-eps.
/// Requires a parametric family on the base model; eps = 0 is rejected.
ArrivalModel scale_to_heavy_traffic(const ArrivalModel& base, const Eigen::VectorXd& nu,
                                    double eps);

/// Input-queued switch preset: n = N^2 queues, a single channel state whose
/// service set is all NxN permutation matrices (flattened) together with the
/// coordinate-axis projections of each. Guarded at N <= 6.
SwitchModel make_iq_switch(int N, const ArrivalFamily& family);

/// Service vectors of the input-queued switch preset, without the arrival part.
std::vector<std::vector<int>> iq_switch_service_set(int N);

}  // namespace switchsim
