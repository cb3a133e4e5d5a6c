#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "switchsim/rng.hpp"

namespace switchsim {

struct ScheduleDecision {
    std::vector<int> s;          // chosen service vector
    std::int64_t weight = 0;     // <q, s>
    int tie_count = 1;           // number of maximizers
    std::size_t index = 0;       // position of s in the service set
};

struct SchedulePick {
    std::size_t index = 0;
    std::int64_t weight = 0;
    int tie_count = 1;
};

/// MaxWeight argmax without copying the chosen vector (simulation hot path).
SchedulePick maxweight_pick(std::span<const std::int64_t> q,
                            const std::vector<std::vector<int>>& service_set, RngStream& rng);

/// MaxWeight over a finite service set: uniform random element of
/// argmax_x <q, x>. Exact integer comparisons; the rng is consumed only when
/// there is an actual tie.
ScheduleDecision maxweight(std::span<const std::int64_t> q,
                           const std::vector<std::vector<int>>& service_set, RngStream& rng);

/// Maximum-weight perfect matching on an N x N nonnegative weight matrix
/// (row-major), cubic time. perm[i] is the column matched to row i.
/// Tie-breaking follows solver order and is deterministic.
std::vector<int> maxweight_matching(std::span<const std::int64_t> weights, int N);

/// Join-the-shortest-queue: the whole batch of `a` jobs goes to one queue of
/// minimal length, ties broken uniformly at random.
std::vector<std::int64_t> jsq_route(std::span<const std::int64_t> q, std::int64_t a,
                                    RngStream& rng);

/// Index-only variant used by the simulation loop.
std::size_t jsq_pick(std::span<const std::int64_t> q, RngStream& rng);

}  // namespace switchsim
