#include "switchsim/scheduling.hpp"

#include <limits>
#include <stdexcept>

namespace switchsim {

SchedulePick maxweight_pick(std::span<const std::int64_t> q,
                            const std::vector<std::vector<int>>& service_set, RngStream& rng) {
    if (service_set.empty()) throw std::invalid_argument("maxweight: empty service set");
    const std::size_t n = q.size();

    // Single pass with reservoir tie-breaking: the k-th maximizer seen replaces
    // the current pick with probability 1/k, so the result is uniform over the
    // argmax set and the rng is touched only on actual ties.
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    std::size_t chosen = 0;
    int ties = 0;
    for (std::size_t j = 0; j < service_set.size(); ++j) {
        const auto& x = service_set[j];
        if (x.size() != n) throw std::invalid_argument("maxweight: dimension mismatch");
        std::int64_t w = 0;
        for (std::size_t i = 0; i < n; ++i) w += q[i] * x[i];
        if (w > best) {
            best = w;
            chosen = j;
            ties = 1;
        } else if (w == best) {
            ++ties;
            if (rng.uniform_index(static_cast<std::size_t>(ties)) == 0) chosen = j;
        }
    }
    return {chosen, best, ties};
}

ScheduleDecision maxweight(std::span<const std::int64_t> q,
                           const std::vector<std::vector<int>>& service_set, RngStream& rng) {
    const SchedulePick pick = maxweight_pick(q, service_set, rng);
    return {service_set[pick.index], pick.weight, pick.tie_count, pick.index};
}

std::vector<int> maxweight_matching(std::span<const std::int64_t> weights, int N) {
    if (N < 1 || N > 64) throw std::invalid_argument("matching: N outside [1, 64]");
    if (weights.size() != static_cast<std::size_t>(N) * static_cast<std::size_t>(N))
        throw std::invalid_argument("matching: weight matrix size mismatch");

    // Hungarian algorithm with potentials on cost = -weight (maximization).
    // 1-based arrays; the classic shortest-augmenting-path formulation.
    const int n = N;
    std::vector<std::int64_t> u(static_cast<std::size_t>(n) + 1, 0),
        v(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
    auto cost = [&](int i, int j) {
        return -weights[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n) +
                        static_cast<std::size_t>(j - 1)];
    };
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<std::int64_t> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = p[static_cast<std::size_t>(j0)];
            std::int64_t delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const std::int64_t cur = cost(i0, j) - u[static_cast<std::size_t>(i0)] -
                                         v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> perm(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) perm[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
    return perm;
}

std::size_t jsq_pick(std::span<const std::int64_t> q, RngStream& rng) {
    if (q.empty()) throw std::invalid_argument("jsq: no queues");
    std::int64_t shortest = q[0];
    std::size_t chosen = 0;
    int ties = 1;
    for (std::size_t i = 1; i < q.size(); ++i) {
        if (q[i] < shortest) {
            shortest = q[i];
            chosen = i;
            ties = 1;
        } else if (q[i] == shortest) {
            ++ties;
            if (rng.uniform_index(static_cast<std::size_t>(ties)) == 0) chosen = i;
        }
    }
    return chosen;
}

std::vector<std::int64_t> jsq_route(std::span<const std::int64_t> q, std::int64_t a,
                                    RngStream& rng) {
    if (a < 0) throw std::invalid_argument("jsq: negative arrival count");
    std::vector<std::int64_t> out(q.size(), 0);
    out[jsq_pick(q, rng)] = a;
    return out;
}

}  // namespace switchsim
