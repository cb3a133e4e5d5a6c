#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "switchsim/scheduling.hpp"
#include "switchsim/verify.hpp"

using namespace switchsim;

namespace {

std::vector<std::vector<int>> random_service_set(RngStream& rng, std::size_t count,
                                                 std::size_t n) {
    std::vector<std::vector<int>> set(count, std::vector<int>(n));
    for (auto& x : set)
        for (auto& v : x) v = static_cast<int>(rng.uniform_index(5));
    return set;
}

}  // namespace

TEST_SUITE("scheduling") {

TEST_CASE("maxweight picks the heavier queue") {
    RngStream rng(1);
    const std::vector<std::vector<int>> set = {{1, 0}, {0, 1}};
    const auto d = maxweight(std::vector<std::int64_t>{3, 1}, set, rng);
    CHECK(d.s == std::vector<int>{1, 0});
    CHECK(d.weight == 3);
    CHECK(d.tie_count == 1);
}

TEST_CASE("maxweight breaks ties uniformly") {
    RngStream rng(2);
    const std::vector<std::vector<int>> set = {{1, 0}, {0, 1}};
    int first = 0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        const auto d = maxweight(std::vector<std::int64_t>{2, 2}, set, rng);
        CHECK(d.tie_count == 2);
        if (d.index == 0) ++first;
    }
    CHECK(std::abs(first / static_cast<double>(draws) - 0.5) < 0.02);
}

TEST_CASE("maxweight with zero queue is uniform over the whole set") {
    RngStream rng(3);
    const std::vector<std::vector<int>> set = {{0, 0}, {1, 0}, {0, 1}};
    std::vector<int> counts(3, 0);
    const int draws = 30000;
    for (int t = 0; t < draws; ++t) {
        const auto d = maxweight(std::vector<std::int64_t>{0, 0}, set, rng);
        counts[static_cast<std::size_t>(d.index)]++;
    }
    for (int c : counts)
        CHECK(std::abs(c / static_cast<double>(draws) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("maxweight weight equals a linear scan on large random sets") {
    RngStream rng(4);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 1 + rng.uniform_index(4);
        const auto set = random_service_set(rng, 10000, n);
        std::vector<std::int64_t> q(n);
        for (auto& v : q) v = static_cast<std::int64_t>(rng.uniform_index(1000));
        const auto d = maxweight(q, set, rng);
        std::int64_t best = std::numeric_limits<std::int64_t>::min();
        for (const auto& x : set) {
            std::int64_t w = 0;
            for (std::size_t i = 0; i < n; ++i) w += q[i] * x[i];
            best = std::max(best, w);
        }
        CHECK(d.weight == best);
    }
}

TEST_CASE("maxweight argmax set is scale invariant") {
    const std::vector<std::vector<int>> set = {{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 0}};
    RngStream gen(5);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::int64_t> q(2);
        for (auto& v : q) v = static_cast<std::int64_t>(gen.uniform_index(4));
        for (std::int64_t gamma : {2, 7}) {
            std::vector<std::int64_t> qg = {q[0] * gamma, q[1] * gamma};
            // Tie sets must coincide, so the same rng stream yields the same picks.
            RngStream r1(42 + t), r2(42 + t);
            const auto d1 = maxweight(q, set, r1);
            const auto d2 = maxweight(qg, set, r2);
            CHECK(d1.index == d2.index);
            CHECK(d1.tie_count == d2.tie_count);
        }
    }
}

TEST_CASE("matching worked examples") {
    {
        const std::vector<std::int64_t> w = {5, 1, 2, 4};
        const auto perm = maxweight_matching(w, 2);
        CHECK(perm == std::vector<int>{0, 1});  // identity, weight 9
    }
    {
        const std::vector<std::int64_t> w(9, 0);
        const auto perm = maxweight_matching(w, 3);
        std::vector<int> sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == std::vector<int>{0, 1, 2});  // any permutation, weight 0
    }
}

TEST_CASE("matching weight equals brute force on random instances") {
    RngStream rng(6);
    for (int N : {2, 3, 4}) {
        for (int t = 0; t < 200; ++t) {
            std::vector<std::int64_t> w(static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
            for (auto& v : w) v = static_cast<std::int64_t>(rng.uniform_index(100));
            const auto perm = maxweight_matching(w, N);
            std::int64_t got = 0;
            for (int i = 0; i < N; ++i)
                got += w[static_cast<std::size_t>(i * N + perm[static_cast<std::size_t>(i)])];
            CHECK(got == verify::brute_force_matching_weight(w, N));
        }
    }
}

TEST_CASE("jsq routes the whole batch to a shortest queue") {
    RngStream rng(7);
    CHECK(jsq_route(std::vector<std::int64_t>{3, 1, 2}, 4, rng) ==
          std::vector<std::int64_t>{0, 4, 0});
    CHECK(jsq_route(std::vector<std::int64_t>{3, 1, 2}, 0, rng) ==
          std::vector<std::int64_t>{0, 0, 0});
    CHECK_THROWS_AS(jsq_route(std::vector<std::int64_t>{1}, -1, rng), std::invalid_argument);
}

TEST_CASE("jsq tie break is uniform") {
    RngStream rng(8);
    int first = 0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        const auto a = jsq_route(std::vector<std::int64_t>{1, 1}, 2, rng);
        if (a[0] == 2) ++first;
    }
    CHECK(std::abs(first / static_cast<double>(draws) - 0.5) < 0.02);
}

TEST_CASE("jsq never assigns to a non-minimal queue") {
    RngStream rng(9);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t n = 1 + rng.uniform_index(5);
        std::vector<std::int64_t> q(n);
        for (auto& v : q) v = static_cast<std::int64_t>(rng.uniform_index(6));
        const auto a = jsq_route(q, 3, rng);
        const std::int64_t shortest = *std::min_element(q.begin(), q.end());
        for (std::size_t i = 0; i < n; ++i)
            if (a[i] > 0) CHECK(q[i] == shortest);
    }
}

}  // TEST_SUITE
