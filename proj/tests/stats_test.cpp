#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "switchsim/rng.hpp"
#include "switchsim/stats.hpp"

using namespace switchsim;

TEST_SUITE("stats") {

TEST_CASE("batch means of a constant series") {
    std::vector<double> series(1000, 3.25);
    const Estimate e = batch_means(series, 10);
    CHECK(e.mean == doctest::Approx(3.25).epsilon(1e-15));
    CHECK(e.ci_half_width == 0.0);
}

TEST_CASE("batch means of an alternating series") {
    std::vector<double> series(2000);
    for (std::size_t i = 0; i < series.size(); ++i) series[i] = static_cast<double>(i % 2);
    const Estimate e = batch_means(series, 20);
    CHECK(e.mean == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("batch means of uniform noise hits the CLT band") {
    RngStream rng(11);
    std::vector<double> series(1000000);
    for (auto& v : series) v = rng.uniform01();
    const Estimate e = batch_means(series, 20);
    CHECK(std::abs(e.mean - 0.5) < 0.01);
    CHECK(e.ci_half_width > 0.0);
    CHECK(e.ci_half_width < 0.01);
}

TEST_CASE("batch series input validation") {
    CHECK_THROWS_AS(BatchSeries(100, 1), std::invalid_argument);
    CHECK_THROWS_AS(BatchSeries(5, 10), std::invalid_argument);
}

TEST_CASE("student t quantiles match reference values") {
    CHECK(student_t_975(1) == doctest::Approx(12.7062).epsilon(1e-4));
    CHECK(student_t_975(10) == doctest::Approx(2.22814).epsilon(1e-4));
    CHECK(student_t_975(19) == doctest::Approx(2.09302).epsilon(1e-4));
    CHECK_THROWS_AS(student_t_975(0), std::invalid_argument);
}

TEST_CASE("kahan summation keeps long accumulations exact") {
    KahanSum k;
    double naive = 0.0;
    for (int i = 0; i < 10000000; ++i) {
        k.add(0.1);
        naive += 0.1;
    }
    CHECK(std::abs(k.value() - 1e6) < 1e-7);
    CHECK(std::abs(k.value() - 1e6) <= std::abs(naive - 1e6));
}

TEST_CASE("rng uniform index is unbiased across a small range") {
    RngStream rng(12);
    int counts[3] = {0, 0, 0};
    const int draws = 30000;
    for (int t = 0; t < draws; ++t) counts[rng.uniform_index(3)]++;
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(draws) - 1.0 / 3.0) < 0.02);
}

}  // TEST_SUITE
