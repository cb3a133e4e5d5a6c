#include <doctest.h>

#include <cmath>

#include "switchsim/errors.hpp"
#include "switchsim/experiments.hpp"
#include "switchsim/geometry.hpp"
#include "switchsim/model.hpp"
#include "switchsim/simulator.hpp"
#include "switchsim/theory.hpp"
#include "switchsim/verify.hpp"

using namespace switchsim;

namespace {

Eigen::MatrixXd scalar(double v) {
    Eigen::MatrixXd m(1, 1);
    m << v;
    return m;
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("ht_limit scalar instantiation") {
    CHECK(ht_limit(scalar(1.0), scalar(0.25), scalar(1.0), scalar(0.16), 0.1) ==
          doctest::Approx((0.25 + 0.16) / 0.2).epsilon(1e-14));
    CHECK(ht_limit(scalar(1.0), scalar(0.0), scalar(1.0), scalar(0.0), 0.3) == 0.0);
    CHECK_THROWS_AS(ht_limit(scalar(1.0), scalar(0.1), scalar(1.0), scalar(0.0), 0.0),
                    std::invalid_argument);
}

TEST_CASE("ht_limit scales exactly like 1/eps") {
    const double eps = 0.12;
    const double v1 = ht_limit(scalar(1.0), scalar(0.21), scalar(1.0), scalar(0.05), eps);
    const double v2 = ht_limit(scalar(1.0), scalar(0.21), scalar(1.0), scalar(0.05), eps / 2.0);
    CHECK(v2 == 2.0 * v1);  // exact in floating point (scaling by powers of two)
}

TEST_CASE("ht_limit reproduces the input-queued-switch closed form") {
    const int N = 2;
    const ArrivalFamily fam{ArrivalFamily::Kind::Bernoulli};
    const SwitchModel iq = make_iq_switch(N, fam);
    const CapacityRegion region = make_iq_switch_region(N);
    const ConeGeometry geom(region, iq.channel, Eigen::VectorXd::Constant(N * N, 1.0 / N));

    const double eps = 0.05;
    const double lambda = (1.0 - eps) / N;
    const double sigma2 = lambda * (1.0 - lambda);
    const Eigen::MatrixXd Sigma_a = sigma2 * Eigen::MatrixXd::Identity(N * N, N * N);

    // By hand: independent entries give 1^T (H o Sigma_a) 1 = sigma2 * tr(H),
    // and tr(H) = rank(C) = 2N - 1.
    const double hand = sigma2 * (2.0 * N - 1.0);
    CHECK((geom.H().cwiseProduct(Sigma_a)).sum() == doctest::Approx(hand).epsilon(1e-12));

    const double ht = ht_limit(geom.H(), Sigma_a, geom.gram_inv(), geom.spectrum().sigma_B, eps);
    // Sum form: E[sum q] = ht / nu.  Matches (1 - 1/(2N)) * sum sigma^2 / eps.
    const double sum_form = ht / (1.0 / N);
    const double closed_form = (1.0 - 1.0 / (2.0 * N)) * (N * N * sigma2) / eps;
    CHECK(sum_form == doctest::Approx(closed_form).epsilon(1e-12));
}

TEST_CASE("ht_limit is invariant to the independent-subset choice") {
    // Three facet normals with c3 in span{c1, c2}; per-state maxima realized by
    // common maximizer points, as in the mixture geometry.
    RngStream rng(31);
    for (int t = 0; t < 20; ++t) {
        const int n = 3;
        Eigen::VectorXd c1(n), c2(n);
        for (int i = 0; i < n; ++i) {
            c1[i] = rng.uniform01() + 0.1;
            c2[i] = rng.uniform01() + 0.1;
        }
        c1.normalize();
        c2.normalize();
        Eigen::VectorXd c3 = (0.3 + rng.uniform01()) * c1 + (0.3 + rng.uniform01()) * c2;
        c3.normalize();

        const int states = 3;
        std::vector<double> psi = {0.5, 0.3, 0.2};
        std::vector<Eigen::VectorXd> maximizers;
        for (int m = 0; m < states; ++m) {
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) x[i] = rng.uniform01() * 3.0;
            maximizers.push_back(x);
        }
        auto sigma_B_for = [&](const std::vector<Eigen::VectorXd>& cs) {
            const int k = static_cast<int>(cs.size());
            Eigen::MatrixXd b_ml(states, k);
            for (int m = 0; m < states; ++m)
                for (int j = 0; j < k; ++j) b_ml(m, j) = cs[static_cast<std::size_t>(j)].dot(maximizers[static_cast<std::size_t>(m)]);
            Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
            for (int m = 0; m < states; ++m) mean += psi[static_cast<std::size_t>(m)] * b_ml.row(m).transpose();
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
            for (int m = 0; m < states; ++m) {
                const Eigen::VectorXd d = b_ml.row(m).transpose() - mean;
                cov += psi[static_cast<std::size_t>(m)] * d * d.transpose();
            }
            return cov;
        };
        auto value_for = [&](const std::vector<Eigen::VectorXd>& cs) {
            Eigen::MatrixXd C(n, static_cast<Eigen::Index>(cs.size()));
            for (std::size_t j = 0; j < cs.size(); ++j) C.col(static_cast<Eigen::Index>(j)) = cs[j];
            const Eigen::MatrixXd H = projection_matrix_H(C);
            const Eigen::MatrixXd gram_inv =
                (C.transpose() * C).llt().solve(Eigen::MatrixXd::Identity(C.cols(), C.cols()));
            Eigen::MatrixXd Sigma_a = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i) Sigma_a(i, i) = 0.2 + 0.05 * i;
            return ht_limit(H, Sigma_a, gram_inv, sigma_B_for(cs), 0.1);
        };
        const double v12 = value_for({c1, c2});
        const double v13 = value_for({c1, c3});
        const double v23 = value_for({c2, c3});
        CHECK(v12 == doctest::Approx(v13).epsilon(1e-8));
        CHECK(v12 == doctest::Approx(v23).epsilon(1e-8));
    }
}

TEST_CASE("ulb worked examples") {
    Eigen::VectorXd c(1);
    c << 1.0;
    CHECK(ulb(c, 1.0, scalar(0.25), 0.0, 1.0, 0.1) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(ulb(c, 1.0, scalar(0.0), 0.0, 1.0, 0.25) == doctest::Approx(-0.375).epsilon(1e-12));
    // eps -> 1: the b_max correction vanishes.
    CHECK(ulb(c, 2.0, scalar(0.4), 0.1, 5.0, 1.0 - 1e-12) ==
          doctest::Approx((0.4 + 0.1) / (2.0 * 2.0)).epsilon(1e-6));
}

TEST_CASE("ulb monotonicity") {
    Eigen::VectorXd c(1);
    c << 1.0;
    RngStream rng(32);
    for (int t = 0; t < 100; ++t) {
        const double eps = 0.05 + 0.9 * rng.uniform01();
        const double b = 0.2 + rng.uniform01();
        const double va = rng.uniform01();
        const double s1 = rng.uniform01(), s2 = s1 + rng.uniform01();
        const double m1 = rng.uniform01(), m2 = m1 + rng.uniform01();
        CHECK(ulb(c, b, scalar(va), s1, m1, eps) <= ulb(c, b, scalar(va), s2, m1, eps));
        CHECK(ulb(c, b, scalar(va), s1, m2, eps) <= ulb(c, b, scalar(va), s1, m1, eps));
    }
}

TEST_CASE("crp gap report") {
    const auto zero = crp_gap_bound(2.0, 2.0, 0.1, 0.1);
    CHECK(zero.gap == doctest::Approx(0.0));
    CHECK_FALSE(zero.violation);

    const auto half = crp_gap_bound(1.0, 1.5, 0.1, std::exp(-1.0));
    CHECK(half.log_ratio == doctest::Approx(0.5).epsilon(1e-12));

    const auto bad = crp_gap_bound(5.0, 2.0, 0.1, 0.1);
    CHECK(bad.violation);
}

TEST_CASE("lower-bound gap ratios stay in a narrow band across a sweep") {
    SwitchSetup setup = build_switch_setup(verify::on_off_n1_config());
    const Facet& f = setup.geometry.region().facet(0);
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    int idx = 0;
    for (double eps : {0.2, 0.1, 0.05}) {
        RunConfig rc;
        rc.burn_in = 100000;
        rc.horizon = static_cast<std::uint64_t>(1e5 / (eps * eps));
        rc.batches = 20;
        rc.seed = 9000 + idx++;
        rc.w = setup.geometry.nu();
        SwitchModel scaled(scale_to_heavy_traffic(setup.model.arrival, setup.geometry.nu(), eps),
                           setup.model.channel);
        const SimRecord rec = run_switch(scaled, setup.geometry, rc);
        const double ulb_v = ulb(f.c, f.b, scaled.arrival.covariance(),
                                 setup.geometry.spectrum().sigma_B(0, 0),
                                 setup.geometry.spectrum().b_max, eps);
        // w = b*c on this model, so the c-weighted mean is mean_qw / b.
        const GapReport gap = crp_gap_bound(ulb_v, rec.mean_qw.mean / f.b,
                                            rec.mean_qw.ci_half_width / f.b, eps);
        CHECK_FALSE(gap.violation);
        rmin = std::min(rmin, gap.log_ratio);
        rmax = std::max(rmax, gap.log_ratio);
    }
    CHECK(rmax <= 3.0 * rmin);
}

TEST_CASE("switch moment bound arithmetic") {
    CHECK(ssc_bound_Rr(1, 1.0, 1.0, 1).value == doctest::Approx(80.0));
    CHECK(ssc_bound_Rr(1, 1.0, 1.0, 2).value == doctest::Approx(10432.0));
    for (int r = 1; r < 6; ++r)
        CHECK(ssc_bound_Rr(2, 1.5, 0.4, r).value < ssc_bound_Rr(2, 1.5, 0.4, r + 1).value);
    CHECK_THROWS_AS(ssc_bound_Rr(1, 1.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("switch moment bound matches exact integer evaluation") {
    // With delta = 1 and square n every term is an integer; parameter ranges
    // chosen so the exact value stays below 2^53 and the double is bit-exact.
    struct Params {
        int n, alpha, r_max;
    };
    for (const Params p : {Params{1, 1, 6}, Params{1, 2, 4}, Params{4, 1, 4}}) {
        const unsigned long long rootn = p.n == 1 ? 1 : 2;
        unsigned long long fact = 1;
        for (int r = 1; r <= p.r_max; ++r) {
            fact *= static_cast<unsigned long long>(r);
            unsigned long long t1 = 1, t2 = 1, t3 = 1;
            const unsigned long long b1 = 8ull * static_cast<unsigned long long>(p.n) *
                                          static_cast<unsigned long long>(p.alpha) *
                                          static_cast<unsigned long long>(p.alpha);
            const unsigned long long b2 = 8ull * rootn * static_cast<unsigned long long>(p.alpha);
            const unsigned long long b3 = b2 + 1ull;
            for (int i = 0; i < r; ++i) {
                t1 *= b1;
                t2 *= b2;
                t3 *= b3;
            }
            const unsigned long long exact = t1 + t2 * t3 * fact;
            REQUIRE(exact < (1ull << 53));
            CHECK(ssc_bound_Rr(p.n, p.alpha, 1.0, r).value == static_cast<double>(exact));
        }
    }
    // Same identity for the jsq bound at scalar parameters.
    unsigned long long fact = 1;
    for (int r = 1; r <= 6; ++r) {
        fact *= static_cast<unsigned long long>(r);
        unsigned long long t1 = 1, t2 = 1;
        for (int i = 0; i < r; ++i) {
            t1 *= 6ull;
            t2 *= 8ull;
        }
        const unsigned long long exact = t1 + t2 * 5ull * fact;
        CHECK(ssc_bound_jsq(1, 1.0, 1.0, r).value == static_cast<double>(exact));
    }
}

TEST_CASE("jsq moment bound arithmetic") {
    CHECK(ssc_bound_jsq(1, 1.0, 1.0, 1).value == doctest::Approx(46.0));
    CHECK(ssc_bound_jsq(1, 1.0, 1.0, 2).value == doctest::Approx(676.0));
    // delta -> 0 diverges and delta <= 0 is rejected.
    CHECK(ssc_bound_jsq(1, 1.0, 1e-6, 1).value > 1e6);
    CHECK_THROWS_AS(ssc_bound_jsq(1, 1.0, -1.0, 1), std::invalid_argument);
}

TEST_CASE("moment bounds saturate instead of overflowing") {
    const auto b = ssc_bound_Rr(100, 1000.0, 1e-3, 200);
    CHECK(b.saturated);
    CHECK(std::isfinite(b.value));
}

TEST_CASE("jsq limit worked examples") {
    Eigen::VectorXd s2(2);
    s2 << 0.25, 0.25;
    CHECK(jsq_limit(0.21, s2, 0.1) == doctest::Approx(3.55).epsilon(1e-12));
    Eigen::VectorXd zero(2);
    zero << 0.0, 0.0;
    CHECK(jsq_limit(0.0, zero, 0.2) == doctest::Approx(0.0));
    const double v = jsq_limit(0.21, s2, 0.1);
    CHECK(jsq_limit(0.21, s2, 0.05) == 2.0 * v);
}

TEST_CASE("log fit recovers an exact log model") {
    const std::vector<double> eps = {std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)};
    std::vector<double> res;
    for (double e : eps) res.push_back(2.0 * std::log(1.0 / e));
    const LogFit fit = fit_log_error(eps, res);
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.max_ratio == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.log_model_sse <= 1e-12);
}

TEST_CASE("log fit on zero residuals") {
    const std::vector<double> eps = {0.2, 0.1, 0.05};
    const std::vector<double> res = {0.0, 0.0, 0.0};
    const LogFit fit = fit_log_error(eps, res);
    CHECK(fit.intercept == doctest::Approx(0.0));
    CHECK(fit.slope == doctest::Approx(0.0));
    CHECK(fit.max_ratio == doctest::Approx(0.0));
}

TEST_CASE("polynomial residuals favor the competing model") {
    const std::vector<double> eps = {std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)};
    std::vector<double> res;
    for (double e : eps) res.push_back(1.0 / e);
    const LogFit fit = fit_log_error(eps, res);
    CHECK(fit.inv_model_sse <= 1e-9);  // the 1/eps model fits exactly with c = 1
    CHECK(fit.inv_model_coef == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.log_model_sse > fit.inv_model_sse);
}

TEST_CASE("log fit input validation") {
    CHECK_THROWS_AS(fit_log_error(std::vector<double>{0.1, 0.2}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        fit_log_error(std::vector<double>{0.1, 0.1, 0.2}, std::vector<double>{1.0, 2.0, 3.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        fit_log_error(std::vector<double>{0.1, 0.2, 0.3}, std::vector<double>{1.0, -2.0, 3.0}),
        std::invalid_argument);
}

}  // TEST_SUITE
