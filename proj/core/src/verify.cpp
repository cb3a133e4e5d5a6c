#include "switchsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "switchsim/errors.hpp"
#include "switchsim/scheduling.hpp"
#include "switchsim/simulator.hpp"
#include "switchsim/theory.hpp"

namespace switchsim::verify {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::uint64_t pick(std::uint64_t override_v, double fallback) {
    return override_v > 0 ? override_v : static_cast<std::uint64_t>(fallback);
}

}  // namespace

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

std::int64_t brute_force_matching_weight(const std::vector<std::int64_t>& weights, int N) {
    std::vector<int> perm(static_cast<std::size_t>(N));
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    do {
        std::int64_t w = 0;
        for (int i = 0; i < N; ++i)
            w += weights[static_cast<std::size_t>(i) * static_cast<std::size_t>(N) +
                         static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        best = std::max(best, w);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Eigen::VectorXd projected_gradient_cone(const Eigen::VectorXd& x, const Eigen::MatrixXd& normals,
                                        int iterations) {
    const Eigen::MatrixXd G = normals.transpose() * normals;
    const Eigen::VectorXd h = normals.transpose() * x;
    const int k = static_cast<int>(G.rows());
    double L = 0.0;
    for (int i = 0; i < k; ++i) L = std::max(L, G.row(i).cwiseAbs().sum());
    const double step = 1.0 / std::max(L, 1e-12);
    std::vector<double> xi(static_cast<std::size_t>(k), 0.0), next(static_cast<std::size_t>(k));
    for (int t = 0; t < iterations; ++t) {
        for (int i = 0; i < k; ++i) {
            double grad = -h[i];
            for (int j = 0; j < k; ++j) grad += G(i, j) * xi[static_cast<std::size_t>(j)];
            const double v = xi[static_cast<std::size_t>(i)] - step * grad;
            next[static_cast<std::size_t>(i)] = v > 0.0 ? v : 0.0;
        }
        xi.swap(next);
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(normals.rows());
    for (int j = 0; j < k; ++j) out += xi[static_cast<std::size_t>(j)] * normals.col(j);
    return out;
}

namespace {

// Mixture points of the channel (exhaustive; oracle-scale models only).
std::vector<Eigen::VectorXd> oracle_mixture_points(const ChannelModel& channel) {
    const int n = channel.n();
    const int M = channel.num_states();
    std::size_t combos = 1;
    for (int m = 0; m < M; ++m) {
        combos *= channel.service_set(m).size();
        if (combos > 2000000) throw GeometryError("oracle: model too large");
    }
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(combos);
    Eigen::VectorXd p(n);
    for (std::size_t c = 0; c < combos; ++c) {
        p.setZero();
        std::size_t rest = c;
        for (int m = 0; m < M; ++m) {
            const auto& set = channel.service_set(m);
            const auto& x = set[rest % set.size()];
            rest /= set.size();
            for (int i = 0; i < n; ++i)
                p[i] += channel.psi()[static_cast<std::size_t>(m)] * x[static_cast<std::size_t>(i)];
        }
        pts.push_back(p);
    }
    return pts;
}

}  // namespace

std::vector<Facet> oracle_region_facets(const ChannelModel& channel) {
    const int n = channel.n();
    std::vector<Eigen::VectorXd> pts = oracle_mixture_points(channel);

    // Componentwise-maximal points, then every coordinate zeroing of those.
    std::vector<Eigen::VectorXd> pareto;
    for (const auto& p : pts) {
        bool dominated = false;
        for (const auto& q : pts)
            if (&p != &q && ((q - p).array() >= 0).all() && (q - p).norm() > 1e-12) {
                dominated = true;
                break;
            }
        if (!dominated) {
            bool dup = false;
            for (const auto& q : pareto)
                if ((q - p).norm() < 1e-12) { dup = true; break; }
            if (!dup) pareto.push_back(p);
        }
    }
    std::vector<Eigen::VectorXd> cloud;
    for (const auto& p : pareto)
        for (int mask = 0; mask < (1 << n); ++mask) {
            Eigen::VectorXd q = p;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) q[i] = 0.0;
            bool dup = false;
            for (const auto& r : cloud)
                if ((q - r).norm() < 1e-12) { dup = true; break; }
            if (!dup) cloud.push_back(q);
        }

    auto support = [&](const Eigen::VectorXd& c) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& p : cloud) best = std::max(best, c.dot(p));
        return best;
    };

    // Candidate normals from every n-subset of the cloud (facet vertices are
    // cloud points, so every true facet plane appears here).
    std::vector<Facet> facets;
    const std::size_t m = cloud.size();
    std::vector<std::size_t> sel(static_cast<std::size_t>(n));
    std::function<void(std::size_t, int)> rec = [&](std::size_t start, int depth) {
        if (depth == n) {
            Eigen::MatrixXd diffs(n, n - 1);
            for (int k = 1; k < n; ++k) diffs.col(k - 1) = cloud[sel[static_cast<std::size_t>(k)]] - cloud[sel[0]];
            Eigen::FullPivLU<Eigen::MatrixXd> lu(diffs.transpose());
            lu.setThreshold(1e-9);
            if (lu.dimensionOfKernel() != 1) return;
            Eigen::VectorXd c = lu.kernel().col(0);
            if ((c.array() <= 1e-9).all()) c = -c;
            if ((c.array() < -1e-9).any()) return;
            c = c.cwiseMax(0.0);
            if (c.norm() < 1e-12) return;
            c.normalize();
            const double b = support(c);
            if (b <= 1e-9) return;
            // Facet condition: tight set spans an (n-1)-dimensional face.
            std::vector<const Eigen::VectorXd*> tight;
            for (const auto& p : cloud)
                if (std::abs(c.dot(p) - b) <= 1e-9) tight.push_back(&p);
            if (tight.size() < static_cast<std::size_t>(n)) return;
            Eigen::MatrixXd td(n, static_cast<Eigen::Index>(tight.size()) - 1);
            for (Eigen::Index j = 1; j < static_cast<Eigen::Index>(tight.size()); ++j)
                td.col(j - 1) = *tight[static_cast<std::size_t>(j)] - *tight[0];
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(td);
            qr.setThreshold(1e-8);
            if (qr.rank() < n - 1) return;
            for (const auto& f : facets)
                if (f.c.dot(c) > 1.0 - 1e-9) return;
            facets.push_back({c, b});
            return;
        }
        for (std::size_t i = start; i + (static_cast<std::size_t>(n) - 1 - static_cast<std::size_t>(depth)) < m; ++i) {
            sel[static_cast<std::size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    if (n == 1) {
        Eigen::VectorXd one(1);
        one[0] = 1.0;
        facets.push_back({one, support(one)});
    } else {
        rec(0, 0);
    }
    return facets;
}

double facet_margin(const std::vector<Facet>& facets, const Eigen::VectorXd& x) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& f : facets) worst = std::max(worst, f.c.dot(x) - f.b);
    return worst;
}

double chain_stationary_mean(const DiscretePmf& arrivals, const ChannelModel& channel, int cap) {
    if (channel.n() != 1) throw std::invalid_argument("chain oracle: n must be 1");
    const int K = cap;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(K + 1, K + 1);
    for (int q = 0; q <= K; ++q) {
        for (int m = 0; m < channel.num_states(); ++m) {
            const double psi = channel.psi()[static_cast<std::size_t>(m)];
            const auto& set = channel.service_set(m);
            // Service law under MaxWeight: the largest rate when the queue is
            // busy, a uniform draw over the whole set when it is empty.
            std::vector<std::pair<int, double>> service;
            if (q >= 1) {
                int smax = 0;
                for (const auto& x : set) smax = std::max(smax, x[0]);
                service.emplace_back(smax, 1.0);
            } else {
                for (const auto& x : set)
                    service.emplace_back(x[0], 1.0 / static_cast<double>(set.size()));
            }
            for (const auto& [s, ps] : service)
                for (std::size_t ai = 0; ai < arrivals.support().size(); ++ai) {
                    const int a = arrivals.support()[ai];
                    const double pa = arrivals.probs()[ai];
                    int next = q + a - s;
                    if (next < 0) next = 0;
                    if (next > K) next = K;
                    P(q, next) += psi * ps * pa;
                }
        }
    }
    // pi P = pi, sum pi = 1.
    Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(K + 1, K + 1);
    A.row(K).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K + 1);
    rhs[K] = 1.0;
    const Eigen::VectorXd pi = A.fullPivLu().solve(rhs);
    double mean = 0.0;
    for (int q = 0; q <= K; ++q) mean += q * pi[q];
    return mean;
}

// ---------------------------------------------------------------------------
// Reference scenarios
// ---------------------------------------------------------------------------

ExperimentConfig on_off_n1_config() {
    ExperimentConfig cfg;
    cfg.type = ExperimentConfig::ModelType::Switch;
    cfg.state_names = {"on", "off"};
    cfg.psi = {0.8, 0.2};
    cfg.service_sets = {{{0}, {1}}, {{0}}};
    cfg.arrival_family.kind = ArrivalFamily::Kind::Bernoulli;
    cfg.nu = Eigen::VectorXd::Constant(1, 0.8);
    cfg.eps_grid = {0.2, 0.1, 0.05, 0.02};
    return cfg;
}

ExperimentConfig two_queue_pooled_config() {
    ExperimentConfig cfg;
    cfg.type = ExperimentConfig::ModelType::Switch;
    cfg.state_names = {"fixed"};
    cfg.psi = {1.0};
    cfg.service_sets = {{{0, 0}, {1, 0}, {0, 1}}};
    cfg.arrival_family.kind = ArrivalFamily::Kind::Bernoulli;
    cfg.nu = Eigen::VectorXd::Constant(2, 0.5);
    cfg.eps_grid = {0.2, 0.1, 0.05, 0.02};
    return cfg;
}

ExperimentConfig iq_switch_2x2_config() {
    ExperimentConfig cfg;
    cfg.type = ExperimentConfig::ModelType::IqSwitch;
    cfg.iq_ports = 2;
    cfg.arrival_family.kind = ArrivalFamily::Kind::Bernoulli;
    cfg.eps_grid = {0.05};
    return cfg;
}

ExperimentConfig jsq_two_server_config() {
    ExperimentConfig cfg;
    cfg.type = ExperimentConfig::ModelType::Jsq;
    cfg.arrival_family.kind = ArrivalFamily::Kind::Bernoulli;
    cfg.jsq_service = {DiscretePmf::bernoulli(0.5), DiscretePmf::bernoulli(0.5)};
    cfg.jsq_queues = 2;
    cfg.eps_grid = {0.2, 0.1, 0.05, 0.02};
    return cfg;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

namespace {

struct SwitchPoint {
    double eps = 0.0;
    SimRecord rec;
    double ht = 0.0;
    std::optional<double> ulb_value;
    double crp_facet_b = 0.0;  // facet offset when a single facet is tight
};

SwitchPoint run_switch_point(const SwitchSetup& setup, double eps, const RunConfig& rc) {
    SwitchPoint pt;
    pt.eps = eps;
    SwitchModel scaled(scale_to_heavy_traffic(setup.model.arrival, setup.geometry.nu(), eps),
                       setup.model.channel);
    pt.rec = run_switch(scaled, setup.geometry, rc);
    pt.ht = ht_limit(setup.geometry.H(), scaled.arrival.covariance(), setup.geometry.gram_inv(),
                     setup.geometry.spectrum().sigma_B, eps);
    if (setup.geometry.P().size() == 1) {
        const Facet& f = setup.geometry.region().facet(setup.geometry.P()[0]);
        pt.ulb_value = ulb(f.c, f.b, scaled.arrival.covariance(),
                           setup.geometry.spectrum().sigma_B(0, 0),
                           setup.geometry.spectrum().b_max, eps);
        pt.crp_facet_b = f.b;
    }
    return pt;
}

RunConfig make_rc(const VerifyOptions& opts, double eps, std::uint64_t seed_offset,
                  double default_horizon_v, double default_burn_v, const Eigen::VectorXd& w) {
    RunConfig rc;
    rc.horizon = pick(opts.run.horizon, default_horizon_v);
    rc.burn_in = opts.run.burn_in > 0 ? opts.run.burn_in : static_cast<std::uint64_t>(default_burn_v);
    rc.batches = opts.run.batches;
    rc.moment_orders = {1, 2, 3, 4};
    rc.seed = opts.seed + seed_offset;
    rc.w = w;
    (void)eps;
    return rc;
}

CheckResult check1_matching(const VerifyOptions& opts) {
    CheckResult r{1, "scheduler oracle: matching equals exhaustive maximum", true, ""};
    RngStream rng(opts.seed + 101);
    int tested = 0;
    for (int N : {2, 3, 4}) {
        for (int t = 0; t < 1000; ++t) {
            std::vector<std::int64_t> w(static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
            for (auto& v : w) v = static_cast<std::int64_t>(rng.uniform_index(1000));
            const std::vector<int> perm = maxweight_matching(w, N);
            std::int64_t got = 0;
            for (int i = 0; i < N; ++i)
                got += w[static_cast<std::size_t>(i) * static_cast<std::size_t>(N) +
                         static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
            const std::int64_t want = brute_force_matching_weight(w, N);
            ++tested;
            if (got != want) {
                r.pass = false;
                r.detail = "N=" + std::to_string(N) + " instance " + std::to_string(t) +
                           ": got " + std::to_string(got) + ", brute force " + std::to_string(want);
                return r;
            }
        }
    }
    r.detail = std::to_string(tested) + " instances, exact agreement";
    return r;
}

CheckResult check2_projection(const VerifyOptions& opts) {
    CheckResult r{2, "projection oracle: cone projection matches projected gradient", true, ""};
    RngStream rng(opts.seed + 202);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform_index(5));  // 2..6
        // k <= min(4, n): the conditioning guard below needs a full-rank Gram.
        const int k = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(std::min(4, n))));
        Eigen::MatrixXd N(n, k);
        while (true) {
            for (Eigen::Index j = 0; j < k; ++j) {
                for (Eigen::Index i = 0; i < n; ++i) N(i, j) = 2.0 * rng.uniform01() - 1.0;
                N.col(j).normalize();
            }
            // Keep the Gram well conditioned so the oracle's fixed iteration
            // count converges far below the comparison tolerance.
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N.transpose() * N);
            if (es.eigenvalues().minCoeff() > 0.05) break;
        }
        Eigen::VectorXd x(n);
        for (Eigen::Index i = 0; i < n; ++i) x[i] = 10.0 * (2.0 * rng.uniform01() - 1.0);
        const ConeProjection got = project_cone(x, N);
        const Eigen::VectorXd want = projected_gradient_cone(x, N);
        worst = std::max(worst, (got.par - want).norm());
    }
    r.pass = worst <= 1e-8;
    r.detail = "500 instances, max |par - oracle| = " + fmt(worst);
    return r;
}

ChannelModel random_2d_channel(RngStream& rng) {
    const int states = 1 + static_cast<int>(rng.uniform_index(3));
    std::vector<double> psi(static_cast<std::size_t>(states));
    double total = 0.0;
    for (auto& p : psi) {
        p = 0.2 + rng.uniform01();
        total += p;
    }
    for (auto& p : psi) p /= total;
    // Rounding drift guard: renormalize exactly.
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < psi.size(); ++i) acc += psi[i];
    psi.back() = 1.0 - acc;

    std::vector<std::vector<std::vector<int>>> sets;
    for (int m = 0; m < states; ++m) {
        std::set<std::vector<int>> set;
        set.insert({0, 0});
        const int extras = 1 + static_cast<int>(rng.uniform_index(3));
        for (int e = 0; e < extras; ++e) {
            const int x = static_cast<int>(rng.uniform_index(4));
            const int y = static_cast<int>(rng.uniform_index(4));
            set.insert({x, y});
            set.insert({x, 0});
            set.insert({0, y});
        }
        if (m == 0) {  // keep the region full-dimensional
            set.insert({1, 0});
            set.insert({0, 1});
        }
        sets.emplace_back(set.begin(), set.end());
    }
    return ChannelModel({}, psi, sets);
}

CheckResult check3_geometry(const VerifyOptions& opts) {
    CheckResult r{3, "geometry: brute-force region agrees with the membership oracle", true, ""};
    RngStream rng(opts.seed + 303);
    int flagged = 0;
    double worst_identity = 0.0;
    for (int model_i = 0; model_i < 20 && r.pass; ++model_i) {
        const ChannelModel channel = random_2d_channel(rng);
        const CapacityRegion region = build_capacity_region(channel);
        const std::vector<Facet> oracle = oracle_region_facets(channel);

        // Mixture identity on every facet (tight facets are a subset).
        for (const auto& f : region.facets()) {
            double reach = 0.0;
            for (int m = 0; m < channel.num_states(); ++m)
                reach += channel.psi()[static_cast<std::size_t>(m)] *
                         facet_b_ml(f.c, channel.service_set(m));
            worst_identity = std::max(worst_identity, std::abs(reach - f.b));
        }

        double hi = 0.0;
        for (const auto& f : oracle) hi = std::max(hi, f.b / f.c.maxCoeff());
        for (int t = 0; t < 10000; ++t) {
            Eigen::VectorXd x(2);
            x[0] = rng.uniform01() * 1.2 * hi;
            x[1] = rng.uniform01() * 1.2 * hi;
            const double impl = region.margin(x);
            const double orac = facet_margin(oracle, x);
            if ((impl > 1e-7 && orac < -1e-7) || (impl < -1e-7 && orac > 1e-7)) {
                ++flagged;
                r.pass = false;
                r.detail = "model " + std::to_string(model_i) + ": point misclassified (impl " +
                           fmt(impl) + ", oracle " + fmt(orac) + ")";
            }
        }
    }
    if (worst_identity > 1e-9) {
        r.pass = false;
        r.detail += " mixture identity off by " + fmt(worst_identity);
    }
    if (r.pass)
        r.detail = "20 models x 10000 points, 0 misclassified; mixture identity off by " +
                   fmt(worst_identity);
    return r;
}

CheckResult check4_chain(const VerifyOptions& opts) {
    CheckResult r{4, "exact-chain reproduction (n=1 on/off)", true, ""};
    const ExperimentConfig cfg = on_off_n1_config();
    SwitchSetup setup = build_switch_setup(cfg);
    const double eps = 1.0 - 0.45 / 0.8;  // arrival mean 0.45 on capacity 0.8
    const RunConfig rc = make_rc(opts, eps, 404, 1e7, 1e5, setup.geometry.nu());
    const SwitchPoint pt = run_switch_point(setup, eps, rc);
    const double sim_mean = pt.rec.mean_q[0];

    const DiscretePmf arrivals = DiscretePmf::bernoulli(0.45);
    const double chain_mean = chain_stationary_mean(arrivals, setup.model.channel, 200);
    const double rel = std::abs(sim_mean - chain_mean) / chain_mean;
    r.pass = rel <= 0.02;
    r.detail = "sim E[q] = " + fmt(sim_mean) + ", chain E[q] = " + fmt(chain_mean) +
               ", rel err = " + fmt(rel);
    return r;
}

// Shared by criteria 5, 8 and 11: the on/off sweep with per-eps horizons.
std::vector<SwitchPoint> crp_sweep(const VerifyOptions& opts) {
    const ExperimentConfig cfg = on_off_n1_config();
    SwitchSetup setup = build_switch_setup(cfg);
    std::vector<SwitchPoint> pts;
    for (std::size_t i = 0; i < cfg.eps_grid.size(); ++i) {
        const double eps = cfg.eps_grid[i];
        const double horizon = std::min(4e8, 1e6 / (eps * eps));
        const RunConfig rc = make_rc(opts, eps, 500 + i, horizon, 1e5 / eps, setup.geometry.nu());
        pts.push_back(run_switch_point(setup, eps, rc));
    }
    return pts;
}

CheckResult check5_ht_value(const std::vector<SwitchPoint>& pts) {
    CheckResult r{5, "heavy-traffic value at eps=0.05 within 10%", false, ""};
    for (const auto& pt : pts) {
        if (std::abs(pt.eps - 0.05) > 1e-12) continue;
        const double got = pt.eps * pt.rec.mean_qw.mean;
        const double want = pt.eps * pt.ht;
        const double rel = std::abs(got - want) / want;
        r.pass = rel <= 0.10;
        r.detail = "eps*E<q,w> = " + fmt(got) + ", eps*limit = " + fmt(want) +
                   ", rel err = " + fmt(rel);
        if (pt.ulb_value) {
            // Single tight facet: the policy-independent bound must hold.
            // w = b*c here, so the c-weighted mean is mean_qw / b.
            const double b = pt.crp_facet_b;
            const GapReport gap = crp_gap_bound(*pt.ulb_value, pt.rec.mean_qw.mean / b,
                                                pt.rec.mean_qw.ci_half_width / b, pt.eps);
            r.pass = r.pass && !gap.violation;
            r.detail += "; lower-bound gap = " + fmt(gap.gap) +
                        " (gap/log(1/eps) = " + fmt(gap.log_ratio) + ")";
        }
        return r;
    }
    r.detail = "eps=0.05 missing from the sweep";
    return r;
}

CheckResult check8_log_model(const std::vector<SwitchPoint>& pts) {
    CheckResult r{8, "log error model beats 1/eps model across the grid", false, ""};
    std::vector<double> eps, res;
    for (const auto& pt : pts) {
        eps.push_back(pt.eps);
        res.push_back(std::abs(pt.rec.mean_qw.mean - pt.ht));
    }
    const LogFit fit = fit_log_error(eps, res);
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double ratio = res[i] / std::log(1.0 / eps[i]);
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
    }
    const bool sse_ok = fit.log_model_sse < fit.inv_model_sse;
    const bool band_ok = rmax <= 5.0 * rmin;
    r.pass = sse_ok && band_ok;
    r.detail = "log SSE " + fmt(fit.log_model_sse) + " vs 1/eps SSE " + fmt(fit.inv_model_sse) +
               "; ratio band " + fmt(rmin) + ".." + fmt(rmax) +
               " (x" + fmt(rmin > 0 ? rmax / rmin : std::numeric_limits<double>::infinity()) + ")";
    return r;
}

CheckResult check11_pi_band(const std::vector<SwitchPoint>& pts) {
    CheckResult r{11, "unsaturated-service fraction scales like eps (factor-10 band)", true, ""};
    if (pts.empty()) {
        r.pass = false;
        return r;
    }
    const Eigen::Index states = pts.front().rec.pi_hat.rows();
    const Eigen::Index facets = pts.front().rec.pi_hat.cols();
    std::ostringstream os;
    for (Eigen::Index m = 0; m < states; ++m)
        for (Eigen::Index l = 0; l < facets; ++l) {
            double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
            for (const auto& pt : pts) {
                const double ratio = (1.0 - pt.rec.pi_hat(m, l)) / pt.eps;
                rmin = std::min(rmin, ratio);
                rmax = std::max(rmax, ratio);
            }
            if (rmax <= 1e-9) continue;  // service always saturates this facet
            if (rmax > 10.0 * rmin) r.pass = false;
            os << " (m=" << m << ",l=" << l << "): " << fmt(rmin) << ".." << fmt(rmax);
        }
    r.detail = "(1-pi)/eps bands:" + os.str();
    return r;
}

CheckResult check6_iq_switch(const VerifyOptions& opts) {
    CheckResult r{6, "2x2 input-queued switch matches the derived value at eps=0.05", false, ""};
    const ExperimentConfig cfg = iq_switch_2x2_config();
    SwitchSetup setup = build_switch_setup(cfg);
    const double eps = 0.05;
    const RunConfig rc = make_rc(opts, eps, 606, 6e7, 2e6, setup.geometry.nu());
    const SwitchPoint pt = run_switch_point(setup, eps, rc);

    const double sum_mean = pt.rec.mean_q.sum();
    // w = nu = (1/N) 1, so the sum prediction is the w-form limit rescaled.
    const double predicted_sum = pt.ht / setup.geometry.nu()[0];

    const int N = cfg.iq_ports;
    const double lambda = (1.0 - eps) / N;
    const double sigma2 = lambda * (1.0 - lambda);
    const double closed_form_sum = (1.0 - 1.0 / (2.0 * N)) * (N * N * sigma2) / eps;
    const double identity_gap = std::abs(predicted_sum - closed_form_sum);

    const double rel = std::abs(eps * sum_mean - eps * predicted_sum) / (eps * predicted_sum);
    r.pass = rel <= 0.10 && identity_gap <= 1e-9 * closed_form_sum;
    r.detail = "eps*E[sum q] = " + fmt(eps * sum_mean) + ", eps*limit = " +
               fmt(eps * predicted_sum) + ", rel err = " + fmt(rel) +
               "; closed-form identity gap = " + fmt(identity_gap);
    return r;
}

CheckResult check7_drift(const VerifyOptions& opts) {
    CheckResult r{7, "steady-state drift identity T1 = T2 - T3 + T4", true, ""};
    const ExperimentConfig cfg = two_queue_pooled_config();
    SwitchSetup setup = build_switch_setup(cfg);
    std::ostringstream os;
    int idx = 0;
    for (double eps : {0.2, 0.1}) {
        const RunConfig rc = make_rc(opts, eps, 700 + idx++, 2e6, 2e5, setup.geometry.nu());
        const SwitchPoint pt = run_switch_point(setup, eps, rc);
        const DriftEstimates& d = pt.rec.drift;
        const double lhs = std::abs(d.t1.mean - (d.t2.mean - d.t3.mean + d.t4.mean));
        const double combined = std::sqrt(d.t1.ci_half_width * d.t1.ci_half_width +
                                          d.t2.ci_half_width * d.t2.ci_half_width +
                                          d.t3.ci_half_width * d.t3.ci_half_width +
                                          d.t4.ci_half_width * d.t4.ci_half_width);
        if (lhs > 3.0 * combined) r.pass = false;
        os << " eps=" << fmt(eps) << ": |gap| = " << fmt(lhs) << ", 3*CI = " << fmt(3.0 * combined)
           << ";";
    }
    r.detail = os.str();
    return r;
}

CheckResult check9_ssc(const VerifyOptions& opts) {
    CheckResult r{9, "state-space-collapse moment bounds hold on both systems", true, ""};
    std::ostringstream os;

    // Switch side: pooled two-queue model, nontrivial perpendicular component.
    {
        const ExperimentConfig cfg = two_queue_pooled_config();
        SwitchSetup setup = build_switch_setup(cfg);
        const double alpha = std::max(setup.model.arrival.a_max(), setup.model.channel.s_max());
        for (std::size_t i = 0; i < cfg.eps_grid.size(); ++i) {
            const double eps = cfg.eps_grid[i];
            const RunConfig rc = make_rc(opts, eps, 900 + i, 2e7, 1e5 / eps, setup.geometry.nu());
            const SwitchPoint pt = run_switch_point(setup, eps, rc);
            for (const auto& m : pt.rec.perp_moments) {
                if (m.order > 3) continue;
                const double bound =
                    ssc_bound_Rr(setup.model.n, alpha, setup.geometry.delta(), m.order).value;
                if (m.perp_K.mean > bound) {
                    r.pass = false;
                    os << " switch eps=" << fmt(eps) << " r=" << m.order << ": moment "
                       << fmt(m.perp_K.mean) << " exceeds bound " << fmt(bound) << ";";
                }
                const double slack = 3.0 * std::sqrt(m.perp_K.ci_half_width * m.perp_K.ci_half_width +
                                                     m.perp_H.ci_half_width * m.perp_H.ci_half_width);
                if (m.perp_H.mean > m.perp_K.mean + slack) {
                    r.pass = false;
                    os << " switch eps=" << fmt(eps) << " r=" << m.order
                       << ": subspace moment above cone moment;";
                }
            }
        }
        os << " switch moments within bounds;";
    }

    // JSQ side.
    {
        const ExperimentConfig cfg = jsq_two_server_config();
        const LoadBalanceModel base = build_jsq_model(cfg);
        const double mu_min = base.mu().minCoeff();
        const double delta = 0.5 * mu_min;
        const double alpha = std::max(base.arrival.a_max(), base.s_max());
        Eigen::VectorXd capacity(1);
        capacity[0] = base.mu_sigma();
        for (std::size_t i = 0; i < cfg.eps_grid.size(); ++i) {
            const double eps = cfg.eps_grid[i];
            if (eps >= (mu_min - delta) * base.n) continue;
            RunConfig rc = make_rc(opts, eps, 950 + i, 2e7, 1e5 / eps,
                                   Eigen::VectorXd::Ones(base.n));
            LoadBalanceModel scaled(base.n, scale_to_heavy_traffic(base.arrival, capacity, eps),
                                    base.service);
            const SimRecord rec = run_jsq(scaled, rc);
            for (const auto& m : rec.perp_moments) {
                if (m.order > 3) continue;
                const double bound = ssc_bound_jsq(base.n, alpha, delta, m.order).value;
                if (m.perp_K.mean > bound) {
                    r.pass = false;
                    os << " jsq eps=" << fmt(eps) << " r=" << m.order << ": moment "
                       << fmt(m.perp_K.mean) << " exceeds bound " << fmt(bound) << ";";
                }
            }
        }
        os << " jsq moments within bounds";
    }
    r.detail = os.str();
    return r;
}

CheckResult check10_jsq(const VerifyOptions& opts) {
    CheckResult r{10, "two-server JSQ matches its heavy-traffic value at eps=0.05", false, ""};
    const ExperimentConfig cfg = jsq_two_server_config();
    const LoadBalanceModel base = build_jsq_model(cfg);
    const double eps = 0.05;
    Eigen::VectorXd capacity(1);
    capacity[0] = base.mu_sigma();
    RunConfig rc = make_rc(opts, eps, 1000, 1e8, 2e6, Eigen::VectorXd::Ones(base.n));
    LoadBalanceModel scaled(base.n, scale_to_heavy_traffic(base.arrival, capacity, eps),
                            base.service);
    const SimRecord rec = run_jsq(scaled, rc);
    const double limit = jsq_limit(scaled.arrival.covariance()(0, 0), base.sigma_s2(), eps);
    const double rel = std::abs(eps * rec.mean_qw.mean - eps * limit) / (eps * limit);
    r.pass = rel <= 0.10;
    r.detail = "eps*E[sum q] = " + fmt(eps * rec.mean_qw.mean) + ", eps*limit = " +
               fmt(eps * limit) + ", rel err = " + fmt(rel);
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"geometry", "drift", "ssc", "crp", "jsq"};
    return names;
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opts) {
    std::vector<CheckResult> out;
    if (suite == "geometry") {
        out.push_back(check1_matching(opts));
        out.push_back(check2_projection(opts));
        out.push_back(check3_geometry(opts));
    } else if (suite == "drift") {
        out.push_back(check4_chain(opts));
        out.push_back(check6_iq_switch(opts));
        out.push_back(check7_drift(opts));
    } else if (suite == "ssc") {
        out.push_back(check9_ssc(opts));
    } else if (suite == "crp") {
        const std::vector<SwitchPoint> pts = crp_sweep(opts);
        out.push_back(check5_ht_value(pts));
        out.push_back(check8_log_model(pts));
        out.push_back(check11_pi_band(pts));
    } else if (suite == "jsq") {
        out.push_back(check10_jsq(opts));
    } else {
        throw ConfigError("verify: unknown suite '" + suite + "'");
    }
    return out;
}

std::vector<CheckResult> run_all(const VerifyOptions& opts) {
    std::vector<CheckResult> all;
    for (const auto& suite : suite_names()) {
        const std::vector<CheckResult> part = run_suite(suite, opts);
        all.insert(all.end(), part.begin(), part.end());
    }
    std::sort(all.begin(), all.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
    return all;
}

}  // namespace switchsim::verify
