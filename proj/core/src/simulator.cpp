#include "switchsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "switchsim/errors.hpp"
#include "switchsim/scheduling.hpp"

namespace switchsim {

namespace {

constexpr double kTightTol = 1e-9;

void check_run_config(const RunConfig& cfg) {
    if (cfg.batches < 2) throw std::invalid_argument("run: need at least 2 batches");
    if (cfg.horizon < 10ull * static_cast<std::uint64_t>(cfg.batches))
        throw std::invalid_argument("run: horizon must be >= 10 * batches");
    if (cfg.moment_orders.empty()) throw std::invalid_argument("run: no moment orders");
    for (int r : cfg.moment_orders)
        if (r < 1 || r > 8) throw std::invalid_argument("run: moment orders must be in [1, 8]");
}

double norm_power(double norm2, int r) {
    switch (r) {
        case 1: return std::sqrt(norm2);
        case 2: return norm2;
        case 3: return norm2 * std::sqrt(norm2);
        case 4: return norm2 * norm2;
        default: return std::pow(norm2, 0.5 * r);
    }
}

// Growth heuristic over the post-burn-in window: the run is flagged as
// diverging when the last decile of <q, 1> exceeds ten times the first.
class DivergenceProbe {
  public:
    explicit DivergenceProbe(std::uint64_t horizon) : decile_len_(horizon / 10) {}
    void add(double total_q) {
        if (decile_len_ == 0) return;
        const std::uint64_t d = std::min<std::uint64_t>(9, count_ / decile_len_);
        sums_[d] += total_q;
        counts_[d] += 1;
        ++count_;
    }
    bool diverging() const {
        if (counts_[0] == 0 || counts_[9] == 0) return false;
        const double first = sums_[0] / static_cast<double>(counts_[0]);
        const double last = sums_[9] / static_cast<double>(counts_[9]);
        return last > 10.0 * first && last > 0.0;
    }

  private:
    std::uint64_t decile_len_;
    std::uint64_t count_ = 0;
    double sums_[10] = {};
    std::uint64_t counts_[10] = {};
};

// Allocation-free per-slot cone projection on raw buffers. The optimal
// support is a linearly independent generator subset, so every candidate
// subset gets its solve operator G_S^{-1} N_S^T precomputed; per slot we scan
// subsets for one whose coefficients are feasible and whose complement
// satisfies the KKT slack. Falls back to the certified active-set path on
// numerical corners.
class ConeWorkspace {
  public:
    explicit ConeWorkspace(const Eigen::MatrixXd& normals)
        : n_(static_cast<int>(normals.rows())), k_(static_cast<int>(normals.cols())),
          normals_(normals) {
        flat_.resize(static_cast<std::size_t>(n_) * static_cast<std::size_t>(k_));
        for (int j = 0; j < k_; ++j)
            for (int i = 0; i < n_; ++i)
                flat_[static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) +
                      static_cast<std::size_t>(i)] = normals(i, j);
        xi_.resize(static_cast<std::size_t>(k_));
        residual_.resize(static_cast<std::size_t>(n_));
        if (k_ == 1 || k_ > 12) return;
        for (unsigned mask = 1; mask < (1u << k_); ++mask) {
            Subset s;
            for (int j = 0; j < k_; ++j)
                if (mask & (1u << j)) s.idx.push_back(j);
            const int ks = static_cast<int>(s.idx.size());
            Eigen::MatrixXd N_S(n_, ks);
            for (int a = 0; a < ks; ++a)
                N_S.col(a) = normals.col(s.idx[static_cast<std::size_t>(a)]);
            const Eigen::MatrixXd G = N_S.transpose() * N_S;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
            lu.setThreshold(1e-10);
            if (lu.rank() < G.rows()) continue;  // dependent generators
            const Eigen::MatrixXd op = lu.inverse() * N_S.transpose();  // ks x n
            s.solve_op.assign(op.data(), op.data() + op.size());        // column-major
            s.basis.resize(static_cast<std::size_t>(n_) * static_cast<std::size_t>(ks));
            for (int a = 0; a < ks; ++a)
                for (int i = 0; i < n_; ++i)
                    s.basis[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) +
                            static_cast<std::size_t>(i)] = N_S(i, a);
            subsets_.push_back(std::move(s));
        }
        // Smaller supports first: cheaper and the common case in heavy traffic.
        std::sort(subsets_.begin(), subsets_.end(),
                  [](const Subset& a, const Subset& b) { return a.idx.size() < b.idx.size(); });
        prepared_ = !subsets_.empty();
    }

    double perp_squared_norm(const double* x) {
        if (k_ == 1) {
            double dot = 0.0, nrm2 = 0.0;
            for (int i = 0; i < n_; ++i) {
                dot += flat_[static_cast<std::size_t>(i)] * x[i];
                nrm2 += x[i] * x[i];
            }
            if (dot <= 0.0) return nrm2;
            double out = 0.0;
            for (int i = 0; i < n_; ++i) {
                const double d = x[i] - dot * flat_[static_cast<std::size_t>(i)];
                out += d * d;
            }
            return out;
        }
        if (prepared_) {
            double nrm2 = 0.0;
            for (int i = 0; i < n_; ++i) nrm2 += x[i] * x[i];
            const double tol = 1e-9 * (1.0 + std::sqrt(nrm2));
            if (max_slack(x) <= tol) return nrm2;  // zero support
            for (const Subset& s : subsets_) {
                const int ks = static_cast<int>(s.idx.size());
                bool feasible = true;
                for (int a = 0; a < ks; ++a) {
                    double v = 0.0;
                    const double* row = s.solve_op.data() + a;  // column-major stride ks
                    for (int i = 0; i < n_; ++i) v += row[static_cast<std::size_t>(i) * static_cast<std::size_t>(ks)] * x[i];
                    if (v < -tol) { feasible = false; break; }
                    xi_[static_cast<std::size_t>(a)] = v;
                }
                if (!feasible) continue;
                for (int i = 0; i < n_; ++i) residual_[static_cast<std::size_t>(i)] = x[i];
                for (int a = 0; a < ks; ++a) {
                    const double v = xi_[static_cast<std::size_t>(a)];
                    const double* col = s.basis.data() + static_cast<std::size_t>(a) * static_cast<std::size_t>(n_);
                    for (int i = 0; i < n_; ++i) residual_[static_cast<std::size_t>(i)] -= v * col[i];
                }
                if (max_slack(residual_.data()) > tol) continue;
                double out = 0.0;
                for (int i = 0; i < n_; ++i) out += residual_[static_cast<std::size_t>(i)] * residual_[static_cast<std::size_t>(i)];
                return out;
            }
        }
        Eigen::VectorXd xv(n_);
        for (int i = 0; i < n_; ++i) xv[i] = x[i];
        return project_cone(xv, normals_).perp.squaredNorm();
    }

  private:
    double max_slack(const double* v) const {
        double worst = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < k_; ++j) {
            double dot = 0.0;
            const double* col = flat_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(n_);
            for (int i = 0; i < n_; ++i) dot += col[i] * v[i];
            worst = std::max(worst, dot);
        }
        return worst;
    }

    struct Subset {
        std::vector<int> idx;
        std::vector<double> basis;     // N_S, column-major n x ks
        std::vector<double> solve_op;  // (N_S^T N_S)^{-1} N_S^T, column-major ks x n
    };
    int n_, k_;
    const Eigen::MatrixXd& normals_;
    std::vector<double> flat_;  // generators, column-major
    std::vector<Subset> subsets_;
    std::vector<double> xi_, residual_;
    bool prepared_ = false;
};

}  // namespace

StepOutcome simulate_slot(const SwitchModel& model, SystemState& state, RngStream& rng) {
    if (state.q.size() != static_cast<std::size_t>(model.n))
        throw std::invalid_argument("simulate_slot: state dimension mismatch");
    StepOutcome out;
    out.m = model.channel.sample_state(rng);
    const auto& set = model.channel.service_set(out.m);
    const SchedulePick pick = maxweight_pick(state.q, set, rng);
    out.s.assign(set[pick.index].begin(), set[pick.index].end());
    out.a.resize(state.q.size());
    model.arrival.sample(rng, out.a);
    out.q_next.resize(state.q.size());
    out.u.resize(state.q.size());
    step_into(state.q, out.a, out.s, out.q_next, out.u);
    state.q = out.q_next;
    state.slot += 1;
    return out;
}

SimRecord run_switch(const SwitchModel& model, const ConeGeometry& geom, const RunConfig& cfg) {
    check_run_config(cfg);
    const int n = model.n;
    if (geom.region().dimension() != n)
        throw std::invalid_argument("run: geometry/model dimension mismatch");
    const Eigen::VectorXd lambda = model.arrival.mean();
    if (geom.region().margin(lambda) >= 0.0)
        throw std::invalid_argument("run: arrival mean must lie strictly inside the region");
    if (cfg.w.size() != n) throw std::invalid_argument("run: weight vector dimension mismatch");
    for (int l : geom.P()) {
        const auto& f = geom.region().facet(l);
        if (std::abs(f.c.dot(cfg.w) - f.b) > 1e-8)
            throw std::invalid_argument("run: w must lie on every tight facet");
    }

    const std::uint64_t horizon =
        static_cast<std::uint64_t>(cfg.batches) * (cfg.horizon / static_cast<std::uint64_t>(cfg.batches));
    const std::uint64_t total = cfg.burn_in + horizon;
    const int num_states = model.channel.num_states();
    const int P_size = static_cast<int>(geom.P().size());

    // Tight-service table: whether service vector j of state m attains the
    // best c_l-weighted rate, for each l in P. Finite, so precomputed.
    std::vector<std::vector<std::uint32_t>> tight_mask(static_cast<std::size_t>(num_states));
    if (P_size > 31) throw std::invalid_argument("run: |P| too large for the probe table");
    for (int m = 0; m < num_states; ++m) {
        const auto& set = model.channel.service_set(m);
        tight_mask[static_cast<std::size_t>(m)].resize(set.size(), 0);
        for (std::size_t j = 0; j < set.size(); ++j) {
            std::uint32_t mask = 0;
            for (int lp = 0; lp < P_size; ++lp) {
                const auto& c = geom.region().facet(geom.P()[static_cast<std::size_t>(lp)]).c;
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += c[i] * set[j][static_cast<std::size_t>(i)];
                if (std::abs(dot - geom.spectrum().b_ml_P(m, lp)) <= kTightTol)
                    mask |= (1u << lp);
            }
            tight_mask[static_cast<std::size_t>(m)][j] = mask;
        }
    }

    RngStream rng(cfg.seed);
    std::vector<std::int64_t> q(static_cast<std::size_t>(n), 0), a(static_cast<std::size_t>(n)),
        q_next(static_cast<std::size_t>(n)), u(static_cast<std::size_t>(n));

    BatchSeries qw_series(horizon, cfg.batches);
    BatchSeries t1_series(horizon, cfg.batches), t2_series(horizon, cfg.batches),
        t3_series(horizon, cfg.batches), t4_series(horizon, cfg.batches),
        bal_series(horizon, cfg.batches);
    std::vector<BatchSeries> flow_series;
    flow_series.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) flow_series.emplace_back(horizon, cfg.batches);
    std::vector<BatchSeries> pk_series, ph_series;
    for (std::size_t r = 0; r < cfg.moment_orders.size(); ++r) {
        pk_series.emplace_back(horizon, cfg.batches);
        ph_series.emplace_back(horizon, cfg.batches);
    }
    std::vector<KahanSum> q_mean(static_cast<std::size_t>(n));
    std::vector<std::uint64_t> state_slots(static_cast<std::size_t>(num_states), 0);
    std::vector<std::uint64_t> tight_slots(
        static_cast<std::size_t>(num_states) * static_cast<std::size_t>(P_size), 0);
    DivergenceProbe divergence(horizon);
    ConeWorkspace cone(geom.cone_normals());

    const Eigen::MatrixXd& H = geom.H();
    const bool h_identity =
        (H - Eigen::MatrixXd::Identity(n, n)).lpNorm<Eigen::Infinity>() < 1e-14;
    std::vector<double> h_flat(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            h_flat[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                   static_cast<std::size_t>(j)] = H(i, j);
    std::vector<double> qd(static_cast<std::size_t>(n)), dsd(static_cast<std::size_t>(n)),
        ud(static_cast<std::size_t>(n)), qnd(static_cast<std::size_t>(n)),
        h_q(static_cast<std::size_t>(n)), h_ds(static_cast<std::size_t>(n)),
        h_u(static_cast<std::size_t>(n)), h_qn(static_cast<std::size_t>(n));
    auto apply_h = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (int i = 0; i < n; ++i) {
            const double* row = h_flat.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += row[j] * x[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = acc;
        }
    };
    auto dot_v = [n](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
        return acc;
    };

    const int a_max = model.arrival.a_max();
    const int s_max = model.channel.s_max();

    for (std::uint64_t slot = 0; slot < total; ++slot) {
        const int m = model.channel.sample_state(rng);
        const auto& set = model.channel.service_set(m);
        const SchedulePick dec = maxweight_pick(q, set, rng);
        const auto& s = set[dec.index];
        model.arrival.sample(rng, a);

        for (int i = 0; i < n; ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            if (a[si] > a_max || s[si] > s_max)
                throw ModelError("run: sampled arrival/service exceeds its bound");
            const std::int64_t net = q[si] + a[si] - s[si];
            q_next[si] = net > 0 ? net : 0;
            u[si] = net < 0 ? -net : 0;
            if (q_next[si] * u[si] != 0 || u[si] < 0 || u[si] > s[si])
                throw ModelError("run: queue recursion invariant violated");
        }

        if (slot >= cfg.burn_in) {
            double qw = 0.0, total_q = 0.0;
            for (int i = 0; i < n; ++i) {
                const std::size_t si = static_cast<std::size_t>(i);
                qd[si] = static_cast<double>(q[si]);
                dsd[si] = static_cast<double>(a[si] - s[si]);
                ud[si] = static_cast<double>(u[si]);
                qnd[si] = static_cast<double>(q_next[si]);
                qw += qd[si] * cfg.w[i];
                total_q += qd[si];
                q_mean[si].add(qd[si]);
                flow_series[si].add(static_cast<double>(a[si] - (s[si] - u[si])));
            }
            qw_series.add(qw);
            divergence.add(total_q);

            double t1, t2, t3, t4, perp_h2;
            if (h_identity) {  // projection is the identity; skip the matvecs
                t1 = -2.0 * dot_v(qd, dsd);
                t2 = dot_v(dsd, dsd);
                t3 = dot_v(ud, ud);
                t4 = 2.0 * dot_v(qnd, ud);
                perp_h2 = 0.0;
            } else {
                apply_h(qd, h_q);
                apply_h(dsd, h_ds);
                apply_h(ud, h_u);
                apply_h(qnd, h_qn);
                t1 = -2.0 * dot_v(h_q, h_ds);
                t2 = dot_v(h_ds, h_ds);
                t3 = dot_v(h_u, h_u);
                t4 = 2.0 * dot_v(h_qn, h_u);
                perp_h2 = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double d = qd[static_cast<std::size_t>(i)] - h_q[static_cast<std::size_t>(i)];
                    perp_h2 += d * d;
                }
            }
            t1_series.add(t1);
            t2_series.add(t2);
            t3_series.add(t3);
            t4_series.add(t4);
            bal_series.add(t1 - (t2 - t3 + t4));

            const double perp_k2 = cone.perp_squared_norm(qd.data());
            for (std::size_t r = 0; r < cfg.moment_orders.size(); ++r) {
                pk_series[r].add(norm_power(perp_k2, cfg.moment_orders[r]));
                ph_series[r].add(norm_power(perp_h2, cfg.moment_orders[r]));
            }

            state_slots[static_cast<std::size_t>(m)] += 1;
            const std::uint32_t mask = tight_mask[static_cast<std::size_t>(m)][dec.index];
            for (int lp = 0; lp < P_size; ++lp)
                if (mask & (1u << lp))
                    tight_slots[static_cast<std::size_t>(m) * static_cast<std::size_t>(P_size) +
                                static_cast<std::size_t>(lp)] += 1;
        }
        q.swap(q_next);
    }

    SimRecord rec;
    rec.mean_qw = qw_series.estimate();
    rec.mean_q.resize(n);
    for (int i = 0; i < n; ++i)
        rec.mean_q[i] = q_mean[static_cast<std::size_t>(i)].value() / static_cast<double>(horizon);
    rec.drift = {t1_series.estimate(), t2_series.estimate(), t3_series.estimate(),
                 t4_series.estimate(), bal_series.estimate()};
    for (std::size_t r = 0; r < cfg.moment_orders.size(); ++r)
        rec.perp_moments.push_back(
            {cfg.moment_orders[r], pk_series[r].estimate(), ph_series[r].estimate()});
    rec.pi_hat.resize(num_states, P_size);
    for (int m = 0; m < num_states; ++m)
        for (int lp = 0; lp < P_size; ++lp) {
            const std::uint64_t denom = state_slots[static_cast<std::size_t>(m)];
            rec.pi_hat(m, lp) =
                denom == 0 ? 1.0
                           : static_cast<double>(
                                 tight_slots[static_cast<std::size_t>(m) * static_cast<std::size_t>(P_size) +
                                             static_cast<std::size_t>(lp)]) /
                                 static_cast<double>(denom);
        }
    for (auto& fs : flow_series) rec.flow_balance.push_back(fs.estimate());
    rec.slots_used = horizon;
    rec.burn_in = cfg.burn_in;
    rec.seed = cfg.seed;
    rec.diverging = divergence.diverging();
    return rec;
}

SimRecord run_jsq(const LoadBalanceModel& model, const RunConfig& cfg) {
    check_run_config(cfg);
    const int n = model.n;
    const double lambda = model.arrival.mean()[0];
    if (lambda >= model.mu_sigma())
        throw std::invalid_argument("run: arrival rate must be strictly below mu_sigma");
    Eigen::VectorXd w = cfg.w;
    if (w.size() == 0) w = Eigen::VectorXd::Ones(n);
    if (w.size() != n) throw std::invalid_argument("run: weight vector dimension mismatch");

    const std::uint64_t horizon =
        static_cast<std::uint64_t>(cfg.batches) * (cfg.horizon / static_cast<std::uint64_t>(cfg.batches));
    const std::uint64_t total = cfg.burn_in + horizon;

    RngStream rng(cfg.seed);
    std::vector<std::int64_t> q(static_cast<std::size_t>(n), 0), a(static_cast<std::size_t>(n), 0),
        s(static_cast<std::size_t>(n)), q_next(static_cast<std::size_t>(n)),
        u(static_cast<std::size_t>(n));

    BatchSeries qw_series(horizon, cfg.batches);
    BatchSeries t1_series(horizon, cfg.batches), t2_series(horizon, cfg.batches),
        t3_series(horizon, cfg.batches), t4_series(horizon, cfg.batches),
        bal_series(horizon, cfg.batches);
    std::vector<BatchSeries> flow_series;
    for (int i = 0; i < n; ++i) flow_series.emplace_back(horizon, cfg.batches);
    std::vector<BatchSeries> pk_series;
    for (std::size_t r = 0; r < cfg.moment_orders.size(); ++r)
        pk_series.emplace_back(horizon, cfg.batches);
    std::vector<KahanSum> q_mean(static_cast<std::size_t>(n));
    DivergenceProbe divergence(horizon);

    const int a_max = model.arrival.a_max();
    const int s_max = model.s_max();
    const double inv_n = 1.0 / n;

    for (std::uint64_t slot = 0; slot < total; ++slot) {
        std::int64_t batch = 0;
        {
            std::int64_t buf[1];
            model.arrival.sample(rng, std::span<std::int64_t>(buf, 1));
            batch = buf[0];
        }
        const std::size_t target = jsq_pick(q, rng);
        std::fill(a.begin(), a.end(), 0);
        a[target] = batch;
        for (int i = 0; i < n; ++i)
            s[static_cast<std::size_t>(i)] = model.service[static_cast<std::size_t>(i)].sample(rng);

        for (int i = 0; i < n; ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            if (a[si] > a_max || s[si] > s_max)
                throw ModelError("run: sampled arrival/service exceeds its bound");
            const std::int64_t net = q[si] + a[si] - s[si];
            q_next[si] = net > 0 ? net : 0;
            u[si] = net < 0 ? -net : 0;
            if (q_next[si] * u[si] != 0) throw ModelError("run: queue recursion invariant violated");
        }

        if (slot >= cfg.burn_in) {
            // Projection onto the all-queues-equal line in closed form:
            // x_par = mean(x) * 1, so ||x_par||^2 = n * mean(x)^2.
            double sum_q = 0.0, sum_ds = 0.0, sum_u = 0.0, sum_qn = 0.0, qw = 0.0;
            for (int i = 0; i < n; ++i) {
                const std::size_t si = static_cast<std::size_t>(i);
                sum_q += static_cast<double>(q[si]);
                sum_ds += static_cast<double>(a[si] - s[si]);
                sum_u += static_cast<double>(u[si]);
                sum_qn += static_cast<double>(q_next[si]);
                qw += static_cast<double>(q[si]) * w[i];
                q_mean[si].add(static_cast<double>(q[si]));
                flow_series[si].add(static_cast<double>(a[si] - (s[si] - u[si])));
            }
            qw_series.add(qw);
            divergence.add(sum_q);

            const double mq = sum_q * inv_n, mds = sum_ds * inv_n, mu = sum_u * inv_n,
                         mqn = sum_qn * inv_n;
            const double t1 = -2.0 * n * mq * mds;
            const double t2 = n * mds * mds;
            const double t3 = n * mu * mu;
            const double t4 = 2.0 * n * mqn * mu;
            t1_series.add(t1);
            t2_series.add(t2);
            t3_series.add(t3);
            t4_series.add(t4);
            bal_series.add(t1 - (t2 - t3 + t4));

            double perp2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = static_cast<double>(q[static_cast<std::size_t>(i)]) - mq;
                perp2 += d * d;
            }
            for (std::size_t r = 0; r < cfg.moment_orders.size(); ++r)
                pk_series[r].add(norm_power(perp2, cfg.moment_orders[r]));
        }
        q.swap(q_next);
    }

    SimRecord rec;
    rec.mean_qw = qw_series.estimate();
    rec.mean_q.resize(n);
    for (int i = 0; i < n; ++i)
        rec.mean_q[i] = q_mean[static_cast<std::size_t>(i)].value() / static_cast<double>(horizon);
    rec.drift = {t1_series.estimate(), t2_series.estimate(), t3_series.estimate(),
                 t4_series.estimate(), bal_series.estimate()};
    for (std::size_t r = 0; r < cfg.moment_orders.size(); ++r) {
        const Estimate e = pk_series[r].estimate();
        rec.perp_moments.push_back({cfg.moment_orders[r], e, e});
    }
    rec.pi_hat.resize(0, 0);
    for (auto& fs : flow_series) rec.flow_balance.push_back(fs.estimate());
    rec.slots_used = horizon;
    rec.burn_in = cfg.burn_in;
    rec.seed = cfg.seed;
    rec.diverging = divergence.diverging();
    return rec;
}

}  // namespace switchsim
