#include "switchsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "switchsim/errors.hpp"

namespace switchsim {

namespace {
constexpr double kPmfSumTol = 1e-12;
}

ArrivalModel ArrivalModel::per_queue(std::vector<DiscretePmf> pmfs,
                                     std::optional<ArrivalFamily> family) {
    if (pmfs.empty()) throw ModelError("arrival: no queues");
    ArrivalModel m;
    m.kind_ = ArrivalKind::PerQueueIndependent;
    m.n_ = static_cast<int>(pmfs.size());
    for (const auto& p : pmfs) m.a_max_ = std::max(m.a_max_, p.max_value());
    m.pmfs_ = std::move(pmfs);
    m.family_ = std::move(family);
    return m;
}

ArrivalModel ArrivalModel::joint(JointArrivalPmf table) {
    if (table.atoms.empty() || table.atoms.size() != table.probs.size())
        throw ModelError("joint arrivals: empty table or size mismatch");
    const std::size_t n = table.atoms.front().size();
    if (n == 0) throw ModelError("joint arrivals: zero-dimensional atoms");
    double total = 0.0;
    for (std::size_t i = 0; i < table.atoms.size(); ++i) {
        if (table.atoms[i].size() != n) throw ModelError("joint arrivals: ragged atoms");
        for (int v : table.atoms[i])
            if (v < 0) throw ModelError("joint arrivals: negative component");
        if (table.probs[i] < -kPmfSumTol) throw ModelError("joint arrivals: negative probability");
        total += table.probs[i];
    }
    if (std::abs(total - 1.0) > kPmfSumTol)
        throw ModelError("joint arrivals: probabilities sum to " + std::to_string(total));

    ArrivalModel m;
    m.kind_ = ArrivalKind::PerQueueIndependent;
    m.n_ = static_cast<int>(n);
    for (const auto& a : table.atoms)
        for (int v : a) m.a_max_ = std::max(m.a_max_, v);
    m.joint_cdf_.reserve(table.probs.size());
    double acc = 0.0;
    for (double p : table.probs) {
        acc += p;
        m.joint_cdf_.push_back(acc);
    }
    m.joint_cdf_.back() = 1.0;
    m.joint_ = std::move(table);
    return m;
}

ArrivalModel ArrivalModel::single_stream(DiscretePmf pmf, std::optional<ArrivalFamily> family) {
    ArrivalModel m;
    m.kind_ = ArrivalKind::SingleStream;
    m.n_ = 1;
    m.a_max_ = pmf.max_value();
    m.pmfs_.push_back(std::move(pmf));
    m.family_ = std::move(family);
    return m;
}

Eigen::VectorXd ArrivalModel::mean() const {
    Eigen::VectorXd mu(n_);
    if (joint_) {
        mu.setZero();
        for (std::size_t i = 0; i < joint_->atoms.size(); ++i)
            for (int j = 0; j < n_; ++j) mu[j] += joint_->probs[i] * joint_->atoms[i][j];
    } else {
        for (int j = 0; j < n_; ++j) mu[j] = pmfs_[static_cast<std::size_t>(j)].mean();
    }
    return mu;
}

Eigen::MatrixXd ArrivalModel::covariance() const {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n_, n_);
    if (joint_) {
        const Eigen::VectorXd mu = mean();
        for (std::size_t i = 0; i < joint_->atoms.size(); ++i) {
            Eigen::VectorXd d(n_);
            for (int j = 0; j < n_; ++j) d[j] = joint_->atoms[i][j] - mu[j];
            cov += joint_->probs[i] * d * d.transpose();
        }
    } else {
        for (int j = 0; j < n_; ++j)
            cov(j, j) = pmfs_[static_cast<std::size_t>(j)].variance();
    }
    return cov;
}

const ArrivalFamily& ArrivalModel::family() const {
    if (!family_) throw ModelError("arrival: no parametric family attached");
    return *family_;
}

void ArrivalModel::sample(RngStream& rng, std::span<std::int64_t> out) const {
    if (joint_) {
        const double u = rng.uniform01();
        std::size_t k = 0;
        while (k + 1 < joint_cdf_.size() && u >= joint_cdf_[k]) ++k;
        for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(j)] = joint_->atoms[k][static_cast<std::size_t>(j)];
        return;
    }
    for (int j = 0; j < n_; ++j)
        out[static_cast<std::size_t>(j)] = pmfs_[static_cast<std::size_t>(j)].sample(rng);
}

ChannelModel::ChannelModel(std::vector<std::string> state_names, std::vector<double> psi,
                           std::vector<std::vector<std::vector<int>>> service_sets) {
    if (psi.empty() || psi.size() != service_sets.size())
        throw ModelError("channel: psi/service-set size mismatch or empty");
    if (state_names.empty()) {
        state_names.resize(psi.size());
        for (std::size_t m = 0; m < psi.size(); ++m) state_names[m] = "m" + std::to_string(m);
    }
    if (state_names.size() != psi.size()) throw ModelError("channel: state name count mismatch");

    double total = 0.0;
    for (double p : psi) {
        if (p <= 0.0) throw ModelError("channel: psi entries must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > kPmfSumTol)
        throw ModelError("channel: psi sums to " + std::to_string(total));

    // Dimension, bounds, and closure under coordinate-axis projections.
    for (std::size_t m = 0; m < service_sets.size(); ++m) {
        const auto& set = service_sets[m];
        if (set.empty()) throw ModelError("channel: empty service set in state " + state_names[m]);
        if (n_ == 0) n_ = static_cast<int>(set.front().size());
        std::set<std::vector<int>> members(set.begin(), set.end());
        for (const auto& x : set) {
            if (static_cast<int>(x.size()) != n_)
                throw ModelError("channel: service vector dimension mismatch");
            for (int v : x) {
                if (v < 0) throw ModelError("channel: negative service component");
                s_max_ = std::max(s_max_, v);
            }
            for (int i = 0; i < n_; ++i) {
                std::vector<int> proj(static_cast<std::size_t>(n_), 0);
                proj[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
                if (!members.count(proj))
                    throw ModelError("channel: state " + state_names[m] +
                                     " is not closed under coordinate-axis projections");
            }
        }
    }
    if (n_ == 0) throw ModelError("channel: zero-dimensional service vectors");

    names_ = std::move(state_names);
    psi_ = std::move(psi);
    sets_ = std::move(service_sets);
    cdf_.reserve(psi_.size());
    double acc = 0.0;
    for (double p : psi_) {
        acc += p;
        cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
}

SwitchModel::SwitchModel(ArrivalModel arrival_in, ChannelModel channel_in)
    : n(channel_in.n()), arrival(std::move(arrival_in)), channel(std::move(channel_in)) {
    if (arrival.kind() != ArrivalKind::PerQueueIndependent)
        throw ModelError("switch: arrivals must be per-queue");
    if (arrival.dimension() != n)
        throw ModelError("switch: arrival dimension does not match queue count");
}

LoadBalanceModel::LoadBalanceModel(int n_in, ArrivalModel arrival_in,
                                   std::vector<DiscretePmf> service_in)
    : n(n_in), arrival(std::move(arrival_in)), service(std::move(service_in)) {
    if (arrival.kind() != ArrivalKind::SingleStream)
        throw ModelError("load balance: arrivals must be a single stream");
    if (n < 1 || static_cast<int>(service.size()) != n)
        throw ModelError("load balance: service law count does not match queue count");
    for (const auto& s : service)
        if (s.mean() <= 0.0) throw ModelError("load balance: service means must be positive");
}

double LoadBalanceModel::mu_sigma() const {
    double total = 0.0;
    for (const auto& s : service) total += s.mean();
    return total;
}

Eigen::VectorXd LoadBalanceModel::mu() const {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = service[static_cast<std::size_t>(i)].mean();
    return v;
}

Eigen::VectorXd LoadBalanceModel::sigma_s2() const {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = service[static_cast<std::size_t>(i)].variance();
    return v;
}

int LoadBalanceModel::s_max() const {
    int s = 0;
    for (const auto& law : service) s = std::max(s, law.max_value());
    return s;
}

std::vector<std::int64_t> sample_arrivals(const ArrivalModel& model, RngStream& rng) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(model.dimension()));
    model.sample(rng, out);
    return out;
}

void step_into(std::span<const std::int64_t> q, std::span<const std::int64_t> a,
               std::span<const std::int64_t> s, std::span<std::int64_t> q_next,
               std::span<std::int64_t> u) {
    const std::size_t n = q.size();
    if (a.size() != n || s.size() != n || q_next.size() != n || u.size() != n)
        throw std::invalid_argument("step: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t net = q[i] + a[i] - s[i];
        q_next[i] = net > 0 ? net : 0;
        u[i] = net < 0 ? -net : 0;
    }
}

StepResult step(std::span<const std::int64_t> q, std::span<const std::int64_t> a,
                std::span<const std::int64_t> s) {
    StepResult r;
    r.q_next.resize(q.size());
    r.u.resize(q.size());
    step_into(q, a, s, r.q_next, r.u);
    return r;
}

ArrivalModel scale_to_heavy_traffic(const ArrivalModel& base, const Eigen::VectorXd& nu,
                                    double eps) {
    if (!base.has_family())
        throw InvalidTargetError("scale: base arrival model carries no parametric family");
    const ArrivalFamily& fam = base.family();

    if (base.kind() == ArrivalKind::SingleStream) {
        if (nu.size() != 1) throw InvalidTargetError("scale: stream expects scalar capacity");
        const double mu_sigma = nu[0];
        if (eps <= 0.0 || eps >= mu_sigma)
            throw InvalidTargetError("scale: eps must lie in (0, mu_sigma)");
        return ArrivalModel::single_stream(fam.pmf_for_mean(mu_sigma - eps), fam);
    }

    if (eps <= 0.0 || eps >= 1.0)
        throw InvalidTargetError("scale: eps must lie in (0, 1)");
    if (nu.size() != base.dimension())
        throw InvalidTargetError("scale: direction dimension mismatch");
    std::vector<DiscretePmf> pmfs;
    pmfs.reserve(static_cast<std::size_t>(nu.size()));
    for (int i = 0; i < nu.size(); ++i) {
        if (nu[i] < 0.0) throw InvalidTargetError("scale: direction must be nonnegative");
        pmfs.push_back(fam.pmf_for_mean((1.0 - eps) * nu[i]));
    }
    return ArrivalModel::per_queue(std::move(pmfs), fam);
}

std::vector<std::vector<int>> iq_switch_service_set(int N) {
    if (N < 2) throw ModelError("iq switch: N must be >= 2");
    if (N > 6) throw ModelError("iq switch: N > 6 not supported (enumeration guard)");
    const int n = N * N;
    std::vector<std::vector<int>> set;
    std::vector<int> perm(static_cast<std::size_t>(N));
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<int> v(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < N; ++i) v[static_cast<std::size_t>(i * N + perm[static_cast<std::size_t>(i)])] = 1;
        set.push_back(std::move(v));
    } while (std::next_permutation(perm.begin(), perm.end()));
    // Coordinate-axis projections: every single-entry vector, and the zero vector.
    for (int k = 0; k < n; ++k) {
        std::vector<int> v(static_cast<std::size_t>(n), 0);
        v[static_cast<std::size_t>(k)] = 1;
        set.push_back(std::move(v));
    }
    set.emplace_back(static_cast<std::size_t>(n), 0);
    return set;
}

SwitchModel make_iq_switch(int N, const ArrivalFamily& family) {
    auto set = iq_switch_service_set(N);
    ChannelModel channel({"fixed"}, {1.0}, {std::move(set)});
    const int n = N * N;
    std::vector<DiscretePmf> pmfs;
    pmfs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pmfs.push_back(family.pmf_for_mean(1.0 / N));
    return SwitchModel(ArrivalModel::per_queue(std::move(pmfs), family), std::move(channel));
}

}  // namespace switchsim
