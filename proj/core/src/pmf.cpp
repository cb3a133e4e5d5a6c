#include "switchsim/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "switchsim/errors.hpp"

namespace switchsim {

namespace {
constexpr double kPmfSumTol = 1e-12;
}

DiscretePmf::DiscretePmf(std::vector<int> support, std::vector<double> probs) {
    if (support.empty() || support.size() != probs.size())
        throw ModelError("pmf: support/probability size mismatch or empty");

    // Merge duplicate atoms and sort.
    std::map<int, double> atoms;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 0) throw ModelError("pmf: negative support value");
        if (probs[i] < -kPmfSumTol) throw ModelError("pmf: negative probability");
        atoms[support[i]] += probs[i];
    }
    double total = 0.0;
    for (auto& [v, p] : atoms) total += p;
    if (std::abs(total - 1.0) > kPmfSumTol)
        throw ModelError("pmf: probabilities sum to " + std::to_string(total));

    support_.reserve(atoms.size());
    probs_.reserve(atoms.size());
    cdf_.reserve(atoms.size());
    double acc = 0.0;
    for (auto& [v, p] : atoms) {
        support_.push_back(v);
        probs_.push_back(p);
        acc += p;
        cdf_.push_back(acc);
        mean_ += p * v;
    }
    cdf_.back() = 1.0;  // guard the final bucket against rounding
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const double d = support_[i] - mean_;
        var_ += probs_[i] * d * d;
    }
}

DiscretePmf DiscretePmf::constant(int value) { return DiscretePmf({value}, {1.0}); }

DiscretePmf DiscretePmf::bernoulli(double p) {
    if (p < 0.0 || p > 1.0) throw InvalidTargetError("bernoulli: p outside [0,1]");
    return DiscretePmf({0, 1}, {1.0 - p, p});
}

DiscretePmf DiscretePmf::binomial(int trials, double p) {
    if (trials < 1) throw ModelError("binomial: trials must be >= 1");
    if (p < 0.0 || p > 1.0) throw InvalidTargetError("binomial: p outside [0,1]");
    std::vector<int> sup(trials + 1);
    std::vector<double> pr(trials + 1);
    double coeff = 1.0;  // C(trials, k), updated multiplicatively
    for (int k = 0; k <= trials; ++k) {
        sup[k] = k;
        pr[k] = coeff * std::pow(p, k) * std::pow(1.0 - p, trials - k);
        coeff = coeff * (trials - k) / (k + 1);
    }
    // Renormalize the tiny rounding drift so the constructor's 1e-12 gate holds.
    double total = 0.0;
    for (double v : pr) total += v;
    for (double& v : pr) v /= total;
    return DiscretePmf(std::move(sup), std::move(pr));
}

DiscretePmf DiscretePmf::two_point(int high, double mean) {
    if (high < 1) throw ModelError("two_point: high value must be >= 1");
    if (mean < 0.0 || mean > high)
        throw InvalidTargetError("two_point: mean outside [0, high]");
    const double p = mean / high;
    return DiscretePmf({0, high}, {1.0 - p, p});
}

int ArrivalFamily::a_max() const {
    switch (kind) {
        case Kind::Bernoulli: return 1;
        case Kind::Binomial: return trials;
        case Kind::TwoPoint: return point;
    }
    return 1;
}

DiscretePmf ArrivalFamily::pmf_for_mean(double mean) const {
    if (mean < 0.0 || mean > a_max())
        throw InvalidTargetError("arrival family: mean " + std::to_string(mean) +
                                 " outside [0, " + std::to_string(a_max()) + "]");
    switch (kind) {
        case Kind::Bernoulli: return DiscretePmf::bernoulli(mean);
        case Kind::Binomial: return DiscretePmf::binomial(trials, mean / trials);
        case Kind::TwoPoint: return DiscretePmf::two_point(point, mean);
    }
    throw InvalidTargetError("arrival family: unknown kind");
}

}  // namespace switchsim
