#pragma once

#include <vector>

#include "switchsim/rng.hpp"

namespace switchsim {

/// Probability mass function on a finite set of nonnegative integers.
/// Probabilities must sum to 1 within 1e-12.
class DiscretePmf {
  public:
    DiscretePmf(std::vector<int> support, std::vector<double> probs);

    static DiscretePmf constant(int value);
    static DiscretePmf bernoulli(double p);
    static DiscretePmf binomial(int trials, double p);
    /// Two-point law on {0, high} with the given mean (mean = high * P(high)).
    static DiscretePmf two_point(int high, double mean);

    double mean() const { return mean_; }
    double variance() const { return var_; }
    int max_value() const { return support_.back(); }

    int sample(RngStream& rng) const {
        const double u = rng.uniform01();
        // Supports are tiny; a linear CDF walk beats binary search here.
        for (std::size_t i = 0; i + 1 < cdf_.size(); ++i)
            if (u < cdf_[i]) return support_[i];
        return support_.back();
    }

    const std::vector<int>& support() const { return support_; }
    const std::vector<double>& probs() const { return probs_; }

  private:
    std::vector<int> support_;  // sorted, unique
    std::vector<double> probs_;
    std::vector<double> cdf_;
    double mean_ = 0.0;
    double var_ = 0.0;
};

/// Parametric family of arrival laws used to re-target means when scaling a
/// model toward heavy traffic.
struct ArrivalFamily {
    enum class Kind { Bernoulli, Binomial, TwoPoint };

    Kind kind = Kind::Bernoulli;
    int trials = 1;  // Binomial
    int point = 1;   // TwoPoint high value

    int a_max() const;
    /// Law of the family with the requested mean. Throws InvalidTargetError if
    /// the mean is outside [0, a_max].
    DiscretePmf pmf_for_mean(double mean) const;
};

}  // namespace switchsim
