#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace switchsim {

/// Compensated (Kahan) summation; keeps high-order moment accumulation
/// accurate over very long runs.
class KahanSum {
  public:
    void add(double v) {
        const double y = v - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }
    void reset() {
        s_ = 0.0;
        c_ = 0.0;
    }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

struct Estimate {
    double mean = 0.0;
    double ci_half_width = 0.0;
};

/// Two-sided 95% Student-t quantile (0.975), df >= 1.
double student_t_975(int df);

/// Batch-means estimator over a fixed horizon: the sample stream is split into
/// `batches` equal batches; the CI half-width is
/// t(0.975, batches-1) * sd(batch means) / sqrt(batches).
class BatchSeries {
  public:
    BatchSeries() = default;
    BatchSeries(std::uint64_t total_samples, int batches);

    void add(double v) {
        acc_.add(v);
        ++count_;
        if (++in_batch_ == batch_len_) {
            means_.push_back(acc_.value() / static_cast<double>(batch_len_));
            acc_.reset();
            in_batch_ = 0;
        }
    }
    std::uint64_t count() const { return count_; }
    Estimate estimate() const;
    const std::vector<double>& batch_means() const { return means_; }

  private:
    std::uint64_t batch_len_ = 0;
    std::uint64_t in_batch_ = 0;
    std::uint64_t count_ = 0;
    KahanSum acc_;
    std::vector<double> means_;
};

/// One-shot batch-means reduction of a full series.
Estimate batch_means(std::span<const double> series, int batches);

}  // namespace switchsim
