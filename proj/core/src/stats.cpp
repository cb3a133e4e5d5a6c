#include "switchsim/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace switchsim {

double student_t_975(int df) {
    if (df < 1) throw std::invalid_argument("student_t_975: df must be >= 1");
    boost::math::students_t_distribution<double> dist(df);
    return boost::math::quantile(dist, 0.975);
}

BatchSeries::BatchSeries(std::uint64_t total_samples, int batches) {
    if (batches < 2) throw std::invalid_argument("batch series: need at least 2 batches");
    if (total_samples < static_cast<std::uint64_t>(batches))
        throw std::invalid_argument("batch series: fewer samples than batches");
    batch_len_ = total_samples / static_cast<std::uint64_t>(batches);
    means_.reserve(static_cast<std::size_t>(batches));
}

Estimate BatchSeries::estimate() const {
    if (means_.size() < 2) throw std::logic_error("batch series: not enough completed batches");
    const int b = static_cast<int>(means_.size());
    double mean = 0.0;
    for (double m : means_) mean += m;
    mean /= b;
    double var = 0.0;
    for (double m : means_) var += (m - mean) * (m - mean);
    var /= (b - 1);
    if (var <= 0.0) return {mean, 0.0};
    return {mean, student_t_975(b - 1) * std::sqrt(var / b)};
}

Estimate batch_means(std::span<const double> series, int batches) {
    BatchSeries bs(series.size(), batches);
    for (double v : series) bs.add(v);
    return bs.estimate();
}

}  // namespace switchsim
