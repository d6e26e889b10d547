#include "l96da/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace l96da {

StateVector ensemble_mean(const Ensemble& e) {
  if (e.size() < 1) throw std::invalid_argument("empty ensemble");
  return e.members.rowwise().mean();
}

double rmse(const Ensemble& e, const StateVector& truth) {
  const StateVector diff = truth - ensemble_mean(e);
  return std::sqrt(diff.squaredNorm() / e.dim());
}

double spread(const Ensemble& e) {
  const int n = e.size();
  if (n < 2) throw std::invalid_argument("spread needs at least two members");
  const StateVector mean = ensemble_mean(e);
  const Eigen::MatrixXd dev = e.members.colwise() - mean;
  const double total_var = dev.squaredNorm() / (n - 1);
  return std::sqrt(total_var / e.dim());
}

double crps(std::span<const double> sample, double truth) {
  const int n = static_cast<int>(sample.size());
  if (n < 1) throw std::invalid_argument("crps needs a nonempty sample");
  double mad = 0.0;
  for (double s : sample) mad += std::abs(s - truth);
  mad /= n;

  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  // sum over pairs |s_i - s_j| = 2 sum_k (2k - 1 - n) s_(k), k 1-based
  double pair_sum = 0.0;
  for (int k = 1; k <= n; ++k) pair_sum += (2.0 * k - 1.0 - n) * sorted[k - 1];
  return mad - pair_sum / (static_cast<double>(n) * n);
}

double crps_mean(const Ensemble& e, const StateVector& truth) {
  double acc = 0.0;
  std::vector<double> row(e.size());
  for (int k = 0; k < e.dim(); ++k) {
    for (int i = 0; i < e.size(); ++i) row[i] = e.members(k, i);
    acc += crps(row, truth[k]);
  }
  return acc / e.dim();
}

Ensemble inflate(const Ensemble& e, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("inflation factor must be >= 1");
  const StateVector mean = ensemble_mean(e);
  Ensemble out;
  out.members = (r * (e.members.colwise() - mean)).colwise() + mean;
  return out;
}

bool check_divergence(const Ensemble& e, double threshold,
                      double climatology_mean) {
  if (!e.members.allFinite()) return true;
  const StateVector mean = ensemble_mean(e);
  const double dev = std::sqrt(
      (mean.array() - climatology_mean).matrix().squaredNorm() / e.dim());
  return dev > threshold;
}

}  // namespace l96da
