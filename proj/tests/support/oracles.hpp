#pragma once

// Independent re-implementations used as test oracles only.

#include <cmath>
#include <span>
#include <vector>

#include "l96da/lorenz96.hpp"

namespace l96da::testing {

/// Index-by-index ring tendency written against a wrap table instead of
/// modular arithmetic.
inline StateVector lorenz96_rhs_direct(const StateVector& x, double forcing) {
  const int n = static_cast<int>(x.size());
  std::vector<int> prev(n), prev2(n), next(n);
  for (int k = 0; k < n; ++k) {
    prev[k] = k == 0 ? n - 1 : k - 1;
    prev2[k] = k <= 1 ? n - 2 + k : k - 2;
    next[k] = k == n - 1 ? 0 : k + 1;
  }
  StateVector d(n);
  for (int k = 0; k < n; ++k) {
    d[k] = (x[next[k]] - x[prev2[k]]) * x[prev[k]] - x[k] + forcing;
  }
  return d;
}

/// Two-pass sample covariance matrix (1/(N-1)).
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& members) {
  const auto n = members.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(members.rows());
  for (Eigen::Index i = 0; i < n; ++i) mean += members.col(i);
  mean /= static_cast<double>(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(members.rows(), members.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd d = members.col(i) - mean;
    cov += d * d.transpose();
  }
  return cov / static_cast<double>(n - 1);
}

/// CRPS of an empirical cdf by direct integration of (F(t) - H(t-truth))^2:
/// the integrand is constant between consecutive breakpoints, so a midpoint
/// sum over the segments is exact quadrature.
inline double crps_integral(std::span<const double> sample, double truth) {
  std::vector<double> cuts(sample.begin(), sample.end());
  cuts.push_back(truth);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());

  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double width = cuts[i + 1] - cuts[i];
    if (width <= 0.0) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    double f = 0.0;
    for (double s : sorted) {
      if (s <= mid) f += 1.0;
    }
    f /= static_cast<double>(sorted.size());
    const double h = (mid >= truth) ? 1.0 : 0.0;
    acc += (f - h) * (f - h) * width;
  }
  return acc;
}

/// Closed-form scalar Kalman posterior for prior N(xb, s2) and observation
/// y = z + noise with variance g2.
struct ScalarKalman {
  double mean, var;
};
inline ScalarKalman scalar_kalman(double xb, double s2, double y, double g2) {
  const double gain = s2 / (s2 + g2);
  return {xb + gain * (y - xb), s2 * g2 / (s2 + g2)};
}

}  // namespace l96da::testing
