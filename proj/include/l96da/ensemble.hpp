#pragma once

#include <Eigen/Core>
#include <span>

#include "l96da/lorenz96.hpp"

namespace l96da {

/// Ensemble of model states, one column per member.
struct Ensemble {
  Eigen::MatrixXd members;  // dim x N

  int size() const { return static_cast<int>(members.cols()); }
  int dim() const { return static_cast<int>(members.rows()); }
};

/// Per-cycle verification record; analysis fields are NaN on diverged cycles.
struct CycleMetrics {
  int cycle_index = 0;
  double forecast_rmse = 0, forecast_spread = 0, forecast_crps = 0;
  double analysis_rmse = 0, analysis_spread = 0, analysis_crps = 0;
  bool diverged = false;
};

StateVector ensemble_mean(const Ensemble& e);

/// Root mean squared error of the ensemble mean against truth.
double rmse(const Ensemble& e, const StateVector& truth);

/// sqrt of the site-averaged ensemble variance (1/(N-1) normalization).
double spread(const Ensemble& e);

/// Continuous ranked probability score of the empirical cdf of `sample`
/// against a scalar outcome, in the closed-form energy expression
/// mean|s_i - truth| - (1/2) mean|s_i - s_j|.
double crps(std::span<const double> sample, double truth);

/// Site-mean CRPS of the ensemble against a truth state.
double crps_mean(const Ensemble& e, const StateVector& truth);

/// Scale perturbations about the mean by r >= 1; the mean is unchanged.
Ensemble inflate(const Ensemble& e, double r);

/// True when any entry is non-finite or the ensemble mean sits implausibly
/// far from the model climatology.
bool check_divergence(const Ensemble& e, double threshold = 1e3,
                      double climatology_mean = 2.3);

}  // namespace l96da
