#pragma once

#include <Eigen/Core>

#include "l96da/lorenz96.hpp"
#include "l96da/rng.hpp"

namespace l96da {

enum class ObsKind { Linear, LogitNormal, LogNormal };

/// One of the three observing systems. The noise enters inside the
/// nonlinearity, so the observation is not "H(x) plus noise" in general:
///   Linear      y = x + eps                         range R
///   LogitNormal y = 1/(1 + exp{s (x - c) + eps})    range (0,1)
///   LogNormal   y = exp{s |x - c| + eps}            range (0,inf)
struct ObservingSystem {
  ObsKind kind = ObsKind::Linear;
  double noise_sd = 1.0;
  double slope = 0.5;
  double center = 2.5;

  void validate() const;
};

struct ObservationBatch {
  Eigen::VectorXd values;
  ObservingSystem system;
  int cycle_index = 0;
};

/// Deterministic forward map with an explicit noise value; eps = 0 gives the
/// noise-free observation. Values at a closed boundary are nudged into the
/// open range.
double observe_one(double x, const ObservingSystem& sys, double eps);

/// Observe every site of x with independent noise draws (site order).
ObservationBatch sample_obs(const StateVector& x, const ObservingSystem& sys,
                            Rng& rng, int cycle_index = 0);

/// log [y|z] up to an additive constant independent of z. Throws
/// std::domain_error when y lies outside the open range of the system.
double log_likelihood(double y, double z, const ObservingSystem& sys);

}  // namespace l96da
