#include "l96da/observations.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace l96da {

void ObservingSystem::validate() const {
  if (!(noise_sd > 0.0)) throw std::invalid_argument("noise_sd must be positive");
  if (!std::isfinite(slope) || !std::isfinite(center)) {
    throw std::invalid_argument("slope and center must be finite");
  }
}

double observe_one(double x, const ObservingSystem& sys, double eps) {
  switch (sys.kind) {
    case ObsKind::Linear:
      return x + eps;
    case ObsKind::LogitNormal: {
      double y = 1.0 / (1.0 + std::exp(sys.slope * (x - sys.center) + eps));
      // keep the logit finite
      if (y <= 0.0) y = std::numeric_limits<double>::min();
      if (y >= 1.0) y = std::nextafter(1.0, 0.0);
      return y;
    }
    case ObsKind::LogNormal: {
      double y = std::exp(sys.slope * std::abs(x - sys.center) + eps);
      if (y <= 0.0) y = std::numeric_limits<double>::min();
      return y;
    }
  }
  throw std::logic_error("unknown observation kind");
}

ObservationBatch sample_obs(const StateVector& x, const ObservingSystem& sys,
                            Rng& rng, int cycle_index) {
  ObservationBatch batch;
  batch.system = sys;
  batch.cycle_index = cycle_index;
  batch.values.resize(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    batch.values[k] = observe_one(x[k], sys, sys.noise_sd * rng.normal());
  }
  return batch;
}

double log_likelihood(double y, double z, const ObservingSystem& sys) {
  const double inv_two_var = 0.5 / (sys.noise_sd * sys.noise_sd);
  switch (sys.kind) {
    case ObsKind::Linear: {
      const double r = y - z;
      return -r * r * inv_two_var;
    }
    case ObsKind::LogitNormal: {
      if (!(y > 0.0 && y < 1.0)) {
        throw std::domain_error("logit-normal observation outside (0,1)");
      }
      const double r = std::log((1.0 - y) / y) - sys.slope * (z - sys.center);
      return -r * r * inv_two_var;
    }
    case ObsKind::LogNormal: {
      if (!(y > 0.0)) {
        throw std::domain_error("log-normal observation must be positive");
      }
      const double r = std::log(y) - sys.slope * std::abs(z - sys.center);
      return -r * r * inv_two_var;
    }
  }
  throw std::logic_error("unknown observation kind");
}

}  // namespace l96da
