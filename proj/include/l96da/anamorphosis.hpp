#pragma once

#include <Eigen/Core>
#include <span>
#include <stdexcept>
#include <vector>

#include "l96da/ensemble.hpp"
#include "l96da/enkf.hpp"
#include "l96da/observations.hpp"
#include "l96da/rng.hpp"

namespace l96da {

/// Degenerate sample or failed inversion while building or applying a
/// transform; callers treat the cycle as diverged.
class AnamorphosisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MapKind { PiecewiseLinear, KDE, Identity };
enum class MapDomain { Unbounded, Unit01, Positive };

/// Invertible monotone scalar map fitted to a sample so that the transformed
/// marginal is approximately standard normal.
class AnamorphosisMap {
 public:
  static AnamorphosisMap identity();

  double forward(double v) const;
  double inverse(double u) const;

  MapKind kind() const { return kind_; }
  MapDomain domain() const { return domain_; }

 private:
  friend AnamorphosisMap build_pl_map(std::span<const double>, MapDomain, bool);
  friend AnamorphosisMap build_kde_map(std::span<const double>, MapDomain);
  AnamorphosisMap() = default;

  double pre_transform(double v) const;
  double pre_transform_inverse(double t) const;
  double kde_cdf(double t) const;
  double kde_pdf(double t) const;

  MapKind kind_ = MapKind::Identity;
  MapDomain domain_ = MapDomain::Unbounded;

  // piecewise-linear representation
  std::vector<double> knot_v_, knot_u_;

  // kde representation (data already pre-transformed, sorted)
  std::vector<double> kde_data_;
  std::vector<double> kde_cdf_at_data_;
  double kde_bandwidth_ = 0.0;
  double kde_sd_ = 0.0;
};

/// Rank-based piecewise-linear map: the sorted sample value of rank k maps to
/// the standard normal quantile of k/(N+1) (independent of the values
/// themselves), plus extrapolation anchor knots fitted to the domain.
AnamorphosisMap build_pl_map(std::span<const double> sample, MapDomain domain,
                             bool add_anchors = true);

/// Gaussian-kernel cdf estimate with the rule-of-thumb bandwidth
/// 1.06 min(sd, IQR/1.34) N^{-1/5}, after a logit/log pre-transform on
/// bounded domains; forward is the normal quantile of the estimated cdf and
/// the inverse solves the cdf equation by bracketed rootfinding.
AnamorphosisMap build_kde_map(std::span<const double> sample, MapDomain domain);

struct GaOptions {
  MapKind map_kind = MapKind::PiecewiseLinear;
  double inflation = 1.0;         ///< applied to the transformed state perturbations
  bool anchor_state_maps = true;  ///< add anchor knots to state maps (PL only)
};

/// Five steps: simulate per-member observations, fit one map per state and
/// per observation coordinate, transform everything, run the
/// perturbed-observation update in the transformed space (inflating there),
/// and transform the analysis back.
Ensemble ga_enkf_update(const Ensemble& forecast, const ObservationBatch& y,
                        const ObservingSystem& sys, const Eigen::MatrixXd& L,
                        const GaOptions& opt, Rng& rng);

MapDomain obs_domain(ObsKind kind);

}  // namespace l96da
