#pragma once

#include <Eigen/Core>
#include <limits>

namespace l96da {

/// Schur-product localization weights on the ring.
struct LocalizationSpec {
  double radius = std::numeric_limits<double>::infinity();  ///< e-folding radius
  int n_sites = 40;
  bool chordal = false;  ///< measure distance through a circle embedding

  void validate() const;
};

/// min(|i-j|, n-|i-j|) for zero-based site indices.
double ring_distance(int i, int j, int n);

/// Distance after embedding the n sites uniformly on a circle scaled so that
/// neighbouring sites are one arc unit apart: (n/pi) sin(pi delta / n).
double chordal_distance(int i, int j, int n);

/// exp(-0.5 (d_ij / radius)^2); identically 1 when the radius is infinite.
double loc_weight(int i, int j, const LocalizationSpec& spec);

/// Full localization matrix: symmetric, circulant, unit diagonal.
Eigen::MatrixXd loc_matrix(const LocalizationSpec& spec);

}  // namespace l96da
