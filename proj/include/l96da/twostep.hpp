#pragma once

#include <Eigen/Core>
#include <vector>

#include "l96da/ensemble.hpp"
#include "l96da/observations.hpp"

namespace l96da {

enum class ScalarFilter { Rhf, Irhf };

/// The scalar update variable for an observed site is that site's own state
/// coordinate.
inline int choose_z(int obs_site) { return obs_site; }

/// Spread the scalar increments z+ - z to every coordinate through the
/// least-squares regression slope cov(x_m, z)/var(z), damping each
/// coordinate's increment by its localization weight. Re-using the
/// regression residuals cancels them from the update, which is why only the
/// slope appears. Returns false (and leaves e untouched) when z has zero
/// variance.
bool regress_increments(Ensemble& e, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& z_plus,
                        const Eigen::VectorXd& loc_row);

/// Serial two-step assimilation: for each observed site (default ascending
/// order), run the scalar Bayesian update on the observed coordinate of the
/// current ensemble, then regress the increments onto all coordinates.
/// Scalar-update degeneracies propagate as exceptions; the caller marks the
/// cycle diverged.
Ensemble two_step_assimilate(const Ensemble& forecast,
                             const ObservationBatch& y,
                             const ObservingSystem& sys,
                             const Eigen::MatrixXd& L, ScalarFilter filter,
                             const std::vector<int>& site_order = {});

}  // namespace l96da
