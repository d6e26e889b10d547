#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "l96da/ensemble.hpp"
#include "l96da/observations.hpp"

namespace l96da {

/// State ensemble paired with one simulated observation per member.
struct JointEnsemble {
  Eigen::MatrixXd x_members;  // dim_x x N
  Eigen::MatrixXd y_members;  // dim_y x N, member i drawn from Y | X = x_i
};

/// The localized observation covariance could not be factorized even after a
/// ridge; the caller should treat the cycle as diverged.
class SingularInnovationCovariance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Columns (member_i - mean)/sqrt(N-1), so A A^T is the sample covariance.
Eigen::MatrixXd perturbation_matrix(const Eigen::MatrixXd& members);

/// Simulate one observation per member with independent noise (member-major
/// draw order).
JointEnsemble make_joint_ensemble(const Ensemble& e, const ObservingSystem& sys,
                                  Rng& rng);

/// Perturbed-observation update from the conditional-Gaussian formula,
///   x_i += Cov[X,Y] Cov[Y]^{-1} (y - y_i),
/// with both sample covariances Schur-localized by L. The solve uses a
/// Cholesky factorization, retried once with a small ridge.
Ensemble enkf_update(const JointEnsemble& je, const ObservationBatch& y,
                     const Eigen::MatrixXd& L);

}  // namespace l96da
