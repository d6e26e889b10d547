#include "l96da/enkf.hpp"

#include <Eigen/Cholesky>

namespace l96da {

Eigen::MatrixXd perturbation_matrix(const Eigen::MatrixXd& members) {
  const auto n = members.cols();
  if (n < 2) throw std::invalid_argument("perturbation_matrix needs N >= 2");
  const Eigen::VectorXd mean = members.rowwise().mean();
  return (members.colwise() - mean) / std::sqrt(static_cast<double>(n - 1));
}

JointEnsemble make_joint_ensemble(const Ensemble& e, const ObservingSystem& sys,
                                  Rng& rng) {
  JointEnsemble je;
  je.x_members = e.members;
  je.y_members.resize(e.dim(), e.size());
  for (int i = 0; i < e.size(); ++i) {
    for (int k = 0; k < e.dim(); ++k) {
      je.y_members(k, i) =
          observe_one(e.members(k, i), sys, sys.noise_sd * rng.normal());
    }
  }
  return je;
}

Ensemble enkf_update(const JointEnsemble& je, const ObservationBatch& y,
                     const Eigen::MatrixXd& L) {
  const Eigen::MatrixXd ax = perturbation_matrix(je.x_members);
  const Eigen::MatrixXd ay = perturbation_matrix(je.y_members);

  const Eigen::MatrixXd cov_xy = L.cwiseProduct(ax * ay.transpose());
  Eigen::MatrixXd cov_yy = L.cwiseProduct(ay * ay.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt(cov_yy);
  if (llt.info() != Eigen::Success) {
    const double ridge = 1e-8 * cov_yy.trace() / cov_yy.rows();
    cov_yy.diagonal().array() += ridge;
    llt.compute(cov_yy);
    if (llt.info() != Eigen::Success) {
      throw SingularInnovationCovariance(
          "localized observation covariance is not positive definite");
    }
  }

  const Eigen::MatrixXd innovations = (-je.y_members).colwise() + y.values;
  Ensemble analysis;
  analysis.members = je.x_members + cov_xy * llt.solve(innovations);
  return analysis;
}

}  // namespace l96da
