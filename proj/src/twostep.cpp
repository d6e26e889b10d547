#include "l96da/twostep.hpp"

#include <numeric>

#include "l96da/scalar_update.hpp"

namespace l96da {

bool regress_increments(Ensemble& e, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& z_plus,
                        const Eigen::VectorXd& loc_row) {
  const int n = e.size();
  const double zbar = z.mean();
  const Eigen::VectorXd zdev = z.array() - zbar;
  const double var_z = zdev.squaredNorm() / (n - 1);
  if (!(var_z > 0.0)) return false;

  // slope per coordinate: cov(x_m, z) / var(z)
  const Eigen::VectorXd mean = e.members.rowwise().mean();
  const Eigen::VectorXd slope =
      ((e.members.colwise() - mean) * zdev) / ((n - 1) * var_z);
  const Eigen::VectorXd dz = z_plus - z;
  e.members.noalias() += loc_row.cwiseProduct(slope) * dz.transpose();
  return true;
}

Ensemble two_step_assimilate(const Ensemble& forecast,
                             const ObservationBatch& y,
                             const ObservingSystem& sys,
                             const Eigen::MatrixXd& L, ScalarFilter filter,
                             const std::vector<int>& site_order) {
  Ensemble e = forecast;
  const int n = e.size();

  std::vector<int> order = site_order;
  if (order.empty()) {
    order.resize(e.dim());
    std::iota(order.begin(), order.end(), 0);
  }

  std::vector<double> z(n);
  Eigen::VectorXd zv(n), zp(n);
  for (int site : order) {
    const int coord = choose_z(site);
    for (int i = 0; i < n; ++i) z[i] = e.members(coord, i);

    const double y_site = y.values[site];
    auto loglik = [&](double zz) { return log_likelihood(y_site, zz, sys); };
    const std::vector<double> z_plus = (filter == ScalarFilter::Rhf)
                                           ? rhf_scalar_update(z, loglik)
                                           : irhf_scalar_update(z, loglik);

    for (int i = 0; i < n; ++i) {
      zv[i] = z[i];
      zp[i] = z_plus[i];
    }
    regress_increments(e, zv, zp, L.col(site));
  }
  return e;
}

}  // namespace l96da
