#include "l96da/localization.hpp"

#include <cmath>
#include <stdexcept>

namespace l96da {

void LocalizationSpec::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("localization radius must be positive");
  if (n_sites < 1) throw std::invalid_argument("n_sites must be positive");
}

double ring_distance(int i, int j, int n) {
  const int a = std::abs(i - j);
  return static_cast<double>(std::min(a, n - a));
}

double chordal_distance(int i, int j, int n) {
  const double delta = ring_distance(i, j, n);
  return (n / M_PI) * std::sin(M_PI * delta / n);
}

double loc_weight(int i, int j, const LocalizationSpec& spec) {
  if (std::isinf(spec.radius)) return 1.0;
  const double d = spec.chordal ? chordal_distance(i, j, spec.n_sites)
                                : ring_distance(i, j, spec.n_sites);
  const double s = d / spec.radius;
  return std::exp(-0.5 * s * s);
}

Eigen::MatrixXd loc_matrix(const LocalizationSpec& spec) {
  spec.validate();
  Eigen::MatrixXd L(spec.n_sites, spec.n_sites);
  for (int i = 0; i < spec.n_sites; ++i) {
    L(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      const double w = loc_weight(i, j, spec);
      L(i, j) = w;
      L(j, i) = w;
    }
  }
  return L;
}

}  // namespace l96da
