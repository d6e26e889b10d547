#pragma once

// Test-only numerical integration, kept independent of the closed-form
// antiderivatives in the library.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "l96da/scalar_update.hpp"

namespace l96da::testing {

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int depth = 40) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// Numerically integrated cdf of prior * likelihood, evaluated at the given
/// grid points (which must be sorted). The domain is truncated 13 tail
/// standard deviations beyond the hull.
inline std::vector<double> quadrature_posterior_cdf(
    const std::function<double(double)>& prior_pdf,
    const std::function<double(double)>& lik,
    const std::vector<double>& z_grid, double tail_sd, double hull_lo,
    double hull_hi) {
  auto integrand = [&](double z) { return prior_pdf(z) * lik(z); };
  const double lo = hull_lo - 13.0 * tail_sd;
  const double hi = hull_hi + 13.0 * tail_sd;

  // accumulate piecewise so breakpoint kinks never straddle a panel
  std::vector<double> cuts{lo};
  for (double z : z_grid) {
    if (z > lo && z < hi) cuts.push_back(z);
  }
  cuts.push_back(hi);

  std::vector<double> mass(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    mass[i] = adaptive_simpson(integrand, cuts[i], cuts[i + 1], 1e-13);
  }
  double total = 0.0;
  for (double m : mass) total += m;
  if (!(total > 0.0)) {
    throw std::runtime_error("quadrature oracle: non-positive mass");
  }

  std::vector<double> out;
  out.reserve(z_grid.size());
  for (double z : z_grid) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] <= z) {
        acc += mass[i];
      } else {
        if (cuts[i] < z) acc += adaptive_simpson(integrand, cuts[i], z, 1e-13);
        break;
      }
    }
    out.push_back(acc / total);
  }
  return out;
}

}  // namespace l96da::testing
