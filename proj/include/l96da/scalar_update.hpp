#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace l96da {

/// Data-dependent degeneracy in a scalar update (collapsed sample, likelihood
/// underflowing everywhere, non-positive posterior mass). Callers treat the
/// surrounding cycle as diverged.
class ScalarUpdateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gaussian tails attached outside [breakpoints.front(), breakpoints.back()].
/// The tail density on each side is scale * phi((z - mean)/sd) / sd.
struct GaussianTails {
  double mean = 0.0;
  double sd = 1.0;
  double left_scale = 0.0;
  double right_scale = 0.0;
};

/// Piecewise-constant density between sorted breakpoints with optional
/// Gaussian tails; integrates to one.
struct PiecewisePdf {
  std::vector<double> breakpoints;  // M+1 strictly increasing values
  std::vector<double> density;      // M nonnegative per-interval densities
  std::optional<GaussianTails> tails;

  double value_at(double z) const;
  double left_tail_mass() const;
  double right_tail_mass() const;
};

enum class LikInterp { Linear, ShapePreservingCubic };

/// Nonnegative piecewise-polynomial likelihood approximation on a sorted node
/// grid, constant beyond the first and last node. Node values are the
/// likelihood normalized by its maximum (computed in log space).
struct LikelihoodApprox {
  std::vector<double> nodes;
  std::vector<double> values;
  std::vector<double> slopes;  // cubic kind only
  LikInterp interp = LikInterp::Linear;

  double value_at(double z) const;

  /// Coefficients {a0,a1,a2,a3} of the piece on [nodes[m], nodes[m+1]] in the
  /// local coordinate t = z - nodes[m].
  std::array<double, 4> piece_poly(int m) const;
};

enum class InversionMode { Exact, InterpolatedInterior };

/// Monotone piecewise-polynomial cdf with optional Gaussian tails. Pieces
/// store the unnormalized antiderivative (degree <= 4); the stored total mass
/// normalizes evaluation to [0,1].
class PiecewiseCdf {
 public:
  /// Assemble from per-piece antiderivative coefficients {t, t^2, t^3, t^4}
  /// (each zero at the piece's left edge) plus optional tails whose scales
  /// already include any constant likelihood factors.
  static PiecewiseCdf build(std::vector<double> breakpoints,
                            std::vector<std::array<double, 4>> poly,
                            std::optional<GaussianTails> tails);

  double evaluate(double z) const;

  /// Generalized inverse at u in (0,1). Exact mode solves the interior
  /// polynomial (closed form up to quadratic, safeguarded Newton beyond);
  /// InterpolatedInterior linearly interpolates between breakpoint cdf
  /// values. Gaussian tails are always inverted through the normal quantile.
  double invert(double u, InversionMode mode) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  /// Unnormalized total mass (the Bayes normalizer when built by
  /// posterior_cdf).
  double total_mass() const { return total_; }
  /// Unnormalized mass below breakpoints()[m].
  double mass_below(int m) const { return cum_[m]; }

 private:
  PiecewiseCdf() = default;

  std::vector<double> breakpoints_;
  std::vector<std::array<double, 4>> poly_;
  std::vector<double> cum_;
  std::optional<GaussianTails> tails_;
  double total_ = 0.0;
};

/// Rank-histogram prior: mass 1/(N+1) between consecutive sorted sample
/// values and in each Gaussian tail (tails use the sample mean and standard
/// deviation). Throws std::invalid_argument on duplicate values.
PiecewisePdf rhf_prior(std::span<const double> sample);

struct IrhfPrior {
  PiecewiseCdf cdf;      ///< plain boxcar-mixture cdf (no tails); the transport's F_Z
  PiecewisePdf density;  ///< tail-augmented prior used for the posterior
  double base_bandwidth = 0.0;
};

/// Variable-bandwidth boxcar kernel prior. The base bandwidth is
/// 3.13 min(sd, IQR/1.34) N^{-1/5}; per-point bandwidths are widened to half
/// the larger neighbouring gap so the mixture has no interior holes. Gaussian
/// tails (sample mean/sd) are attached outside the kernel support and the
/// whole density renormalized in closed form.
IrhfPrior irhf_prior(std::span<const double> sample);

/// Evaluate the log-likelihood on the nodes, shift by the maximum,
/// exponentiate, and attach the interpolation rule: piecewise-linear, or a
/// monotonicity-limited cubic that cannot dip below zero between nonnegative
/// nodes.
LikelihoodApprox approx_likelihood(std::span<const double> nodes,
                                   const std::function<double(double)>& loglik,
                                   LikInterp interp);

/// Closed-form cdf of prior * likelihood: constant-density pieces times
/// polynomial likelihood pieces integrate to polynomials, Gaussian tails
/// times constant likelihood integrate to scaled normal cdfs. Breakpoint
/// grids are merged when they differ. Throws ScalarUpdateError if the total
/// mass is not positive and finite.
PiecewiseCdf posterior_cdf(const PiecewisePdf& prior,
                           const LikelihoodApprox& lik);

/// Exact integral of a PiecewisePdf.
PiecewiseCdf cdf_from_pdf(const PiecewisePdf& pdf);

double invert_cdf(const PiecewiseCdf& cdf, double u, InversionMode mode);

/// Transport z+ = Fpost^{-1}(Fprior(z)) with the rank-histogram prior,
/// linear likelihood interpolation, and exact interior inversion. Output is
/// in input member order; ties are broken by index after a deterministic
/// jitter. Requires at least two members.
std::vector<double> rhf_scalar_update(
    std::span<const double> sample,
    const std::function<double(double)>& loglik);

/// Same transport with the boxcar-kernel prior, cubic likelihood on the 2N
/// kernel-edge nodes, and interpolated interior inversion.
std::vector<double> irhf_scalar_update(
    std::span<const double> sample,
    const std::function<double(double)>& loglik);

namespace detail {
double sample_mean(std::span<const double> v);
double sample_sd(std::span<const double> v);  // 1/(N-1) normalization
/// Percentile of a sorted sample, linear interpolation between the order
/// statistics placed at (i - 0.5)/N.
double percentile_sorted(std::span<const double> sorted, double p);
/// Monotonicity-limited Hermite slopes (harmonic-mean interior, one-sided
/// ends).
std::vector<double> pchip_slopes(std::span<const double> x,
                                 std::span<const double> y);
}  // namespace detail

}  // namespace l96da
