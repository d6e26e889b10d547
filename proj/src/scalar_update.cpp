#include "l96da/scalar_update.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "l96da/normal.hpp"

namespace l96da {

namespace detail {

double sample_mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  const auto n = v.size();
  if (n < 2) return 0.0;
  const double m = sample_mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(n - 1));
}

double percentile_sorted(std::span<const double> sorted, double p) {
  const auto n = sorted.size();
  const double pos = p * static_cast<double>(n) - 0.5;
  if (pos <= 0.0) return sorted.front();
  if (pos >= static_cast<double>(n - 1)) return sorted.back();
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> pchip_slopes(std::span<const double> x,
                                 std::span<const double> y) {
  const auto n = x.size();
  std::vector<double> s(n, 0.0);
  if (n < 2) return s;
  s[0] = (y[1] - y[0]) / (x[1] - x[0]);
  s[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double hl = x[k] - x[k - 1];
    const double hr = x[k + 1] - x[k];
    const double dl = (y[k] - y[k - 1]) / hl;
    const double dr = (y[k + 1] - y[k]) / hr;
    if ((dl > 0.0 && dr < 0.0) || (dl < 0.0 && dr > 0.0) || dl == 0.0 ||
        dr == 0.0) {
      s[k] = 0.0;
    } else {
      const double w1 = 2.0 * hr + hl;
      const double w2 = hr + 2.0 * hl;
      s[k] = (w1 + w2) / (w1 / dl + w2 / dr);
    }
  }
  return s;
}

}  // namespace detail

namespace {

double poly_eval(const std::array<double, 4>& q, double t) {
  // antiderivative coefficients for powers t..t^4
  return t * (q[0] + t * (q[1] + t * (q[2] + t * q[3])));
}

double poly_derivative(const std::array<double, 4>& q, double t) {
  return q[0] + t * (2.0 * q[1] + t * (3.0 * q[2] + t * 4.0 * q[3]));
}

// Shift a cubic a0 + a1 s + a2 s^2 + a3 s^3 to the variable t = s - delta.
std::array<double, 4> shift_cubic(const std::array<double, 4>& a,
                                  double delta) {
  const double d = delta;
  std::array<double, 4> out;
  out[0] = a[0] + d * (a[1] + d * (a[2] + d * a[3]));
  out[1] = a[1] + d * (2.0 * a[2] + 3.0 * d * a[3]);
  out[2] = a[2] + 3.0 * d * a[3];
  out[3] = a[3];
  return out;
}

// Smallest root in [0, w] of q2 t^2 + q1 t = m for an antiderivative that is
// nondecreasing on [0, w]; stable quadratic formula.
double solve_quadratic_piece(double q1, double q2, double m) {
  if (q2 == 0.0) return (q1 == 0.0) ? 0.0 : m / q1;
  const double disc = q1 * q1 + 4.0 * q2 * m;
  const double root = q1 + std::sqrt(std::max(disc, 0.0));
  if (root == 0.0) return 0.0;
  return 2.0 * m / root;
}

double solve_quartic_piece(const std::array<double, 4>& q, double w,
                           double m) {
  // safeguarded Newton on A(t) = m with A nondecreasing on [0, w]
  double lo = 0.0, hi = w;
  const double piece_mass = poly_eval(q, w);
  double t = (piece_mass > 0.0) ? w * m / piece_mass : 0.5 * w;
  const double tol = 1e-12 * std::max(1.0, w);
  for (int it = 0; it < 200; ++it) {
    const double f = poly_eval(q, t) - m;
    if (f > 0.0) {
      hi = t;
    } else if (f < 0.0) {
      lo = t;
    } else {
      return t;
    }
    const double df = poly_derivative(q, t);
    double step_t = (df > 0.0) ? t - f / df : std::numeric_limits<double>::quiet_NaN();
    if (!(step_t > lo && step_t < hi)) step_t = 0.5 * (lo + hi);
    if (std::abs(step_t - t) <= tol) return step_t;
    t = step_t;
  }
  return t;
}

}  // namespace

double PiecewisePdf::value_at(double z) const {
  if (z < breakpoints.front()) {
    return tails ? tails->left_scale * normal_pdf((z - tails->mean) / tails->sd) /
                       tails->sd
                 : 0.0;
  }
  if (z >= breakpoints.back()) {
    return tails ? tails->right_scale *
                       normal_pdf((z - tails->mean) / tails->sd) / tails->sd
                 : 0.0;
  }
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), z);
  const auto m = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  return density[m];
}

double PiecewisePdf::left_tail_mass() const {
  if (!tails) return 0.0;
  return tails->left_scale * normal_cdf((breakpoints.front() - tails->mean) / tails->sd);
}

double PiecewisePdf::right_tail_mass() const {
  if (!tails) return 0.0;
  return tails->right_scale *
         normal_cdf_upper((breakpoints.back() - tails->mean) / tails->sd);
}

double LikelihoodApprox::value_at(double z) const {
  if (z <= nodes.front()) return values.front();
  if (z >= nodes.back()) return values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), z);
  const int m = static_cast<int>(it - nodes.begin()) - 1;
  const auto a = piece_poly(m);
  const double t = z - nodes[m];
  return a[0] + t * (a[1] + t * (a[2] + t * a[3]));
}

std::array<double, 4> LikelihoodApprox::piece_poly(int m) const {
  const double w = nodes[m + 1] - nodes[m];
  if (interp == LikInterp::Linear) {
    return {values[m], (values[m + 1] - values[m]) / w, 0.0, 0.0};
  }
  // cubic Hermite from endpoint values and limited slopes
  const double sec = (values[m + 1] - values[m]) / w;
  const double d0 = slopes[m];
  const double d1 = slopes[m + 1];
  return {values[m], d0, (3.0 * sec - 2.0 * d0 - d1) / w,
          (d0 + d1 - 2.0 * sec) / (w * w)};
}

PiecewiseCdf PiecewiseCdf::build(std::vector<double> breakpoints,
                                 std::vector<std::array<double, 4>> poly,
                                 std::optional<GaussianTails> tails) {
  PiecewiseCdf cdf;
  cdf.breakpoints_ = std::move(breakpoints);
  cdf.poly_ = std::move(poly);
  cdf.tails_ = tails;

  const auto pieces = cdf.poly_.size();
  cdf.cum_.assign(pieces + 1, 0.0);
  double left_mass = 0.0, right_mass = 0.0;
  if (tails) {
    left_mass = tails->left_scale *
                normal_cdf((cdf.breakpoints_.front() - tails->mean) / tails->sd);
    right_mass = tails->right_scale *
                 normal_cdf_upper((cdf.breakpoints_.back() - tails->mean) / tails->sd);
  }
  cdf.cum_[0] = left_mass;
  for (std::size_t m = 0; m < pieces; ++m) {
    const double w = cdf.breakpoints_[m + 1] - cdf.breakpoints_[m];
    const double mass = std::max(poly_eval(cdf.poly_[m], w), 0.0);
    cdf.cum_[m + 1] = cdf.cum_[m] + mass;
  }
  cdf.total_ = cdf.cum_.back() + right_mass;
  return cdf;
}

double PiecewiseCdf::evaluate(double z) const {
  if (z < breakpoints_.front()) {
    if (!tails_) return 0.0;
    return tails_->left_scale * normal_cdf((z - tails_->mean) / tails_->sd) /
           total_;
  }
  if (z >= breakpoints_.back()) {
    if (!tails_) return 1.0;
    const double above = tails_->right_scale *
                         normal_cdf_upper((z - tails_->mean) / tails_->sd);
    return std::clamp(1.0 - above / total_, 0.0, 1.0);
  }
  const auto it =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), z);
  const auto m = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  const double t = z - breakpoints_[m];
  const double raw = cum_[m] + poly_eval(poly_[m], t);
  return std::clamp(raw / total_, 0.0, 1.0);
}

double PiecewiseCdf::invert(double u, InversionMode mode) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("invert_cdf: u must lie in (0,1)");
  }
  const double target = u * total_;

  if (tails_ && target < cum_.front() && tails_->left_scale > 0.0) {
    return tails_->mean +
           tails_->sd * normal_quantile(target / tails_->left_scale);
  }
  if (tails_ && target > cum_.back() && tails_->right_scale > 0.0) {
    const double q = (total_ - target) / tails_->right_scale;
    return tails_->mean - tails_->sd * normal_quantile(std::min(q, 1.0 - 1e-17));
  }

  // first breakpoint with cumulative mass >= target
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
  auto hi = static_cast<std::size_t>(it - cum_.begin());
  if (hi == 0) return breakpoints_.front();
  if (hi >= cum_.size()) return breakpoints_.back();
  const auto m = hi - 1;
  if (cum_[m] == target) return breakpoints_[m];
  if (cum_[hi] == target) return breakpoints_[hi];

  const double w = breakpoints_[hi] - breakpoints_[m];
  const double piece_mass = cum_[hi] - cum_[m];
  if (!(piece_mass > 0.0)) return breakpoints_[m];
  const double local = target - cum_[m];

  double t;
  if (mode == InversionMode::InterpolatedInterior) {
    t = w * local / piece_mass;
  } else if (poly_[m][2] == 0.0 && poly_[m][3] == 0.0) {
    t = solve_quadratic_piece(poly_[m][0], poly_[m][1], local);
  } else {
    t = solve_quartic_piece(poly_[m], w, local);
  }
  return breakpoints_[m] + std::clamp(t, 0.0, w);
}

PiecewisePdf rhf_prior(std::span<const double> sample) {
  const int n = static_cast<int>(sample.size());
  if (n < 2) throw std::invalid_argument("rhf_prior needs at least two values");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i + 1 < n; ++i) {
    if (sorted[i] == sorted[i + 1]) {
      throw std::invalid_argument("rhf_prior: duplicate sample values");
    }
  }
  const double mean = detail::sample_mean(sorted);
  const double sd = detail::sample_sd(sorted);
  const double mass = 1.0 / (n + 1.0);

  PiecewisePdf pdf;
  pdf.density.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    pdf.density[i] = mass / (sorted[i + 1] - sorted[i]);
  }
  GaussianTails tails;
  tails.mean = mean;
  tails.sd = sd;
  tails.left_scale = mass / normal_cdf((sorted.front() - mean) / sd);
  tails.right_scale = mass / normal_cdf_upper((sorted.back() - mean) / sd);
  pdf.tails = tails;
  pdf.breakpoints = std::move(sorted);
  return pdf;
}

IrhfPrior irhf_prior(std::span<const double> sample) {
  const int n = static_cast<int>(sample.size());
  if (n < 2) throw std::invalid_argument("irhf_prior needs at least two values");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());

  const double mean = detail::sample_mean(sorted);
  const double sd = detail::sample_sd(sorted);
  if (!(sd > 0.0)) throw ScalarUpdateError("irhf_prior: zero sample spread");
  const double iqr = detail::percentile_sorted(sorted, 0.75) -
                     detail::percentile_sorted(sorted, 0.25);
  const double hbar = 3.13 * std::min(sd, iqr / 1.34) *
                      std::pow(static_cast<double>(n), -0.2);

  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) {
    double widest = 2.0 * hbar;
    if (i > 0) widest = std::max(widest, sorted[i] - sorted[i - 1]);
    if (i + 1 < n) widest = std::max(widest, sorted[i + 1] - sorted[i]);
    h[i] = 0.5 * widest;
  }

  // kernel-edge events: density of kernel i is 1/(2 h_i N) on (z_i - h_i, z_i + h_i)
  std::vector<std::pair<double, double>> events;
  events.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    const double d = 1.0 / (2.0 * h[i] * n);
    events.emplace_back(sorted[i] - h[i], d);
    events.emplace_back(sorted[i] + h[i], -d);
  }
  std::sort(events.begin(), events.end());

  std::vector<double> breakpoints;
  std::vector<double> density;
  breakpoints.reserve(2 * n);
  density.reserve(2 * n - 1);
  double level = 0.0;
  std::size_t e = 0;
  while (e < events.size()) {
    const double z = events[e].first;
    while (e < events.size() && events[e].first == z) level += events[e++].second;
    breakpoints.push_back(z);
    // after folding all edges at z, `level` is the density on (z, next edge)
    if (e < events.size()) density.push_back(std::max(level, 0.0));
  }

  IrhfPrior prior;
  prior.base_bandwidth = hbar;

  // plain boxcar cdf: linear pieces, no tails
  std::vector<std::array<double, 4>> lin(density.size());
  for (std::size_t m = 0; m < density.size(); ++m) {
    lin[m] = {density[m], 0.0, 0.0, 0.0};
  }
  prior.cdf = PiecewiseCdf::build(breakpoints, lin, std::nullopt);

  // tail-augmented density, renormalized in closed form
  const double raw_left = normal_cdf((breakpoints.front() - mean) / sd);
  const double raw_right = normal_cdf_upper((breakpoints.back() - mean) / sd);
  double interior = 0.0;
  for (std::size_t m = 0; m < density.size(); ++m) {
    interior += density[m] * (breakpoints[m + 1] - breakpoints[m]);
  }
  const double p1 = interior + raw_left + raw_right;

  PiecewisePdf& phat = prior.density;
  phat.breakpoints = std::move(breakpoints);
  phat.density.resize(density.size());
  for (std::size_t m = 0; m < density.size(); ++m) {
    phat.density[m] = density[m] / p1;
  }
  GaussianTails tails;
  tails.mean = mean;
  tails.sd = sd;
  tails.left_scale = 1.0 / p1;
  tails.right_scale = 1.0 / p1;
  phat.tails = tails;
  return prior;
}

LikelihoodApprox approx_likelihood(std::span<const double> nodes,
                                   const std::function<double(double)>& loglik,
                                   LikInterp interp) {
  if (nodes.size() < 2) {
    throw std::invalid_argument("approx_likelihood needs at least two nodes");
  }
  std::vector<double> raw(nodes.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    raw[i] = loglik(nodes[i]);
    if (std::isnan(raw[i])) {
      throw ScalarUpdateError("approx_likelihood: log-likelihood is NaN");
    }
    best = std::max(best, raw[i]);
  }
  if (!std::isfinite(best)) {
    throw ScalarUpdateError(
        "approx_likelihood: likelihood vanishes at every node");
  }
  LikelihoodApprox lik;
  lik.nodes.assign(nodes.begin(), nodes.end());
  lik.values.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    lik.values[i] = std::exp(raw[i] - best);
  }
  lik.interp = interp;
  if (interp == LikInterp::ShapePreservingCubic) {
    lik.slopes = detail::pchip_slopes(lik.nodes, lik.values);
  }
  return lik;
}

PiecewiseCdf posterior_cdf(const PiecewisePdf& prior,
                           const LikelihoodApprox& lik) {
  // merged grid over the prior hull; likelihood nodes strictly inside the
  // hull refine it
  std::vector<double> grid = prior.breakpoints;
  for (double zn : lik.nodes) {
    if (zn > prior.breakpoints.front() && zn < prior.breakpoints.back()) {
      grid.push_back(zn);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<std::array<double, 4>> poly(grid.size() - 1);
  for (std::size_t m = 0; m + 1 < grid.size(); ++m) {
    const double zl = grid[m];
    const double mid = 0.5 * (zl + grid[m + 1]);

    // prior density on this interval
    const auto pit =
        std::upper_bound(prior.breakpoints.begin(), prior.breakpoints.end(), mid);
    const auto pm = static_cast<std::size_t>(pit - prior.breakpoints.begin()) - 1;
    const double c = prior.density[pm];

    // likelihood piece restricted to this interval, in t = z - zl
    std::array<double, 4> a;
    if (mid <= lik.nodes.front()) {
      a = {lik.values.front(), 0.0, 0.0, 0.0};
    } else if (mid >= lik.nodes.back()) {
      a = {lik.values.back(), 0.0, 0.0, 0.0};
    } else {
      const auto lit = std::upper_bound(lik.nodes.begin(), lik.nodes.end(), mid);
      const int lm = static_cast<int>(lit - lik.nodes.begin()) - 1;
      a = shift_cubic(lik.piece_poly(lm), zl - lik.nodes[lm]);
    }

    poly[m] = {c * a[0], 0.5 * c * a[1], c * a[2] / 3.0, 0.25 * c * a[3]};
  }

  std::optional<GaussianTails> tails;
  if (prior.tails) {
    GaussianTails t = *prior.tails;
    t.left_scale *= lik.values.front();
    t.right_scale *= lik.values.back();
    tails = t;
  }

  PiecewiseCdf cdf = PiecewiseCdf::build(std::move(grid), std::move(poly), tails);
  if (!(cdf.total_mass() > 0.0) || !std::isfinite(cdf.total_mass())) {
    throw ScalarUpdateError("posterior_cdf: non-positive posterior mass");
  }
  return cdf;
}

PiecewiseCdf cdf_from_pdf(const PiecewisePdf& pdf) {
  std::vector<std::array<double, 4>> poly(pdf.density.size());
  for (std::size_t m = 0; m < pdf.density.size(); ++m) {
    poly[m] = {pdf.density[m], 0.0, 0.0, 0.0};
  }
  return PiecewiseCdf::build(pdf.breakpoints, std::move(poly), pdf.tails);
}

double invert_cdf(const PiecewiseCdf& cdf, double u, InversionMode mode) {
  return cdf.invert(u, mode);
}

namespace {

struct SortedSample {
  std::vector<double> values;  // sorted, deterministically de-tied
  std::vector<int> rank;       // rank of each input member
};

// Sort with index tie-breaking, then nudge tied runs apart so the piecewise
// constructions see strictly increasing values.
SortedSample prepare_sample(std::span<const double> sample) {
  const int n = static_cast<int>(sample.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return sample[a] < sample[b]; });

  SortedSample out;
  out.values.resize(n);
  out.rank.resize(n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = sample[order[k]];
    out.rank[order[k]] = k;
  }
  const double scale = 1e-12 * std::max(detail::sample_sd(out.values), 1.0);
  for (int k = 1; k < n; ++k) {
    if (out.values[k] <= out.values[k - 1]) {
      out.values[k] = out.values[k - 1] + scale;
    }
  }
  return out;
}

}  // namespace

std::vector<double> rhf_scalar_update(
    std::span<const double> sample,
    const std::function<double(double)>& loglik) {
  const int n = static_cast<int>(sample.size());
  if (n < 2) throw std::invalid_argument("rhf_scalar_update needs N >= 2");
  const SortedSample s = prepare_sample(sample);

  const PiecewisePdf prior = rhf_prior(s.values);
  const LikelihoodApprox lik =
      approx_likelihood(s.values, loglik, LikInterp::Linear);
  const PiecewiseCdf post = posterior_cdf(prior, lik);

  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double u = (s.rank[i] + 1.0) / (n + 1.0);
    out[i] = post.invert(u, InversionMode::Exact);
  }
  return out;
}

std::vector<double> irhf_scalar_update(
    std::span<const double> sample,
    const std::function<double(double)>& loglik) {
  const int n = static_cast<int>(sample.size());
  if (n < 2) throw std::invalid_argument("irhf_scalar_update needs N >= 2");
  const SortedSample s = prepare_sample(sample);

  const IrhfPrior prior = irhf_prior(s.values);
  const LikelihoodApprox lik = approx_likelihood(
      prior.cdf.breakpoints(), loglik, LikInterp::ShapePreservingCubic);
  const PiecewiseCdf post = posterior_cdf(prior.density, lik);

  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double u = prior.cdf.evaluate(s.values[s.rank[i]]);
    out[i] = post.invert(u, InversionMode::InterpolatedInterior);
  }
  return out;
}

}  // namespace l96da
