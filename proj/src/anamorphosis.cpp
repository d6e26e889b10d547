#include "l96da/anamorphosis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l96da/normal.hpp"
#include "l96da/scalar_update.hpp"

namespace l96da {

namespace {

// Sorted copy with exact ties nudged apart deterministically.
std::vector<double> sorted_distinct(std::span<const double> sample) {
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  const double scale = 1e-12 * std::max(detail::sample_sd(v), 1.0);
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] <= v[k - 1]) v[k] = v[k - 1] + scale;
  }
  return v;
}

double interp_segment(double x, double x0, double x1, double y0, double y1) {
  return y0 + (y1 - y0) * ((x - x0) / (x1 - x0));
}

// Piecewise-linear evaluation with end-segment extrapolation.
double pl_eval(const std::vector<double>& xs, const std::vector<double>& ys,
               double x) {
  const std::size_t n = xs.size();
  if (x <= xs.front()) return interp_segment(x, xs[0], xs[1], ys[0], ys[1]);
  if (x >= xs.back()) {
    return interp_segment(x, xs[n - 2], xs[n - 1], ys[n - 2], ys[n - 1]);
  }
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto m = static_cast<std::size_t>(it - xs.begin()) - 1;
  if (x == xs[m]) return ys[m];
  return interp_segment(x, xs[m], xs[m + 1], ys[m], ys[m + 1]);
}

constexpr double kKernelReach = 8.0;  // kernels are negligible beyond 8 bandwidths

}  // namespace

MapDomain obs_domain(ObsKind kind) {
  switch (kind) {
    case ObsKind::Linear: return MapDomain::Unbounded;
    case ObsKind::LogitNormal: return MapDomain::Unit01;
    case ObsKind::LogNormal: return MapDomain::Positive;
  }
  throw std::logic_error("unknown observation kind");
}

AnamorphosisMap AnamorphosisMap::identity() {
  AnamorphosisMap map;
  map.kind_ = MapKind::Identity;
  return map;
}

double AnamorphosisMap::pre_transform(double v) const {
  switch (domain_) {
    case MapDomain::Unbounded: return v;
    case MapDomain::Unit01:
      if (!(v > 0.0 && v < 1.0)) {
        throw AnamorphosisError("value outside (0,1) in a unit-interval map");
      }
      return std::log(v / (1.0 - v));
    case MapDomain::Positive:
      if (!(v > 0.0)) {
        throw AnamorphosisError("value not positive in a positive-domain map");
      }
      return std::log(v);
  }
  throw std::logic_error("unknown map domain");
}

double AnamorphosisMap::pre_transform_inverse(double t) const {
  switch (domain_) {
    case MapDomain::Unbounded: return t;
    case MapDomain::Unit01: return 1.0 / (1.0 + std::exp(-t));
    case MapDomain::Positive: return std::exp(t);
  }
  throw std::logic_error("unknown map domain");
}

double AnamorphosisMap::kde_cdf(double t) const {
  const double reach = kKernelReach * kde_bandwidth_;
  const auto lo = std::lower_bound(kde_data_.begin(), kde_data_.end(), t - reach);
  const auto hi = std::upper_bound(lo, kde_data_.end(), t + reach);
  double acc = static_cast<double>(lo - kde_data_.begin());  // saturated kernels
  for (auto it = lo; it != hi; ++it) {
    acc += normal_cdf((t - *it) / kde_bandwidth_);
  }
  return acc / static_cast<double>(kde_data_.size());
}

double AnamorphosisMap::kde_pdf(double t) const {
  const double reach = kKernelReach * kde_bandwidth_;
  const auto lo = std::lower_bound(kde_data_.begin(), kde_data_.end(), t - reach);
  const auto hi = std::upper_bound(lo, kde_data_.end(), t + reach);
  double acc = 0.0;
  for (auto it = lo; it != hi; ++it) {
    acc += normal_pdf((t - *it) / kde_bandwidth_);
  }
  return acc / (kde_bandwidth_ * static_cast<double>(kde_data_.size()));
}

double AnamorphosisMap::forward(double v) const {
  switch (kind_) {
    case MapKind::Identity:
      return v;
    case MapKind::PiecewiseLinear:
      return pl_eval(knot_v_, knot_u_, v);
    case MapKind::KDE: {
      const double t = pre_transform(v);
      double f = kde_cdf(t);
      f = std::clamp(f, 1e-300, 1.0 - 1e-16);
      return normal_quantile(f);
    }
  }
  throw std::logic_error("unknown map kind");
}

double AnamorphosisMap::inverse(double u) const {
  switch (kind_) {
    case MapKind::Identity:
      return u;
    case MapKind::PiecewiseLinear: {
      double v = pl_eval(knot_u_, knot_v_, u);
      // keep bounded domains honest under end-segment extrapolation
      if (domain_ == MapDomain::Unit01) {
        v = std::clamp(v, std::numeric_limits<double>::min(),
                       std::nextafter(1.0, 0.0));
      } else if (domain_ == MapDomain::Positive) {
        v = std::max(v, std::numeric_limits<double>::min());
      }
      return v;
    }
    case MapKind::KDE: {
      const double target = std::clamp(normal_cdf(u), 1e-300, 1.0 - 1e-16);
      // bracket using the precomputed cdf values at the data points
      const double limit = 20.0 * std::max(kde_sd_, kde_bandwidth_);
      double lo, hi;
      if (target <= kde_cdf_at_data_.front()) {
        hi = kde_data_.front();
        lo = hi - kde_bandwidth_;
        while (kde_cdf(lo) > target) {
          lo -= 2.0 * (hi - lo);
          if (lo < kde_data_.front() - limit) {
            throw AnamorphosisError("kde inverse: bracket expansion failed");
          }
        }
      } else if (target >= kde_cdf_at_data_.back()) {
        lo = kde_data_.back();
        hi = lo + kde_bandwidth_;
        while (kde_cdf(hi) < target) {
          hi += 2.0 * (hi - lo);
          if (hi > kde_data_.back() + limit) {
            throw AnamorphosisError("kde inverse: bracket expansion failed");
          }
        }
      } else {
        const auto it = std::lower_bound(kde_cdf_at_data_.begin(),
                                         kde_cdf_at_data_.end(), target);
        const auto j = static_cast<std::size_t>(it - kde_cdf_at_data_.begin());
        lo = kde_data_[j - 1];
        hi = kde_data_[j];
      }

      // Newton iteration safeguarded by bisection on [lo, hi]
      double t = 0.5 * (lo + hi);
      for (int iter = 0; iter < 200; ++iter) {
        const double f = kde_cdf(t) - target;
        if (f > 0.0) {
          hi = t;
        } else if (f < 0.0) {
          lo = t;
        } else {
          break;
        }
        const double tol = 1e-10 * std::max(1.0, std::abs(t));
        if (hi - lo <= tol) break;
        const double df = kde_pdf(t);
        double next = (df > 0.0) ? t - f / df : t;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= tol && kde_cdf(next) - target == 0.0) {
          t = next;
          break;
        }
        t = next;
      }
      return pre_transform_inverse(t);
    }
  }
  throw std::logic_error("unknown map kind");
}

AnamorphosisMap build_pl_map(std::span<const double> sample, MapDomain domain,
                             bool add_anchors) {
  const int n = static_cast<int>(sample.size());
  if (n < 2) throw std::invalid_argument("build_pl_map needs at least two values");
  std::vector<double> sorted = sorted_distinct(sample);
  if (!(sorted.back() > sorted.front())) {
    throw AnamorphosisError("build_pl_map: all sample values identical");
  }
  const double mean = detail::sample_mean(sorted);
  const double sd = detail::sample_sd(sorted);

  std::vector<double> knot_v, knot_u;
  knot_v.reserve(n + 2);
  knot_u.reserve(n + 2);
  for (int k = 0; k < n; ++k) {
    knot_v.push_back(sorted[k]);
    knot_u.push_back(normal_quantile((k + 1.0) / (n + 1.0)));
  }

  if (add_anchors) {
    // nominal anchors, nudged only if a wild sample already covers them
    const double pad = std::max(0.01 * sd, 1e-9);
    auto prepend = [&](double v, double u) {
      if (!(v < knot_v.front())) v = knot_v.front() - pad;
      if (!(u < knot_u.front())) u = knot_u.front() - 1.0;
      knot_v.insert(knot_v.begin(), v);
      knot_u.insert(knot_u.begin(), u);
    };
    auto append = [&](double v, double u) {
      if (!(v > knot_v.back())) v = knot_v.back() + pad;
      if (!(u > knot_u.back())) u = knot_u.back() + 1.0;
      knot_v.push_back(v);
      knot_u.push_back(u);
    };
    switch (domain) {
      case MapDomain::Unbounded:
        prepend(mean - 10.0 * sd, -10.0);
        append(mean + 10.0 * sd, 10.0);
        break;
      case MapDomain::Unit01:
        prepend(0.0, -20.0);
        append(1.0, 20.0);
        break;
      case MapDomain::Positive:
        prepend(0.0, -20.0);
        append(mean + 4.0 * sd, 4.0);
        break;
    }
  }

  for (std::size_t k = 1; k < knot_v.size(); ++k) {
    if (!(knot_v[k] > knot_v[k - 1]) || !(knot_u[k] > knot_u[k - 1])) {
      throw AnamorphosisError("build_pl_map: knots are not strictly increasing");
    }
  }

  AnamorphosisMap map;
  map.kind_ = MapKind::PiecewiseLinear;
  map.domain_ = domain;
  map.knot_v_ = std::move(knot_v);
  map.knot_u_ = std::move(knot_u);
  return map;
}

AnamorphosisMap build_kde_map(std::span<const double> sample, MapDomain domain) {
  const int n = static_cast<int>(sample.size());
  if (n < 2) throw std::invalid_argument("build_kde_map needs at least two values");

  AnamorphosisMap map;
  map.kind_ = MapKind::KDE;
  map.domain_ = domain;

  std::vector<double> data(n);
  for (int i = 0; i < n; ++i) data[i] = map.pre_transform(sample[i]);
  std::sort(data.begin(), data.end());

  const double sd = detail::sample_sd(data);
  const double iqr = detail::percentile_sorted(data, 0.75) -
                     detail::percentile_sorted(data, 0.25);
  const double h = 1.06 * std::min(sd, iqr / 1.34) *
                   std::pow(static_cast<double>(n), -0.2);
  if (!(h > 0.0)) {
    throw AnamorphosisError("build_kde_map: zero bandwidth (degenerate sample)");
  }

  map.kde_data_ = std::move(data);
  map.kde_bandwidth_ = h;
  map.kde_sd_ = sd;
  map.kde_cdf_at_data_.resize(n);
  for (int i = 0; i < n; ++i) {
    map.kde_cdf_at_data_[i] = map.kde_cdf(map.kde_data_[i]);
  }
  return map;
}

Ensemble ga_enkf_update(const Ensemble& forecast, const ObservationBatch& y,
                        const ObservingSystem& sys, const Eigen::MatrixXd& L,
                        const GaOptions& opt, Rng& rng) {
  const int dim = forecast.dim();
  const int n = forecast.size();
  JointEnsemble je = make_joint_ensemble(forecast, sys, rng);

  ObservationBatch y_hat = y;
  std::vector<AnamorphosisMap> state_maps;

  if (opt.map_kind != MapKind::Identity) {
    state_maps.reserve(dim);
    const MapDomain ydom = obs_domain(sys.kind);
    std::vector<double> row(n);
    for (int k = 0; k < dim; ++k) {
      for (int i = 0; i < n; ++i) row[i] = je.x_members(k, i);
      AnamorphosisMap mx = (opt.map_kind == MapKind::PiecewiseLinear)
                               ? build_pl_map(row, MapDomain::Unbounded,
                                              opt.anchor_state_maps)
                               : build_kde_map(row, MapDomain::Unbounded);
      for (int i = 0; i < n; ++i) je.x_members(k, i) = mx.forward(row[i]);
      state_maps.push_back(std::move(mx));
    }
    for (int k = 0; k < dim; ++k) {
      for (int i = 0; i < n; ++i) row[i] = je.y_members(k, i);
      const AnamorphosisMap my = (opt.map_kind == MapKind::PiecewiseLinear)
                                     ? build_pl_map(row, ydom, true)
                                     : build_kde_map(row, ydom);
      for (int i = 0; i < n; ++i) je.y_members(k, i) = my.forward(row[i]);
      y_hat.values[k] = my.forward(y.values[k]);
    }
  }

  if (opt.inflation != 1.0) {
    Ensemble hat{std::move(je.x_members)};
    je.x_members = inflate(hat, opt.inflation).members;
  }

  Ensemble analysis = enkf_update(je, y_hat, L);

  if (opt.map_kind != MapKind::Identity) {
    for (int k = 0; k < dim; ++k) {
      for (int i = 0; i < n; ++i) {
        analysis.members(k, i) = state_maps[k].inverse(analysis.members(k, i));
      }
    }
  }
  return analysis;
}

}  // namespace l96da
