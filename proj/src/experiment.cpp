#include "l96da/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "l96da/enkf.hpp"
#include "l96da/scalar_update.hpp"

namespace l96da {

std::string method_name(Method m) {
  switch (m) {
    case Method::EnKF: return "EnKF";
    case Method::GaPl: return "GA-PL";
    case Method::GaKde: return "GA-KDE";
    case Method::Rhf: return "RHF";
    case Method::Irhf: return "iRHF";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  std::string low(name);
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (low == "enkf") return Method::EnKF;
  if (low == "ga-pl" || low == "gapl") return Method::GaPl;
  if (low == "ga-kde" || low == "gakde") return Method::GaKde;
  if (low == "rhf") return Method::Rhf;
  if (low == "irhf") return Method::Irhf;
  return std::nullopt;
}

std::string obs_kind_name(ObsKind k) {
  switch (k) {
    case ObsKind::Linear: return "linear";
    case ObsKind::LogitNormal: return "logit";
    case ObsKind::LogNormal: return "log";
  }
  return "?";
}

std::optional<ObsKind> parse_obs_kind(std::string_view name) {
  std::string low(name);
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (low == "linear") return ObsKind::Linear;
  if (low == "logit" || low == "logit-normal" || low == "logitnormal") {
    return ObsKind::LogitNormal;
  }
  if (low == "log" || low == "log-normal" || low == "lognormal") {
    return ObsKind::LogNormal;
  }
  return std::nullopt;
}

ObservingSystem ExperimentConfig::observing_system() const {
  ObservingSystem sys;
  sys.kind = obs;
  sys.noise_sd = obs_noise_sd;
  sys.slope = obs_slope;
  sys.center = obs_center;
  return sys;
}

LocalizationSpec ExperimentConfig::localization() const {
  LocalizationSpec spec;
  spec.radius = loc_radius;
  spec.n_sites = integrator.n_sites;
  spec.chordal = chordal_localization;
  return spec;
}

void ExperimentConfig::validate() const {
  try {
    integrator.validate();
    observing_system().validate();
    localization().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (ensemble_size < 2) throw ConfigError("ensemble size must be >= 2");
  if (!(inflation >= 1.0)) throw ConfigError("inflation must be >= 1");
  if (n_cycles < 1) throw ConfigError("cycles must be >= 1");
  if (spinup_cycles < 0 || spinup_cycles >= n_cycles) {
    throw ConfigError("spinup must be in [0, cycles)");
  }
  if (!(divergence_threshold > 0.0)) {
    throw ConfigError("divergence threshold must be positive");
  }
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  for (double x : v) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  }
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

std::vector<int> obs_order(const ExperimentConfig& cfg, int cycle) {
  std::vector<int> order(cfg.integrator.n_sites);
  std::iota(order.begin(), order.end(), 0);
  if (cfg.random_obs_order) {
    Rng rng(derive_seed(cfg.seed, Stream::ObsOrder, cycle));
    for (int k = static_cast<int>(order.size()) - 1; k > 0; --k) {
      std::swap(order[k], order[rng.below(k + 1)]);
    }
  }
  return order;
}

Ensemble assimilate(const ExperimentConfig& cfg, const Ensemble& forecast,
                    const ObservationBatch& yb, const ObservingSystem& sys,
                    const Eigen::MatrixXd& L, int cycle) {
  switch (cfg.method) {
    case Method::EnKF: {
      const Ensemble inflated = inflate(forecast, cfg.inflation);
      Rng rng(derive_seed(cfg.seed, Stream::PerturbedObs, cycle));
      return enkf_update(make_joint_ensemble(inflated, sys, rng), yb, L);
    }
    case Method::GaPl:
    case Method::GaKde: {
      GaOptions opt;
      opt.map_kind = (cfg.method == Method::GaPl) ? MapKind::PiecewiseLinear
                                                  : MapKind::KDE;
      opt.inflation = cfg.inflation;
      opt.anchor_state_maps = cfg.pl_anchor_state_maps;
      Rng rng(derive_seed(cfg.seed, Stream::PerturbedObs, cycle));
      return ga_enkf_update(forecast, yb, sys, L, opt, rng);
    }
    case Method::Rhf:
    case Method::Irhf: {
      const Ensemble inflated = inflate(forecast, cfg.inflation);
      const ScalarFilter f =
          (cfg.method == Method::Rhf) ? ScalarFilter::Rhf : ScalarFilter::Irhf;
      return two_step_assimilate(inflated, yb, sys, L, f,
                                 obs_order(cfg, cycle));
    }
  }
  throw std::logic_error("unknown method");
}

}  // namespace

RunResult run_cycle_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const ObservingSystem sys = cfg.observing_system();
  const Eigen::MatrixXd L = loc_matrix(cfg.localization());

  // reference trajectory: one extra state so every cycle has a forecast step
  const std::vector<StateVector> truth =
      make_reference(derive_seed(cfg.seed, Stream::ReferenceInit), 9.0,
                     cfg.n_cycles + 1, cfg.integrator);

  Ensemble ens;
  ens.members.resize(cfg.integrator.n_sites, cfg.ensemble_size);
  {
    Rng rng(derive_seed(cfg.seed, Stream::EnsembleInit));
    for (int i = 0; i < cfg.ensemble_size; ++i) {
      for (int k = 0; k < cfg.integrator.n_sites; ++k) {
        ens.members(k, i) = truth[0][k] + rng.normal();
      }
    }
  }

  RunResult result;
  result.cycles.reserve(cfg.n_cycles);
  bool diverged = false;

  for (int cycle = 1; cycle <= cfg.n_cycles; ++cycle) {
    CycleMetrics rec;
    rec.cycle_index = cycle;
    rec.forecast_rmse = rec.forecast_spread = rec.forecast_crps =
        rec.analysis_rmse = rec.analysis_spread = rec.analysis_crps =
            std::numeric_limits<double>::quiet_NaN();
    if (diverged) {
      rec.diverged = true;
      result.cycles.push_back(rec);
      continue;
    }

    const StateVector& xt = truth[cycle];
    try {
      for (int i = 0; i < cfg.ensemble_size; ++i) {
        ens.members.col(i) = integrate(ens.members.col(i), cfg.integrator);
      }
      rec.forecast_rmse = rmse(ens, xt);
      rec.forecast_spread = spread(ens);
      rec.forecast_crps = crps_mean(ens, xt);

      ObservationBatch yb;
      {
        Rng rng(derive_seed(cfg.seed, Stream::ObsNoise, cycle));
        yb = sample_obs(xt, sys, rng, cycle);
      }

      ens = assimilate(cfg, ens, yb, sys, L, cycle);
      if (check_divergence(ens, cfg.divergence_threshold)) {
        throw ScalarUpdateError("ensemble diverged");
      }
      rec.analysis_rmse = rmse(ens, xt);
      rec.analysis_spread = spread(ens);
      rec.analysis_crps = crps_mean(ens, xt);
    } catch (const std::runtime_error&) {
      diverged = true;
      rec.diverged = true;
    }
    result.cycles.push_back(rec);
  }

  RunSummary& s = result.summary;
  s.method = method_name(cfg.method);
  s.obs = obs_kind_name(cfg.obs);
  s.ensemble_size = cfg.ensemble_size;
  s.loc_radius = cfg.loc_radius;
  s.inflation = cfg.inflation;
  s.seed = cfg.seed;
  s.n_cycles = cfg.n_cycles;
  s.spinup_cycles = cfg.spinup_cycles;
  s.diverged = diverged;

  std::vector<double> fr, fs, fc, ar, as, ac;
  for (int c = cfg.spinup_cycles; c < cfg.n_cycles; ++c) {
    const CycleMetrics& rec = result.cycles[c];
    fr.push_back(rec.forecast_rmse);
    fs.push_back(rec.forecast_spread);
    fc.push_back(rec.forecast_crps);
    ar.push_back(rec.analysis_rmse);
    as.push_back(rec.analysis_spread);
    ac.push_back(rec.analysis_crps);
  }
  s.forecast_rmse = median(std::move(fr));
  s.forecast_spread = median(std::move(fs));
  s.forecast_crps = median(std::move(fc));
  s.analysis_rmse = median(std::move(ar));
  s.analysis_spread = median(std::move(as));
  s.analysis_crps = median(std::move(ac));

  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

std::vector<RunSummary> run_sweep(const SweepSpec& spec, int workers) {
  std::vector<ExperimentConfig> grid;
  for (Method m : spec.methods) {
    for (int n : spec.ensemble_sizes) {
      for (double d : spec.loc_radii) {
        for (double r : spec.inflations) {
          ExperimentConfig cfg = spec.base;
          cfg.method = m;
          cfg.ensemble_size = n;
          cfg.loc_radius = d;
          cfg.inflation = r;
          cfg.validate();
          grid.push_back(cfg);
        }
      }
    }
  }

  std::vector<RunSummary> out(grid.size());
  std::atomic<std::size_t> next{0};
  const int pool = std::max(1, std::min<int>(workers, grid.size()));
  auto work = [&] {
    for (std::size_t j = next.fetch_add(1); j < grid.size();
         j = next.fetch_add(1)) {
      out[j] = run_cycle_experiment(grid[j]).summary;
    }
  };
  if (pool == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (int t = 0; t < pool; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  return out;
}

std::vector<double> replication_inflations() {
  std::vector<double> r;
  for (int k = 0; k <= 8; ++k) r.push_back(1.0 + k / 20.0);
  return r;
}

std::vector<double> replication_radii() {
  std::vector<double> d{0.5};
  for (int k = 1; k <= 8; ++k) d.push_back(2.0 * k - 1.0);
  d.push_back(std::numeric_limits<double>::infinity());
  return d;
}

std::vector<ScalarBenchCell> run_scalar_benchmark(const ScalarBenchSpec& spec,
                                                  int workers) {
  std::vector<double> ys, gammas;
  const int ny =
      static_cast<int>(std::floor((spec.y_max - spec.y_min) / spec.y_step + 1.5));
  for (int i = 0; i < ny; ++i) ys.push_back(spec.y_min + i * spec.y_step);
  const int ng = static_cast<int>(
      std::floor((spec.gamma_max - spec.gamma_min) / spec.gamma_step + 1.5));
  for (int i = 0; i < ng; ++i) {
    gammas.push_back(spec.gamma_min + i * spec.gamma_step);
  }

  struct Task {
    int n;
    double y, gamma;
    std::size_t index;
  };
  std::vector<Task> tasks;
  std::vector<ScalarBenchCell> out;
  for (int n : spec.ensemble_sizes) {
    for (double y : ys) {
      for (double g : gammas) {
        for (ScalarFilter f : {ScalarFilter::Rhf, ScalarFilter::Irhf}) {
          ScalarBenchCell cell;
          cell.filter = f;
          cell.ensemble_size = n;
          cell.y = y;
          cell.gamma_requested = g;
          cell.gamma_used = (g == 0.0) ? spec.gamma_floor : g;
          out.push_back(cell);
        }
        tasks.push_back({n, y, g, out.size() - 2});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    std::vector<double> sample, rhf_err, irhf_err;
    for (std::size_t j = next.fetch_add(1); j < tasks.size();
         j = next.fetch_add(1)) {
      const Task& task = tasks[j];
      const double gamma = out[task.index].gamma_used;
      const double shrink = gamma / std::sqrt(1.0 + gamma * gamma);
      const double shift = task.y / (gamma * gamma + 1.0);
      rhf_err.clear();
      irhf_err.clear();
      for (int trial = 0; trial < spec.trials; ++trial) {
        Rng rng(derive_seed(spec.seed, Stream::Bench,
                            (j << 12) + static_cast<std::uint64_t>(trial)));
        sample.resize(task.n);
        for (double& z : sample) z = rng.normal();
        auto loglik = [&](double z) {
          const double r = (task.y - z) / gamma;
          return -0.5 * r * r;
        };
        const std::vector<double> rhf_out = rhf_scalar_update(sample, loglik);
        const std::vector<double> irhf_out = irhf_scalar_update(sample, loglik);
        double e_rhf = 0.0, e_irhf = 0.0;
        for (int i = 0; i < task.n; ++i) {
          const double exact = shift + shrink * sample[i];
          e_rhf = std::max(e_rhf, std::abs(rhf_out[i] - exact));
          e_irhf = std::max(e_irhf, std::abs(irhf_out[i] - exact));
        }
        rhf_err.push_back(e_rhf);
        irhf_err.push_back(e_irhf);
      }
      out[task.index].median_max_abs_error = median(rhf_err);
      out[task.index + 1].median_max_abs_error = median(irhf_err);
    }
  };
  const int pool = std::max(1, std::min<int>(workers, tasks.size()));
  if (pool == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < pool; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  return out;
}

int default_workers() {
  if (const char* env = std::getenv("L96DA_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace l96da
