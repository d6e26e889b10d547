#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "l96da/anamorphosis.hpp"
#include "l96da/ensemble.hpp"
#include "l96da/localization.hpp"
#include "l96da/lorenz96.hpp"
#include "l96da/observations.hpp"
#include "l96da/twostep.hpp"

namespace l96da {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { EnKF, GaPl, GaKde, Rhf, Irhf };

std::string method_name(Method m);
std::optional<Method> parse_method(std::string_view name);
std::string obs_kind_name(ObsKind k);
std::optional<ObsKind> parse_obs_kind(std::string_view name);

/// Full parameterization of one twin experiment.
struct ExperimentConfig {
  Method method = Method::EnKF;
  ObsKind obs = ObsKind::Linear;
  int ensemble_size = 120;
  double loc_radius = std::numeric_limits<double>::infinity();
  double inflation = 1.0;
  int n_cycles = 5500;
  int spinup_cycles = 500;
  std::uint64_t seed = 1;
  IntegratorConfig integrator{};

  double obs_noise_sd = 1.0;
  double obs_slope = 0.5;
  double obs_center = 2.5;

  bool chordal_localization = false;
  bool pl_anchor_state_maps = true;
  bool random_obs_order = false;
  double divergence_threshold = 1e3;

  ObservingSystem observing_system() const;
  LocalizationSpec localization() const;
  void validate() const;  // throws ConfigError
};

/// Config echo plus medians of the scored cycles (those after the spin-up).
/// Diverged runs carry NaN medians.
struct RunSummary {
  std::string method;
  std::string obs;
  int ensemble_size = 0;
  double loc_radius = 0;
  double inflation = 1;
  std::uint64_t seed = 0;
  int n_cycles = 0;
  int spinup_cycles = 0;
  double forecast_rmse = 0, forecast_spread = 0, forecast_crps = 0;
  double analysis_rmse = 0, analysis_spread = 0, analysis_crps = 0;
  bool diverged = false;
  double wall_seconds = 0;  ///< informational only; never serialized
};

struct RunResult {
  RunSummary summary;
  std::vector<CycleMetrics> cycles;
};

/// Twin-experiment cycling: build the reference trajectory and observations
/// from seeded substreams, start the ensemble from perturbations of the first
/// reference state, then forecast / score / inflate / assimilate / score each
/// cycle. After a divergence the remaining cycles are flagged and the run
/// ends.
RunResult run_cycle_experiment(const ExperimentConfig& cfg);

struct SweepSpec {
  ExperimentConfig base;
  std::vector<Method> methods;
  std::vector<int> ensemble_sizes;
  std::vector<double> loc_radii;
  std::vector<double> inflations;
};

/// Run every grid point on a worker pool. Results are in grid order
/// (method-major, then N, radius, inflation) and independent of the worker
/// count.
std::vector<RunSummary> run_sweep(const SweepSpec& spec, int workers);

/// Replication grids: inflation 1 + k/20 for k = 0..8; radii 0.5, the odd
/// integers 1..15, and infinity.
std::vector<double> replication_inflations();
std::vector<double> replication_radii();

struct ScalarBenchSpec {
  std::vector<int> ensemble_sizes{20, 80};
  double y_min = 0.0, y_max = 2.0, y_step = 0.1;
  double gamma_min = 0.0, gamma_max = 2.0, gamma_step = 0.1;
  int trials = 100;
  std::uint64_t seed = 1;
  double gamma_floor = 1e-3;  ///< substituted for gamma = 0
};

struct ScalarBenchCell {
  ScalarFilter filter{};
  int ensemble_size = 0;
  double y = 0;
  double gamma_requested = 0;
  double gamma_used = 0;
  double median_max_abs_error = 0;
};

/// Benchmark both scalar filters against the closed-form linear-Gaussian
/// transport z+ = y/(g^2+1) + g/sqrt(1+g^2) z on a (y, gamma) grid: standard
/// normal prior samples, Gaussian likelihood with sd gamma, maximum absolute
/// transport error per trial, median over the trials. Both filters see the
/// same samples.
std::vector<ScalarBenchCell> run_scalar_benchmark(const ScalarBenchSpec& spec,
                                                  int workers);

/// L96DA_WORKERS, else the hardware concurrency.
int default_workers();

}  // namespace l96da
