#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace l96da {

using StateVector = Eigen::VectorXd;

/// Thrown when time integration produces non-finite state values.
class ModelBlowup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-step RK4 integration settings for the ring model.
struct IntegratorConfig {
  double forcing = 8.0;  ///< constant forcing
  double window = 0.05;  ///< time between saved states (MTU)
  int substeps = 10;     ///< internal RK4 steps per window
  int n_sites = 40;      ///< ring size

  double internal_step() const { return window / substeps; }
  void validate() const;
};

/// Ring-model tendency d x_k/dt = -x_{k-1} (x_{k-2} - x_{k+1}) - x_k + F
/// with periodic indices.
StateVector lorenz96_rhs(const StateVector& x, double forcing);

/// One classical fourth-order Runge-Kutta step of size dt. Throws
/// ModelBlowup if the result is non-finite.
StateVector rk4_step(const StateVector& x, double dt, double forcing);

/// Advance one window using cfg.substeps equal RK4 steps.
StateVector integrate(const StateVector& x, const IntegratorConfig& cfg);

/// Reference trajectory: start from seeded standard-normal values, spin up
/// for spinup_mtu, then save n_saves states one window apart. The first
/// saved state is the end of the spin-up.
std::vector<StateVector> make_reference(std::uint64_t seed, double spinup_mtu,
                                        int n_saves,
                                        const IntegratorConfig& cfg);

}  // namespace l96da
