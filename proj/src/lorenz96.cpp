#include "l96da/lorenz96.hpp"

#include <cmath>

#include "l96da/rng.hpp"

namespace l96da {

void IntegratorConfig::validate() const {
  if (!(forcing == forcing)) throw std::invalid_argument("forcing must be finite");
  if (!(window > 0.0)) throw std::invalid_argument("window must be positive");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (n_sites < 4) throw std::invalid_argument("n_sites must be >= 4");
}

StateVector lorenz96_rhs(const StateVector& x, double forcing) {
  const auto n = x.size();
  StateVector d(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double xm1 = x[(k - 1 + n) % n];
    const double xm2 = x[(k - 2 + n) % n];
    const double xp1 = x[(k + 1) % n];
    d[k] = -xm1 * (xm2 - xp1) - x[k] + forcing;
  }
  return d;
}

StateVector rk4_step(const StateVector& x, double dt, double forcing) {
  const StateVector k1 = lorenz96_rhs(x, forcing);
  const StateVector k2 = lorenz96_rhs(x + 0.5 * dt * k1, forcing);
  const StateVector k3 = lorenz96_rhs(x + 0.5 * dt * k2, forcing);
  const StateVector k4 = lorenz96_rhs(x + dt * k3, forcing);
  StateVector out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!out.allFinite()) throw ModelBlowup("rk4_step produced non-finite state");
  return out;
}

StateVector integrate(const StateVector& x, const IntegratorConfig& cfg) {
  cfg.validate();
  const double dt = cfg.internal_step();
  StateVector out = x;
  for (int s = 0; s < cfg.substeps; ++s) out = rk4_step(out, dt, cfg.forcing);
  return out;
}

std::vector<StateVector> make_reference(std::uint64_t seed, double spinup_mtu,
                                        int n_saves,
                                        const IntegratorConfig& cfg) {
  cfg.validate();
  if (n_saves < 1) throw std::invalid_argument("n_saves must be >= 1");

  Rng rng(seed);
  StateVector state(cfg.n_sites);
  for (int k = 0; k < cfg.n_sites; ++k) state[k] = rng.normal();

  const double dt = cfg.internal_step();
  const long spinup_steps = std::lround(spinup_mtu / dt);
  for (long s = 0; s < spinup_steps; ++s) state = rk4_step(state, dt, cfg.forcing);

  std::vector<StateVector> saves;
  saves.reserve(n_saves);
  saves.push_back(state);
  for (int i = 1; i < n_saves; ++i) {
    state = integrate(state, cfg);
    saves.push_back(state);
  }
  return saves;
}

}  // namespace l96da
