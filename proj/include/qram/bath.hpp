#pragma once

#include "qram/model.hpp"

#include <vector>

namespace qram {

// Ohmic bath with exponential cutoff, J(eps) = eta * eps * exp(-eps/omega_c).
//
// Memory kernels (hbar = 1):
//   noise   K_n(tau) = int_0^inf J(eps) coth(beta*eps/2) cos(eps*tau) deps
//   dissip  K_d(tau) = int_0^inf J(eps) sin(eps*tau) deps
//
// K_d and the T=0 part of K_n have closed forms in a = 1/omega_c.  The thermal
// remainder 2*int J(eps) n_B(eps) cos(eps*tau) deps is summed exactly over the
// Matsubara-like exponential series with an integral tail, then cached on a
// fine grid; it is smooth on the scale of beta so linear interpolation holds
// far below the accuracy of everything downstream.
class BathKernels {
 public:
  BathKernels(double eta, double omega_c, double beta, double tau_step,
              double tau_max);

  double spectral_density(double eps) const;

  // Continuous evaluators. K_n is even in tau, K_d is odd.
  double noise(double tau) const;
  double dissip(double tau) const;

  // Values on the grid tau = k * tau_step, k = 0 .. n_grid()-1.
  const std::vector<double>& noise_table() const { return noise_grid_; }
  const std::vector<double>& dissip_table() const { return dissip_grid_; }
  std::size_t n_grid() const { return noise_grid_.size(); }
  double tau_step() const { return tau_step_; }

  double eta() const { return eta_; }
  double omega_c() const { return omega_c_; }
  double beta() const { return beta_; }

  // Thermal remainder of K_n, exposed for validation.
  double thermal_noise(double tau) const;

 private:
  double thermal_series(double tau) const;

  double eta_;
  double omega_c_;
  double beta_;
  double a_;  // 1/omega_c
  double tau_step_;
  double tau_max_;

  std::vector<double> noise_grid_;
  std::vector<double> dissip_grid_;

  // Thermal part cache, uniform grid with step thermal_step_.
  double thermal_step_ = 0.25;
  std::vector<double> thermal_cache_;
};

// Kernels for the config's bath over [0, horizon], tabulated at cfg.dt.
BathKernels precompute_kernels(const SimulationConfig& cfg, double horizon);

}  // namespace qram
