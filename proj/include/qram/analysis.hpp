#pragma once

#include "qram/model.hpp"

#include <optional>
#include <vector>

namespace qram {

struct FitResult {
  std::vector<double> params;
  double rms_residual = 0.0;
  bool converged = false;
  int iterations = 0;
  // False when the sampled span never resolved a decay (fitted rate zero,
  // negative, or smaller than ~5e-3 over the whole window).  The time
  // constant is reported as +inf in that case.
  bool decay_resolved = true;
};

// c0 * exp(-t / T), params = {c0, T}.
// Log-linear seed, then damped Gauss-Newton restricted to t <= 3 * T_seed
// so a noisy tail cannot drag the fit.
FitResult fit_exponential(const std::vector<double>& t,
                          const std::vector<double>& y);

// c0 * cos(omega * t) * exp(-t / T), params = {c0, omega, T}.
// The model is phase-free: callers sample observables that start on a
// cosine maximum.  freq_hint skips the DFT seed scan, which cannot resolve
// frequencies below one turn per span.
FitResult fit_damped_cosine(const std::vector<double>& t,
                            const std::vector<double>& y,
                            std::optional<double> freq_hint = std::nullopt);

// Weak-coupling relaxation time of a qubit at splitting omega_p against the
// Ohmic bath: T1 = exp(omega_p/omega_c) / (4 pi eta omega_p).
double analytic_t1(double eta, double omega_p, double omega_c);

// Duration of half a coherent swap cycle at gap 2*rabi_abs.
double half_rabi_time(double rabi_abs);

// sqrt(<psi|rho|psi>).  Throws if the quadratic form is negative beyond
// rounding, which indicates an unphysical state.
double fidelity(const Mat4& rho, const Vec4& psi);

double purity(const Mat4& rho);

// Amplitudes propagated under the diagonal (coupling-free, bath-free) part of
// the Hamiltonian: |ij> picks up exp(-i (z_i omega_m t + z_j Theta(t)) / 2)
// with Theta(t) = omega_m * integral of W and z = (-1, +1).
Vec4 target_evolve(const Vec4& amp0, double t, const SimulationConfig& cfg);

}  // namespace qram
