#pragma once

#include "qram/quantum_core.hpp"

namespace qram {

// Tuning window W(t) for the proxy qubit splitting, omega_p(t) = omega_m * W(t).
// HalfCosine: sits at off_value, ramps C1-smoothly to 1.0 over tau_ramp starting
// at t_on, holds the resonant plateau until t_off, then ramps back.
// Constant: W(t) = off_value for all t.
enum class WindowShape { Constant, HalfCosine };

struct WindowSpec {
  double off_value = 0.5;
  double t_on = 0.0;
  double t_off = 0.0;
  double tau_ramp = 1.0;
  WindowShape shape = WindowShape::HalfCosine;
};

double window(double t, const WindowSpec& spec);

// Closed-form integral of W over [0, t].
double window_integral(double t, const WindowSpec& spec);

// Exact mean of W over [t1, t2].  Returns the region constant directly when
// the interval sits inside a flat region, so plateau averages compare equal
// bitwise across steps.
double window_average(double t1, double t2, const WindowSpec& spec);

// Transfer pulse with the plateau sized for a complete population swap
// (pi worth of Rabi rotation at gap 2*|rabi|) and t_on placed so the
// detuned-phase accumulated before the pulse is a whole number of turns:
//   omega_m * (1 - w_off) * (t_on + tau_ramp/2) = 2*pi*phase_cycles.
WindowSpec make_transfer_window(double rabi_abs, double omega_m = 1.0,
                                double w_off = 0.5, double ramp_frac = 0.05,
                                int phase_cycles = 23);

struct SimulationConfig {
  double omega_m = 1.0;
  Complex rabi = Complex(0.0, 0.01);
  double eta = 0.0;
  double omega_c = 100.0;
  double beta = 100.0;
  WindowSpec window = make_transfer_window(0.01);
  double dt = 1.0;
  double t_total = 0.0;  // 0 means: let the experiment choose
  int n_sub = 4;         // propagator substeps per dt, must be even
};

// Two-qubit Hamiltonian with the proxy splitting frozen at omega_p:
//   H = (omega_m/2) sz (x) 1 + (omega_p/2) 1 (x) sz - R (x) sx,
// R = [[0, rabi], [conj(rabi), 0]] on the memory qubit.
Mat4 build_hqq_at(double omega_p, const SimulationConfig& cfg);

Mat4 build_hqq(double t, const SimulationConfig& cfg);

// Lab-frame bath coupling operator: identity on the memory qubit,
// (sx + sy + sz) on the proxy qubit.
Mat4 bath_coupling_lab();

}  // namespace qram
