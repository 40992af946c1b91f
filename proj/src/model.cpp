#include "qram/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qram {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral of the rising half-cosine ramp from its start to xi in [0, tau].
double ramp_up_integral(double xi, double tau, double w_off) {
  const double s = (tau / kPi) * std::sin(kPi * xi / tau);
  return w_off * xi + 0.5 * (1.0 - w_off) * (xi - s);
}

double ramp_down_integral(double xi, double tau, double w_off) {
  const double s = (tau / kPi) * std::sin(kPi * xi / tau);
  return xi - 0.5 * (1.0 - w_off) * (xi - s);
}

}  // namespace

double window(double t, const WindowSpec& spec) {
  if (spec.shape == WindowShape::Constant) return spec.off_value;
  if (t <= spec.t_on) return spec.off_value;
  if (t < spec.t_on + spec.tau_ramp) {
    const double x = (t - spec.t_on) / spec.tau_ramp;
    return spec.off_value +
           (1.0 - spec.off_value) * 0.5 * (1.0 - std::cos(kPi * x));
  }
  if (t <= spec.t_off) return 1.0;
  if (t < spec.t_off + spec.tau_ramp) {
    const double x = (t - spec.t_off) / spec.tau_ramp;
    return 1.0 - (1.0 - spec.off_value) * 0.5 * (1.0 - std::cos(kPi * x));
  }
  return spec.off_value;
}

double window_integral(double t, const WindowSpec& spec) {
  const double w = spec.off_value;
  if (spec.shape == WindowShape::Constant) return w * t;

  const double tau = spec.tau_ramp;
  const double ramp_area = 0.5 * (1.0 + w) * tau;  // full ramp, either direction

  if (t <= spec.t_on) return w * t;
  double acc = w * spec.t_on;
  if (t < spec.t_on + tau) return acc + ramp_up_integral(t - spec.t_on, tau, w);
  acc += ramp_area;
  if (t <= spec.t_off) return acc + (t - spec.t_on - tau);
  acc += spec.t_off - spec.t_on - tau;
  if (t < spec.t_off + tau) return acc + ramp_down_integral(t - spec.t_off, tau, w);
  acc += ramp_area;
  return acc + w * (t - spec.t_off - tau);
}

double window_average(double t1, double t2, const WindowSpec& spec) {
  if (!(t2 > t1)) return window(t1, spec);
  if (spec.shape == WindowShape::Constant) return spec.off_value;
  if (t2 <= spec.t_on || t1 >= spec.t_off + spec.tau_ramp) return spec.off_value;
  if (t1 >= spec.t_on + spec.tau_ramp && t2 <= spec.t_off) return 1.0;
  return (window_integral(t2, spec) - window_integral(t1, spec)) / (t2 - t1);
}

WindowSpec make_transfer_window(double rabi_abs, double omega_m, double w_off,
                                double ramp_frac, int phase_cycles) {
  if (rabi_abs <= 0.0) {
    throw std::invalid_argument("make_transfer_window: rabi_abs must be > 0");
  }
  const double detune = omega_m * std::abs(1.0 - w_off);
  if (detune <= 0.0) {
    throw std::invalid_argument(
        "make_transfer_window: window must be detuned away from the plateau");
  }
  WindowSpec spec;
  spec.off_value = w_off;
  spec.shape = WindowShape::HalfCosine;
  const double t_half = kPi / (2.0 * rabi_abs);
  spec.tau_ramp = ramp_frac * t_half;
  spec.t_on = 2.0 * kPi * phase_cycles / detune - 0.5 * spec.tau_ramp;
  if (spec.t_on <= 0.0) {
    throw std::invalid_argument("make_transfer_window: phase_cycles too small");
  }
  spec.t_off = spec.t_on + spec.tau_ramp + t_half;
  return spec;
}

Mat4 build_hqq_at(double omega_p, const SimulationConfig& cfg) {
  const Mat2 sz = pauli(Axis::Z);
  const Mat2 sx = pauli(Axis::X);
  const Mat2 id = Mat2::Identity();

  Mat2 r = Mat2::Zero();
  r(0, 1) = cfg.rabi;
  r(1, 0) = std::conj(cfg.rabi);

  Mat4 h = 0.5 * cfg.omega_m * kron(sz, id);
  h += 0.5 * omega_p * kron(id, sz);
  h -= kron(r, sx);
  return h;
}

Mat4 build_hqq(double t, const SimulationConfig& cfg) {
  return build_hqq_at(cfg.omega_m * window(t, cfg.window), cfg);
}

Mat4 bath_coupling_lab() {
  const Mat2 n_dot_sigma = pauli(Axis::X) + pauli(Axis::Y) + pauli(Axis::Z);
  return kron(Mat2::Identity(), n_dot_sigma);
}

}  // namespace qram
