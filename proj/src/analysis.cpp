#include "qram/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qram {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kRelStepTol = 1e-8;
// Below this much total decay across the span the rate is indistinguishable
// from zero at double precision of the fit, so T is reported as +inf.
constexpr double kResolvedDecay = 5e-3;

void check_series(const std::vector<double>& t, const std::vector<double>& y,
                  std::size_t min_points) {
  if (t.size() != y.size()) {
    throw std::invalid_argument("fit: time and value lengths differ");
  }
  if (t.size() < min_points) {
    throw std::invalid_argument("fit: too few samples");
  }
}

double finish_time_constant(double theta, double span, FitResult& out) {
  if (!(theta > 0.0) || theta * span < kResolvedDecay) {
    out.decay_resolved = false;
    return std::numeric_limits<double>::infinity();
  }
  return 1.0 / theta;
}

}  // namespace

FitResult fit_exponential(const std::vector<double>& t,
                          const std::vector<double>& y) {
  check_series(t, y, 3);
  const double span = t.back() - t.front();

  // Log-linear seed over the positive samples.
  double y_max = 0.0;
  for (double v : y) y_max = std::max(y_max, std::abs(v));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n_pos = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (y[i] > 1e-12 * y_max) {
      const double ly = std::log(y[i]);
      sx += t[i];
      sy += ly;
      sxx += t[i] * t[i];
      sxy += t[i] * ly;
      ++n_pos;
    }
  }
  double theta = 1.0 / span;
  double c0 = y.front();
  if (n_pos >= 2) {
    const double det = n_pos * sxx - sx * sx;
    if (std::abs(det) > 0.0) {
      const double slope = (n_pos * sxy - sx * sy) / det;
      const double inter = (sy * sxx - sx * sxy) / det;
      theta = -slope;
      c0 = std::exp(inter);
    }
  }

  // Restrict to the informative early window when the seed saw real decay.
  std::size_t n_fit = t.size();
  if (theta > 0.0) {
    const double t_cut = t.front() + 3.0 / theta;
    std::size_t m = 0;
    while (m < t.size() && t[m] <= t_cut) ++m;
    if (m >= 3) n_fit = m;
  }

  auto ssr_of = [&](double a, double th) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_fit; ++i) {
      const double r = a * std::exp(-th * t[i]) - y[i];
      s += r * r;
    }
    return s;
  };

  FitResult out;
  double lambda = 1e-3;
  double ssr = ssr_of(c0, theta);
  for (out.iterations = 1; out.iterations <= kMaxIterations; ++out.iterations) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < n_fit; ++i) {
      const double e = std::exp(-theta * t[i]);
      const double r = c0 * e - y[i];
      const Eigen::Vector2d j(e, -c0 * t[i] * e);
      jtj += j * j.transpose();
      jtr += j * r;
    }
    Eigen::Matrix2d damped = jtj;
    damped(0, 0) += lambda * jtj(0, 0);
    damped(1, 1) += lambda * jtj(1, 1);
    const Eigen::Vector2d step = damped.ldlt().solve(-jtr);
    const double c0_new = c0 + step(0);
    const double theta_new = theta + step(1);
    const double ssr_new = ssr_of(c0_new, theta_new);
    if (ssr_new <= ssr) {
      const double rel =
          std::max(std::abs(step(0)) / (std::abs(c0) + 1e-300),
                   std::abs(step(1)) / (std::abs(theta) + 1e-300));
      c0 = c0_new;
      theta = theta_new;
      ssr = ssr_new;
      lambda = std::max(lambda * 0.1, 1e-12);
      if (rel < kRelStepTol) {
        out.converged = true;
        break;
      }
    } else {
      lambda = std::min(lambda * 10.0, 1e12);
    }
  }

  out.rms_residual = std::sqrt(ssr / static_cast<double>(n_fit));
  const double t1 = finish_time_constant(theta, span, out);
  out.params = {c0, t1};
  return out;
}

FitResult fit_damped_cosine(const std::vector<double>& t,
                            const std::vector<double>& y,
                            std::optional<double> freq_hint) {
  check_series(t, y, 8);
  const double span = t.back() - t.front();
  const std::size_t n = t.size();

  double y_max = 0.0;
  for (double v : y) y_max = std::max(y_max, std::abs(v));
  double c0 = (std::abs(y.front()) > 0.1 * y_max) ? y.front() : y_max;

  double omega = 0.0;
  if (freq_hint) {
    omega = std::abs(*freq_hint);
  } else {
    // Coarse DFT scan, one bin per turn over the span, parabolic peak refine.
    const std::size_t k_max = std::min<std::size_t>(n / 2, 2000);
    std::vector<double> mag(k_max + 1, 0.0);
    std::size_t k_best = 0;
    for (std::size_t k = 0; k <= k_max; ++k) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / span;
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        re += y[i] * std::cos(w * t[i]);
        im -= y[i] * std::sin(w * t[i]);
      }
      mag[k] = std::hypot(re, im);
      if (mag[k] > mag[k_best]) k_best = k;
    }
    double k_ref = static_cast<double>(k_best);
    if (k_best > 0 && k_best < k_max) {
      const double denom = mag[k_best - 1] - 2.0 * mag[k_best] + mag[k_best + 1];
      if (std::abs(denom) > 0.0) {
        k_ref += 0.5 * (mag[k_best - 1] - mag[k_best + 1]) / denom;
      }
    }
    omega = 2.0 * std::numbers::pi * k_ref / span;
  }

  // Envelope seed from the RMS drop across the two halves of the window.
  double theta = 0.5 / span;
  {
    double s1 = 0, s2 = 0;
    std::size_t n1 = 0, n2 = 0;
    const double t_mid = t.front() + 0.5 * span;
    for (std::size_t i = 0; i < n; ++i) {
      if (t[i] < t_mid) {
        s1 += y[i] * y[i];
        ++n1;
      } else {
        s2 += y[i] * y[i];
        ++n2;
      }
    }
    if (n1 > 0 && n2 > 0 && s1 > 0 && s2 > 0) {
      const double r1 = std::sqrt(s1 / n1), r2 = std::sqrt(s2 / n2);
      if (r1 > r2 && r2 > 0) theta = 2.0 * std::log(r1 / r2) / span;
    }
  }

  auto ssr_of = [&](double a, double w, double th) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = a * std::cos(w * t[i]) * std::exp(-th * t[i]) - y[i];
      s += r * r;
    }
    return s;
  };

  FitResult out;
  double lambda = 1e-3;
  double ssr = ssr_of(c0, omega, theta);
  for (out.iterations = 1; out.iterations <= kMaxIterations; ++out.iterations) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-theta * t[i]);
      const double c = std::cos(omega * t[i]);
      const double s = std::sin(omega * t[i]);
      const double r = c0 * c * e - y[i];
      const Eigen::Vector3d j(c * e, -c0 * t[i] * s * e, -c0 * t[i] * c * e);
      jtj += j * j.transpose();
      jtr += j * r;
    }
    Eigen::Matrix3d damped = jtj;
    for (int d = 0; d < 3; ++d) damped(d, d) += lambda * (jtj(d, d) + 1e-300);
    const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
    const double c0_new = c0 + step(0);
    const double omega_new = omega + step(1);
    const double theta_new = theta + step(2);
    const double ssr_new = ssr_of(c0_new, omega_new, theta_new);
    if (ssr_new <= ssr) {
      const double rel =
          std::max({std::abs(step(0)) / (std::abs(c0) + 1e-300),
                    std::abs(step(1)) / (std::abs(omega) + 1e-12),
                    std::abs(step(2)) / (std::abs(theta) + 1e-12)});
      c0 = c0_new;
      omega = omega_new;
      theta = theta_new;
      ssr = ssr_new;
      lambda = std::max(lambda * 0.1, 1e-12);
      if (rel < kRelStepTol) {
        out.converged = true;
        break;
      }
    } else {
      lambda = std::min(lambda * 10.0, 1e12);
    }
  }

  out.rms_residual = std::sqrt(ssr / static_cast<double>(n));
  const double t2 = finish_time_constant(theta, span, out);
  out.params = {c0, std::abs(omega), t2};
  return out;
}

double analytic_t1(double eta, double omega_p, double omega_c) {
  if (!(eta > 0.0) || !(omega_p > 0.0) || !(omega_c > 0.0)) {
    throw std::invalid_argument("analytic_t1: parameters must be positive");
  }
  return std::exp(omega_p / omega_c) / (4.0 * std::numbers::pi * eta * omega_p);
}

double half_rabi_time(double rabi_abs) {
  if (!(rabi_abs > 0.0)) {
    throw std::invalid_argument("half_rabi_time: rabi_abs must be positive");
  }
  return std::numbers::pi / (2.0 * rabi_abs);
}

double fidelity(const Mat4& rho, const Vec4& psi) {
  const double p = (psi.adjoint() * rho * psi).value().real();
  if (p < -1e-10) {
    throw std::runtime_error("fidelity: state overlap is negative");
  }
  return std::sqrt(std::max(0.0, p));
}

double purity(const Mat4& rho) { return (rho * rho).trace().real(); }

Vec4 target_evolve(const Vec4& amp0, double t, const SimulationConfig& cfg) {
  const double theta = cfg.omega_m * window_integral(t, cfg.window);
  Vec4 amp;
  for (int n = 0; n < 4; ++n) {
    const double z_mem = (n & 2) ? 1.0 : -1.0;
    const double z_proxy = (n & 1) ? 1.0 : -1.0;
    const double phase = -0.5 * (z_mem * cfg.omega_m * t + z_proxy * theta);
    amp(n) = amp0(n) * std::exp(Complex(0.0, phase));
  }
  return amp;
}

}  // namespace qram
