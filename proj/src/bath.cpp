#include "qram/bath.hpp"

#include <cmath>
#include <stdexcept>

namespace qram {

namespace {

// Series length for the thermal sum; terms fall off like 1/(k*beta)^2 and the
// integral tail picks up the remainder, so this is accurate to ~1e-12 * K_n(0)
// already for beta of order one.
constexpr int kThermalTerms = 200;

}  // namespace

BathKernels::BathKernels(double eta, double omega_c, double beta,
                         double tau_step, double tau_max)
    : eta_(eta),
      omega_c_(omega_c),
      beta_(beta),
      a_(1.0 / omega_c),
      tau_step_(tau_step),
      tau_max_(tau_max) {
  if (!(omega_c > 0.0)) throw std::invalid_argument("BathKernels: omega_c <= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("BathKernels: beta <= 0");
  if (!(tau_step > 0.0)) throw std::invalid_argument("BathKernels: tau_step <= 0");
  if (eta < 0.0) throw std::invalid_argument("BathKernels: eta < 0");
  if (tau_max < 0.0) throw std::invalid_argument("BathKernels: tau_max < 0");

  if (eta_ > 0.0) {
    const std::size_t n_cache =
        static_cast<std::size_t>(std::ceil(tau_max_ / thermal_step_)) + 2;
    thermal_cache_.resize(n_cache);
    for (std::size_t i = 0; i < n_cache; ++i) {
      thermal_cache_[i] = thermal_series(static_cast<double>(i) * thermal_step_);
    }
  }

  const std::size_t n_grid =
      static_cast<std::size_t>(std::floor(tau_max_ / tau_step_)) + 1;
  noise_grid_.resize(n_grid);
  dissip_grid_.resize(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) {
    const double tau = static_cast<double>(k) * tau_step_;
    noise_grid_[k] = noise(tau);
    dissip_grid_[k] = dissip(tau);
  }
}

double BathKernels::spectral_density(double eps) const {
  if (eps < 0.0) {
    throw std::invalid_argument("spectral_density: negative frequency");
  }
  return eta_ * eps * std::exp(-eps / omega_c_);
}

double BathKernels::dissip(double tau) const {
  const double d = a_ * a_ + tau * tau;
  return 2.0 * eta_ * a_ * tau / (d * d);
}

double BathKernels::noise(double tau) const {
  if (eta_ == 0.0) return 0.0;
  const double t2 = tau * tau;
  const double d = a_ * a_ + t2;
  const double zero_t = eta_ * (a_ * a_ - t2) / (d * d);
  return zero_t + thermal_noise(tau);
}

double BathKernels::thermal_noise(double tau) const {
  if (eta_ == 0.0) return 0.0;
  tau = std::abs(tau);
  const double x = tau / thermal_step_;
  const std::size_t i = static_cast<std::size_t>(x);
  if (thermal_cache_.size() >= 2 && i + 1 < thermal_cache_.size()) {
    const double f = x - static_cast<double>(i);
    return (1.0 - f) * thermal_cache_[i] + f * thermal_cache_[i + 1];
  }
  return thermal_series(tau);
}

double BathKernels::thermal_series(double tau) const {
  const double t2 = tau * tau;
  double sum = 0.0;
  for (int k = kThermalTerms; k >= 1; --k) {
    const double s = a_ + k * beta_;
    const double d = s * s + t2;
    sum += (s * s - t2) / (d * d);
  }
  // Midpoint integral tail for k > kThermalTerms.
  const double u = a_ + (kThermalTerms + 0.5) * beta_;
  sum += (1.0 / beta_) * u / (u * u + t2);
  return 2.0 * eta_ * sum;
}

BathKernels precompute_kernels(const SimulationConfig& cfg, double horizon) {
  return BathKernels(cfg.eta, cfg.omega_c, cfg.beta, cfg.dt, horizon);
}

}  // namespace qram
