#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qram/analysis.hpp>
#include <qram/redfield.hpp>

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <vector>

#include "test_util.hpp"

using namespace qram;

namespace {

// Brute-force integral of K(t*-t') A(t') dt' over [t_lo, t_hi], with A(t')
// generated from one frozen Hamiltonian h on that interval starting at t_a:
// U(t') = exp(-i h (t'-t_a)) u_a.  Pieces split across the kernel spike in
// lag space, Gauss-Legendre 20 each.  Shares no code with the engine.
template <typename KernelFn>
Mat4 oracle_interval(const Mat4& h, const Mat4& u_a, double t_a, double t_lo,
                     double t_hi, double t_star, KernelFn kernel,
                     const Mat4& a_lab) {
  std::vector<double> bounds{t_lo};
  const double a = 0.01;  // 1/omega_c for every config in this file
  for (double b :
       {16 * a, 8 * a, 4 * a, 2 * a, a, a / 2, a / 4, a / 8}) {
    const double tp = t_star - b;  // lag breakpoint mapped to t'
    if (tp > t_lo + 1e-13 && tp < t_hi - 1e-13) bounds.push_back(tp);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.push_back(t_hi);

  using G = boost::math::quadrature::gauss<double, 20>;
  Mat4 acc = Mat4::Zero();
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const int parts =
        std::max(1, static_cast<int>(std::ceil((bounds[i + 1] - bounds[i]) / 0.2)));
    const double step = (bounds[i + 1] - bounds[i]) / parts;
    for (int p = 0; p < parts; ++p) {
      const double mid = bounds[i] + (p + 0.5) * step;
      const double half = 0.5 * step;
      for (std::size_t g = 0; g < G::abscissa().size(); ++g) {
        for (double sgn : {-1.0, 1.0}) {
          const double tp = mid + sgn * half * G::abscissa()[g];
          const double w = half * G::weights()[g];
          const Mat4 u = herm_expm(h, tp - t_a) * u_a;
          acc += (w * kernel(t_star - tp)) * (u.adjoint() * a_lab * u);
        }
      }
    }
  }
  return acc;
}

SimulationConfig resonant_config(double eta, double t_total, Complex rabi) {
  SimulationConfig cfg;
  cfg.rabi = rabi;
  cfg.eta = eta;
  cfg.t_total = t_total;
  cfg.window.shape = WindowShape::Constant;
  cfg.window.off_value = 1.0;
  return cfg;
}

double excited_population(const Mat4& rho) {
  return rho(1, 1).real() + rho(3, 3).real();
}

}  // namespace

TEST_CASE("memory integrals match brute force for a constant Hamiltonian") {
  const SimulationConfig cfg = resonant_config(1e-3, 10.0, Complex(0.0, 0.01));
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng(cfg, kernels);

  const Mat4 h = build_hqq_at(1.0, cfg);
  const Mat4 a_lab = bath_coupling_lab();
  for (double t_star : {0.5, 2.0, 8.0}) {
    const int sub = static_cast<int>(std::lround(t_star / eng.substep()));
    Mat4 gn, gd;
    eng.convolutions(sub, gn, gd);
    const Mat4 gn_ref = oracle_interval(
        h, Mat4::Identity(), 0.0, 0.0, t_star, t_star,
        [&](double tau) { return kernels.noise(tau); }, a_lab);
    const Mat4 gd_ref = oracle_interval(
        h, Mat4::Identity(), 0.0, 0.0, t_star, t_star,
        [&](double tau) { return kernels.dissip(tau); }, a_lab);
    CHECK((gn - gn_ref).norm() < 1e-9);
    CHECK((gd - gd_ref).norm() < 1e-9);
    CHECK((gn - gn.adjoint()).norm() < 1e-14);
    CHECK((gd - gd.adjoint()).norm() < 1e-14);
  }
}

TEST_CASE("memory integrals match brute force across window ramps") {
  SimulationConfig cfg;
  cfg.rabi = Complex(0.0, 0.01);
  cfg.eta = 1e-3;
  cfg.t_total = 16.0;
  cfg.window.off_value = 0.5;
  cfg.window.t_on = 2.0;
  cfg.window.t_off = 8.0;
  cfg.window.tau_ramp = 3.0;
  cfg.window.shape = WindowShape::HalfCosine;
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng(cfg, kernels);

  const Mat4 a_lab = bath_coupling_lab();
  const double h_sub = eng.substep();

  // Independent reconstruction of the same substep-frozen discretization.
  const int n_subs_all = static_cast<int>(std::lround(cfg.t_total / h_sub));
  std::vector<Mat4> u(n_subs_all + 1);
  std::vector<Mat4> h_bar(n_subs_all);
  u[0] = Mat4::Identity();
  for (int s = 0; s < n_subs_all; ++s) {
    const double wbar = window_average(s * h_sub, (s + 1) * h_sub, cfg.window);
    h_bar[s] = build_hqq_at(cfg.omega_m * wbar, cfg);
    u[s + 1] = herm_expm(h_bar[s], h_sub) * u[s];
  }

  for (double t_star : {1.5, 3.5, 6.5, 14.0}) {
    const int sub = static_cast<int>(std::lround(t_star / h_sub));
    Mat4 gn, gd;
    eng.convolutions(sub, gn, gd);
    Mat4 gn_ref = Mat4::Zero(), gd_ref = Mat4::Zero();
    for (int s = 0; s < sub; ++s) {
      const double t_a = s * h_sub;
      gn_ref += oracle_interval(
          h_bar[s], u[s], t_a, t_a, t_a + h_sub, t_star,
          [&](double tau) { return kernels.noise(tau); }, a_lab);
      gd_ref += oracle_interval(
          h_bar[s], u[s], t_a, t_a, t_a + h_sub, t_star,
          [&](double tau) { return kernels.dissip(tau); }, a_lab);
    }
    CHECK((gn - gn_ref).norm() < 1e-9);
    CHECK((gd - gd_ref).norm() < 1e-9);
  }
}

TEST_CASE("coherent propagator is exact for a constant Hamiltonian") {
  const SimulationConfig cfg = resonant_config(0.0, 20.0, Complex(0.0, 0.01));
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng(cfg, kernels);
  const Mat4 rho0 = basis_state(0, 1) * basis_state(0, 1).adjoint();
  const EvolutionRecord rec = eng.run(rho0);

  const Mat4 h = build_hqq_at(1.0, cfg);
  for (std::size_t i : {std::size_t{3}, std::size_t{11}, std::size_t{20}}) {
    const Mat4 u_exact = herm_expm(h, rec.times[i]);
    CHECK((rec.u_system[i] - u_exact).norm() < 1e-12);
    CHECK((to_lab_frame(rec, i) - u_exact * rho0 * u_exact.adjoint()).norm() <
          1e-12);
  }
}

TEST_CASE("closed system keeps the interaction state frozen") {
  SimulationConfig cfg;  // default transfer window, eta = 0
  cfg.t_total = 60.0;
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng(cfg, kernels);
  const Vec4 psi = (basis_state(0, 0) + basis_state(0, 1)) / std::sqrt(2.0);
  const Mat4 rho0 = psi * psi.adjoint();
  const EvolutionRecord rec = eng.run(rho0);
  for (const Mat4& rho : rec.rho_interaction) {
    CHECK((rho - rho0).norm() < 1e-13);
  }
  const Mat4& u_end = rec.u_system.back();
  CHECK((u_end * u_end.adjoint() - Mat4::Identity()).norm() < 1e-11);
  CHECK(rec.max_trace_drift < 1e-12);
}

TEST_CASE("population decay reproduces the weak-coupling relaxation time") {
  const double eta = 1e-3;
  const SimulationConfig cfg = resonant_config(eta, 200.0, Complex(0.0, 0.0));
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng(cfg, kernels);
  const EvolutionRecord rec =
      eng.run(basis_state(0, 1) * basis_state(0, 1).adjoint());

  std::vector<double> t, pop;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    t.push_back(rec.times[i]);
    pop.push_back(excited_population(rec.rho_interaction[i]));
  }
  const FitResult fit = fit_exponential(t, pop);
  CHECK(fit.converged);
  CHECK(fit.params[1] ==
        doctest::Approx(analytic_t1(eta, 1.0, 100.0)).epsilon(0.025));
}

TEST_CASE("coherence decay reproduces the weak-coupling dephasing time") {
  const double eta = 1e-3;
  const SimulationConfig cfg = resonant_config(eta, 400.0, Complex(0.0, 0.0));
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng(cfg, kernels);
  const Vec4 psi = (basis_state(0, 0) + basis_state(0, 1)) / std::sqrt(2.0);
  const EvolutionRecord rec = eng.run(psi * psi.adjoint());

  std::vector<double> t, coh;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    t.push_back(rec.times[i]);
    coh.push_back(std::abs(rec.rho_interaction[i](0, 1)));
  }
  const FitResult fit = fit_exponential(t, coh);
  CHECK(fit.converged);
  const double t1 = analytic_t1(eta, 1.0, 100.0);
  const double gamma_phi = 2.0 * std::numbers::pi * eta / cfg.beta;
  const double t2_expect = 1.0 / (0.5 / t1 + gamma_phi);
  CHECK(fit.params[1] == doctest::Approx(t2_expect).epsilon(0.025));
}

TEST_CASE("doubling the substep count does not move a resolved run") {
  SimulationConfig cfg = resonant_config(1e-3, 40.0, Complex(0.0, 0.01));
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng4(cfg, kernels);
  cfg.n_sub = 8;
  EvolutionEngine eng8(cfg, kernels);
  const Vec4 psi = (basis_state(0, 0) + basis_state(0, 1)) / std::sqrt(2.0);
  const EvolutionRecord r4 = eng4.run(psi * psi.adjoint());
  const EvolutionRecord r8 = eng8.run(psi * psi.adjoint());
  double worst = 0.0;
  for (std::size_t i = 0; i < r4.rho_interaction.size(); ++i) {
    worst = std::max(worst, (r4.rho_interaction[i] - r8.rho_interaction[i])
                                .cwiseAbs()
                                .maxCoeff());
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("halving dt moves the closed-system trajectory by under 1e-5") {
  SimulationConfig cfg;  // default transfer pulse
  cfg.eta = 0.0;
  cfg.t_total = 462.0;
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng1(cfg, kernels);
  SimulationConfig cfg_half = cfg;
  cfg_half.dt = 0.5;
  const BathKernels kernels_half = precompute_kernels(cfg_half, cfg.t_total);
  EvolutionEngine eng2(cfg_half, kernels_half);

  const Vec4 psi = (basis_state(0, 0) + basis_state(0, 1)) / std::sqrt(2.0);
  const EvolutionRecord r1 = eng1.run(psi * psi.adjoint());
  const EvolutionRecord r2 = eng2.run(psi * psi.adjoint());
  double worst = 0.0;
  for (std::size_t i = 0; i < r1.times.size(); ++i) {
    const Mat4 d = to_lab_frame(r1, i) - to_lab_frame(r2, 2 * i);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  MESSAGE("dt halving moved the trajectory by ", worst);
  CHECK(worst < 1e-5);
}

TEST_CASE("bath-on run stays physical") {
  const SimulationConfig cfg = resonant_config(1e-3, 300.0, Complex(0.0, 0.01));
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng(cfg, kernels);
  const Vec4 psi = (basis_state(0, 0) + basis_state(0, 1)) / std::sqrt(2.0);
  const EvolutionRecord rec = eng.run(psi * psi.adjoint());
  CHECK(rec.max_trace_drift < 1e-10);
  CHECK(rec.min_eigenvalue > -1e-6);
  for (std::size_t i = 0; i < rec.rho_interaction.size(); i += 50) {
    const Mat4& rho = rec.rho_interaction[i];
    CHECK((rho - rho.adjoint()).norm() < 1e-12);
    CHECK(purity(rho) < 1.0 + 1e-8);
  }
}

TEST_CASE("engine rejects malformed input") {
  SimulationConfig cfg = resonant_config(1e-3, 10.0, Complex(0.0, 0.01));
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);

  SimulationConfig bad = cfg;
  bad.n_sub = 3;
  CHECK_THROWS_AS(EvolutionEngine(bad, kernels), std::invalid_argument);
  bad = cfg;
  bad.t_total = 0.0;
  CHECK_THROWS_AS(EvolutionEngine(bad, kernels), std::invalid_argument);
  bad = cfg;
  bad.dt = -1.0;
  CHECK_THROWS_AS(EvolutionEngine(bad, kernels), std::invalid_argument);

  EvolutionEngine eng(cfg, kernels);
  CHECK_THROWS_AS(eng.run(2.0 * Mat4::Identity()), std::invalid_argument);
  Mat4 skew = Mat4::Zero();
  skew(0, 0) = 1.0;
  skew(0, 1) = 0.4;
  CHECK_THROWS_AS(eng.run(skew), std::invalid_argument);
}

TEST_CASE("a coupling far past weak response trips the physicality guard") {
  SimulationConfig cfg = resonant_config(1.0, 100.0, Complex(0.0, 0.01));
  cfg.dt = 5.0;
  const BathKernels kernels = precompute_kernels(cfg, cfg.t_total);
  EvolutionEngine eng(cfg, kernels);
  CHECK_THROWS_AS(eng.run(basis_state(0, 1) * basis_state(0, 1).adjoint()),
                  EvolutionError);
}
