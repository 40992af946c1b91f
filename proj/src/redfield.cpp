#include "qram/redfield.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace qram {

namespace {

// Gauss-Legendre 8 on [-1, 1].
constexpr std::array<double, 4> kGlX = {0.1834346424956498, 0.5255324099163290,
                                        0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGlW = {0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};

constexpr std::array<int, 10> kPairM = {0, 0, 0, 0, 1, 1, 1, 2, 2, 3};
constexpr std::array<int, 10> kPairN = {0, 1, 2, 3, 1, 2, 3, 2, 3, 3};

// Gauss nodes for int_lo^hi, with extra piece boundaries across the kernel
// spike at tau ~ a = 1/omega_c and a cap on piece length so the rule stays
// deep in its convergent regime for every kernel scale.
void append_quad_nodes(double lo, double hi, double a, std::vector<double>& tau,
                       std::vector<double>& w) {
  std::vector<double> bounds;
  bounds.push_back(lo);
  for (double b : {a / 8, a / 4, a / 2, a, 2 * a, 4 * a, 8 * a, 16 * a}) {
    if (b > lo + 1e-14 && b < hi - 1e-14) bounds.push_back(b);
  }
  bounds.push_back(hi);
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const int parts =
        std::max(1, static_cast<int>(std::ceil((bounds[i + 1] - bounds[i]) / 0.5)));
    const double step = (bounds[i + 1] - bounds[i]) / parts;
    for (int p = 0; p < parts; ++p) {
      const double mid = bounds[i] + (p + 0.5) * step;
      const double half = 0.5 * step;
      for (std::size_t g = 0; g < kGlX.size(); ++g) {
        tau.push_back(mid - half * kGlX[g]);
        w.push_back(half * kGlW[g]);
        tau.push_back(mid + half * kGlX[g]);
        w.push_back(half * kGlW[g]);
      }
    }
  }
}

void kahan_add(Complex term, Complex& sum, Complex& comp) {
  const Complex y = term - comp;
  const Complex t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

}  // namespace

Mat4 to_lab_frame(const EvolutionRecord& rec, std::size_t idx) {
  if (idx >= rec.rho_interaction.size()) {
    throw std::out_of_range("to_lab_frame: index past end of record");
  }
  const Mat4& u = rec.u_system[idx];
  return u * rec.rho_interaction[idx] * u.adjoint();
}

EvolutionEngine::EvolutionEngine(const SimulationConfig& cfg,
                                 const BathKernels& kernels)
    : cfg_(cfg), kernels_(kernels) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("EvolutionEngine: dt <= 0");
  if (!(cfg.t_total > 0.0)) {
    throw std::invalid_argument("EvolutionEngine: t_total <= 0");
  }
  if (cfg.n_sub < 2 || cfg.n_sub % 2 != 0) {
    throw std::invalid_argument("EvolutionEngine: n_sub must be even and >= 2");
  }

  n_steps_ = std::max(1, static_cast<int>(std::ceil(cfg.t_total / cfg.dt - 1e-9)));
  h_ = cfg.dt / cfg.n_sub;
  n_subs_ = n_steps_ * cfg.n_sub;
  a_lab_ = bath_coupling_lab();

  // One frozen Hamiltonian per distinct substep-averaged window value.  The
  // region-aware average makes every flat-region substep key out identically.
  std::unordered_map<std::uint64_t, int> eig_of;
  sub_eig_.resize(n_subs_);
  for (int s = 0; s < n_subs_; ++s) {
    const double wbar = window_average(s * h_, (s + 1) * h_, cfg.window);
    const auto [it, inserted] =
        eig_of.try_emplace(std::bit_cast<std::uint64_t>(wbar),
                           static_cast<int>(eigs_.size()));
    if (inserted) {
      EigData e;
      const Mat4 hbar = build_hqq_at(cfg.omega_m * wbar, cfg);
      Eigen::SelfAdjointEigenSolver<Mat4> es(hbar);
      e.v = es.eigenvectors();
      e.lambda = es.eigenvalues();
      Vec4 ph;
      for (int k = 0; k < 4; ++k) {
        ph(k) = std::exp(Complex(0.0, -e.lambda(k) * h_));
      }
      e.exp_h = e.v * ph.asDiagonal() * e.v.adjoint();
      e.a_tilde = e.v.adjoint() * a_lab_ * e.v;
      eigs_.push_back(std::move(e));
    }
    sub_eig_[s] = it->second;
  }

  u_.resize(n_subs_ + 1);
  u_[0] = Mat4::Identity();
  for (int s = 0; s < n_subs_; ++s) {
    u_[s + 1] = eigs_[sub_eig_[s]].exp_h * u_[s];
  }

  int s = 0;
  while (s < n_subs_) {
    int e = s + 1;
    while (e < n_subs_ && sub_eig_[e] == sub_eig_[s]) ++e;
    Segment seg;
    seg.sub_begin = s;
    seg.sub_end = e;
    seg.eig = sub_eig_[s];
    seg.p = eigs_[seg.eig].v.adjoint() * u_[s];
    segments_.push_back(std::move(seg));
    s = e;
  }

  if (kernels_.eta() > 0.0) {
    for (const Segment& seg : segments_) {
      if (seg.sub_end - seg.sub_begin >= 2) eigs_[seg.eig].tabled = true;
    }
    build_psi_tables();
  }
}

void EvolutionEngine::build_psi_tables() {
  const double a = 1.0 / kernels_.omega_c();
  cell_offset_.assign(n_subs_ + 1, 0);
  for (int j = 0; j < n_subs_; ++j) {
    append_quad_nodes(j * h_, (j + 1) * h_, a, node_tau_, node_w_);
    cell_offset_[j + 1] = node_tau_.size();
  }
  node_kn_.resize(node_tau_.size());
  node_kd_.resize(node_tau_.size());
  for (std::size_t g = 0; g < node_tau_.size(); ++g) {
    node_kn_[g] = kernels_.noise(node_tau_[g]);
    node_kd_[g] = kernels_.dissip(node_tau_[g]);
  }

  for (EigData& e : eigs_) {
    if (!e.tabled) continue;
    for (int p = 0; p < 10; ++p) {
      const double delta = e.lambda(kPairM[p]) - e.lambda(kPairN[p]);
      auto& psi_n = e.psi[0][p];
      auto& psi_d = e.psi[1][p];
      psi_n.assign(n_subs_ + 1, Complex(0, 0));
      psi_d.assign(n_subs_ + 1, Complex(0, 0));
      Complex sum_n(0, 0), comp_n(0, 0), sum_d(0, 0), comp_d(0, 0);
      for (int j = 0; j < n_subs_; ++j) {
        Complex cell_n(0, 0), cell_d(0, 0);
        for (std::size_t g = cell_offset_[j]; g < cell_offset_[j + 1]; ++g) {
          const Complex ph = std::polar(node_w_[g], -delta * node_tau_[g]);
          cell_n += node_kn_[g] * ph;
          cell_d += node_kd_[g] * ph;
        }
        kahan_add(cell_n, sum_n, comp_n);
        kahan_add(cell_d, sum_d, comp_d);
        psi_n[j + 1] = sum_n;
        psi_d[j + 1] = sum_d;
      }
    }
  }
}

void EvolutionEngine::add_segment_direct(const Segment& seg, double tau_lo,
                                         double tau_hi, Mat4& g_noise,
                                         Mat4& g_dissip) const {
  static thread_local std::vector<double> tau, w;
  tau.clear();
  w.clear();
  append_quad_nodes(tau_lo, tau_hi, 1.0 / kernels_.omega_c(), tau, w);

  static thread_local std::vector<double> kn, kd;
  kn.resize(tau.size());
  kd.resize(tau.size());
  for (std::size_t g = 0; g < tau.size(); ++g) {
    kn[g] = kernels_.noise(tau[g]);
    kd[g] = kernels_.dissip(tau[g]);
  }

  const EigData& e = eigs_[seg.eig];
  Mat4 wn, wd;
  for (int p = 0; p < 10; ++p) {
    const int m = kPairM[p], n = kPairN[p];
    const double delta = e.lambda(m) - e.lambda(n);
    Complex sn(0, 0), sd(0, 0);
    for (std::size_t g = 0; g < tau.size(); ++g) {
      const Complex ph = std::polar(w[g], delta * (tau_hi - tau[g]));
      sn += kn[g] * ph;
      sd += kd[g] * ph;
    }
    if (m == n) {
      wn(m, m) = sn.real();
      wd(m, m) = sd.real();
    } else {
      wn(m, n) = sn;
      wn(n, m) = std::conj(sn);
      wd(m, n) = sd;
      wd(n, m) = std::conj(sd);
    }
  }
  g_noise += seg.p.adjoint() * e.a_tilde.cwiseProduct(wn) * seg.p;
  g_dissip += seg.p.adjoint() * e.a_tilde.cwiseProduct(wd) * seg.p;
}

void EvolutionEngine::convolutions(int sub, Mat4& g_noise,
                                   Mat4& g_dissip) const {
  g_noise.setZero();
  g_dissip.setZero();
  if (kernels_.eta() == 0.0 || sub <= 0) return;

  for (const Segment& seg : segments_) {
    if (seg.sub_begin >= sub) break;
    const int end_eff = std::min(seg.sub_end, sub);
    const double tau_hi = (sub - seg.sub_begin) * h_;
    const double tau_lo = (sub - end_eff) * h_;
    const EigData& e = eigs_[seg.eig];
    if (!e.tabled) {
      add_segment_direct(seg, tau_lo, tau_hi, g_noise, g_dissip);
      continue;
    }

    const int j_hi = sub - seg.sub_begin;
    const int j_lo = sub - end_eff;
    std::array<Complex, 4> u;
    for (int k = 0; k < 4; ++k) u[k] = std::polar(1.0, e.lambda(k) * tau_hi);

    Mat4 wn, wd;
    for (int p = 0; p < 10; ++p) {
      const int m = kPairM[p], n = kPairN[p];
      const Complex dn = e.psi[0][p][j_hi] - e.psi[0][p][j_lo];
      const Complex dd = e.psi[1][p][j_hi] - e.psi[1][p][j_lo];
      if (m == n) {
        wn(m, m) = dn.real();
        wd(m, m) = dd.real();
      } else {
        const Complex ph = u[m] * std::conj(u[n]);
        wn(m, n) = ph * dn;
        wn(n, m) = std::conj(wn(m, n));
        wd(m, n) = ph * dd;
        wd(n, m) = std::conj(wd(m, n));
      }
    }
    g_noise += seg.p.adjoint() * e.a_tilde.cwiseProduct(wn) * seg.p;
    g_dissip += seg.p.adjoint() * e.a_tilde.cwiseProduct(wd) * seg.p;
  }
}

Mat4 EvolutionEngine::coupling_at(int sub) const {
  return u_[sub].adjoint() * a_lab_ * u_[sub];
}

Mat4 EvolutionEngine::rhs(const Mat4& a, const Mat4& g_n, const Mat4& g_d,
                          const Mat4& rho) const {
  const Mat4 noise_term = commutator(a, commutator(g_n, rho).eval());
  const Mat4 dissip_term = commutator(a, anticommutator(g_d, rho).eval());
  return (-noise_term + Complex(0.0, 1.0) * dissip_term).eval();
}

EvolutionRecord EvolutionEngine::run(const Mat4& rho0) {
  if ((rho0 - rho0.adjoint()).norm() > 1e-10 * (rho0.norm() + 1.0)) {
    throw std::invalid_argument("run: initial state is not Hermitian");
  }
  if (std::abs(rho0.trace() - Complex(1.0, 0.0)) > 1e-8) {
    throw std::invalid_argument("run: initial state trace is not 1");
  }

  const auto wall_start = std::chrono::steady_clock::now();
  EvolutionRecord rec;
  rec.dt = cfg_.dt;
  rec.n_steps = n_steps_;
  rec.times.reserve(n_steps_ + 1);
  rec.rho_interaction.reserve(n_steps_ + 1);
  rec.u_system.reserve(n_steps_ + 1);

  Mat4 rho = rho0;
  rec.times.push_back(0.0);
  rec.rho_interaction.push_back(rho);
  rec.u_system.push_back(u_[0]);

  Mat4 gn0 = Mat4::Zero(), gd0 = Mat4::Zero();
  Mat4 gnh, gdh, gn1, gd1;
  Eigen::SelfAdjointEigenSolver<Mat4> es;

  for (int i = 0; i < n_steps_; ++i) {
    const int s0 = i * cfg_.n_sub;
    const int sh = s0 + cfg_.n_sub / 2;
    const int s1 = s0 + cfg_.n_sub;

    const Mat4 a0 = coupling_at(s0);
    const Mat4 k1 = rhs(a0, gn0, gd0, rho);

    convolutions(sh, gnh, gdh);
    const Mat4 ah = coupling_at(sh);
    const Mat4 k2 = rhs(ah, gnh, gdh, (rho + 0.5 * cfg_.dt * k1).eval());
    const Mat4 k3 = rhs(ah, gnh, gdh, (rho + 0.5 * cfg_.dt * k2).eval());

    convolutions(s1, gn1, gd1);
    const Mat4 a1 = coupling_at(s1);
    const Mat4 k4 = rhs(a1, gn1, gd1, (rho + cfg_.dt * k3).eval());

    rho += (cfg_.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint()).eval();

    const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
    rec.max_trace_drift = std::max(rec.max_trace_drift, drift);
    if (!(drift <= 1e-8)) {
      throw EvolutionError("trace drifted by " + std::to_string(drift) +
                           " at t = " + std::to_string((i + 1) * cfg_.dt));
    }
    es.compute(rho, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    rec.min_eigenvalue = std::min(rec.min_eigenvalue, lmin);
    if (!(lmin >= -1e-3)) {
      throw EvolutionError("state eigenvalue " + std::to_string(lmin) +
                           " at t = " + std::to_string((i + 1) * cfg_.dt));
    }

    rec.times.push_back((i + 1) * cfg_.dt);
    rec.rho_interaction.push_back(rho);
    rec.u_system.push_back(u_[s1]);

    gn0 = gn1;
    gd0 = gd1;
  }

  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
          .count();
  return rec;
}

}  // namespace qram
