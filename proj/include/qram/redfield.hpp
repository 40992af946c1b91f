#pragma once

#include "qram/bath.hpp"
#include "qram/model.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace qram {

// Raised when a run leaves the physical regime (trace drift, negativity
// beyond the weak-coupling allowance, or a numerical blowup).
class EvolutionError : public std::runtime_error {
 public:
  explicit EvolutionError(const std::string& what) : std::runtime_error(what) {}
};

struct EvolutionRecord {
  double dt = 0.0;
  int n_steps = 0;
  std::vector<double> times;           // step boundaries, size n_steps + 1
  std::vector<Mat4> rho_interaction;   // interaction-picture state per time
  std::vector<Mat4> u_system;          // coherent propagator per time
  double max_trace_drift = 0.0;
  double min_eigenvalue = 1.0;
  double wall_seconds = 0.0;
};

// rho(t_idx) in the lab frame: U rho_I U^dag.
Mat4 to_lab_frame(const EvolutionRecord& rec, std::size_t idx);

// Time-nonlocal master equation integrator for the two-qubit model:
//
//   d/dt rho_I = -[A(t), [Gn(t), rho_I]] + i [A(t), {Gd(t), rho_I}]
//   Gn(t) = int_0^t K_n(t-t') A(t') dt',   Gd likewise with K_d,
//
// with A(t) the interaction-picture bath coupling.  The coherent propagator
// is a product of substep exponentials of the window-averaged Hamiltonian;
// runs of substeps sharing one frozen Hamiltonian collapse into segments
// whose memory integrals come from cumulative tables of
// Psi_d(x) = int_0^x K(tau) exp(-i d tau) dtau, so a step costs O(#segments)
// instead of O(history).  Single-substep segments (the ramps) are integrated
// directly with the same spike-aware Gauss rule that fills the tables.
class EvolutionEngine {
 public:
  EvolutionEngine(const SimulationConfig& cfg, const BathKernels& kernels);

  // rho0 is the t = 0 state (lab and interaction frames coincide there).
  EvolutionRecord run(const Mat4& rho0);

  // Memory integrals at substep index `sub` (time sub * dt / n_sub).
  void convolutions(int sub, Mat4& g_noise, Mat4& g_dissip) const;

  // Interaction-picture coupling operator at substep index `sub`.
  Mat4 coupling_at(int sub) const;

  int n_steps() const { return n_steps_; }
  double substep() const { return h_; }

 private:
  struct EigData {
    Mat4 v;
    Eigen::Vector4d lambda;
    Mat4 a_tilde;  // coupling in the eigenbasis
    Mat4 exp_h;    // exp(-i H h)
    bool tabled = false;
    // psi[kernel][pair][j] = int_0^{j h} K(tau) exp(-i delta tau) dtau,
    // pair = upper-triangle index over eigenvalue differences.
    std::array<std::array<std::vector<Complex>, 10>, 2> psi;
  };

  struct Segment {
    int sub_begin = 0;
    int sub_end = 0;  // exclusive
    int eig = 0;
    Mat4 p;  // V^dag U(t_begin)
  };

  Mat4 rhs(const Mat4& a, const Mat4& g_n, const Mat4& g_d,
           const Mat4& rho) const;
  void build_psi_tables();
  void add_segment_direct(const Segment& seg, double tau_lo, double tau_hi,
                          Mat4& g_noise, Mat4& g_dissip) const;

  SimulationConfig cfg_;
  const BathKernels& kernels_;
  int n_steps_ = 0;
  int n_subs_ = 0;
  double h_ = 0.0;

  std::vector<EigData> eigs_;
  std::vector<int> sub_eig_;   // eig index per substep
  std::vector<Mat4> u_;        // propagator at substep boundaries
  std::vector<Segment> segments_;
  Mat4 a_lab_;

  // Shared quadrature layout for the psi tables: flattened nodes per cell.
  std::vector<double> node_tau_, node_w_, node_kn_, node_kd_;
  std::vector<std::size_t> cell_offset_;  // size n_subs_ + 1
};

}  // namespace qram
