#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace qram {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

// Basis ordering for a single qubit: index 0 = |0>, index 1 = |1>.
// sigma_z is diagonal with sigma_z|1> = +|1>, i.e. diag(-1, +1).
// The x/y/z triple below satisfies sigma_x * sigma_y = i * sigma_z.
enum class Axis { X, Y, Z };

Mat2 pauli(Axis axis);

// Kronecker product, left factor owns the slow (most significant) index:
// |ij> lives at row 2*i + j.
Mat4 kron(const Mat2& left, const Mat2& right);

// exp(-i * H * t) for Hermitian H via spectral decomposition.
// Throws std::invalid_argument if H deviates from Hermiticity by more
// than 1e-12 relative to its norm.
Mat4 herm_expm(const Mat4& h, double t);

template <typename A, typename B>
auto commutator(const A& a, const B& b) {
  return (a * b - b * a).eval();
}

template <typename A, typename B>
auto anticommutator(const A& a, const B& b) {
  return (a * b + b * a).eval();
}

// Normalized two-qubit pure state.
struct PureState {
  Vec4 amp;

  explicit PureState(const Vec4& amplitudes);

  Mat4 density() const { return amp * amp.adjoint(); }
};

// Computational basis vector |ij> with i the left (slow) qubit.
Vec4 basis_state(int i, int j);

}  // namespace qram
