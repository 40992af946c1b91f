#include "qram/quantum_core.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace qram {

Mat2 pauli(Axis axis) {
  Mat2 m = Mat2::Zero();
  const Complex i(0.0, 1.0);
  switch (axis) {
    case Axis::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Axis::Y:
      m(0, 1) = i;
      m(1, 0) = -i;
      break;
    case Axis::Z:
      m(0, 0) = -1.0;
      m(1, 1) = 1.0;
      break;
  }
  return m;
}

Mat4 kron(const Mat2& left, const Mat2& right) {
  return Eigen::kroneckerProduct(left, right).eval();
}

Mat4 herm_expm(const Mat4& h, double t) {
  const double scale = h.norm();
  if (scale > 0.0 && (h - h.adjoint()).norm() > 1e-12 * scale) {
    throw std::invalid_argument("herm_expm: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  const Eigen::Vector4d& w = es.eigenvalues();
  const Mat4& v = es.eigenvectors();
  Vec4 phases;
  for (int k = 0; k < 4; ++k) {
    phases(k) = std::exp(Complex(0.0, -w(k) * t));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

PureState::PureState(const Vec4& amplitudes) : amp(amplitudes) {
  const double n = amp.norm();
  if (std::abs(n - 1.0) > 1e-10) {
    if (n < 1e-300) {
      throw std::invalid_argument("PureState: zero amplitude vector");
    }
    amp /= n;
  }
}

Vec4 basis_state(int i, int j) {
  if (i < 0 || i > 1 || j < 0 || j > 1) {
    throw std::invalid_argument("basis_state: qubit labels must be 0 or 1");
  }
  Vec4 v = Vec4::Zero();
  v(2 * i + j) = 1.0;
  return v;
}

}  // namespace qram
