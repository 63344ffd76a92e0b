#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace cqs {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

template <typename A, typename B>
auto commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename A::Scalar,
                                                      typename B::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = a * b;
  out.noalias() -= b * a;
  return out;
}

// max |U^dagger U - 1|
template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  const auto n = u.cols();
  return max_abs((u.adjoint() * u).eval() -
                 Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n));
}

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& h) {
  return max_abs((h - h.adjoint()).eval());
}

template <typename Derived>
cplx expectation(const Eigen::MatrixBase<Derived>& op, const CVector& psi) {
  return psi.dot(op * psi);
}

// exp(factor * H) for Hermitian H, through its eigendecomposition.
template <typename Derived>
CMatrix exp_hermitian(const Eigen::MatrixBase<Derived>& h, cplx factor) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.template cast<cplx>());
  if (es.info() != Eigen::Success) throw std::runtime_error("exp_hermitian: eigensolver failed");
  const CVector phases = (factor * es.eigenvalues().template cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace cqs
