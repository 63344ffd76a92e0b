#include "cqs/spin_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cqs {

SpinSystem build_spin_system(double j) {
  const double twice = 2.0 * j;
  if (!(j > 0.0) || std::abs(twice - std::round(twice)) > 1e-12)
    throw std::invalid_argument("build_spin_system: j must be a positive half-integer, got " +
                                std::to_string(j));
  SpinSystem s;
  s.j = std::round(twice) / 2.0;
  s.dim = static_cast<Index>(std::round(twice)) + 1;
  const Index n = s.dim;
  s.m.resize(n);
  for (Index i = 0; i < n; ++i) s.m(i) = s.j - static_cast<double>(i);

  s.jz = s.m.cast<cplx>().asDiagonal();
  s.jplus = CMatrix::Zero(n, n);
  // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>; |m+1> sits one row above |m>.
  for (Index i = 1; i < n; ++i) {
    const double mm = s.m(i);
    s.jplus(i - 1, i) = std::sqrt(s.j * (s.j + 1.0) - mm * (mm + 1.0));
  }
  s.jminus = s.jplus.adjoint();
  s.jx = 0.5 * (s.jplus + s.jminus);
  s.jy = cplx(0.0, -0.5) * (s.jplus - s.jminus);

  Eigen::SelfAdjointEigenSolver<RMatrix> es(s.jx.real());
  if (es.info() != Eigen::Success) throw std::runtime_error("build_spin_system: J_x eigensolver failed");
  s.jx_eigenvalues = es.eigenvalues();
  s.jx_eigenvectors = es.eigenvectors();
  return s;
}

BlochPoint bloch_from_alpha(double q, double p) {
  double r2 = q * q + p * p;
  // boundary points built from cos/sin overshoot by a few ulp
  if (r2 > 2.0 && r2 <= 2.0 + 1e-12) r2 = 2.0;
  if (r2 > 2.0) throw std::invalid_argument("bloch_from_alpha: point outside the disc q^2 + p^2 <= 2");
  const double s = std::sqrt(2.0 - r2);
  return {1.0 - r2, -p * s, q * s, q, p};
}

BlochPoint bloch_from_xyz(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!(norm > 0.0)) throw std::invalid_argument("bloch_from_xyz: zero vector");
  x /= norm;
  y /= norm;
  z /= norm;
  const double s = std::sqrt(std::max(0.0, 1.0 + x));
  if (s < 1e-300) return {-1.0, 0.0, 0.0, std::sqrt(2.0), 0.0};
  return {x, y, z, z / s, -y / s};
}

cplx gamma_from_bloch(const BlochPoint& r) {
  const double d = 1.0 + r.x;
  if (d <= 1e-14) throw std::invalid_argument("gamma_from_bloch: south pole has no stereographic image");
  return {r.z / d, r.y / d};
}

BlochPoint bloch_from_gamma(cplx gamma) {
  const double g2 = std::norm(gamma);
  const double d = 1.0 + g2;
  return bloch_from_xyz((1.0 - g2) / d, 2.0 * gamma.imag() / d, 2.0 * gamma.real() / d);
}

CVector highest_weight_x(const SpinSystem& sys) {
  RVector v = sys.jx_eigenvectors.col(sys.dim - 1);
  Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v(k) < 0.0) v = -v;
  return v.cast<cplx>();
}

SpinCoherentState spin_coherent_state(const SpinSystem& sys, cplx gamma) {
  CVector top = highest_weight_x(sys);
  const double mod = std::abs(gamma);
  if (mod == 0.0) return {gamma, top};
  // J_z + iJ_y lowers the J_x weight, so exp(conj(gamma) (J_z + iJ_y))|j,j>_x is a
  // coherent state centred on the stereographic point of gamma. Its normalized form
  // equals the rotation exp(tau Jc - conj(tau) Jc^dagger)|j,j>_x with |tau| = atan|gamma|,
  // which stays bounded for any j.
  const cplx tau = std::conj(gamma) / mod * std::atan(mod);
  const CMatrix jc = sys.jz + cplx(0.0, 1.0) * sys.jy;
  const CMatrix herm = cplx(0.0, -1.0) * (tau * jc - std::conj(tau) * jc.adjoint());
  CVector psi = exp_hermitian(herm, cplx(0.0, 1.0)) * top;
  psi.normalize();
  return {gamma, psi};
}

Eigen::Vector3d bloch_expectation(const SpinSystem& sys, const CVector& psi) {
  const double nrm = psi.squaredNorm();
  return Eigen::Vector3d(expectation(sys.jx, psi).real(), expectation(sys.jy, psi).real(),
                         expectation(sys.jz, psi).real()) /
         (sys.j * nrm);
}

}  // namespace cqs
