#pragma once

#include <Eigen/Dense>

#include "cqs/linalg.hpp"

namespace cqs {

// Collective spin in the Dicke basis, rows ordered m = +j, j-1, ..., -j.
struct SpinSystem {
  double j = 0.0;
  Index dim = 0;
  RVector m;  // J_z eigenvalues in basis order
  CMatrix jx, jy, jz, jplus, jminus;
  // J_x is real symmetric tridiagonal here; its eigenbasis is needed by both
  // propagators and by the coherent states, so it is computed once.
  RVector jx_eigenvalues;  // ascending
  RMatrix jx_eigenvectors;
};

SpinSystem build_spin_system(double j);

struct BlochPoint {
  double x = 1.0, y = 0.0, z = 0.0;
  double q = 0.0, p = 0.0;  // disc chart, alpha = q + i p
};

// Equal-area chart of the sphere onto the disc q^2 + p^2 <= 2.
BlochPoint bloch_from_alpha(double q, double p);
// Inverse chart. The south pole maps to the boundary representative (sqrt 2, 0).
BlochPoint bloch_from_xyz(double x, double y, double z);

// Stereographic parameter gamma = (Z + iY) / (1 + X); rejects the south pole.
cplx gamma_from_bloch(const BlochPoint& r);
BlochPoint bloch_from_gamma(cplx gamma);

// |j,j>_x with its largest-magnitude component real and positive.
CVector highest_weight_x(const SpinSystem& sys);

struct SpinCoherentState {
  cplx gamma;
  CVector amplitudes;
};

SpinCoherentState spin_coherent_state(const SpinSystem& sys, cplx gamma);

// (<Jx>, <Jy>, <Jz>) / j
Eigen::Vector3d bloch_expectation(const SpinSystem& sys, const CVector& psi);

}  // namespace cqs
