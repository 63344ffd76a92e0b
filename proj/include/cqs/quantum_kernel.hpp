#pragma once

#include <vector>

#include "cqs/landscape.hpp"
#include "cqs/linalg.hpp"

namespace cqs {

// Quadratic fluctuation Hamiltonian omega a^dagger a + Gamma (a^2 + a^dagger^2) around a
// critical point, plus the vacuum-width parameter of the Gaussian trial state.
struct KernelParams {
  double omega = 0.0;
  double gamma = 0.0;
  double theta_sq = 0.0;  // omega^2 - 4 Gamma^2
  double width = 0.0;
};

// width <= 0 selects |omega| + 2 Gamma, the vacuum width of the squeezed oscillator.
KernelParams kernel_params(double omega, double gamma, double width = 0.0);
// omega = d2E/dalpha dalpha*, Gamma = |d2E/dalpha^2| / 2, from the (q, p) Hessian.
KernelParams kernel_params(const CriticalPoint& c, double width = 0.0);

struct KernelValue {
  cplx value;
  bool branch_event = false;  // radicand crossed the negative real axis since n - 1
};

// F_1 .. F_n_max, square-root branch continued in the period count from F_0 = 1.
std::vector<KernelValue> quantum_kernel_sequence(const KernelParams& params, int n_max);
KernelValue quantum_kernel(const KernelParams& params, int n);

}  // namespace cqs
