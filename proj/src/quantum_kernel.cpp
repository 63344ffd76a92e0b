#include "cqs/quantum_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cqs {

KernelParams kernel_params(double omega, double gamma, double width) {
  if (gamma < 0.0) throw std::invalid_argument("kernel_params: Gamma must be >= 0");
  KernelParams k;
  k.omega = omega;
  k.gamma = gamma;
  k.theta_sq = omega * omega - 4.0 * gamma * gamma;
  k.width = width > 0.0 ? width : std::abs(omega) + 2.0 * gamma;
  return k;
}

KernelParams kernel_params(const CriticalPoint& c, double width) {
  const Eigen::Matrix2d& h = c.hessian;
  const double omega = 0.25 * (h(0, 0) + h(1, 1));
  const double gamma = std::abs(cplx(h(0, 0) - h(1, 1), -2.0 * h(0, 1))) / 8.0;
  return kernel_params(omega, gamma, width);
}

namespace {

// -2i h th sin(t th) / ([h sin - i th cos]^2 + th^2), with the common sin factor cancelled
// so that t = 0 gives exactly 1.
cplx radicand(double h, cplx th, double t) {
  const cplx s = std::sin(t * th), c = std::cos(t * th);
  const cplx i(0.0, 1.0);
  return -2.0 * i * h * th / (s * (h * h + th * th) - 2.0 * i * h * th * c);
}

}  // namespace

std::vector<KernelValue> quantum_kernel_sequence(const KernelParams& params, int n_max) {
  if (n_max < 1) throw std::invalid_argument("quantum_kernel: n must be >= 1");
  if (params.theta_sq == 0.0) throw std::invalid_argument("quantum_kernel: theta^2 must be nonzero");
  if (!(params.width > 0.0)) throw std::invalid_argument("quantum_kernel: width must be positive");
  // A negative omega is the mirrored oscillator: evaluate for -H and conjugate.
  const bool mirrored = params.omega < 0.0;
  const cplx th = std::sqrt(cplx(params.theta_sq, 0.0));
  const double h = params.width;
  const double rate = std::max({1.0, std::abs(th), h});
  const int sub = static_cast<int>(std::ceil(64.0 * rate));

  std::vector<KernelValue> out;
  out.reserve(static_cast<size_t>(n_max));
  cplx root(1.0, 0.0);
  cplx prev = radicand(h, th, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    bool crossed = false;
    for (int k = 1; k <= sub; ++k) {
      const double t = (n - 1) + static_cast<double>(k) / sub;
      const cplx r = radicand(h, th, t);
      if ((prev.imag() >= 0.0) != (r.imag() >= 0.0) && prev.real() + r.real() < 0.0) crossed = true;
      cplx cand = std::sqrt(r);
      if (std::abs(cand - root) > std::abs(cand + root)) cand = -cand;
      root = cand;
      prev = r;
    }
    out.push_back({mirrored ? std::conj(root) : root, crossed});
  }
  return out;
}

KernelValue quantum_kernel(const KernelParams& params, int n) { return quantum_kernel_sequence(params, n).back(); }

}  // namespace cqs
