#include "cqs/polylog.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cqs {

namespace {

double zeta_at(int s) {
  // s >= 2
  return std::riemann_zeta(static_cast<double>(s));
}

}  // namespace

cplx li(int f, double theta) {
  if (f < 1) throw std::invalid_argument("li: order must be >= 1");
  // representative in [-pi, pi] keeps small negative angles exact
  const double t = std::remainder(theta, kTwoPi);
  if (f == 1) {
    if (t == 0.0) return {std::numeric_limits<double>::infinity(), 0.5 * kPi};
    const double im = t > 0.0 ? 0.5 * (kPi - t) : -0.5 * (kPi + t);
    return {-std::log(2.0 * std::abs(std::sin(0.5 * t))), im};
  }
  // Expansion of Li_s(e^mu) about mu = 0 with mu = i t:
  //   sum_{k != s-1} zeta(s-k) mu^k/k! + mu^{s-1}/(s-1)! (H_{s-1} - log(-mu)).
  const int s = f;
  const cplx mu(0.0, t);
  cplx sum(0.0);
  cplx power(1.0);  // mu^k / k!
  for (int k = 0; k <= s - 2; ++k) {
    sum += zeta_at(s - k) * power;
    power *= mu / static_cast<double>(k + 1);
  }
  // power == mu^{s-1}/(s-1)!
  double harmonic = 0.0;
  for (int i = 1; i <= s - 1; ++i) harmonic += 1.0 / i;
  if (t != 0.0) {
    const cplx log_neg_mu(std::log(std::abs(t)), t > 0.0 ? -0.5 * kPi : 0.5 * kPi);
    sum += power * (harmonic - log_neg_mu);
  }
  // k >= s: zeta(1 - n) with n = k - s + 1, via the functional equation
  //   zeta(1 - n) = 2 cos(pi n / 2) (n-1)! zeta(n) / (2 pi)^n, and zeta(0) = -1/2.
  // The ratio (n-1)!/k! = 1 / (n (n+1) ... (n+s-1)).
  const cplx x = mu / kTwoPi;
  cplx xn = x;  // x^n
  cplx mu_s = std::pow(mu, s - 1);
  for (int n = 1; n <= 200; ++n) {
    cplx term;
    if (n == 1) {
      double fact = 1.0;  // s!
      for (int i = 2; i <= s; ++i) fact *= i;
      term = -0.5 * mu_s * mu / fact;
    } else if (n % 2 == 0) {
      double ratio = 1.0;
      for (int i = n; i <= n + s - 1; ++i) ratio /= i;
      const double sign = (n / 2) % 2 == 0 ? 1.0 : -1.0;
      term = 2.0 * sign * zeta_at(n) * ratio * xn * mu_s;
    } else {
      xn *= x;
      continue;
    }
    sum += term;
    if (n > 4 && std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    xn *= x;
  }
  return sum;
}

cplx li_series(int f, double theta, long long terms) {
  if (f < 1) throw std::invalid_argument("li_series: order must be >= 1");
  cplx sum(0.0);
  for (long long n = 1; n <= terms; ++n)
    sum += std::polar(1.0, static_cast<double>(n) * theta) / std::pow(static_cast<double>(n), f);
  return sum;
}

}  // namespace cqs
