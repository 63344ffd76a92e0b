#include "cqs/doqs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cqs/floquet.hpp"
#include "cqs/polylog.hpp"
#include "cqs/quantum_kernel.hpp"

namespace cqs {

const char* to_string(DoqsMethod method) {
  switch (method) {
    case DoqsMethod::exact_histogram: return "exact-histogram";
    case DoqsMethod::trace_sum: return "trace-sum";
    case DoqsMethod::semiclassical: return "semiclassical";
    case DoqsMethod::integrated: return "integrated";
    case DoqsMethod::derivative: return "derivative";
  }
  return "unknown";
}

RVector zone_grid(int points) {
  if (points < 1) throw std::invalid_argument("zone_grid: need at least one point");
  const double d = kTwoPi / points;
  RVector g(points);
  for (int k = 0; k < points; ++k) g(k) = -kPi + (k + 0.5) * d;
  return g;
}

namespace {

double uniform_step(const RVector& grid) {
  if (grid.size() < 2) throw std::invalid_argument("DOQS curve: grid needs at least two points");
  const double d = grid(1) - grid(0);
  for (Index i = 2; i < grid.size(); ++i)
    if (std::abs(grid(i) - grid(i - 1) - d) > 1e-9 * std::max(1.0, d))
      throw std::invalid_argument("DOQS curve: grid must be uniform");
  return d;
}

// e^{i beta pi/4}, exact for the even indices that occur in practice.
cplx morse_phase(int beta) {
  switch (((beta % 8) + 8) % 8) {
    case 0: return {1.0, 0.0};
    case 2: return {0.0, 1.0};
    case 4: return {-1.0, 0.0};
    case 6: return {0.0, -1.0};
    default: return std::polar(1.0, beta * kPi / 4.0);
  }
}

// Re(w * L) without forming inf * 0 when w is purely imaginary and L diverges.
double re_product(cplx w, cplx l) {
  double out = 0.0;
  if (w.real() != 0.0) out += w.real() * l.real();
  if (w.imag() != 0.0) out -= w.imag() * l.imag();
  return out;
}

void check_points(const std::vector<CriticalPoint>& points) {
  for (const auto& c : points)
    if (!(std::abs(c.hessian.determinant()) > 0.0))
      throw std::invalid_argument("semiclassical DOQS: critical point without Hessian data");
}

double amplitude(const CriticalPoint& c, Index dim, int f) {
  return semiclassical_amplitude(c.hessian.determinant(), dim, f);
}

// Real part of sum_n coeff_n e^{i n phi} on the grid, by phase recurrence.
RVector fourier_real(const std::vector<cplx>& coeff, const RVector& grid) {
  RVector out(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const cplx step = std::polar(1.0, grid(i));
    cplx e = step;
    double acc = 0.0;
    for (size_t n = 0; n < coeff.size(); ++n) {
      acc += (coeff[n] * e).real();
      e *= step;
      if ((n & 63) == 63) e = std::polar(1.0, static_cast<double>(n + 2) * grid(i));
    }
    out(i) = acc;
  }
  return out;
}

double rectangle_integral(const RVector& values, double step) { return values.sum() * step; }

}  // namespace

DoqsCurve exact_doqs(const RVector& phases, int bins) {
  if (bins < 8) throw std::invalid_argument("exact_doqs: bins must be >= 8");
  if (phases.size() == 0) throw std::invalid_argument("exact_doqs: empty spectrum");
  const double d = kTwoPi / bins;
  RVector counts = RVector::Zero(bins);
  for (Index i = 0; i < phases.size(); ++i) {
    const double phi = fold(phases(i));
    const double u = (phi + kPi) / d;
    // Phases a rounding error below an edge belong to the upper bin (half-open bins).
    long b = static_cast<long>(std::floor(u));
    if (std::ceil(u) - u < 1e-12 / d) b = static_cast<long>(std::ceil(u));
    b = ((b % bins) + bins) % bins;
    counts(b) += 1.0;
  }
  DoqsCurve c;
  c.grid = zone_grid(bins);
  c.values = counts / (static_cast<double>(phases.size()) * d);
  c.method = DoqsMethod::exact_histogram;
  c.normalization = rectangle_integral(c.values, d);
  return c;
}

DoqsCurve trace_doqs(const std::vector<cplx>& traces, Index dim, int n_max, double damping, int grid_points) {
  if (n_max < 1) throw std::invalid_argument("trace_doqs: n_max must be >= 1");
  if (damping < 0.0) throw std::invalid_argument("trace_doqs: damping must be >= 0");
  if (dim < 1) throw std::invalid_argument("trace_doqs: dimension must be >= 1");
  const int n_use = std::min<int>(n_max, static_cast<int>(traces.size()));
  std::vector<cplx> coeff(static_cast<size_t>(n_use));
  for (int n = 1; n <= n_use; ++n) {
    const double g = std::exp(-0.5 * (n * damping) * (n * damping));
    coeff[static_cast<size_t>(n - 1)] = traces[static_cast<size_t>(n - 1)] * g / (kPi * static_cast<double>(dim));
  }
  DoqsCurve c;
  c.grid = zone_grid(grid_points);
  c.values = fourier_real(coeff, c.grid).array() + 1.0 / kTwoPi;
  c.method = DoqsMethod::trace_sum;
  c.normalization = rectangle_integral(c.values, kTwoPi / grid_points);
  return c;
}

namespace {

// Density at base + offset; angles are formed as (base - phi_c) + offset so that nodes
// next to a critical phase keep their distance to it exactly.
double density_offset(const std::vector<CriticalPoint>& points, Index dim, int f, double base, double offset) {
  double rho = 1.0 / kTwoPi;
  for (const auto& c : points)
    rho += re_product(amplitude(c, dim, f) * morse_phase(c.beta), li(f, (base - c.phase) + offset));
  return rho;
}

}  // namespace

double semiclassical_density(const std::vector<CriticalPoint>& points, Index dim, int f, double phi) {
  return density_offset(points, dim, f, phi, 0.0);
}

double semiclassical_normalization(const std::vector<CriticalPoint>& points, Index dim, int f) {
  check_points(points);
  std::vector<double> cuts{-kPi};
  for (const auto& c : points) cuts.push_back(fold(c.phase));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(kPi);
  // tanh-sinh on each piece; nodes are placed by their distance to the nearer end
  // so that endpoint log singularities are resolved without cancellation.
  constexpr double h = 1.0 / 64.0;
  constexpr double t_max = 3.5;
  double total = 0.0;
  for (size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1], len = b - a;
    if (len <= 0.0) continue;
    double acc = 0.0;
    for (double t = -t_max; t <= t_max + 1e-12; t += h) {
      const double u = 0.5 * kPi * std::sinh(t);
      const double w = 0.5 * kPi * std::cosh(t) / (std::cosh(u) * std::cosh(u));
      const double frac = 1.0 / (std::exp(2.0 * std::abs(u)) + 1.0);  // distance to the end / len
      acc += w * (t < 0.0 ? density_offset(points, dim, f, a, len * frac)
                          : density_offset(points, dim, f, b, -len * frac));
    }
    total += 0.5 * len * h * acc;
  }
  return total;
}

DoqsCurve semiclassical_doqs(const std::vector<CriticalPoint>& points, Index dim, int f, const RVector& grid,
                             const SemiclassicalOptions& opts) {
  if (f < 1) throw std::invalid_argument("semiclassical_doqs: f must be >= 1");
  check_points(points);
  DoqsCurve out;
  out.grid = grid;
  out.method = DoqsMethod::semiclassical;
  if (opts.kernel) {
    std::vector<cplx> coeff(static_cast<size_t>(opts.kernel_terms), cplx(0.0));
    for (const auto& c : points) {
      const auto kern = quantum_kernel_sequence(kernel_params(c), opts.kernel_terms);
      const cplx w = amplitude(c, dim, f) * morse_phase(c.beta);
      for (int n = 1; n <= opts.kernel_terms; ++n) {
        const double g = std::exp(-0.5 * (n * opts.kernel_damping) * (n * opts.kernel_damping));
        coeff[static_cast<size_t>(n - 1)] += w * kern[static_cast<size_t>(n - 1)].value * g *
                                             std::polar(1.0, -n * c.phase) / std::pow(static_cast<double>(n), f);
      }
    }
    out.values = fourier_real(coeff, grid).array() + 1.0 / kTwoPi;
  } else {
    out.values.resize(grid.size());
    for (Index i = 0; i < grid.size(); ++i) {
      double phi = grid(i);
      for (const auto& c : points)
        if (c.beta % 4 == 0 && std::abs(fold(phi - c.phase)) < 1e-9) phi = c.phase + 1e-9;
      out.values(i) = semiclassical_density(points, dim, f, phi);
    }
  }
  out.normalization = opts.kernel ? std::numeric_limits<double>::quiet_NaN()
                                  : semiclassical_normalization(points, dim, f);
  if (opts.kernel && grid.size() > 1) {
    try {
      out.normalization = rectangle_integral(out.values, uniform_step(grid));
    } catch (const std::invalid_argument&) {
    }
  }
  return out;
}

DoqsCurve smoothed_semiclassical_doqs(const std::vector<CriticalPoint>& points, Index dim, int f, int n_max,
                                      double damping, int grid_points, bool kernel) {
  if (n_max < 1) throw std::invalid_argument("smoothed_semiclassical_doqs: n_max must be >= 1");
  check_points(points);
  std::vector<cplx> coeff(static_cast<size_t>(n_max), cplx(0.0));
  for (const auto& c : points) {
    std::vector<KernelValue> kern;
    if (kernel) kern = quantum_kernel_sequence(kernel_params(c), n_max);
    const cplx w = amplitude(c, dim, f) * morse_phase(c.beta);
    for (int n = 1; n <= n_max; ++n) {
      const double g = std::exp(-0.5 * (n * damping) * (n * damping));
      cplx term = w * g * std::polar(1.0, -n * c.phase) / std::pow(static_cast<double>(n), f);
      if (kernel) term *= kern[static_cast<size_t>(n - 1)].value;
      coeff[static_cast<size_t>(n - 1)] += term;
    }
  }
  DoqsCurve out;
  out.grid = zone_grid(grid_points);
  out.values = fourier_real(coeff, out.grid).array() + 1.0 / kTwoPi;
  out.method = DoqsMethod::semiclassical;
  out.normalization = rectangle_integral(out.values, kTwoPi / grid_points);
  return out;
}

DoqsCurve gaussian_smooth(const DoqsCurve& curve, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_smooth: width must be positive");
  const double d = uniform_step(curve.grid);
  const Index n = curve.values.size();
  const Index reach = std::min<Index>(n / 2, static_cast<Index>(std::ceil(8.0 * width / d)));
  std::vector<double> w(static_cast<size_t>(2 * reach + 1));
  double wsum = 0.0;
  for (Index k = -reach; k <= reach; ++k) {
    const double x = k * d / width;
    w[static_cast<size_t>(k + reach)] = std::exp(-0.5 * x * x);
    wsum += w[static_cast<size_t>(k + reach)];
  }
  DoqsCurve out = curve;
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Index k = -reach; k <= reach; ++k) acc += w[static_cast<size_t>(k + reach)] * curve.values(((i + k) % n + n) % n);
    out.values(i) = acc / wsum;
  }
  out.normalization = rectangle_integral(out.values, d);
  return out;
}

DoqsCurve integrated_doqs(const DoqsCurve& curve) {
  const double d = uniform_step(curve.grid);
  const Index n = curve.values.size();
  DoqsCurve out;
  out.grid.resize(n + 1);
  out.values.resize(n + 1);
  out.method = DoqsMethod::integrated;
  const double start = curve.grid(0) - 0.5 * d;
  out.grid(0) = start;
  out.values(0) = 0.0;
  for (Index i = 0; i < n; ++i) {
    out.grid(i + 1) = start + (i + 1) * d;
    out.values(i + 1) = out.values(i) + curve.values(i) * d;
  }
  out.normalization = out.values(n);
  return out;
}

std::vector<SlopeChange> slope_changes(const DoqsCurve& integrated, double ratio) {
  const Index n = integrated.values.size();
  std::vector<SlopeChange> out;
  if (n < 5) return out;
  std::vector<double> d2(static_cast<size_t>(n), 0.0);
  for (Index i = 1; i + 1 < n; ++i)
    d2[static_cast<size_t>(i)] =
        std::abs(integrated.values(i + 1) - 2.0 * integrated.values(i) + integrated.values(i - 1));
  std::vector<double> sorted(d2.begin() + 1, d2.end() - 1);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double floor_value = std::max(ratio * median, 1e-300);
  for (Index i = 2; i + 2 < n; ++i) {
    const double v = d2[static_cast<size_t>(i)];
    if (v > floor_value && v >= d2[static_cast<size_t>(i - 1)] && v > d2[static_cast<size_t>(i + 1)])
      out.push_back({integrated.grid(i), v});
  }
  std::stable_sort(out.begin(), out.end(), [](const SlopeChange& a, const SlopeChange& b) { return a.size > b.size; });
  return out;
}

DivergenceCriterion divergence_criterion(int f, int beta) {
  if (f < 1) throw std::invalid_argument("divergence_criterion: f must be >= 1");
  DivergenceCriterion c;
  c.f = f;
  c.beta = beta;
  const int v = 2 * (f - 1) + beta;
  c.diverges = v % 8 == 0;
  c.k = c.diverges ? v / 8 : 0;
  return c;
}

DoqsCurve doqs_derivative(const std::vector<CriticalPoint>& points, Index dim, int f, const RVector& grid) {
  if (f < 1) throw std::invalid_argument("doqs_derivative: f must be >= 1");
  check_points(points);
  DoqsCurve out;
  out.grid = grid;
  out.values.resize(grid.size());
  out.method = DoqsMethod::derivative;
  for (Index i = 0; i < grid.size(); ++i) {
    double acc = f == 1 ? 1.0 / kTwoPi : 0.0;
    for (const auto& c : points) {
      // d/dphi Li_s(e^{i theta}) = i Li_{s-1}(e^{i theta}); i^{f-1} shifts beta by 2(f-1).
      const cplx w = amplitude(c, dim, f) * morse_phase(c.beta + 2 * (f - 1));
      acc += re_product(w, li(1, grid(i) - c.phase));
    }
    out.values(i) = acc;
  }
  out.normalization = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace cqs
