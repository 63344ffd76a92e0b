#pragma once

#include <vector>

#include "cqs/landscape.hpp"
#include "cqs/linalg.hpp"

namespace cqs {

enum class DoqsMethod { exact_histogram, trace_sum, semiclassical, integrated, derivative };
const char* to_string(DoqsMethod method);

struct DoqsCurve {
  RVector grid;    // ascending phases
  RVector values;
  DoqsMethod method = DoqsMethod::exact_histogram;
  double normalization = 0.0;  // integral of the density over the zone
};

// Bin centres -pi + (k + 1/2) 2pi/n.
RVector zone_grid(int points);

DoqsCurve exact_doqs(const RVector& phases, int bins);

// 1/2pi + (1/pi M) Re sum_n T_n e^{i n phi} exp(-(n damping)^2 / 2), n = 1..n_max.
DoqsCurve trace_doqs(const std::vector<cplx>& traces, Index dim, int n_max, double damping, int grid_points);

struct SemiclassicalOptions {
  // Multiply each critical point's n-th Fourier term by the quantum kernel F_n.
  bool kernel = false;
  int kernel_terms = 4000;
  double kernel_damping = 0.0;
};

// 1/2pi + Re sum_c A_c e^{i beta pi/4} Li_f(e^{i(phi - phi_c)}) at a single phase.
double semiclassical_density(const std::vector<CriticalPoint>& points, Index dim, int f, double phi);

DoqsCurve semiclassical_doqs(const std::vector<CriticalPoint>& points, Index dim, int f, const RVector& grid,
                             const SemiclassicalOptions& opts = {});

// Fourier form of the semiclassical density with the same Gaussian damping as trace_doqs.
DoqsCurve smoothed_semiclassical_doqs(const std::vector<CriticalPoint>& points, Index dim, int f, int n_max,
                                      double damping, int grid_points, bool kernel = false);

// Zone integral of the analytic semiclassical density (tanh-sinh between critical phases).
double semiclassical_normalization(const std::vector<CriticalPoint>& points, Index dim, int f);

// Periodic Gaussian convolution on a uniform zone grid; preserves the normalization.
DoqsCurve gaussian_smooth(const DoqsCurve& curve, double width);

// N on the bin edges -pi + k dphi, k = 0..n, with N(-pi) = 0.
DoqsCurve integrated_doqs(const DoqsCurve& curve);

struct SlopeChange {
  double phase = 0.0;
  double size = 0.0;  // |second difference| of N
};

// Local maxima of |second difference| of N exceeding `ratio` times the median, strongest first.
std::vector<SlopeChange> slope_changes(const DoqsCurve& integrated, double ratio = 2.0);

struct DivergenceCriterion {
  int f = 1;
  int beta = 0;
  bool diverges = false;  // 2(f-1) + beta = 8k for integer k
  int k = 0;
};

DivergenceCriterion divergence_criterion(int f, int beta);

// (f-1)-th phase derivative of the semiclassical density; each derivative lowers Li by one order.
DoqsCurve doqs_derivative(const std::vector<CriticalPoint>& points, Index dim, int f, const RVector& grid);

}  // namespace cqs
