#include <doctest.h>

#include <algorithm>
#include <map>

#include "cqs/doqs.hpp"
#include "cqs/floquet.hpp"
#include "cqs/landscape.hpp"
#include "cqs/linalg.hpp"
#include "cqs/polylog.hpp"
#include "cqs/spin_algebra.hpp"

using namespace cqs;

namespace {

DriveConfig kicked() {
  DriveConfig c;
  c.kind = Kicked{0.3};
  c.ht = 0.1;
  return c;
}

DriveConfig ac() {
  DriveConfig c;
  c.kind = Monochromatic{20.0};
  c.ht = 0.1;
  return c;
}

struct Model {
  SpinSystem sys;
  FloquetSpectrum spec;
  CriticalPointSet cps;
};

const Model& model(bool is_kicked, double j) {
  static std::map<std::pair<bool, double>, Model> cache;
  auto it = cache.find({is_kicked, j});
  if (it == cache.end()) {
    const DriveConfig cfg = is_kicked ? kicked() : ac();
    SpinSystem s = build_spin_system(j);
    FloquetSpectrum spec = diagonalize_floquet(floquet_operator(s, cfg));
    CriticalPointSet cps = find_critical_points(Landscape::from_drive(cfg), j);
    it = cache.emplace(std::make_pair(is_kicked, j), Model{std::move(s), std::move(spec), std::move(cps)}).first;
  }
  return it->second;
}

CriticalPoint fictitious(CriticalKind kind, double phase, double curvature) {
  CriticalPoint c;
  c.kind = kind;
  c.phase = phase;
  c.beta = kind == CriticalKind::maximum ? 2 : kind == CriticalKind::minimum ? -2 : 0;
  c.hessian = Eigen::Matrix2d::Identity() * curvature;
  if (kind == CriticalKind::saddle) c.hessian(1, 1) = -curvature;
  c.det_mg = std::abs(c.hessian.determinant()) / 4.0;
  return c;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

// sup |exact - semiclassical| / median(exact) at distance > 0.3 from all critical phases, both smoothed by 0.1
double agreement(const Model& m) {
  const DoqsCurve ex = gaussian_smooth(exact_doqs(m.spec.phases, 2000), 0.1);
  const DoqsCurve cl = smoothed_semiclassical_doqs(m.cps.points, m.sys.dim, 1, 4000, 0.1, 2000);
  double sup = 0.0;
  std::vector<double> vals;
  for (Index k = 0; k < ex.grid.size(); ++k) {
    vals.push_back(ex.values(k));
    bool far = true;
    for (const auto& c : m.cps.points) far = far && std::abs(fold(ex.grid(k) - c.phase)) > 0.3;
    if (far) sup = std::max(sup, std::abs(ex.values(k) - cl.values(k)));
  }
  return sup / median(vals);
}

// Step of the smoothed exact density across phi_c, after removing the smooth semiclassical
// background of the other critical points: left minus right intercept of side line fits.
double measured_step(const Model& m, double phase) {
  const double sigma = 0.1;
  std::vector<CriticalPoint> others;
  for (const auto& c : m.cps.points)
    if (std::abs(fold(c.phase - phase)) > 1e-9) others.push_back(c);
  const DoqsCurve ex = gaussian_smooth(exact_doqs(m.spec.phases, 4000), sigma);
  const DoqsCurve bg = smoothed_semiclassical_doqs(others, m.sys.dim, 1, 20000, sigma, 4000);
  auto intercept = [&](double a, double b) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (Index k = 0; k < ex.grid.size(); ++k) {
      const double d = fold(ex.grid(k) - phase);
      if (d < a || d > b) continue;
      const double y = ex.values(k) - bg.values(k);
      sx += d, sy += y, sxx += d * d, sxy += d * y, ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return (sy - slope * sx) / n;
  };
  return intercept(-3.5 * sigma - 0.2, -3.5 * sigma) - intercept(3.5 * sigma, 3.5 * sigma + 0.2);
}

}  // namespace

TEST_CASE("zone grid") {
  const RVector g = zone_grid(4);
  CHECK(std::abs(g(0) + 3.0 * kPi / 4.0) < 1e-15);
  CHECK(std::abs(g(3) - 3.0 * kPi / 4.0) < 1e-15);
}

TEST_CASE("identity histogram") {
  const DoqsCurve c = exact_doqs(RVector::Zero(9), 12);
  int occupied = 0;
  for (Index k = 0; k < c.values.size(); ++k) {
    if (c.values(k) > 0.0) {
      ++occupied;
      CHECK(c.grid(k) - kPi / 12.0 <= 0.0);
      CHECK(c.grid(k) + kPi / 12.0 >= 0.0);
    }
  }
  CHECK(occupied == 1);
  CHECK(c.normalization == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(exact_doqs(RVector::Zero(3), 7), std::invalid_argument);
}

TEST_CASE("kicked histogram is normalized and integrates to one") {
  const Model& m = model(true, 100.0);
  const DoqsCurve c = exact_doqs(m.spec.phases, 60);
  CHECK(c.values.minCoeff() >= 0.0);
  CHECK(std::abs(c.normalization - 1.0) < 1e-12);
  const DoqsCurve n = integrated_doqs(c);
  CHECK(n.values(0) == 0.0);
  CHECK(std::abs(n.values(n.values.size() - 1) - 1.0) < 1e-12);
  for (Index k = 1; k < n.values.size(); ++k) CHECK(n.values(k) >= n.values(k - 1));
}

TEST_CASE("trace sum special cases") {
  const std::vector<cplx> zeros(50, 0.0);
  const DoqsCurve flat = trace_doqs(zeros, 11, 50, 0.0, 64);
  for (Index k = 0; k < flat.values.size(); ++k) CHECK(std::abs(flat.values(k) - 1.0 / kTwoPi) < 1e-15);
  // Identity: Gaussian-damped Dirichlet kernel; at phi = pi the even partial sums decrease
  const int dim = 5;
  const double sigma = 0.1;
  const std::vector<cplx> ones(400, cplx(dim, 0.0));
  double prev = 1e9;
  for (int n_max : {2, 4, 8, 16, 32, 64, 128}) {
    const DoqsCurve c = trace_doqs(ones, dim, n_max, sigma, 2);  // grid {-pi/2, pi/2}
    double oracle_pi = 1.0 / kTwoPi, oracle_half = 1.0 / kTwoPi;
    for (int n = 1; n <= n_max; ++n) {
      const double w = std::exp(-0.5 * std::pow(n * sigma, 2)) / kPi;
      oracle_pi += w * std::cos(n * kPi);
      oracle_half += w * std::cos(n * kPi / 2.0);
    }
    CHECK(std::abs(c.values(1) - oracle_half) < 1e-12);
    CHECK(oracle_pi < prev);
    prev = oracle_pi;
    const DoqsCurve at_pi = trace_doqs(ones, dim, n_max, sigma, 1);  // single grid point at 0
    CHECK(at_pi.values(0) > c.values(0));
  }
}

TEST_CASE("trace sum matches the histogram after matched smoothing, kicked j=50") {
  const Model& m = model(true, 50.0);
  const auto traces = floquet_traces(m.spec.phases, 4000);
  const DoqsCurve tr = trace_doqs(traces, m.sys.dim, 4000, 0.05, 2000);
  const DoqsCurve ex = gaussian_smooth(exact_doqs(m.spec.phases, 2000), 0.05);
  const double dphi = kTwoPi / 2000.0;
  const double l2 = std::sqrt((tr.values - ex.values).squaredNorm() * dphi);
  CHECK(l2 <= 5e-3);
  CHECK(std::abs(tr.normalization - 1.0) <= 1e-6);
}

TEST_CASE("jump of height A pi across a single maximum") {
  const CriticalPoint c = fictitious(CriticalKind::maximum, 0.7, -2.0);
  const Index dim = 41;
  const double a = semiclassical_amplitude(4.0, dim);
  const std::vector<CriticalPoint> pts{c};
  for (double eps : {1e-3, 1e-6}) {
    const double step = semiclassical_density(pts, dim, 1, 0.7 - eps) - semiclassical_density(pts, dim, 1, 0.7 + eps);
    CHECK(std::abs(step - a * kPi) < 2.0 * a * eps + 1e-14);
  }
  // smooth elsewhere: linear with slope A/2 between jumps
  const double s1 = semiclassical_density(pts, dim, 1, 1.5), s2 = semiclassical_density(pts, dim, 1, 2.5);
  CHECK(std::abs((s2 - s1) - a / 2.0) < 1e-14);
  CHECK(std::abs(semiclassical_normalization(pts, dim, 1) - 1.0) < 1e-6);
}

TEST_CASE("semiclassical normalization") {
  const std::vector<CriticalPoint> mix{fictitious(CriticalKind::maximum, 0.3, -1.0),
                                       fictitious(CriticalKind::saddle, -1.2, 0.5),
                                       fictitious(CriticalKind::minimum, 2.9, 3.0)};
  for (int f : {1, 2, 3}) CHECK(std::abs(semiclassical_normalization(mix, 21, f) - 1.0) < 1e-6);
  for (bool k : {true, false}) {
    const Model& m = model(k, 100.0);
    CHECK(std::abs(semiclassical_normalization(m.cps.points, m.sys.dim, 1) - 1.0) < 1e-6);
    const DoqsCurve c = semiclassical_doqs(m.cps.points, m.sys.dim, 1, zone_grid(500));
    CHECK(std::abs(c.normalization - 1.0) < 1e-6);
  }
  CriticalPoint bare;
  bare.hessian.setZero();
  CHECK_THROWS_AS(semiclassical_doqs({bare}, 21, 1, zone_grid(10)), std::invalid_argument);
}

TEST_CASE("kicked semiclassical density has a logarithmic peak at the saddle phase") {
  const Model& m = model(true, 100.0);
  const double phi_s = fold(10.0);
  double saddle_amp = 0.0;
  for (const auto& c : m.cps.points)
    if (c.kind == CriticalKind::saddle) {
      CHECK(std::abs(c.phase - phi_s) < 1e-6);
      saddle_amp += semiclassical_amplitude(c.hessian.determinant(), m.sys.dim);
    }
  // rho(phi_s + d) - rho(phi_s + 10 d) -> A_S log 10 as d -> 0
  for (double d : {1e-4, 1e-6}) {
    for (double sgn : {-1.0, 1.0}) {
      const double near = semiclassical_density(m.cps.points, m.sys.dim, 1, phi_s + sgn * d);
      const double far = semiclassical_density(m.cps.points, m.sys.dim, 1, phi_s + sgn * 10.0 * d);
      CHECK(std::abs((near - far) / (saddle_amp * std::log(10.0)) - 1.0) < 1e-2);
    }
  }
  // the grid point on the saddle phase is shifted, not infinite
  RVector g(3);
  g << phi_s - 0.1, phi_s, phi_s + 0.1;
  const DoqsCurve c = semiclassical_doqs(m.cps.points, m.sys.dim, 1, g);
  CHECK(std::isfinite(c.values(1)));
  CHECK(c.values(1) > c.values(0));
}

TEST_CASE("exact and semiclassical curves agree, j in {50, 100}") {
  for (double j : {50.0, 100.0}) {
    CAPTURE(j);
    CHECK(agreement(model(true, j)) <= 0.15);
    CHECK(agreement(model(false, j)) <= 0.15);
  }
}

TEST_CASE("jump heights at j = 100 within 20% of A pi") {
  for (bool k : {true, false}) {
    const Model& m = model(k, 100.0);
    std::vector<double> done;
    for (const auto& c : m.cps.points) {
      if (c.kind == CriticalKind::saddle) continue;
      if (std::any_of(done.begin(), done.end(), [&](double p) { return std::abs(fold(p - c.phase)) < 1e-9; }))
        continue;
      done.push_back(c.phase);
      double expected = 0.0;
      bool has_saddle = false;
      for (const auto& o : m.cps.points) {
        if (std::abs(fold(o.phase - c.phase)) > 1e-9) continue;
        has_saddle = has_saddle || o.kind == CriticalKind::saddle;
        expected += (o.kind == CriticalKind::maximum ? 1.0 : -1.0) *
                    semiclassical_amplitude(o.hessian.determinant(), m.sys.dim) * kPi;
      }
      if (has_saddle) continue;
      CAPTURE(k);
      CAPTURE(c.phase);
      CHECK(std::abs(measured_step(m, c.phase) / expected - 1.0) <= 0.2);
    }
  }
}

TEST_CASE("integrated density") {
  const int n = 64;
  DoqsCurve flat;
  flat.grid = zone_grid(n);
  flat.values = RVector::Constant(n, 1.0 / kTwoPi);
  flat.normalization = 1.0;
  const DoqsCurve nn = integrated_doqs(flat);
  REQUIRE(nn.grid.size() == n + 1);
  for (Index k = 0; k <= n; ++k) CHECK(std::abs(nn.values(k) - (nn.grid(k) + kPi) / kTwoPi) < 1e-14);
}

TEST_CASE("slope change of the integrated ac density at zero") {
  const Model& m = model(false, 100.0);
  const auto changes = slope_changes(integrated_doqs(exact_doqs(m.spec.phases, 60)));
  REQUIRE(!changes.empty());
  CHECK(std::abs(changes.front().phase) <= kTwoPi / 60.0 + 1e-12);
}

TEST_CASE("Gaussian smoothing keeps the normalization") {
  const Model& m = model(true, 50.0);
  const DoqsCurve ex = exact_doqs(m.spec.phases, 300);
  for (double w : {0.01, 0.1, 0.5}) CHECK(std::abs(gaussian_smooth(ex, w).normalization - 1.0) < 1e-12);
  CHECK_THROWS_AS(gaussian_smooth(ex, 0.0), std::invalid_argument);
}

TEST_CASE("divergence criterion") {
  const DivergenceCriterion s = divergence_criterion(1, 0);
  CHECK(s.diverges);
  CHECK(s.k == 0);
  CHECK_FALSE(divergence_criterion(1, 2).diverges);
  CHECK_FALSE(divergence_criterion(1, -2).diverges);
  const DivergenceCriterion m2 = divergence_criterion(2, -2);
  CHECK(m2.diverges);
  CHECK(m2.k == 0);
  CHECK(divergence_criterion(5, 0).diverges);
  CHECK(divergence_criterion(5, 0).k == 1);
  CHECK_FALSE(divergence_criterion(2, 0).diverges);
}

TEST_CASE("derivative of the density") {
  const std::vector<CriticalPoint> mix{fictitious(CriticalKind::maximum, 0.3, -1.0),
                                       fictitious(CriticalKind::saddle, -1.2, 0.5),
                                       fictitious(CriticalKind::minimum, 2.9, 3.0)};
  RVector grid(5);
  grid << -2.5, -0.7, 1.1, 2.2, 3.05;
  const DoqsCurve d1 = doqs_derivative(mix, 21, 1, grid);
  for (Index k = 0; k < grid.size(); ++k) CHECK(std::abs(d1.values(k) - semiclassical_density(mix, 21, 1, grid(k))) < 1e-14);
  // f = 2: first derivative against central differences of the f = 2 density
  const DoqsCurve d2 = doqs_derivative(mix, 21, 2, grid);
  const double h = 1e-5;
  for (Index k = 0; k < grid.size(); ++k) {
    const double fd = (semiclassical_density(mix, 21, 2, grid(k) + h) - semiclassical_density(mix, 21, 2, grid(k) - h)) / (2 * h);
    CHECK(std::abs(d2.values(k) - fd) < 1e-8);
  }
}

TEST_CASE("kernel-corrected curve stays normalized") {
  const Model& m = model(true, 50.0);
  const DoqsCurve plain = smoothed_semiclassical_doqs(m.cps.points, m.sys.dim, 1, 2000, 0.05, 500, false);
  const DoqsCurve corrected = smoothed_semiclassical_doqs(m.cps.points, m.sys.dim, 1, 2000, 0.05, 500, true);
  CHECK(std::abs(corrected.normalization - 1.0) < 1e-6);
  CHECK((plain.values - corrected.values).cwiseAbs().maxCoeff() > 0.0);
  CHECK(corrected.values.allFinite());
}
