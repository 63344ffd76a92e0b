#include <doctest.h>

#include <random>

#include "cqs/errors.hpp"
#include "cqs/landscape.hpp"
#include "cqs/linalg.hpp"

using namespace cqs;

namespace {

double bessel(int n, double x) {
  const double v = std::cyl_bessel_j(double(n), std::abs(x));
  return (x < 0.0 && n % 2 == 1) ? -v : v;
}

// Closed-form first and second derivatives of h X J0(a Z) in (Q, P).
Derivatives ac_analytic(double h, double a, double q, double p) {
  const double r2 = q * q + p * p;
  const double s = std::sqrt(2.0 - r2);
  const double x = 1.0 - r2;
  const double sq = -q / s, sp = -p / s;
  const double sqq = -1.0 / s - q * q / (s * s * s), spp = -1.0 / s - p * p / (s * s * s);
  const double sqp = -q * p / (s * s * s);
  const double z = q * s;
  const double zq = s + q * sq, zp = q * sp;
  const double zqq = 2.0 * sq + q * sqq, zpp = q * spp, zqp = sp + q * sqp;
  const double g = bessel(0, a * z);
  const double g1 = -a * bessel(1, a * z);
  const double g2 = -a * a * (bessel(0, a * z) - bessel(2, a * z)) / 2.0;
  const double xq = -2.0 * q, xp = -2.0 * p;
  Derivatives d;
  d.gradient << h * (xq * g + x * g1 * zq), h * (xp * g + x * g1 * zp);
  d.hessian(0, 0) = h * (-2.0 * g + 2.0 * xq * g1 * zq + x * (g2 * zq * zq + g1 * zqq));
  d.hessian(1, 1) = h * (-2.0 * g + 2.0 * xp * g1 * zp + x * (g2 * zp * zp + g1 * zpp));
  d.hessian(0, 1) = d.hessian(1, 0) = h * (xq * g1 * zp + xp * g1 * zq + x * (g2 * zq * zp + g1 * zqp));
  return d;
}

void check_inventory(const CriticalPointSet& set) {
  for (const auto& c : set.points) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c.hessian);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
    switch (c.kind) {
      case CriticalKind::maximum:
        CHECK(hi < 0.0);
        CHECK(c.beta == 2);
        break;
      case CriticalKind::minimum:
        CHECK(lo > 0.0);
        CHECK(c.beta == -2);
        break;
      case CriticalKind::saddle:
        CHECK(lo * hi < 0.0);
        CHECK(c.beta == 0);
        break;
    }
    CHECK(std::abs(c.det_mg - std::abs(c.hessian.determinant()) / 4.0) <= 1e-8 * c.det_mg);
    CHECK(std::abs(std::abs(complex_hessian_det(c.hessian)) - c.det_mg) <= 1e-8 * c.det_mg);
    CHECK(std::abs(c.x * c.x + c.y * c.y + c.z * c.z - 1.0) < 1e-12);
  }
}

}  // namespace

TEST_CASE("landscape values at the poles") {
  CHECK(std::abs(qel_kicked(0.0, 0.0, 0.1, 0.3) - 0.1) < 1e-15);
  CHECK(std::abs(qel_ac(0.0, 0.0, 0.1, 20.0, kTwoPi) - 0.1) < 1e-15);
  CHECK(std::abs(qel_kicked(std::sqrt(2.0), 0.0, 0.1, 0.3) + 0.1) < 1e-12);
  CHECK(std::abs(qel_ac(0.0, -std::sqrt(2.0), 0.1, 20.0, kTwoPi) + 0.1) < 1e-12);
  // radial approach to the boundary: E + hT is O(1 - r/sqrt 2)
  const Landscape land = Landscape::kicked(0.1, 0.3);
  for (double angle : {0.3, 1.9, 4.4}) {
    double prev = 1e9;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const double r = std::sqrt(2.0) * (1.0 - eps);
      const double e = land.energy(r * std::cos(angle), r * std::sin(angle));
      CHECK(std::abs(e + 0.1) < prev);
      prev = std::abs(e + 0.1);
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("kicked landscape limits and singularities") {
  for (double q : {-0.8, 0.0, 0.4}) {
    for (double p : {-0.5, 0.7}) {
      const BlochPoint b = bloch_from_alpha(q, p);
      CHECK(std::abs(qel_kicked(q, p, 0.0, 0.3) - 0.15 * b.z * b.z) < 1e-14);
      CHECK(std::abs(qel_kicked(q, p, 0.2, 0.0) - 0.2 * b.x) < 1e-14);
    }
  }
  // the removable Z = 0 point matches the nearby closed form
  CHECK(std::abs(qel_kicked(1e-9, 0.3, 0.1, 0.3) - qel_kicked(0.0, 0.3, 0.1, 0.3)) < 1e-9);
  // K Z = 2 pi at Z = 1
  CHECK_THROWS_AS(qel_kicked(1.0, 0.0, 0.1, kTwoPi), LandscapeSingularity);
  CHECK_THROWS_AS(bloch_from_alpha(2.0, 0.0), std::invalid_argument);
}

TEST_CASE("kicked Hessian at the origin against the quadratic expansion") {
  // E = h + (K - h - h K^2/6) Q^2 - h P^2 + h K Q P + O(r^3)
  const double h = 0.1, k = 0.3;
  const Derivatives d = gradient_and_hessian(Landscape::kicked(h, k), 0.0, 0.0);
  CHECK(d.gradient.norm() < 1e-10);
  CHECK(std::abs(d.hessian(0, 0) - 2.0 * (k - h - h * k * k / 6.0)) < 1e-6);
  CHECK(std::abs(d.hessian(1, 1) + 2.0 * h) < 1e-6);
  CHECK(std::abs(d.hessian(0, 1) - h * k) < 1e-6);
  CHECK(d.hessian.determinant() < 0.0);
}

TEST_CASE("ac Hessian at the origin is negative definite") {
  const double h = 0.1, a = 20.0 / kTwoPi;
  const Derivatives d = gradient_and_hessian(Landscape::ac(h, 20.0), 0.0, 0.0);
  // E = h (1 - Q^2 - P^2)(1 - a^2 Q^2 / 2) + ...
  CHECK(std::abs(d.hessian(0, 0) + 2.0 * h * (1.0 + a * a / 2.0)) < 1e-6);
  CHECK(std::abs(d.hessian(1, 1) + 2.0 * h) < 1e-6);
  CHECK(std::abs(d.hessian(0, 1)) < 1e-6);
}

TEST_CASE("ac finite differences agree with closed-form derivatives at random points") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.35, 1.35);
  const double h = 0.1, gt = 20.0;
  const Landscape land = Landscape::ac(h, gt);
  int tested = 0;
  while (tested < 100) {
    const double q = u(rng), p = u(rng);
    if (q * q + p * p > 1.9) continue;
    ++tested;
    const Derivatives fd = gradient_and_hessian(land, q, p);
    const Derivatives an = ac_analytic(h, gt / kTwoPi, q, p);
    CHECK((fd.gradient - an.gradient).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((fd.hessian - an.hessian).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((landscape_gradient(land, q, p) - an.gradient).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("kicked inventory") {
  const CriticalPointSet set = find_critical_points(Landscape::kicked(0.1, 0.3), 100.0);
  CHECK(set.failures.empty());
  CHECK(set.points.size() == 4);
  CHECK(set.count(CriticalKind::maximum) == 2);
  CHECK(set.count(CriticalKind::saddle) == 1);
  CHECK(set.count(CriticalKind::minimum) == 1);
  CHECK(set.count(CriticalKind::maximum) - set.count(CriticalKind::saddle) + set.count(CriticalKind::minimum) == 2);
  check_inventory(set);
  const Landscape land = Landscape::kicked(0.1, 0.3);
  for (const auto& c : set.points) {
    if (!c.on_boundary) {
      CHECK(landscape_gradient(land, c.q, c.p).norm() <= 1e-9);
      CHECK(velocity(land, c.q, c.p) <= 1e-8);
    }
    CHECK(std::abs(c.extensive_energy - 100.0 * c.energy) < 1e-12);
    CHECK(std::abs(c.phase - fold(c.extensive_energy)) == 0.0);
  }
  const auto sep = separatrix_energies(set.points);
  REQUIRE(sep.size() == 1);
  CHECK(std::abs(sep[0] - 0.1) < 1e-9);
  int boundary = 0;
  for (const auto& c : set.points) boundary += c.on_boundary;
  CHECK(boundary == 1);
}

TEST_CASE("ac inventory") {
  const CriticalPointSet set = find_critical_points(Landscape::ac(0.1, 20.0), 100.0);
  CHECK(set.failures.empty());
  CHECK(set.points.size() == 10);
  CHECK(set.count(CriticalKind::maximum) == 3);
  CHECK(set.count(CriticalKind::saddle) == 4);
  CHECK(set.count(CriticalKind::minimum) == 3);
  check_inventory(set);
  for (const auto& c : set.points)
    if (c.kind == CriticalKind::saddle) CHECK(std::abs(c.energy) < 1e-9);
  const auto sep = separatrix_energies(set.points);
  REQUIRE(sep.size() == 1);
  CHECK(std::abs(sep[0]) < 1e-9);
}

TEST_CASE("K = 0 has only the two poles") {
  const CriticalPointSet set = find_critical_points(Landscape::kicked(0.1, 0.0), 50.0);
  CHECK(set.points.size() == 2);
  CHECK(set.count(CriticalKind::maximum) == 1);
  CHECK(set.count(CriticalKind::minimum) == 1);
  CHECK_THROWS_AS(separatrix_energies(set.points), NoSaddle);
}

TEST_CASE("velocity") {
  // h X with gradient (-2h Q, -2h P): V = sqrt(2) h at (1, 0)
  CHECK(std::abs(velocity(Landscape::kicked(0.1, 0.0), 1.0, 0.0) - std::sqrt(2.0) * 0.1) < 1e-9);
  const Landscape ac = Landscape::ac(0.1, 20.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  for (int t = 0; t < 200; ++t) {
    const double q = u(rng), p = u(rng);
    if (q * q + p * p > 1.9) continue;
    const double v = velocity(ac, q, p);
    CHECK(v >= 0.0);
    CHECK(std::abs(v - velocity(ac, q, -p)) <= 1e-9);
  }
}

TEST_CASE("amplitude scales with the inverse root Hessian determinant") {
  CHECK(std::abs(semiclassical_amplitude(4.0, 201) - 2.0 / (kPi * 201.0 * 2.0)) < 1e-15);
  CHECK(std::abs(semiclassical_amplitude(4.0, 201, 2) - 4.0 / (kPi * 201.0 * 2.0)) < 1e-15);
}

TEST_CASE("raster") {
  const Raster r = landscape_raster(Landscape::ac(0.1, 20.0), 41);
  REQUIRE(r.values.size() == 41u * 41u);
  CHECK(r.q(0) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(r.q(40) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::isnan(r.at(0, 0)));
  CHECK(std::abs(r.at(20, 20) - 0.1) < 1e-12);
  CHECK(std::abs(r.at(27, 13) - qel_ac(r.q(27), r.p(13), 0.1, 20.0, kTwoPi)) < 1e-15);
}
