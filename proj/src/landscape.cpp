#include "cqs/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cqs/errors.hpp"

namespace cqs {

namespace {

double kicked_xyz(double x, double y, double z, double ht, double k) {
  const double kz = k * z;
  const double l = std::round(kz / kTwoPi);
  if (l != 0.0 && std::abs(kz - kTwoPi * l) < 1e-8) {
    std::ostringstream os;
    os << "kicked landscape singular at K Z = " << kz;
    throw LandscapeSingularity(os.str());
  }
  const double t = 0.5 * kz;
  const double tcot = std::abs(kz) < 1e-3 ? 1.0 - kz * kz / 12.0 : t / std::tan(t);
  return 0.5 * k * z * z + ht * (x * tcot - t * y);
}

double ac_xyz(double x, double z, double ht, double gt, double omega_t) {
  return ht * x * std::cyl_bessel_j(0.0, std::abs(gt / omega_t * z));
}

template <typename Fn>
Eigen::Vector2d central_gradient(const Fn& fn, double q, double p, double h) {
  return {(fn(q + h, p) - fn(q - h, p)) / (2.0 * h), (fn(q, p + h) - fn(q, p - h)) / (2.0 * h)};
}

template <typename Fn>
Eigen::Vector2d richardson_gradient(const Fn& fn, double q, double p) {
  constexpr double h = 1e-5;
  return (4.0 * central_gradient(fn, q, p, 0.5 * h) - central_gradient(fn, q, p, h)) / 3.0;
}

template <typename Fn>
Eigen::Matrix2d central_hessian(const Fn& fn, double q, double p, double h) {
  const double f0 = fn(q, p);
  const double fqq = (fn(q + h, p) - 2.0 * f0 + fn(q - h, p)) / (h * h);
  const double fpp = (fn(q, p + h) - 2.0 * f0 + fn(q, p - h)) / (h * h);
  const double fqp =
      (fn(q + h, p + h) - fn(q + h, p - h) - fn(q - h, p + h) + fn(q - h, p - h)) / (4.0 * h * h);
  Eigen::Matrix2d m;
  m << fqq, fqp, fqp, fpp;
  return m;
}

// Second differences lose digits faster than first ones, hence the larger step.
template <typename Fn>
Eigen::Matrix2d richardson_hessian(const Fn& fn, double q, double p) {
  constexpr double h = 1e-4;
  return (4.0 * central_hessian(fn, q, p, 0.5 * h) - central_hessian(fn, q, p, h)) / 3.0;
}

}  // namespace

double qel_kicked(double q, double p, double ht, double k) {
  const BlochPoint b = bloch_from_alpha(q, p);
  return kicked_xyz(b.x, b.y, b.z, ht, k);
}

double qel_ac(double q, double p, double ht, double gt, double omega_t) {
  const BlochPoint b = bloch_from_alpha(q, p);
  return ac_xyz(b.x, b.z, ht, gt, omega_t);
}

Landscape Landscape::kicked(double ht, double k) { return {DriveKind::kicked, ht, k, 0.0, kTwoPi}; }

Landscape Landscape::ac(double ht, double gt, double omega_t) {
  if (!(omega_t > 0.0)) throw std::invalid_argument("Landscape: omega_t must be positive");
  return {DriveKind::monochromatic, ht, 0.0, gt, omega_t};
}

Landscape Landscape::from_drive(const DriveConfig& cfg) {
  return cfg.is_kicked() ? kicked(cfg.ht, cfg.k()) : ac(cfg.ht, cfg.gt(), cfg.omega_t);
}

double Landscape::energy_xyz(double x, double y, double z) const {
  return model_ == DriveKind::kicked ? kicked_xyz(x, y, z, ht_, k_) : ac_xyz(x, z, ht_, gt_, omega_t_);
}

double Landscape::energy(double q, double p) const {
  const BlochPoint b = bloch_from_alpha(q, p);
  return energy_xyz(b.x, b.y, b.z);
}

double Landscape::reflected_energy(double q, double p) const {
  const BlochPoint b = bloch_from_alpha(q, p);
  return energy_xyz(-b.x, -b.y, b.z);
}

Eigen::Vector2d landscape_gradient(const Landscape& land, double q, double p) {
  return richardson_gradient([&](double a, double b) { return land.energy(a, b); }, q, p);
}

Derivatives gradient_and_hessian(const Landscape& land, double q, double p) {
  auto fn = [&](double a, double b) { return land.energy(a, b); };
  return {richardson_gradient(fn, q, p), richardson_hessian(fn, q, p)};
}

Derivatives reflected_gradient_and_hessian(const Landscape& land, double q, double p) {
  auto fn = [&](double a, double b) { return land.reflected_energy(a, b); };
  return {richardson_gradient(fn, q, p), richardson_hessian(fn, q, p)};
}

double velocity(const Landscape& land, double q, double p) {
  return std::sqrt(0.5 * landscape_gradient(land, q, p).squaredNorm());
}

double semiclassical_amplitude(double hessian_det, Index dim, int f) {
  if (f < 1) throw std::invalid_argument("semiclassical_amplitude: f must be >= 1");
  if (!(std::abs(hessian_det) > 0.0)) throw std::invalid_argument("semiclassical_amplitude: degenerate Hessian");
  return std::pow(2.0, f) / (kPi * static_cast<double>(dim) * std::sqrt(std::abs(hessian_det)));
}

const char* to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::maximum: return "maximum";
    case CriticalKind::minimum: return "minimum";
    case CriticalKind::saddle: return "saddle";
  }
  return "unknown";
}

int CriticalPointSet::count(CriticalKind kind) const {
  return static_cast<int>(std::count_if(points.begin(), points.end(),
                                        [&](const CriticalPoint& c) { return c.kind == kind; }));
}

namespace {

bool classify(const Eigen::Matrix2d& hess, CriticalKind& kind) {
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(hess).eigenvalues();
  if (std::abs(ev(0)) < 1e-12 || std::abs(ev(1)) < 1e-12) return false;
  if (ev(1) < 0.0)
    kind = CriticalKind::maximum;
  else if (ev(0) > 0.0)
    kind = CriticalKind::minimum;
  else
    kind = CriticalKind::saddle;
  return true;
}

CriticalPoint make_point(double q, double p, const BlochPoint& b, CriticalKind kind, double energy,
                         const Eigen::Matrix2d& hess, double j, bool boundary) {
  CriticalPoint c;
  c.q = q;
  c.p = p;
  c.x = b.x;
  c.y = b.y;
  c.z = b.z;
  c.kind = kind;
  c.energy = energy;
  c.extensive_energy = j * energy;
  c.phase = fold(c.extensive_energy);
  c.beta = kind == CriticalKind::maximum ? 2 : kind == CriticalKind::minimum ? -2 : 0;
  c.hessian = hess;
  c.det_mg = std::abs(hess.determinant()) / 4.0;
  c.amplitude = semiclassical_amplitude(hess.determinant(), static_cast<Index>(std::llround(2.0 * j)) + 1);
  c.on_boundary = boundary;
  return c;
}

struct NewtonResult {
  bool ok = false;
  double q = 0.0, p = 0.0;
  std::string reason;
};

NewtonResult newton(const Landscape& land, double q, double p, const CriticalPointOptions& o) {
  NewtonResult r;
  try {
    for (int it = 0; it < o.max_iterations; ++it) {
      const Derivatives d = gradient_and_hessian(land, q, p);
      if (d.gradient.norm() <= o.gradient_stop) break;
      if (std::abs(d.hessian.determinant()) < 1e-14) {
        r.q = q;
        r.p = p;
        r.reason = "singular_hessian";
        return r;
      }
      Eigen::Vector2d step = -d.hessian.ldlt().solve(d.gradient);
      if (!step.allFinite()) step = -d.hessian.inverse() * d.gradient;
      const double len = step.norm();
      if (len > o.max_step) step *= o.max_step / len;
      q += step(0);
      p += step(1);
      if (q * q + p * p >= 2.0 - 1e-8) {
        r.q = q;
        r.p = p;
        r.reason = "left_domain";
        return r;
      }
      if (step.norm() <= o.step_tolerance) break;
    }
    r.q = q;
    r.p = p;
    if (landscape_gradient(land, q, p).norm() <= o.gradient_accept) {
      r.ok = true;
    } else {
      r.reason = "max_iterations";
    }
  } catch (const std::invalid_argument&) {
    r.reason = "left_domain";
  } catch (const LandscapeSingularity&) {
    r.reason = "singular_landscape";
  }
  return r;
}

}  // namespace

CriticalPointSet find_critical_points(const Landscape& land, double j, const CriticalPointOptions& opts) {
  if (opts.grid < 4) throw std::invalid_argument("find_critical_points: grid must be >= 4");
  if (!(j > 0.0)) throw std::invalid_argument("find_critical_points: j must be positive");
  const int n = opts.grid;
  const double lim = std::sqrt(2.0);
  const double h = 2.0 * lim / (n - 1);
  auto coord = [&](int i) { return -lim + h * i; };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // Energies on the seed grid, then the discrete gradient at interior nodes.
  std::vector<double> e(static_cast<size_t>(n) * n, nan);
  auto idx = [&](int iq, int ip) { return static_cast<size_t>(ip) * n + iq; };
  for (int ip = 0; ip < n; ++ip)
    for (int iq = 0; iq < n; ++iq) {
      const double q = coord(iq), p = coord(ip);
      if (q * q + p * p >= 2.0) continue;
      try {
        e[idx(iq, ip)] = land.energy(q, p);
      } catch (const LandscapeSingularity&) {
      }
    }
  std::vector<double> gq(e.size(), nan), gp(e.size(), nan);
  for (int ip = 1; ip + 1 < n; ++ip)
    for (int iq = 1; iq + 1 < n; ++iq) {
      gq[idx(iq, ip)] = (e[idx(iq + 1, ip)] - e[idx(iq - 1, ip)]) / (2.0 * h);
      gp[idx(iq, ip)] = (e[idx(iq, ip + 1)] - e[idx(iq, ip - 1)]) / (2.0 * h);
    }

  // A seed is the centre of any 2x2 cell block over which both gradient components change sign.
  CriticalPointSet out;
  std::vector<Eigen::Vector2d> found;
  for (int ip = 1; ip + 3 < n; ++ip)
    for (int iq = 1; iq + 3 < n; ++iq) {
      double lo_q = std::numeric_limits<double>::infinity(), hi_q = -lo_q, lo_p = lo_q, hi_p = -lo_q;
      bool complete = true;
      for (int b = 0; b < 3 && complete; ++b)
        for (int a = 0; a < 3; ++a) {
          const double u = gq[idx(iq + a, ip + b)], v = gp[idx(iq + a, ip + b)];
          if (std::isnan(u) || std::isnan(v)) {
            complete = false;
            break;
          }
          lo_q = std::min(lo_q, u);
          hi_q = std::max(hi_q, u);
          lo_p = std::min(lo_p, v);
          hi_p = std::max(hi_p, v);
        }
      if (!complete || lo_q > 0.0 || hi_q < 0.0 || lo_p > 0.0 || hi_p < 0.0) continue;
      const double sq = coord(iq + 1), sp = coord(ip + 1);
      bool near_known = false;
      for (const auto& f : found)
        if (std::hypot(f(0) - sq, f(1) - sp) < 0.5 * h) near_known = true;
      if (near_known) continue;
      const NewtonResult r = newton(land, sq, sp, opts);
      if (!r.ok) {
        out.failures.push_back({sq, sp, r.q, r.p, r.reason});
        continue;
      }
      bool duplicate = false;
      for (const auto& f : found)
        if (std::hypot(f(0) - r.q, f(1) - r.p) < opts.merge_radius) duplicate = true;
      if (duplicate) continue;
      const Derivatives d = gradient_and_hessian(land, r.q, r.p);
      CriticalKind kind;
      if (!classify(d.hessian, kind)) {
        out.failures.push_back({sq, sp, r.q, r.p, "degenerate_hessian"});
        continue;
      }
      found.emplace_back(r.q, r.p);
      out.points.push_back(make_point(r.q, r.p, bloch_from_alpha(r.q, r.p), kind, land.energy(r.q, r.p),
                                      d.hessian, j, false));
    }

  // The boundary circle is the single south pole; examine it in the reflected chart.
  const Derivatives south = reflected_gradient_and_hessian(land, 0.0, 0.0);
  if (south.gradient.norm() <= opts.gradient_accept) {
    CriticalKind kind;
    if (classify(south.hessian, kind)) {
      out.points.push_back(make_point(lim, 0.0, BlochPoint{-1.0, 0.0, 0.0, lim, 0.0}, kind,
                                      land.energy_xyz(-1.0, 0.0, 0.0), south.hessian, j, true));
    } else {
      out.failures.push_back({lim, 0.0, lim, 0.0, "degenerate_hessian"});
    }
  }

  // Total order, so std::sort is deterministic. stable_sort's scratch buffer would drop the
  // over-alignment of the Hessian member under AVX.
  std::sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    if (a.energy != b.energy) return a.energy > b.energy;
    if (a.q != b.q) return a.q < b.q;
    return a.p < b.p;
  });
  return out;
}

std::vector<double> separatrix_energies(const std::vector<CriticalPoint>& points) {
  std::vector<double> out;
  for (const auto& c : points) {
    if (c.kind != CriticalKind::saddle) continue;
    const bool seen = std::any_of(out.begin(), out.end(), [&](double e) { return std::abs(e - c.energy) <= 1e-9; });
    if (!seen) out.push_back(c.energy);
  }
  if (out.empty()) throw NoSaddle("separatrix_energies: landscape has no saddle point");
  std::sort(out.begin(), out.end());
  return out;
}

Raster landscape_raster(const Landscape& land, int n) {
  if (n < 2) throw std::invalid_argument("landscape_raster: n must be >= 2");
  Raster r;
  r.n = n;
  r.origin = -std::sqrt(2.0);
  r.step = 2.0 * std::sqrt(2.0) / (n - 1);
  r.values.assign(static_cast<size_t>(n) * n, std::numeric_limits<double>::quiet_NaN());
  for (int ip = 0; ip < n; ++ip)
    for (int iq = 0; iq < n; ++iq) {
      const double q = r.q(iq), p = r.p(ip);
      if (q * q + p * p >= 2.0) continue;
      try {
        r.values[static_cast<size_t>(ip) * n + iq] = land.energy(q, p);
      } catch (const LandscapeSingularity&) {
      }
    }
  return r;
}

}  // namespace cqs
