#include "cqs/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cqs/diagnostics.hpp"
#include "cqs/errors.hpp"

namespace cqs {

std::vector<ModePoint> mode_magnetization(const FloquetSpectrum& spec, const EffectiveHamiltonian& heff,
                                          const SpinSystem& sys) {
  if (spec.modes.rows() != sys.dim || heff.matrix.rows() != sys.dim)
    throw std::invalid_argument("mode_magnetization: dimension mismatch");
  std::vector<ModePoint> out;
  out.reserve(static_cast<size_t>(spec.modes.cols()));
  for (Index mu = 0; mu < spec.modes.cols(); ++mu) {
    const CVector v = spec.modes.col(mu);
    const double jx = std::clamp(expectation(sys.jx, v).real() / sys.j, -1.0, 1.0);
    out.push_back({expectation(heff.matrix, v).real(), jx});
  }
  return out;
}

Envelope upper_envelope(const std::vector<ModePoint>& modes, int bins) {
  if (bins < 3) throw std::invalid_argument("upper_envelope: bins must be >= 3");
  std::vector<ModePoint> upper;
  for (const auto& m : modes)
    if (m.jx >= 0.0) upper.push_back(m);
  Envelope env;
  if (upper.size() < 3) return env;
  double lo = upper.front().energy, hi = lo;
  for (const auto& m : upper) {
    lo = std::min(lo, m.energy);
    hi = std::max(hi, m.energy);
  }
  env.spacing = (hi - lo) / bins;
  if (!(env.spacing > 0.0)) return env;
  std::vector<int> best(static_cast<size_t>(bins), -1);
  for (size_t i = 0; i < upper.size(); ++i) {
    const int b = std::min(bins - 1, static_cast<int>((upper[i].energy - lo) / env.spacing));
    int& slot = best[static_cast<size_t>(b)];
    if (slot < 0 || upper[i].jx > upper[static_cast<size_t>(slot)].jx) slot = static_cast<int>(i);
  }
  for (int b : best) {
    if (b < 0) continue;
    env.energy.push_back(upper[static_cast<size_t>(b)].energy);
    env.jx.push_back(upper[static_cast<size_t>(b)].jx);
  }
  return env;
}

std::optional<Cusp> detect_cusp(const Envelope& env) {
  const size_t n = env.energy.size();
  if (n < 3) return std::nullopt;
  std::optional<Cusp> best;
  for (size_t i = 1; i + 1 < n; ++i) {
    const double s0 = (env.jx[i] - env.jx[i - 1]) / (env.energy[i] - env.energy[i - 1]);
    const double s1 = (env.jx[i + 1] - env.jx[i]) / (env.energy[i + 1] - env.energy[i]);
    if ((s0 > 0.0) == (s1 > 0.0)) continue;
    const double strength = std::abs(s1 - s0) / (0.5 * (env.energy[i + 1] - env.energy[i - 1]));
    if (!best || strength > best->strength) best = Cusp{env.energy[i], strength};
  }
  return best;
}

namespace {

enum class Anchor { maximum, minimum, none };

struct ContourPoint {
  double q, p, v;
};

bool prefer(const ContourPoint& a, const ContourPoint& b) {
  // above the finite-difference noise of V, so mirror images count as ties
  const double tie = 1e-9 * std::max(1.0, std::max(a.v, b.v));
  if (std::abs(a.v - b.v) > tie) return a.v < b.v;
  if ((a.p >= 0.0) != (b.p >= 0.0)) return a.p >= 0.0;
  if ((a.q >= 0.0) != (b.q >= 0.0)) return a.q >= 0.0;
  return false;
}

// Newton steps along the gradient onto E = target.
bool project(const Landscape& land, double& q, double& p, double target, double tol) {
  for (int it = 0; it < 50; ++it) {
    double e;
    try {
      e = land.energy(q, p);
    } catch (const std::exception&) {
      return false;
    }
    if (std::abs(e - target) <= 0.01 * tol) return true;
    const Eigen::Vector2d g = landscape_gradient(land, q, p);
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0)) return false;
    q -= (e - target) * g(0) / g2;
    p -= (e - target) * g(1) / g2;
    if (q * q + p * p >= 2.0) return false;
  }
  try {
    return std::abs(land.energy(q, p) - target) <= tol;
  } catch (const std::exception&) {
    return false;
  }
}

// Golden-section search for minimal V along the contour through (q, p).
ContourPoint refine(const Landscape& land, ContourPoint start, double target, double span, double tol) {
  const Eigen::Vector2d g = landscape_gradient(land, start.q, start.p);
  if (!(g.norm() > 0.0)) return start;
  const Eigen::Vector2d tangent = Eigen::Vector2d(-g(1), g(0)).normalized();
  auto eval = [&](double s, ContourPoint& out) {
    double q = start.q + s * tangent(0), p = start.p + s * tangent(1);
    if (q * q + p * p >= 2.0 || !project(land, q, p, target, tol)) return std::numeric_limits<double>::infinity();
    out = {q, p, velocity(land, q, p)};
    return out.v;
  };
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = -span, b = span;
  ContourPoint pc{}, pd{};
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = eval(c, pc), fd = eval(d, pd);
  for (int it = 0; it < 40; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      pd = pc;
      c = b - ratio * (b - a);
      fc = eval(c, pc);
    } else {
      a = c;
      c = d;
      fc = fd;
      pc = pd;
      d = a + ratio * (b - a);
      fd = eval(d, pd);
    }
  }
  const ContourPoint& best = fc < fd ? pc : pd;
  if (std::isfinite(std::min(fc, fd)) && best.v <= start.v) return best;
  return start;
}

}  // namespace

std::vector<BlochPoint> minimal_velocity_path(const Landscape& land, const CriticalPoint& from,
                                              const CriticalPoint& to, int n_points, const PathOptions& opts) {
  if (n_points < 1) throw std::invalid_argument("minimal_velocity_path: n_points must be >= 1");
  if (from.energy == to.energy) throw std::invalid_argument("minimal_velocity_path: endpoints share an energy");
  if (opts.raster < 8) throw std::invalid_argument("minimal_velocity_path: raster too coarse");

  const CriticalPoint* anchor = nullptr;
  if (from.kind != CriticalKind::saddle)
    anchor = &from;
  else if (to.kind != CriticalKind::saddle)
    anchor = &to;
  const Anchor kind = anchor == nullptr                              ? Anchor::none
                      : anchor->kind == CriticalKind::maximum ? Anchor::maximum
                                                              : Anchor::minimum;

  const Raster r = landscape_raster(land, opts.raster);
  const int n = r.n;
  auto id = [&](int iq, int ip) { return static_cast<size_t>(ip) * n + iq; };

  std::vector<BlochPoint> out;
  for (int k = 1; k <= n_points; ++k) {
    const double target = from.energy + (to.energy - from.energy) * k / (n_points + 1.0);

    // Level-set component (4-connected) that contains the anchoring extremum.
    std::vector<char> inside(r.values.size(), 0);
    if (kind != Anchor::none) {
      auto in_set = [&](size_t i) {
        const double v = r.values[i];
        if (std::isnan(v)) return false;
        return kind == Anchor::maximum ? v >= target : v <= target;
      };
      std::deque<size_t> queue;
      auto seed = [&](int iq, int ip) {
        const size_t i = id(iq, ip);
        if (!inside[i] && in_set(i)) {
          inside[i] = 1;
          queue.push_back(i);
        }
      };
      if (anchor->on_boundary) {
        for (int ip = 0; ip < n; ++ip)
          for (int iq = 0; iq < n; ++iq) {
            if (std::isnan(r.at(iq, ip))) continue;
            const bool rim = iq == 0 || ip == 0 || iq == n - 1 || ip == n - 1 || std::isnan(r.at(iq - 1, ip)) ||
                             std::isnan(r.at(iq + 1, ip)) || std::isnan(r.at(iq, ip - 1)) ||
                             std::isnan(r.at(iq, ip + 1));
            if (rim) seed(iq, ip);
          }
      } else {
        const int cq = static_cast<int>(std::lround((anchor->q - r.origin) / r.step));
        const int cp = static_cast<int>(std::lround((anchor->p - r.origin) / r.step));
        for (int ip = std::max(0, cp - 1); ip <= std::min(n - 1, cp + 1); ++ip)
          for (int iq = std::max(0, cq - 1); iq <= std::min(n - 1, cq + 1); ++iq) seed(iq, ip);
      }
      while (!queue.empty()) {
        const size_t i = queue.front();
        queue.pop_front();
        const int iq = static_cast<int>(i % n), ip = static_cast<int>(i / n);
        if (iq > 0) seed(iq - 1, ip);
        if (iq + 1 < n) seed(iq + 1, ip);
        if (ip > 0) seed(iq, ip - 1);
        if (ip + 1 < n) seed(iq, ip + 1);
      }
    }

    // Marching squares: crossings on raster edges with at least one end in the component.
    std::vector<ContourPoint> crossings;
    auto edge = [&](int aq, int ap, int bq, int bp) {
      const double ea = r.at(aq, ap), eb = r.at(bq, bp);
      if (std::isnan(ea) || std::isnan(eb)) return;
      if ((ea >= target) == (eb >= target)) return;
      if (kind != Anchor::none && !inside[id(aq, ap)] && !inside[id(bq, bp)]) return;
      const double t = (target - ea) / (eb - ea);
      const double q = r.q(aq) + t * (r.q(bq) - r.q(aq));
      const double p = r.p(ap) + t * (r.p(bp) - r.p(ap));
      crossings.push_back({q, p, velocity(land, q, p)});
    };
    for (int ip = 0; ip < n; ++ip)
      for (int iq = 0; iq < n; ++iq) {
        if (iq + 1 < n) edge(iq, ip, iq + 1, ip);
        if (ip + 1 < n) edge(iq, ip, iq, ip + 1);
      }
    if (crossings.empty()) {
      std::ostringstream os;
      os << "minimal_velocity_path: no contour at E_G T = " << target;
      throw EmptyContour(os.str(), target);
    }
    ContourPoint best = crossings.front();
    for (const auto& c : crossings)
      if (prefer(c, best)) best = c;

    double q = best.q, p = best.p;
    if (!project(land, q, p, target, opts.energy_tolerance)) {
      std::ostringstream os;
      os << "minimal_velocity_path: projection onto E_G T = " << target << " failed";
      throw EmptyContour(os.str(), target);
    }
    const ContourPoint refined = refine(land, {q, p, velocity(land, q, p)}, target, 2.0 * r.step,
                                        opts.energy_tolerance);
    out.push_back(bloch_from_alpha(refined.q, refined.p));
  }
  return out;
}

double time_averaged_observable(const CMatrix& f, const CVector& psi0, int periods, const CMatrix& op) {
  if (periods < 0) throw std::invalid_argument("time_averaged_observable: L must be >= 0");
  if (hermiticity_defect(op) > 1e-10) throw std::invalid_argument("time_averaged_observable: observable is not Hermitian");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("time_averaged_observable: initial state is not normalized");
  CVector psi = psi0, next(psi0.size());
  double acc = 0.0;
  for (int l = 0; l <= periods; ++l) {
    acc += expectation(op, psi).real();
    if (l < periods) {
      next.noalias() = f * psi;
      psi.swap(next);
    }
  }
  return acc / (periods + 1.0);
}

const char* to_string(Branch b) { return b == Branch::min_to_saddle ? "min-to-saddle" : "saddle-to-max"; }

ProtocolResult run_protocol(const SpinSystem& sys, const CMatrix& f, const EffectiveHamiltonian& heff,
                            int periods, const std::vector<ProtocolPath>& paths, bool check_convergence) {
  if (periods < 0) throw std::invalid_argument("run_protocol: L must be >= 0");
  ProtocolResult res;
  const CMatrix jx_scaled = sys.jx / sys.j;
  for (const auto& path : paths) {
    for (size_t i = 0; i < path.points.size(); ++i) {
      try {
        ProtocolRecord rec;
        rec.r0 = path.points[i];
        rec.gamma = gamma_from_bloch(rec.r0);
        const CVector psi0 = spin_coherent_state(sys, rec.gamma).amplitudes;
        rec.energy = expectation(heff.matrix, psi0).real();
        rec.periods = periods;
        rec.branch = path.branch;
        // Streaming average, keeping the state at l = L for the drift check.
        CVector psi = psi0, next(psi0.size());
        double acc = 0.0, acc_long = 0.0;
        const int total = check_convergence ? 2 * periods : periods;
        for (int l = 0; l <= total; ++l) {
          const double v = expectation(jx_scaled, psi).real();
          if (l <= periods) acc += v;
          acc_long += v;
          if (l == periods) rec.drift = std::abs(expectation(heff.matrix, psi).real() - rec.energy);
          if (l < total) {
            next.noalias() = f * psi;
            psi.swap(next);
          }
        }
        rec.jx_avg = std::clamp(acc / (periods + 1.0), -1.0, 1.0);
        if (check_convergence) {
          rec.convergence_gap = std::abs(rec.jx_avg - acc_long / (total + 1.0));
          if (rec.convergence_gap > 1e-2) {
            std::ostringstream os;
            os << "protocol: time average not converged at L=" << periods << " (gap " << rec.convergence_gap << ")";
            warn(os.str());
          }
        }
        res.records.push_back(rec);
      } catch (const std::exception& e) {
        res.failures.push_back({path.branch, i, e.what()});
      }
    }
  }
  return res;
}

std::vector<ProtocolRecord> mirror_records(const std::vector<ProtocolRecord>& records) {
  std::vector<ProtocolRecord> out = records;
  for (auto& r : out) {
    r.energy = -r.energy;
    r.jx_avg = -r.jx_avg;
    r.r0 = bloch_from_xyz(-r.r0.x, -r.r0.y, r.r0.z);
    r.gamma = r.r0.x > -1.0 + 1e-14 ? gamma_from_bloch(r.r0) : cplx(std::numeric_limits<double>::infinity(), 0.0);
    r.mirrored = true;
  }
  return out;
}

double mode_curve_value(const std::vector<ModePoint>& modes, double energy, double jx_hint) {
  const ModePoint* below = nullptr;
  const ModePoint* above = nullptr;
  std::vector<const ModePoint*> lower, upper;
  for (const auto& m : modes) (m.energy <= energy ? lower : upper).push_back(&m);
  auto nearest = [&](std::vector<const ModePoint*>& side) -> const ModePoint* {
    std::sort(side.begin(), side.end(), [&](const ModePoint* a, const ModePoint* b) {
      return std::abs(a->energy - energy) < std::abs(b->energy - energy);
    });
    const ModePoint* pick = nullptr;
    for (size_t i = 0; i < side.size() && i < 3; ++i)
      if (!pick || std::abs(side[i]->jx - jx_hint) < std::abs(pick->jx - jx_hint)) pick = side[i];
    return pick;
  };
  below = nearest(lower);
  above = nearest(upper);
  if (!below && !above) throw std::invalid_argument("mode_curve_value: no modes");
  if (!below) return above->jx;
  if (!above) return below->jx;
  const double span = above->energy - below->energy;
  if (!(span > 0.0)) return below->jx;
  const double t = (energy - below->energy) / span;
  return below->jx + t * (above->jx - below->jx);
}

}  // namespace cqs
