#include "cqs/floquet.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cqs/diagnostics.hpp"
#include "cqs/errors.hpp"

namespace cqs {

void validate_drive(const DriveConfig& cfg) {
  if (!(cfg.omega_t > 0.0)) throw std::invalid_argument("DriveConfig: omega_t must be positive");
  if (!std::isfinite(cfg.ht)) throw std::invalid_argument("DriveConfig: hT must be finite");
  if (cfg.is_kicked()) {
    if (!std::isfinite(cfg.k())) throw std::invalid_argument("DriveConfig: K must be finite");
    if (std::abs(cfg.ht) > 1.0 || std::abs(cfg.k()) > 1.0)
      warn("kicked drive outside the regular regime (|hT| <= 1, |K| <= 1)");
  } else if (!std::isfinite(cfg.gt())) {
    throw std::invalid_argument("DriveConfig: GT must be finite");
  }
}

double fold(double x, double omega) {
  double r = x - omega * std::floor((x + 0.5 * omega) / omega);
  if (r >= 0.5 * omega) r -= omega;
  if (r < -0.5 * omega) r += omega;
  return r;
}

namespace {

// exp(-i t Jx), real eigenbasis of Jx.
CMatrix jx_propagator(const SpinSystem& sys, double t) {
  const CVector ph = (cplx(0.0, -t) * sys.jx_eigenvalues.cast<cplx>()).array().exp();
  const CMatrix v = sys.jx_eigenvectors.cast<cplx>();
  return v * ph.asDiagonal() * v.transpose();
}

CVector jz2_phases(const SpinSystem& sys, double t) {
  return (cplx(0.0, -t / (2.0 * sys.j)) * sys.m.array().square().cast<cplx>()).exp().matrix();
}

}  // namespace

CMatrix kicked_floquet(const SpinSystem& sys, const DriveConfig& cfg) {
  if (!cfg.is_kicked()) throw std::invalid_argument("kicked_floquet: drive is not kicked");
  validate_drive(cfg);
  return jx_propagator(sys, cfg.ht) * jz2_phases(sys, cfg.k()).asDiagonal();
}

CMatrix ac_floquet(const SpinSystem& sys, const DriveConfig& cfg, int steps) {
  if (cfg.is_kicked()) throw std::invalid_argument("ac_floquet: drive is not monochromatic");
  if (steps < 1) throw std::invalid_argument("ac_floquet: steps must be >= 1");
  validate_drive(cfg);
  const double delta = 1.0 / steps;
  const double g = cfg.gt(), w = cfg.omega_t;
  const CMatrix field_step = jx_propagator(sys, delta * cfg.ht);
  // Integrated drive phase G sin(Omega t)/Omega; the Jz^2 factors use its exact
  // increments over each half step and bracket the Jx step.
  auto phase = [&](double t) { return g * std::sin(w * t) / w; };
  const RVector m2 = sys.m.array().square();
  const double inv2j = 1.0 / (2.0 * sys.j);
  auto diag = [&](double dt) -> CVector {
    return (cplx(0.0, -dt * inv2j) * m2.cast<cplx>()).array().exp().matrix();
  };

  const Index n = sys.dim;
  CMatrix u = CMatrix::Identity(n, n);
  CMatrix tmp(n, n);
  CVector pending = diag(phase(0.5 * delta) - phase(0.0));
  for (int k = 0; k < steps; ++k) {
    const double t0 = k * delta;
    tmp = pending.asDiagonal() * u;
    u.noalias() = field_step * tmp;
    const CVector closing = diag(phase(t0 + delta) - phase(t0 + 0.5 * delta));
    if (k + 1 < steps) {
      // merge this step's closing factor with the next step's opening factor
      const double t1 = t0 + delta;
      pending = closing.cwiseProduct(diag(phase(t1 + 0.5 * delta) - phase(t1)));
    } else {
      u = closing.asDiagonal() * u;
    }
  }
  return u;
}

CMatrix floquet_operator(const SpinSystem& sys, const DriveConfig& cfg, int steps) {
  return cfg.is_kicked() ? kicked_floquet(sys, cfg) : ac_floquet(sys, cfg, steps);
}

FloquetSpectrum diagonalize_floquet(const CMatrix& f) {
  if (f.rows() != f.cols() || f.rows() == 0)
    throw std::invalid_argument("diagonalize_floquet: matrix must be square and non-empty");
  const double defect = unitarity_defect(f);
  if (!(defect <= 1e-8)) {
    std::ostringstream os;
    os << "diagonalize_floquet: matrix is not unitary (defect " << defect << ")";
    throw std::invalid_argument(os.str());
  }
  // F is normal, so its Schur form is diagonal and the Schur vectors are orthonormal modes.
  Eigen::ComplexSchur<CMatrix> schur(f);
  if (schur.info() != Eigen::Success) throw NumericalError("diagonalize_floquet: Schur decomposition failed");
  const Index n = f.rows();
  RVector raw(n);
  for (Index i = 0; i < n; ++i) raw(i) = fold(-std::arg(schur.matrixT()(i, i)));

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return raw(a) < raw(b); });

  FloquetSpectrum out;
  out.phases.resize(n);
  out.modes.resize(n, n);
  out.residuals.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Index src = order[static_cast<size_t>(i)];
    out.phases(i) = raw(src);
    out.modes.col(i) = schur.matrixU().col(src);
  }
  for (Index i = 0; i < n; ++i) {
    const CVector v = out.modes.col(i);
    out.residuals(i) = (f * v - std::polar(1.0, -out.phases(i)) * v).norm();
  }
  const double worst = out.residuals.maxCoeff();
  if (!(worst <= 1e-8)) {
    std::ostringstream os;
    os << "diagonalize_floquet: eigen-residual " << worst << " exceeds 1e-8";
    throw NumericalError(os.str());
  }
  return out;
}

std::vector<cplx> floquet_traces(const RVector& phases, int n_max) {
  if (n_max < 1) throw std::invalid_argument("floquet_traces: n_max must be >= 1");
  std::vector<cplx> t(static_cast<size_t>(n_max), cplx(0.0));
  for (int n = 1; n <= n_max; ++n) {
    cplx s(0.0);
    for (Index mu = 0; mu < phases.size(); ++mu) s += std::polar(1.0, -n * phases(mu));
    t[static_cast<size_t>(n - 1)] = s;
  }
  return t;
}

std::vector<cplx> floquet_traces(const CMatrix& f, int n_max) {
  return floquet_traces(diagonalize_floquet(f).phases, n_max);
}

std::vector<CVector> stroboscopic_evolve(const CMatrix& f, const CVector& psi0, int periods) {
  if (periods < 0) throw std::invalid_argument("stroboscopic_evolve: L must be >= 0");
  if (psi0.size() != f.cols()) throw std::invalid_argument("stroboscopic_evolve: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("stroboscopic_evolve: initial state is not normalized");
  std::vector<CVector> out;
  out.reserve(static_cast<size_t>(periods) + 1);
  out.push_back(psi0);
  for (int l = 0; l < periods; ++l) out.push_back(f * out.back());
  return out;
}

}  // namespace cqs
